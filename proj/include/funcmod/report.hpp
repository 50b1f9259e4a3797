#pragma once

#include <string>
#include <vector>

#include "funcmod/evaluation.hpp"

namespace funcmod {

// Run-directory layout:
//   run_config.json      resolved configuration snapshot
//   seeds.json           derived stream labels
//   report_<cond>.json   one EvalReport per condition
//   metrics.csv          one row per condition (canonical formatting)
//   transcripts/<cond>.jsonl
void write_run_report(const std::string& run_dir, const std::vector<EvalReport>& reports,
                      const nlohmann::json& run_config);

std::string metrics_csv(const std::vector<EvalReport>& reports);

std::vector<EvalReport> load_run_reports(const std::string& run_dir);

// Plain-text comparison table, one condition per column.
std::string comparison_table(const std::vector<EvalReport>& reports);

} // namespace funcmod
