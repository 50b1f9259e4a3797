#include "funcmod/report.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <sstream>

#include "funcmod/csv.hpp"
#include "funcmod/errors.hpp"

namespace funcmod {

namespace fs = std::filesystem;

namespace {

std::string metric_cell(const std::optional<double>& v) {
    return v ? format_double(*v) : "";
}

std::string pct(const std::optional<double>& v) {
    if (!v) return "-";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.1f", *v * 100.0);
    return buf;
}

std::string fixed(const std::optional<double>& v) {
    if (!v) return "-";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", *v);
    return buf;
}

} // namespace

std::string metrics_csv(const std::vector<EvalReport>& reports) {
    std::string out =
        "condition,dataset_id,recipe_hash,n_test,accuracy,accuracy_se,mse,rmse,"
        "n_extraction_failures\n";
    for (const auto& r : reports) {
        out += csv_escape(r.condition) + "," + csv_escape(r.dataset_id) + "," +
               csv_escape(r.recipe_hash) + "," + std::to_string(r.metrics.n_test) + "," +
               metric_cell(r.metrics.accuracy) + "," + metric_cell(r.metrics.accuracy_se) + "," +
               metric_cell(r.metrics.mse) + "," + metric_cell(r.metrics.rmse) + "," +
               std::to_string(r.metrics.n_extraction_failures) + "\n";
    }
    return out;
}

void write_run_report(const std::string& run_dir, const std::vector<EvalReport>& reports,
                      const nlohmann::json& run_config) {
    fs::create_directories(run_dir);
    write_file_atomic(run_dir + "/run_config.json", run_config.dump(2) + "\n");
    for (const auto& r : reports)
        write_file_atomic(run_dir + "/report_" + r.condition + ".json", r.to_json().dump(2) + "\n");
    write_file_atomic(run_dir + "/metrics.csv", metrics_csv(reports));
}

std::vector<EvalReport> load_run_reports(const std::string& run_dir) {
    std::vector<EvalReport> reports;
    std::vector<std::string> paths;
    if (!fs::is_directory(run_dir)) throw IoError("not a run directory: " + run_dir);
    for (const auto& entry : fs::directory_iterator(run_dir)) {
        std::string name = entry.path().filename().string();
        if (name.rfind("report_", 0) == 0 && entry.path().extension() == ".json")
            paths.push_back(entry.path().string());
    }
    std::sort(paths.begin(), paths.end());
    for (const auto& p : paths)
        reports.push_back(EvalReport::from_json(nlohmann::json::parse(read_file(p))));
    return reports;
}

std::string comparison_table(const std::vector<EvalReport>& reports) {
    // column per condition, rows for the headline metrics
    std::vector<std::string> names;
    for (const auto& r : reports) names.push_back(r.condition);

    size_t label_w = 22;
    std::vector<size_t> widths;
    for (const auto& n : names) widths.push_back(std::max<size_t>(n.size() + 2, 14));

    std::ostringstream out;
    auto line = [&]() {
        out << std::string(label_w, '-');
        for (size_t w : widths) out << "+" << std::string(w, '-');
        out << "\n";
    };
    auto row = [&](const std::string& label, auto cell) {
        out << label << std::string(label_w - label.size(), ' ');
        for (size_t i = 0; i < reports.size(); ++i) {
            std::string c = cell(reports[i]);
            out << "|" << " " << c << std::string(widths[i] > c.size() + 1 ? widths[i] - c.size() - 1 : 0, ' ');
        }
        out << "\n";
    };

    line();
    row("", [&](const EvalReport& r) { return r.condition; });
    line();
    row("test accuracy (%)", [&](const EvalReport& r) { return pct(r.metrics.accuracy); });
    row("std error (%)", [&](const EvalReport& r) { return pct(r.metrics.accuracy_se); });
    row("mse", [&](const EvalReport& r) { return fixed(r.metrics.mse); });
    row("rmse", [&](const EvalReport& r) { return fixed(r.metrics.rmse); });
    row("n test", [&](const EvalReport& r) { return std::to_string(r.metrics.n_test); });
    row("extraction failures",
        [&](const EvalReport& r) { return std::to_string(r.metrics.n_extraction_failures); });
    line();
    return out.str();
}

} // namespace funcmod
