#include <doctest.h>

#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "funcmod/cli.hpp"
#include "funcmod/csv.hpp"
#include "funcmod/dataset.hpp"

using namespace funcmod;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("funcmod_cli_" + std::to_string(reinterpret_cast<uintptr_t>(this)));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string str(const std::string& sub = "") const {
        return sub.empty() ? path.string() : (path / sub).string();
    }
};

void write_json(const std::string& path, const json& j) {
    std::ofstream out(path);
    out << j.dump(2) << "\n";
}

} // namespace

TEST_CASE("synth writes the requested sample set") {
    TempDir dir;
    int rc = run_cli({"synth", "--family", "linear", "--params", "2,1", "--n", "25", "--seed",
                      "3", "--out", dir.str("s")});
    CHECK(rc == 0);
    SeriesDataset s = load_series(dir.str("s/sampleset.csv"));
    CHECK(s.points.size() == 25);
    CHECK(fs::exists(dir.str("s/spec.json")));
}

TEST_CASE("gen-adult and perturb produce a renamed corpus") {
    TempDir dir;
    CHECK(run_cli({"gen-adult", "--n", "150", "--seed", "7", "--out", dir.str("a")}) == 0);
    CHECK(fs::exists(dir.str("a/adult.csv")));
    CHECK(run_cli({"perturb", "--data", dir.str("a/adult.csv"), "--schema",
                   dir.str("a/adult.schema.json"), "--recipe", "default-adult", "--seed", "11",
                   "--out", dir.str("p")}) == 0);
    TabularDataset p = load_tabular(dir.str("p/perturbed.csv"), dir.str("p/perturbed.schema.json"));
    CHECK(p.feature_index("degree").has_value());
    CHECK(!p.feature_index("education").has_value());
    CHECK(p.n_rows() == 150);
    CHECK(fs::exists(dir.str("p/recipe.json")));
}

TEST_CASE("gen-co2 emits a monthly series") {
    TempDir dir;
    CHECK(run_cli({"gen-co2", "--start", "1958.25", "--end", "1970", "--seed", "5", "--out",
                   dir.str("c")}) == 0);
    SeriesDataset s = load_series(dir.str("c/co2.csv"), dir.str("c/co2.meta.json"));
    CHECK(s.points.size() > 100);
    CHECK(s.context.has_value());
}

TEST_CASE("eval with the mock backend is deterministic byte for byte") {
    TempDir dir;
    json cfg;
    cfg["dataset"] = {{"kind", "adultlike"}, {"n", 260}, {"seed", 7}};
    cfg["recipe"] = "default-adult";
    cfg["split"] = {{"train_n", 80}, {"test_n", 40}};
    cfg["conditions"] = {"llm_without_domain", "llm_with_domain", "mlp"};
    cfg["mlp"] = {{"hidden", 16}, {"layers", 3}, {"epochs", 4}, {"batch_size", 16}};
    cfg["seed"] = 5;
    write_json(dir.str("run.json"), cfg);

    CHECK(run_cli({"eval", "--config", dir.str("run.json"), "--backend", "mock", "--out",
                   dir.str("r1")}) == 0);
    CHECK(run_cli({"eval", "--config", dir.str("run.json"), "--backend", "mock", "--out",
                   dir.str("r2")}) == 0);

    std::string m1 = read_file(dir.str("r1/metrics.csv"));
    std::string m2 = read_file(dir.str("r2/metrics.csv"));
    CHECK(m1 == m2);
    CHECK(m1.find("llm_without_domain") != std::string::npos);
    CHECK(m1.find("llm_with_domain") != std::string::npos);
    CHECK(m1.find("mlp") != std::string::npos);
    CHECK(fs::exists(dir.str("r1/transcripts/llm_without_domain.jsonl")));
    CHECK(fs::exists(dir.str("r1/report_mlp.json")));
    CHECK(fs::exists(dir.str("r1/seeds.json")));

    // --mode raw drops the with-domain condition
    CHECK(run_cli({"eval", "--config", dir.str("run.json"), "--backend", "mock", "--mode", "raw",
                   "--out", dir.str("r3")}) == 0);
    std::string m3 = read_file(dir.str("r3/metrics.csv"));
    CHECK(m3.find("llm_with_domain") == std::string::npos);
}

TEST_CASE("report renders a comparison table") {
    TempDir dir;
    json cfg;
    cfg["dataset"] = {{"kind", "adultlike"}, {"n", 200}, {"seed", 3}};
    cfg["split"] = {{"train_n", 60}, {"test_n", 30}};
    cfg["conditions"] = {"llm_without_domain", "mlp"};
    cfg["mlp"] = {{"hidden", 8}, {"layers", 3}, {"epochs", 3}};
    cfg["seed"] = 2;
    write_json(dir.str("run.json"), cfg);
    REQUIRE(run_cli({"eval", "--config", dir.str("run.json"), "--backend", "mock", "--out",
                     dir.str("run")}) == 0);
    CHECK(run_cli({"report", "--run", dir.str("run"), "--out", dir.str("rep")}) == 0);
    std::string table = read_file(dir.str("rep/comparison.txt"));
    CHECK(table.find("llm_without_domain") != std::string::npos);
    CHECK(table.find("mlp") != std::string::npos);
    CHECK(table.find("test accuracy") != std::string::npos);
    CHECK(fs::exists(dir.str("rep/comparison.csv")));
    CHECK(fs::exists(dir.str("rep/accuracy.svg")));
    std::string svg = read_file(dir.str("rep/accuracy.svg"));
    CHECK(svg.find("<svg") != std::string::npos);
}

TEST_CASE("select-features writes oracle and llm subsets") {
    TempDir dir;
    json cfg;
    cfg["dataset"] = {{"kind", "adultlike"}, {"n", 700}, {"seed", 5}};
    cfg["split"] = {{"train_n", 500}, {"selection_n", 60}};
    cfg["mlp"] = {{"hidden", 12}, {"layers", 3}, {"epochs", 4}};
    cfg["seed"] = 4;
    write_json(dir.str("run.json"), cfg);
    CHECK(run_cli({"select-features", "--config", dir.str("run.json"), "--k", "3", "--backend",
                   "mock", "--out", dir.str("fs")}) == 0);
    json result = json::parse(read_file(dir.str("fs/feature_selection.json")));
    CHECK(result["k"] == 3);
    CHECK(result.contains("mi_greedy"));
    CHECK(result.contains("mi_exhaustive"));
    CHECK(result["mi_greedy"]["names"].size() == 3);
    CHECK(result.contains("llm_without_domain"));
    CHECK(result.contains("llm_with_domain"));
}

TEST_CASE("series eval runs the gp baselines") {
    TempDir dir;
    json cfg;
    cfg["dataset"] = {{"kind", "co2like"}, {"start", 1958.25}, {"end", 1994.0}, {"seed", 5}};
    cfg["recipe"] = "default-series";
    cfg["conditions"] = {"gp:rbf"};
    cfg["gp"] = {{"restarts", 1}, {"steps", 8}};
    cfg["seed"] = 3;
    write_json(dir.str("run.json"), cfg);
    CHECK(run_cli({"baseline", "--config", dir.str("run.json"), "--out", dir.str("g")}) == 0);
    std::string metrics = read_file(dir.str("g/metrics.csv"));
    CHECK(metrics.find("gp:rbf") != std::string::npos);
    json report = json::parse(read_file(dir.str("g/report_gp:rbf.json")));
    CHECK(report["metrics"].contains("rmse"));
}

TEST_CASE("bad arguments exit non-zero") {
    CHECK(run_cli({"eval", "--config", "/nonexistent/run.json", "--out", "/tmp/x"}) != 0);
    CHECK(run_cli({"definitely-not-a-command"}) != 0);
    CHECK(run_cli({}) != 0);
}
