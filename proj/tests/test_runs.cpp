#include "cascade/runs.hpp"
#include "cascade/scenario_file.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

using namespace cascade;
using doctest::Approx;

namespace {

std::vector<std::string> split(const std::string& line, char sep = ',') {
    std::vector<std::string> out;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, sep);) out.push_back(cell);
    return out;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::filesystem::path scratch(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / "cascade_runs_test";
    std::filesystem::create_directories(dir);
    return dir / name;
}

} // namespace

TEST_CASE("trajectory CSV layout") {
    Scenario sc = preset_scenario(2);
    sc.config.module_count = 2;
    sc.config.voltage_ratio = 2.2;
    sc.t_end = 0.05;
    std::ostringstream out;
    write_trajectory_csv(out, simulate(sc));
    std::istringstream in(out.str());
    std::string header;
    std::getline(in, header);
    CHECK(header == "t,delta_1,delta_2,P_1,P_2,Q_1,Q_2,f_1,f_2,pf_1,pf_2");
    int rows = 0;
    for (std::string line; std::getline(in, line);) {
        CHECK(split(line).size() == 11);
        ++rows;
    }
    CHECK(rows == 6);
}

TEST_CASE("run_simulate on case 2") {
    const auto csv = scratch("case2.csv");
    const RunReport rep = run_simulate(preset_scenario(2), csv);
    CHECK(rep.outcome.kind == Outcome::Kind::Settled);
    REQUIRE(rep.files.size() == 2);
    CHECK(std::filesystem::exists(scratch("case2.report.txt")));
    CHECK(rep.text.find("SETTLED") != std::string::npos);
    REQUIRE(rep.stability);
    CHECK(rep.stability->margin == Approx(0.146781).epsilon(1e-5));

    const std::string body = slurp(csv);
    const auto last_start = body.rfind('\n', body.size() - 2);
    const auto cells = split(body.substr(last_start + 1, body.size() - last_start - 2));
    REQUIRE(cells.size() == 31);
    CHECK(std::stod(cells[0]) == Approx(10.0));
    for (int i = 0; i < 6; ++i) {
        CHECK(std::stod(cells[7 + i]) == Approx(4000.0).epsilon(0.01));
        CHECK(std::stod(cells[19 + i]) == Approx(50.0).epsilon(1e-5));
    }
    CHECK(slurp(scratch("case2.report.txt")).find("[modules]") != std::string::npos);
}

TEST_CASE("run_simulate reports divergence for case 1") {
    const RunReport rep = run_simulate(preset_scenario(1), {});
    CHECK(rep.outcome.kind == Outcome::Kind::Diverged);
    CHECK(rep.text.find("DIVERGED") != std::string::npos);
    CHECK(rep.files.empty());
}

TEST_CASE("report values match the underlying operations") {
    const Scenario sc = preset_scenario(3);
    const RunReport rep = run_simulate(sc, {});
    const Trajectory t = simulate(sc);
    CHECK(rep.outcome.kind == t.outcome.kind);
    CHECK(rep.outcome.time == t.outcome.time);
    CHECK(rep.stability->margin == analyze(sc.config).margin);
    CHECK(rep.scenario_text == format_scenario(sc));
}

TEST_CASE("run_analyze") {
    const AnalyzeResult a2 = run_analyze(preset_scenario(2));
    CHECK(a2.report.verdict == Verdict::Stable);
    CHECK(a2.text.find("+0.146781") != std::string::npos);
    CHECK(a2.text.find("0.98400") != std::string::npos);
    CHECK(a2.text.find("0.983") != std::string::npos);
    CHECK(a2.json.find("\"verdict\": \"stable\"") != std::string::npos);

    const AnalyzeResult a1 = run_analyze(preset_scenario(1));
    CHECK(a1.report.verdict == Verdict::Unstable);
    CHECK(a1.report.margin == Approx(-0.243545).epsilon(1e-5));
    CHECK(a1.text.find("reference simulation") == std::string::npos);
}

TEST_CASE("run_sweep") {
    DesignConstraints c;
    c.ratio_low = 5.5;
    c.ratio_high = 8.0;
    c.ratio_step = 0.1;
    const auto csv = scratch("sweep.csv");
    const SweepResult res = run_sweep(preset_scenario(2), c, csv);
    CHECK(res.rows.size() == 26);
    REQUIRE(res.recommendation.row);
    CHECK(res.recommendation.row->voltage_ratio == Approx(6.2));
    const std::string body = slurp(csv);
    CHECK(body.rfind("M,V_star,feasible,delta_bar,margin,slow_eigenvalue,settling_estimate,Q,pf,verdict\n", 0) == 0);

    c.ratio_high = c.ratio_low;
    CHECK_THROWS_AS(run_sweep(preset_scenario(2), c, {}), InvalidConfig);
}

TEST_CASE("same seed gives identical CSV bytes") {
    for (int preset = 1; preset <= 3; ++preset) {
        std::ostringstream a, b;
        write_trajectory_csv(a, simulate(preset_scenario(preset)));
        write_trajectory_csv(b, simulate(preset_scenario(preset)));
        CHECK(a.str() == b.str());
    }
    Scenario other = preset_scenario(2);
    other.seed = 2;
    std::ostringstream a, b;
    write_trajectory_csv(a, simulate(preset_scenario(2)));
    write_trajectory_csv(b, simulate(other));
    CHECK(a.str() != b.str());
}
