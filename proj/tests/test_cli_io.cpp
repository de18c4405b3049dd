#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "graphflow/cli_io.hpp"
#include "graphflow/errors.hpp"

using namespace graphflow;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(bool(in));
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) out.push_back(line);
    return out;
}

// fresh scratch directory per test case
fs::path scratch(const std::string& name) {
    fs::path dir = fs::temp_directory_path() / ("graphflow_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

bool mentions(const std::vector<std::string>& errs, const std::string& what) {
    for (const std::string& e : errs)
        if (e.find(what) != std::string::npos) return true;
    return false;
}

} // namespace

TEST_CASE("a minimal config fills the remaining defaults") {
    RunConfig cfg = parse_config("domain.kind = sphere\n"
                                 "target.kind = sphere\n"
                                 "map.family = dilation\n"
                                 "map.dilation = 0.5\n"
                                 "resolution = 64\n");
    CHECK(cfg == default_config());
    CHECK(cfg.cfl_safety == 0.2);
    CHECK(cfg.t_max == 10.0);
    CHECK(cfg.monitor_stride == 20);
    CHECK(cfg.output_dir == "out");
    CHECK(theorem_compliant(cfg));
}

TEST_CASE("comments, spacing, and blank lines are immaterial") {
    RunConfig cfg = parse_config("# header comment\n"
                                 "\n"
                                 "  resolution=32   # trailing note\n"
                                 "\tt_max =  2.5\n");
    CHECK(cfg.resolution == 32);
    CHECK(cfg.t_max == 2.5);
}

TEST_CASE("a bad config reports every violation at once") {
    try {
        parse_config("resolution = 4\n"
                     "cfl_safety = fast\n"
                     "banana = 1\n"
                     "tol_eps = -1e-3\n"
                     "t_max = 1\n"
                     "t_max = 2\n"
                     "map.family = rotation\n");
        FAIL("expected a ConfigError");
    } catch (const ConfigError& e) {
        const auto& v = e.violations();
        CHECK(mentions(v, "resolution"));
        CHECK(mentions(v, "cfl_safety"));
        CHECK(mentions(v, "unknown key 'banana'"));
        CHECK(mentions(v, "tol_eps"));
        CHECK(mentions(v, "duplicate key 't_max'"));
        CHECK(mentions(v, "map.family"));
        CHECK(v.size() >= 6);
    }
}

TEST_CASE("kind and curvature sign mismatches are named by key") {
    try {
        parse_config("domain.kind = hyperbolic\n"
                     "domain.curvature = -1\n"
                     "target.kind = flat\n"
                     "target.curvature = 1\n"
                     "domain.dimension = 3\n");
        FAIL("expected a ConfigError");
    } catch (const ConfigError& e) {
        const auto& v = e.violations();
        CHECK(mentions(v, "domain.kind"));
        CHECK(mentions(v, "target.kind"));
        CHECK(mentions(v, "domain.dimension"));
    }

    try {
        parse_config("target.kind = hyperbolic\ntarget.curvature = 1\n");
        FAIL("expected a ConfigError");
    } catch (const ConfigError& e) {
        CHECK(mentions(e.violations(), "target.curvature"));
    }
}

TEST_CASE("a unit dilation and beyond is exploratory but accepted") {
    RunConfig cfg = parse_config("map.family = dilation\n"
                                 "map.dilation = 1.5\n");
    CHECK(cfg.map.dilation_factor == 1.5);
    CHECK_FALSE(theorem_compliant(cfg));

    RunConfig ident = parse_config("map.family = identity\n");
    CHECK_FALSE(theorem_compliant(ident));

    RunConfig con = parse_config("map.family = constant\n");
    CHECK(theorem_compliant(con));
}

TEST_CASE("emitted configs parse back to the same values") {
    RunConfig a = default_config();
    CHECK(parse_config(emit_config(a)) == a);

    RunConfig b;
    b.domain.curvature = 4.0;
    b.target.kind = "hyperbolic";
    b.target.curvature = -1.0;
    b.map.family = "constant";
    b.map.constant_chart = 1;
    b.map.constant_y0 = 0.1 + 0.2; // not representable as a short decimal
    b.map.constant_y1 = -3.0e-17;
    b.resolution = 96;
    b.cfl_safety = 0.0625;
    b.t_max = 7.25;
    b.diam_tol = 1e-5;
    b.tol_eps = 2e-3;
    b.tol_logdet = 1e-9;
    b.monitor_stride = 3;
    b.snapshot_stride = 11;
    b.tracker_stride = 1;
    b.output_dir = "runs/deep";
    b.seed = 123456789UL;
    b.sigma = 0.5;
    b.mu = 2.0;
    CHECK(parse_config(emit_config(b)) == b);
}

TEST_CASE("plot files carry one row per sample") {
    fs::path dir = scratch("plot");
    MonitorReport report;

    emit_plotdata(report, dir.string());
    std::string empty = slurp(dir / "plot_eps_min.csv");
    CHECK(empty == "t,eps_min\n");

    MonitorSample s;
    s.t = 0.0;
    report.samples.assign(3, s);
    report.samples[1].t = 0.5;
    report.samples[2].t = 1.0;
    report.samples[2].eps_min = 0.75;
    emit_plotdata(report, dir.string());

    for (const char* name :
         {"plot_eps_min.csv", "plot_lambda_max.csv", "plot_max_H2.csv",
          "plot_max_A2.csv", "plot_max_logdet.csv", "plot_P_max_eig.csv",
          "plot_image_diameter.csv", "plot_displacement_residual.csv"}) {
        auto rows = lines_of(slurp(dir / name));
        INFO(name);
        REQUIRE(rows.size() == 4);
        CHECK(rows[0].substr(0, 2) == "t,");
    }
    auto rows = lines_of(slurp(dir / "plot_eps_min.csv"));
    CHECK(rows[3] == "1,0.75");
    fs::remove_all(dir);
}

TEST_CASE("the constant map run exits green with a zero diameter") {
    fs::path dir = scratch("constant");
    RunConfig cfg = parse_config("map.family = constant\n"
                                 "resolution = 16\n"
                                 "monitor_stride = 5\n"
                                 "output_dir = " + dir.string() + "\n");
    std::ostringstream log;
    CHECK(orchestrate(cfg, log) == 0);
    CHECK(log.str().find("hypotheses: hold") != std::string::npos);
    CHECK(log.str().find("converged") != std::string::npos);

    auto series = lines_of(slurp(dir / "series.csv"));
    REQUIRE(series.size() >= 2);
    CHECK(series[0].substr(0, 2) == "t,");
    // first sample: t = 0 and image_diameter (column 8) = 0
    std::istringstream row(series[1]);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(row, cell, ',')) cells.push_back(cell);
    REQUIRE(cells.size() == 9);
    CHECK(cells[0] == "0");
    CHECK(cells[7] == "0");

    auto verdicts = lines_of(slurp(dir / "verdicts.csv"));
    REQUIRE(verdicts.size() == 8); // header, hypotheses, six verdicts
    for (std::size_t k = 2; k < verdicts.size(); ++k)
        CHECK(verdicts[k].find(",fail,") == std::string::npos);

    auto summary = lines_of(slurp(dir / "summary.csv"));
    CHECK(mentions(summary, "termination,converged"));
    CHECK(mentions(summary, "final_diameter,0"));
    CHECK(mentions(summary, "exit_status,0"));
    fs::remove_all(dir);
}

TEST_CASE("a capped run writes snapshots and exits nonzero") {
    fs::path dir = scratch("capped");
    RunConfig cfg = parse_config("map.family = dilation\n"
                                 "map.dilation = 0.5\n"
                                 "resolution = 16\n"
                                 "t_max = 0.2\n"
                                 "monitor_stride = 10\n"
                                 "snapshot_stride = 10\n"
                                 "output_dir = " + dir.string() + "\n");
    std::ostringstream log;
    // far from converged at the time cap, so the diameter verdict fails
    CHECK(orchestrate(cfg, log) == 1);
    CHECK(log.str().find("t_max") != std::string::npos);

    CHECK(fs::exists(dir / "snapshot_000000.csv"));
    CHECK(fs::exists(dir / "snapshot_000010.csv"));
    CHECK(fs::exists(dir / "snapshot_000020.csv"));

    // snapshot rows cover every owned node of both charts
    auto snap = lines_of(slurp(dir / "snapshot_000010.csv"));
    CHECK(snap[0] == "chart,i,j,x0,x1,tchart,y0,y1");
    CHECK(snap.size() == 1 + 122); // a resolution 16 atlas owns 122 nodes

    auto summary = lines_of(slurp(dir / "summary.csv"));
    CHECK(mentions(summary, "termination,t_max"));
    CHECK(mentions(summary, "exit_status,1"));
    fs::remove_all(dir);
}

TEST_CASE("the hypothesis subcommand mirrors the curvature chain") {
    std::ostringstream log;

    RunConfig ss = parse_config("domain.kind = sphere\ntarget.kind = sphere\n");
    CHECK(run_hypothesis_check(ss, log) == 0);

    RunConfig sh = parse_config("target.kind = hyperbolic\n"
                                "target.curvature = -1\n");
    CHECK(run_hypothesis_check(sh, log) == 0);

    RunConfig es = parse_config("domain.kind = euclidean\n"
                                "domain.curvature = 0\n");
    CHECK(run_hypothesis_check(es, log) == 1);
    CHECK(log.str().find("hypotheses: fail") != std::string::npos);
}

TEST_CASE("the oracle writes a reduced series in monitor format") {
    fs::path dir = scratch("oracle");
    RunConfig cfg = parse_config("map.family = dilation\n"
                                 "map.dilation = 0.5\n"
                                 "resolution = 16\n"
                                 "monitor_stride = 50\n"
                                 "output_dir = " + dir.string() + "\n");
    std::ostringstream log;
    CHECK(run_oracle(cfg, log) == 0);
    CHECK(log.str().find("oracle: converged") != std::string::npos);

    auto rows = lines_of(slurp(dir / "reduced_series.csv"));
    REQUIRE(rows.size() >= 3);
    CHECK(rows[0] ==
          "t,eps_min,lambda_max,max_H2,max_A2,max_logdet,P_max_eig,"
          "image_diameter,displacement_residual,reduced");
    for (std::size_t k = 1; k < rows.size(); ++k)
        CHECK(rows[k].substr(rows[k].size() - 2) == ",1");
    fs::remove_all(dir);
}

TEST_CASE("output files use LF line endings only") {
    fs::path dir = scratch("lf");
    RunConfig cfg = parse_config("map.family = constant\n"
                                 "resolution = 16\n"
                                 "output_dir = " + dir.string() + "\n");
    std::ostringstream log;
    orchestrate(cfg, log);
    for (const auto& entry : fs::directory_iterator(dir)) {
        std::string text = slurp(entry.path());
        INFO(entry.path().string());
        CHECK(text.find('\r') == std::string::npos);
        CHECK(!text.empty());
        CHECK(text.back() == '\n');
    }
    fs::remove_all(dir);
}
