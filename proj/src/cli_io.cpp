#include "graphflow/cli_io.hpp"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <vector>

#include "graphflow/equivariant.hpp"
#include "graphflow/errors.hpp"

namespace graphflow {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

bool to_double(const std::string& s, double& out) {
    const char* b = s.data();
    const char* e = b + s.size();
    auto r = std::from_chars(b, e, out);
    return r.ec == std::errc() && r.ptr == e;
}

bool to_int(const std::string& s, int& out) {
    const char* b = s.data();
    const char* e = b + s.size();
    auto r = std::from_chars(b, e, out);
    return r.ec == std::errc() && r.ptr == e;
}

bool to_ulong(const std::string& s, unsigned long& out) {
    const char* b = s.data();
    const char* e = b + s.size();
    auto r = std::from_chars(b, e, out);
    return r.ec == std::errc() && r.ptr == e;
}

bool known_kind(const std::string& k) {
    return k == "sphere" || k == "hyperbolic" || k == "euclidean";
}

bool known_family(const std::string& f) {
    return f == "constant" || f == "identity" || f == "dilation" ||
           f.rfind("custom:", 0) == 0;
}

void validate(const RunConfig& cfg, std::vector<std::string>& errs) {
    auto need = [&](bool ok, const std::string& msg) {
        if (!ok) errs.push_back(msg);
    };

    for (const auto* side : {&cfg.domain, &cfg.target}) {
        const std::string who = side == &cfg.domain ? "domain" : "target";
        need(known_kind(side->kind),
             who + ".kind: unknown kind '" + side->kind + "'");
        need(side->dimension == 2,
             who + ".dimension: only dimension 2 is implemented");
        if (side->kind == "sphere")
            need(side->curvature > 0.0,
                 who + ".curvature: a sphere needs positive curvature");
        if (side->kind == "hyperbolic")
            need(side->curvature < 0.0,
                 who + ".curvature: a hyperbolic space needs negative curvature");
        if (side->kind == "euclidean")
            need(side->curvature == 0.0,
                 who + ".curvature: a euclidean space has curvature 0");
    }
    need(cfg.domain.kind != "hyperbolic",
         "domain.kind: hyperbolic domains are not supported (the flow needs "
         "a compact domain)");

    need(known_family(cfg.map.family),
         "map.family: unknown family '" + cfg.map.family + "'");
    if (cfg.map.family == "dilation")
        need(cfg.map.dilation_factor > 0.0,
             "map.dilation: the factor must be positive");
    need(cfg.map.constant_chart == 0 || cfg.map.constant_chart == 1,
         "map.constant_chart: must be 0 or 1");

    need(cfg.resolution >= 8, "resolution: must be at least 8");
    need(cfg.cfl_safety > 0.0, "cfl_safety: must be positive");
    need(cfg.t_max > 0.0, "t_max: must be positive");
    need(cfg.diam_tol > 0.0, "diam_tol: must be positive");
    need(cfg.tol_eps > 0.0, "tol_eps: must be positive");
    need(cfg.tol_logdet > 0.0, "tol_logdet: must be positive");
    need(cfg.monitor_stride >= 1, "monitor_stride: must be at least 1");
    need(cfg.snapshot_stride >= 0, "snapshot_stride: must not be negative");
    need(cfg.tracker_stride >= 0, "tracker_stride: must not be negative");
    need(!cfg.output_dir.empty(), "output_dir: must not be empty");
    need(cfg.sigma > 0.0, "sigma: must be positive");
    need(cfg.mu > 0.0, "mu: must be positive");
}

std::ofstream open_out(const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open '" + path + "' for writing");
    return f;
}

void write_verdicts(const MonitorReport& report, const HypothesisCheck& hc,
                    const std::string& path) {
    std::ofstream f = open_out(path);
    f << "name,status,first_violation_t,detail\n";
    f << "hypotheses," << (hc.holds ? "hold" : "fail") << ",nan,"
      << hc.detail << "\n";
    for (const Verdict& v : report.verdicts)
        f << v.name << ","
          << (!v.enabled ? "disabled" : v.pass ? "pass" : "fail") << ","
          << fmt(v.first_violation_t) << "," << v.detail << "\n";
}

} // namespace

RunConfig default_config() { return RunConfig{}; }

ModelManifold ManifoldSpec::build() const {
    SpaceKind k;
    if (kind == "sphere") k = SpaceKind::Sphere;
    else if (kind == "hyperbolic") k = SpaceKind::Hyperbolic;
    else if (kind == "euclidean") k = SpaceKind::Euclidean;
    else throw ConfigError({"unknown manifold kind '" + kind + "'"});
    return ModelManifold(k, dimension, curvature);
}

RunConfig parse_config(const std::string& text) {
    RunConfig cfg;
    std::vector<std::string> errs;
    std::vector<std::string> seen;

    auto dup = [&](const std::string& key) {
        for (const auto& s : seen)
            if (s == key) return true;
        seen.push_back(key);
        return false;
    };

    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;

        std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            errs.push_back("line " + std::to_string(lineno) +
                           ": expected `key = value`");
            continue;
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key.empty()) {
            errs.push_back("line " + std::to_string(lineno) + ": empty key");
            continue;
        }
        if (dup(key)) {
            errs.push_back("line " + std::to_string(lineno) +
                           ": duplicate key '" + key + "'");
            continue;
        }

        auto set_d = [&](double& slot) {
            if (!to_double(val, slot))
                errs.push_back(key + ": expected a number, got '" + val + "'");
        };
        auto set_i = [&](int& slot) {
            if (!to_int(val, slot))
                errs.push_back(key + ": expected an integer, got '" + val +
                               "'");
        };

        if (key == "domain.kind") cfg.domain.kind = val;
        else if (key == "domain.dimension") set_i(cfg.domain.dimension);
        else if (key == "domain.curvature") set_d(cfg.domain.curvature);
        else if (key == "target.kind") cfg.target.kind = val;
        else if (key == "target.dimension") set_i(cfg.target.dimension);
        else if (key == "target.curvature") set_d(cfg.target.curvature);
        else if (key == "map.family") cfg.map.family = val;
        else if (key == "map.dilation") set_d(cfg.map.dilation_factor);
        else if (key == "map.constant_chart") set_i(cfg.map.constant_chart);
        else if (key == "map.constant_y0") set_d(cfg.map.constant_y0);
        else if (key == "map.constant_y1") set_d(cfg.map.constant_y1);
        else if (key == "resolution") set_i(cfg.resolution);
        else if (key == "cfl_safety") set_d(cfg.cfl_safety);
        else if (key == "t_max") set_d(cfg.t_max);
        else if (key == "diam_tol") set_d(cfg.diam_tol);
        else if (key == "tol_eps") set_d(cfg.tol_eps);
        else if (key == "tol_logdet") set_d(cfg.tol_logdet);
        else if (key == "monitor_stride") set_i(cfg.monitor_stride);
        else if (key == "snapshot_stride") set_i(cfg.snapshot_stride);
        else if (key == "tracker_stride") set_i(cfg.tracker_stride);
        else if (key == "output_dir") cfg.output_dir = val;
        else if (key == "seed") {
            if (!to_ulong(val, cfg.seed))
                errs.push_back(
                    "seed: expected a non-negative integer, got '" + val +
                    "'");
        } else if (key == "sigma") set_d(cfg.sigma);
        else if (key == "mu") set_d(cfg.mu);
        else errs.push_back("unknown key '" + key + "'");
    }

    validate(cfg, errs);
    if (!errs.empty()) throw ConfigError(errs);
    return cfg;
}

std::string emit_config(const RunConfig& cfg) {
    std::ostringstream os;
    os << "# graphflow run configuration\n";
    os << "domain.kind = " << cfg.domain.kind << "\n";
    os << "domain.dimension = " << cfg.domain.dimension << "\n";
    os << "domain.curvature = " << fmt(cfg.domain.curvature) << "\n";
    os << "target.kind = " << cfg.target.kind << "\n";
    os << "target.dimension = " << cfg.target.dimension << "\n";
    os << "target.curvature = " << fmt(cfg.target.curvature) << "\n";
    os << "map.family = " << cfg.map.family << "\n";
    os << "map.dilation = " << fmt(cfg.map.dilation_factor) << "\n";
    os << "map.constant_chart = " << cfg.map.constant_chart << "\n";
    os << "map.constant_y0 = " << fmt(cfg.map.constant_y0) << "\n";
    os << "map.constant_y1 = " << fmt(cfg.map.constant_y1) << "\n";
    os << "resolution = " << cfg.resolution << "\n";
    os << "cfl_safety = " << fmt(cfg.cfl_safety) << "\n";
    os << "t_max = " << fmt(cfg.t_max) << "\n";
    os << "diam_tol = " << fmt(cfg.diam_tol) << "\n";
    os << "tol_eps = " << fmt(cfg.tol_eps) << "\n";
    os << "tol_logdet = " << fmt(cfg.tol_logdet) << "\n";
    os << "monitor_stride = " << cfg.monitor_stride << "\n";
    os << "snapshot_stride = " << cfg.snapshot_stride << "\n";
    os << "tracker_stride = " << cfg.tracker_stride << "\n";
    os << "output_dir = " << cfg.output_dir << "\n";
    os << "seed = " << cfg.seed << "\n";
    os << "sigma = " << fmt(cfg.sigma) << "\n";
    os << "mu = " << fmt(cfg.mu) << "\n";
    return os.str();
}

bool theorem_compliant(const RunConfig& cfg) {
    return initial_map_length_decreasing(cfg.map);
}

void emit_plotdata(const MonitorReport& report, const std::string& dir) {
    struct Column {
        const char* name;
        double MonitorSample::*field;
    };
    static const Column kColumns[] = {
        {"eps_min", &MonitorSample::eps_min},
        {"lambda_max", &MonitorSample::lambda_max},
        {"max_H2", &MonitorSample::max_H2},
        {"max_A2", &MonitorSample::max_A2},
        {"max_logdet", &MonitorSample::max_logdet},
        {"P_max_eig", &MonitorSample::P_max_eig},
        {"image_diameter", &MonitorSample::image_diameter},
        {"displacement_residual", &MonitorSample::displacement_residual},
    };
    for (const Column& col : kColumns) {
        std::ofstream f =
            open_out(dir + "/plot_" + col.name + ".csv");
        f << "t," << col.name << "\n";
        for (const MonitorSample& s : report.samples)
            f << fmt(s.t) << "," << fmt(s.*col.field) << "\n";
    }
}

void write_snapshot(const DomainGrid& grid, const MapField& f,
                    const std::string& path) {
    std::ofstream out = open_out(path);
    out << "chart,i,j,x0,x1,tchart,y0,y1\n";
    for (int c = 0; c < grid.chart_count(); ++c) {
        const ChartGrid& cg = grid.charts[c];
        const MapField::ChartData& d = f.data[c];
        for (int id : cg.owned_ids)
            out << c << "," << cg.cell_i(id) << "," << cg.cell_j(id) << ","
                << fmt(cg.cx[id]) << "," << fmt(cg.cy[id]) << ","
                << int(d.tchart[id]) << "," << fmt(d.y0[id]) << ","
                << fmt(d.y1[id]) << "\n";
    }
}

int orchestrate(const RunConfig& cfg, std::ostream& log) {
    ModelManifold M = cfg.domain.build();
    ModelManifold N = cfg.target.build();

    HypothesisCheck hc = check_hypotheses(M, N, cfg.sigma, cfg.mu);
    log << "hypotheses: " << (hc.holds ? "hold" : "fail") << " (margin "
        << fmt(hc.margin) << "; " << hc.detail << ")\n";
    log << "map regime: "
        << (theorem_compliant(cfg) ? "theorem-compliant" : "exploratory")
        << "\n";

    DomainGrid grid = DomainGrid::build(M, cfg.resolution);
    MapFn fn = make_initial_map(cfg.map, M, N);
    FlowState st = make_flow_state(grid, N, build_map_field(grid, N, fn),
                                   cfg.tracker_stride);

    FlowControls ctl;
    ctl.cfl_safety = cfg.cfl_safety;
    ctl.t_max = cfg.t_max;
    ctl.diam_tol = cfg.diam_tol;
    ctl.monitor_stride = cfg.monitor_stride;
    ctl.snapshot_stride = cfg.snapshot_stride;
    ctl.tracker_stride = cfg.tracker_stride;
    MonitorConfig mcfg;
    mcfg.tol_eps = cfg.tol_eps;
    mcfg.tol_logdet = cfg.tol_logdet;
    mcfg.diam_tol = cfg.diam_tol;

    namespace fs = std::filesystem;
    fs::create_directories(cfg.output_dir);
    const std::string dir = cfg.output_dir;

    SnapshotFn snap;
    if (cfg.snapshot_stride > 0) {
        write_snapshot(grid, st.f, dir + "/snapshot_000000.csv");
        snap = [&grid, &dir](const FlowState& s) {
            char name[40];
            std::snprintf(name, sizeof name, "snapshot_%06ld.csv", s.steps);
            write_snapshot(grid, s.f, dir + "/" + name);
        };
    }

    RunResult rr = run_flow(st, ctl, mcfg, snap);

    {
        std::ofstream sf = open_out(dir + "/series.csv");
        emit_series(sf, rr.report.samples);
    }
    emit_plotdata(rr.report, dir);
    write_verdicts(rr.report, hc, dir + "/verdicts.csv");

    bool all_pass = true;
    for (const Verdict& v : rr.report.verdicts) {
        if (v.enabled && !v.pass) all_pass = false;
        log << "verdict " << v.name << ": "
            << (!v.enabled ? "disabled" : v.pass ? "pass" : "fail");
        if (!v.detail.empty()) log << " (" << v.detail << ")";
        log << "\n";
    }

    {
        std::ofstream f = open_out(dir + "/summary.csv");
        f << "key,value\n";
        f << "termination," << rr.termination << "\n";
        f << "t_end," << fmt(rr.t_end) << "\n";
        f << "steps," << rr.steps << "\n";
        f << "final_diameter," << fmt(rr.report.final_diameter) << "\n";
        f << "kappa," << fmt(rr.report.kappa_used) << "\n";
        f << "kappa_enabled," << (rr.report.kappa_enabled ? 1 : 0) << "\n";
        f << "hypotheses_hold," << (hc.holds ? 1 : 0) << "\n";
        f << "hypotheses_margin," << fmt(hc.margin) << "\n";
        f << "map_regime,"
          << (theorem_compliant(cfg) ? "theorem-compliant" : "exploratory")
          << "\n";
        f << "exit_status," << (all_pass ? 0 : 1) << "\n";
    }

    log << "run: " << rr.termination << " at t = " << fmt(rr.t_end)
        << " after " << rr.steps << " steps, final diameter "
        << fmt(rr.report.final_diameter) << "\n";
    log << "wrote " << dir << "/series.csv and verdict/plot files\n";
    return all_pass ? 0 : 1;
}

int run_oracle(const RunConfig& cfg, std::ostream& log) {
    ModelManifold M = cfg.domain.build();
    ModelManifold N = cfg.target.build();

    Profile p = make_reduced_profile(cfg.map, M, N, 8 * cfg.resolution + 1);
    ReducedControls rc;
    rc.cfl_safety = cfg.cfl_safety;
    rc.t_max = cfg.t_max;
    rc.diam_tol = cfg.diam_tol;
    rc.monitor_stride = cfg.monitor_stride;
    ReducedRun rr = run_reduced(std::move(p), rc);

    namespace fs = std::filesystem;
    fs::create_directories(cfg.output_dir);
    const std::string path = cfg.output_dir + "/reduced_series.csv";
    std::ofstream f = open_out(path);
    // monitor column layout; quantities the radial solver does not carry
    // stay nan, and the trailing flag marks every row as reduced
    f << "t,eps_min,lambda_max,max_H2,max_A2,max_logdet,P_max_eig,"
         "image_diameter,displacement_residual,reduced\n";
    for (const ReducedSample& s : rr.series)
        f << fmt(s.t) << "," << fmt(s.eps_min) << "," << fmt(s.lambda_max)
          << "," << fmt(s.max_H2) << ",nan," << fmt(s.max_logdet)
          << ",nan," << fmt(s.diameter) << ",nan,1\n";

    log << "oracle: " << rr.termination << " at t = " << fmt(rr.t_end)
        << ", " << rr.series.size() << " samples\n";
    log << "wrote " << path << "\n";
    return rr.termination == "singularity-suspected" ? 1 : 0;
}

int run_hypothesis_check(const RunConfig& cfg, std::ostream& log) {
    ModelManifold M = cfg.domain.build();
    ModelManifold N = cfg.target.build();
    HypothesisCheck hc = check_hypotheses(M, N, cfg.sigma, cfg.mu);
    log << "hypotheses: " << (hc.holds ? "hold" : "fail") << " (margin "
        << fmt(hc.margin) << ")\n";
    log << hc.detail << "\n";
    return hc.holds ? 0 : 1;
}

std::string version_string() { return "graphflow 0.1.0"; }

} // namespace graphflow
