// Acceptance gate for the whole artifact: eight independent criteria, one
// PASS/FAIL line each, nonzero exit when any of them fails.  Tolerances are
// pinned here and nowhere else; runtime bounds are part of the criteria.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "graphflow/equivariant.hpp"
#include "graphflow/flow_engine.hpp"
#include "graphflow/initial_maps.hpp"
#include "graphflow/singular_frames.hpp"

using namespace graphflow;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

ModelManifold unit_sphere() { return ModelManifold(SpaceKind::Sphere, 2, 1.0); }

InitialMapSpec half_dilation() {
    InitialMapSpec s;
    s.family = "dilation";
    s.dilation_factor = 0.5;
    return s;
}

// ------------------------------------------------------------------ 1 ----
// Frame identities: on random (gM, gN, df) triples the closed-form values
// of the parallel tensor s = gM - gN in the singular frames must match the
// direct quadratic form on the constructed frames, and every pairing
// outside the closed forms must vanish.

double s_direct(const Eigen::Matrix2d& gM, const Eigen::Matrix2d& gN,
                const double u[4], const double v[4]) {
    double dom = 0.0, tgt = 0.0;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            dom += u[i] * gM(i, j) * v[j];
            tgt += u[2 + i] * gN(i, j) * v[2 + j];
        }
    return dom - tgt;
}

Outcome criterion_frames() {
    std::mt19937_64 rng(20250816ull);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    auto rand_spd = [&]() {
        Eigen::Matrix2d A;
        A << U(rng), U(rng), U(rng), U(rng);
        double scale = std::exp(1.5 * U(rng));
        return Eigen::Matrix2d(scale * (A.transpose() * A) +
                               0.05 * Eigen::Matrix2d::Identity());
    };

    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        Eigen::Matrix2d gM = rand_spd();
        Eigen::Matrix2d gN = rand_spd();
        Eigen::Matrix2d df;
        df << 2.0 * U(rng), 2.0 * U(rng), 2.0 * U(rng), 2.0 * U(rng);

        SingularData sd = singular_decompose(gM, gN, df);
        STensorValues sv = s_tensor_values(sd);

        for (int i = 0; i < 2; ++i) {
            worst = std::max(worst, std::abs(s_direct(gM, gN, sd.e[i], sd.e[i]) -
                                             sv.s_diag[i]));
            worst = std::max(worst,
                             std::abs(s_direct(gM, gN, sd.xi[i], sd.xi[i]) -
                                      sv.sperp_diag[i]));
            worst = std::max(worst,
                             std::abs(s_direct(gM, gN, sd.e[i], sd.xi[i]) -
                                      sv.mixed[i]));
        }
        // every cross pairing vanishes
        worst = std::max(worst, std::abs(s_direct(gM, gN, sd.e[0], sd.e[1])));
        worst = std::max(worst, std::abs(s_direct(gM, gN, sd.xi[0], sd.xi[1])));
        worst = std::max(worst, std::abs(s_direct(gM, gN, sd.e[0], sd.xi[1])));
        worst = std::max(worst, std::abs(s_direct(gM, gN, sd.e[1], sd.xi[0])));
    }
    Outcome out;
    out.pass = worst < 1e-10;
    out.detail = "worst identity gap " + num(worst) + " over 1000 triples";
    return out;
}

// ------------------------------------------------------------------ 2 ----
// Convergence order: Gauss residual, Codazzi residual, first- and
// second-derivative jet errors, and the divergence-form gauge residual on
// the half-dilation sphere field must each shrink by >= 3.5 per refinement
// across resolutions 32, 64, 128.

struct OracleJet {
    double val[2];
    double d1[2][2];
    double d2[2][3];
};

// Chart expression of the tangentially c-contracting map of the unit
// sphere: y = phi(|x|^2) x with phi = 2c / (1 + u + sqrt((1+u)^2 - 4c^2 u)),
// the same formula in both charts.
OracleJet dilation_jet(double c, double x0, double x1) {
    double u = x0 * x0 + x1 * x1;
    double D = (1 + u) * (1 + u) - 4 * c * c * u;
    double S = std::sqrt(D);
    double Dp = 2 * (1 + u) - 4 * c * c;
    double Sp = Dp / (2 * S);
    double Spp = (4 * D - Dp * Dp) / (4 * D * S);
    double Q = 1 + u + S;
    double Qp = 1 + Sp;
    double phi = 2 * c / Q;
    double phip = -2 * c * Qp / (Q * Q);
    double phipp = 2 * c * (2 * Qp * Qp - Spp * Q) / (Q * Q * Q);
    double x[2] = {x0, x1};
    OracleJet out;
    const int ii[3] = {0, 0, 1}, jj[3] = {0, 1, 1};
    for (int a = 0; a < 2; ++a) {
        out.val[a] = phi * x[a];
        for (int i = 0; i < 2; ++i)
            out.d1[a][i] = 2 * phip * x[i] * x[a] + (i == a ? phi : 0.0);
        for (int s = 0; s < 3; ++s) {
            int i = ii[s], j = jj[s];
            out.d2[a][s] = 4 * phipp * x[i] * x[j] * x[a] +
                           2 * phip * ((i == j ? x[a] : 0.0) +
                                       (a == i ? x[j] : 0.0) +
                                       (a == j ? x[i] : 0.0));
        }
    }
    return out;
}

struct ResidualSizes {
    double gauss, codazzi, jet_d1, jet_d2, gauge;
};

ResidualSizes residual_sizes(int res) {
    ModelManifold S = unit_sphere();
    DomainGrid grid = DomainGrid::build(S, res);
    MapField f = build_map_field(grid, S, make_initial_map(half_dilation(), S, S));
    f.halo_exchange();
    JetField jets;
    jets.resize(grid);
    compute_jets(f, jets);
    GraphField geom;
    geom.resize(grid);
    compute_graph_geometry(grid, S, jets, geom);

    ResidualField rf;
    curvature_residuals(grid, S, jets, geom, rf);
    GaugeOrderField gof;
    hdiv_gauge_residual(grid, S, jets, geom, gof);

    ResidualSizes out{rf.max_gauss, rf.max_codazzi, 0.0, 0.0,
                      gof.max_residual};
    for (int ch = 0; ch < grid.chart_count(); ++ch) {
        const ChartGrid& cg = grid.charts[ch];
        const JetField::ChartJets& J = jets.charts[ch];
        for (int id : cg.evolvable_ids) {
            OracleJet oj = dilation_jet(0.5, cg.cx[id], cg.cy[id]);
            for (int a = 0; a < 2; ++a) {
                for (int i = 0; i < 2; ++i)
                    out.jet_d1 = std::max(
                        out.jet_d1, std::abs(J.d1[a * 2 + i][id] - oj.d1[a][i]));
                for (int s = 0; s < 3; ++s)
                    out.jet_d2 = std::max(
                        out.jet_d2, std::abs(J.d2[a * 3 + s][id] - oj.d2[a][s]));
            }
        }
    }
    return out;
}

Outcome criterion_convergence() {
    ResidualSizes r[3];
    const int res[3] = {32, 64, 128};
    for (int k = 0; k < 3; ++k) r[k] = residual_sizes(res[k]);

    struct Metric {
        const char* name;
        double ResidualSizes::*field;
    };
    const Metric metrics[] = {
        {"gauss", &ResidualSizes::gauss},
        {"codazzi", &ResidualSizes::codazzi},
        {"jet-d1", &ResidualSizes::jet_d1},
        {"jet-d2", &ResidualSizes::jet_d2},
        {"gauge", &ResidualSizes::gauge},
    };

    Outcome out;
    out.pass = true;
    std::string ratios;
    for (const Metric& m : metrics) {
        for (int k = 0; k < 2; ++k) {
            double ratio = r[k].*m.field / r[k + 1].*m.field;
            if (!ratios.empty()) ratios += " ";
            if (k == 0) ratios += std::string(m.name) + " ";
            ratios += num(ratio);
            if (!(ratio >= 3.5)) {
                out.pass = false;
                out.detail = std::string(m.name) + " ratio " + num(ratio) +
                             " < 3.5 at " + std::to_string(res[k]) + "->" +
                             std::to_string(res[k + 1]);
                return out;
            }
        }
    }
    out.detail = "refinement ratios: " + ratios;
    return out;
}

// ---------------------------------------------------------------- 3, 4 ----
// Theorem runs: the half dilation at resolution 64 must flow to a point
// while every monitored inequality holds along the way.  Criterion 3 is the
// sphere target, criterion 4 the hyperbolic one; the verdict set and the
// tolerances are identical.

struct TheoremRun {
    RunResult rr;
    double h = 0.0;
    std::string series;
};

TheoremRun theorem_run(SpaceKind target_kind, double target_curv) {
    ModelManifold M = unit_sphere();
    ModelManifold N(target_kind, 2, target_curv);
    DomainGrid grid = DomainGrid::build(M, 64);
    MapField f = build_map_field(grid, N, make_initial_map(half_dilation(), M, N));

    FlowControls ctl;
    MonitorConfig mcfg;
    FlowState st = make_flow_state(grid, N, std::move(f), ctl.tracker_stride);

    TheoremRun t;
    t.rr = run_flow(st, ctl, mcfg);
    t.h = grid.spacing();
    std::ostringstream os;
    emit_series(os, t.rr.report.samples);
    t.series = os.str();
    return t;
}

Outcome judge_theorem_run(const TheoremRun& t) {
    Outcome out;
    const std::vector<MonitorSample>& s = t.rr.report.samples;
    if (s.empty()) {
        out.detail = "no samples";
        return out;
    }
    const double h2_bound = 10.0 * s.front().max_H2 + 1.0;
    const double disp_bound = 5.0 * t.h * t.h;
    for (std::size_t k = 0; k < s.size(); ++k) {
        if (!(s[k].eps_min >= 0.6 - 1e-3)) {
            out.detail = "eps_min " + num(s[k].eps_min) + " at t " +
                         num(s[k].t);
            return out;
        }
        if (!(s[k].max_H2 <= h2_bound)) {
            out.detail = "max_H2 " + num(s[k].max_H2) + " above " +
                         num(h2_bound) + " at t " + num(s[k].t);
            return out;
        }
        if (!(s[k].P_max_eig < 0.0)) {
            out.detail = "P eigenvalue " + num(s[k].P_max_eig) + " at t " +
                         num(s[k].t);
            return out;
        }
        if (!(s[k].displacement_residual <= disp_bound)) {
            out.detail = "displacement residual " +
                         num(s[k].displacement_residual) + " above " +
                         num(disp_bound);
            return out;
        }
        if (k > 0 && !(s[k].max_logdet <=
                       s[k - 1].max_logdet + 1e-6 * (s[k].t - s[k - 1].t))) {
            out.detail = "max_logdet rose at t " + num(s[k].t);
            return out;
        }
    }
    if (t.rr.termination != "converged") {
        out.detail = "terminated by " + t.rr.termination;
        return out;
    }
    if (!(t.rr.report.final_diameter < 1e-3)) {
        out.detail = "final diameter " + num(t.rr.report.final_diameter);
        return out;
    }
    out.pass = true;
    out.detail = "converged at t " + num(t.rr.t_end) + ", final diameter " +
                 num(t.rr.report.final_diameter);
    return out;
}

// ------------------------------------------------------------------ 5 ----
// Full solver versus the radial reduction: on the same initial data the
// largest stretch and the mean curvature peak must agree at 20 matched
// times within max(5 h^2, 5 dt).

double lerp_sample(const std::vector<MonitorSample>& s, double t,
                   double MonitorSample::*field) {
    if (t <= s.front().t) return s.front().*field;
    for (std::size_t k = 1; k < s.size(); ++k)
        if (s[k].t >= t) {
            double w = (t - s[k - 1].t) / (s[k].t - s[k - 1].t);
            return (1.0 - w) * (s[k - 1].*field) + w * (s[k].*field);
        }
    return s.back().*field;
}

Outcome criterion_oracle_crosscheck() {
    ModelManifold S = unit_sphere();
    DomainGrid grid = DomainGrid::build(S, 32);
    MapField f = build_map_field(grid, S, make_initial_map(half_dilation(), S, S));

    FlowControls ctl;
    ctl.monitor_stride = 10;
    MonitorConfig mcfg;
    FlowState st = make_flow_state(grid, S, std::move(f), 0);
    RunResult rr = run_flow(st, ctl, mcfg);

    Profile p = make_reduced_profile(half_dilation(), S, S, 513);
    ReducedControls rc;
    rc.monitor_stride = 20;
    ReducedRun red = run_reduced(std::move(p), rc);

    const double h = grid.spacing();
    const double dt = rr.t_end / double(rr.steps);
    const double tol = std::max(5.0 * h * h, 5.0 * dt);
    const double T = std::min(rr.t_end, red.t_end);

    Outcome out;
    double worst_l = 0.0, worst_h = 0.0;
    for (int k = 1; k <= 20; ++k) {
        double t = T * k / 20.0;
        double gl = lerp_sample(rr.report.samples, t, &MonitorSample::lambda_max);
        double rl = sample_series(red.series, t, &ReducedSample::lambda_max);
        double gh = lerp_sample(rr.report.samples, t, &MonitorSample::max_H2);
        double rh = sample_series(red.series, t, &ReducedSample::max_H2);
        worst_l = std::max(worst_l, std::abs(gl - rl));
        worst_h = std::max(worst_h, std::abs(gh - rh));
    }
    out.pass = worst_l <= tol && worst_h <= tol;
    out.detail = "lambda_max gap " + num(worst_l) + ", max_H2 gap " +
                 num(worst_h) + ", tolerance " + num(tol);
    return out;
}

// ------------------------------------------------------------------ 6 ----
// Stationary maps: 1000 steps each.  The constant map must hold to
// round-off per step, the identity map to the truncation budget 10 h^2 dt.

double field_drift(const DomainGrid& grid, const MapField& a,
                   const MapField& b) {
    double worst = 0.0;
    for (int c = 0; c < grid.chart_count(); ++c)
        for (int id : grid.charts[c].evolvable_ids) {
            worst = std::max(worst,
                             std::abs(a.data[c].y0[id] - b.data[c].y0[id]));
            worst = std::max(worst,
                             std::abs(a.data[c].y1[id] - b.data[c].y1[id]));
        }
    return worst;
}

Outcome criterion_stationary() {
    ModelManifold S = unit_sphere();
    DomainGrid grid = DomainGrid::build(S, 24);
    FlowControls ctl;
    Outcome out;

    InitialMapSpec constant;
    constant.family = "constant";
    FlowState stc = make_flow_state(
        grid, S, build_map_field(grid, S, make_initial_map(constant, S, S)), 0);
    double worst_const = 0.0;
    for (int k = 0; k < 1000; ++k) {
        MapField prev = stc.f;
        StepResult sr = flow_step(stc, ctl, 1.0);
        if (!sr.accepted) {
            out.detail = "constant map step rejected at " + std::to_string(k);
            return out;
        }
        worst_const = std::max(worst_const, field_drift(grid, prev, stc.f));
    }

    InitialMapSpec ident;
    ident.family = "identity";
    FlowState sti = make_flow_state(
        grid, S, build_map_field(grid, S, make_initial_map(ident, S, S)), 0);
    const double h = grid.spacing();
    double worst_ident_excess = -1.0, worst_ident = 0.0;
    for (int k = 0; k < 1000; ++k) {
        MapField prev = sti.f;
        StepResult sr = flow_step(sti, ctl, 1.0);
        if (!sr.accepted) {
            out.detail = "identity map step rejected at " + std::to_string(k);
            return out;
        }
        double d = field_drift(grid, prev, sti.f);
        worst_ident = std::max(worst_ident, d);
        worst_ident_excess =
            std::max(worst_ident_excess, d - 10.0 * h * h * sr.dt_used);
    }

    out.pass = worst_const < 1e-10 && worst_ident_excess < 0.0;
    out.detail = "per-step drift: constant " + num(worst_const) +
                 ", identity " + num(worst_ident);
    return out;
}

// ------------------------------------------------------------------ 7 ----
// Hypothesis checker booleans on the three reference configurations.

Outcome criterion_hypotheses() {
    ModelManifold s2 = unit_sphere();
    ModelManifold h2(SpaceKind::Hyperbolic, 2, -1.0);
    ModelManifold e2(SpaceKind::Euclidean, 2, 0.0);

    bool a = check_hypotheses(s2, s2, 1.0, 1.0).holds;
    bool b = check_hypotheses(s2, h2, 1.0, 1.0).holds;
    bool c = check_hypotheses(e2, s2, 1.0, 1.0).holds;

    Outcome out;
    out.pass = a && b && !c;
    out.detail = std::string("sphere->sphere ") + (a ? "holds" : "fails") +
                 ", sphere->hyperbolic " + (b ? "holds" : "fails") +
                 ", flat->sphere " + (c ? "holds" : "fails");
    return out;
}

// ------------------------------------------------------------------ 8 ----
// Determinism: rerunning the sphere theorem configuration must reproduce
// the emitted time series byte for byte.

Outcome criterion_determinism(const std::string& first_series) {
    TheoremRun again = theorem_run(SpaceKind::Sphere, 1.0);
    Outcome out;
    out.pass = !first_series.empty() && again.series == first_series;
    out.detail = out.pass ? "series files byte-identical ("
                 + std::to_string(again.series.size()) + " bytes)"
                          : "series files differ";
    return out;
}

} // namespace

int main() {
    using clock = std::chrono::steady_clock;
    int failures = 0;
    std::string sphere_series;

    struct Row {
        int id;
        const char* label;
        double time_bound; // seconds, 0 = none
    };

    auto report = [&](const Row& row, const Outcome& o, double secs) {
        bool pass = o.pass;
        std::string detail = o.detail;
        if (pass && row.time_bound > 0.0 && secs >= row.time_bound) {
            pass = false;
            detail = "runtime " + num(secs) + " s exceeds " +
                     num(row.time_bound) + " s";
        }
        std::printf("%s criterion %d: %s (%s; %.1f s)\n",
                    pass ? "PASS" : "FAIL", row.id, row.label, detail.c_str(),
                    secs);
        std::fflush(stdout);
        if (!pass) ++failures;
    };

    auto run = [&](const Row& row, auto&& fn) {
        auto t0 = clock::now();
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        double secs = std::chrono::duration<double>(clock::now() - t0).count();
        report(row, o, secs);
    };

    run({1, "singular frame identities", 5.0}, criterion_frames);
    run({2, "residual convergence under refinement", 120.0},
        criterion_convergence);
    run({3, "contraction flows to a point, sphere target", 600.0}, [&]() {
        TheoremRun t = theorem_run(SpaceKind::Sphere, 1.0);
        sphere_series = t.series;
        return judge_theorem_run(t);
    });
    run({4, "contraction flows to a point, hyperbolic target", 600.0}, []() {
        return judge_theorem_run(theorem_run(SpaceKind::Hyperbolic, -1.0));
    });
    run({5, "full solver matches the radial reduction", 180.0},
        criterion_oracle_crosscheck);
    run({6, "stationary maps stay fixed for 1000 steps", 0.0},
        criterion_stationary);
    run({7, "curvature hypothesis checker booleans", 0.0},
        criterion_hypotheses);
    run({8, "reruns are byte-identical", 0.0},
        [&]() { return criterion_determinism(sphere_series); });

    std::printf("acceptance: %d/8 criteria pass\n", 8 - failures);
    return failures;
}
