#include "graphflow/flow_engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "graphflow/errors.hpp"

namespace graphflow {

namespace {

// Bilinear probe into per-chart nodal arrays.  Only cells whose four
// corners are all evolvable count: trackers live well inside the chart
// (they hop at radius 1.2), so failing this means the track has left the
// region where the run produces data.
struct Corners {
    int id[4];
    double w[4];
    bool ok = false;
};

Corners locate(const DomainGrid& grid, int chart, const double x[2]) {
    Corners c;
    const ChartGrid& cg = grid.charts[chart];
    const double h = grid.spacing();
    const double u = (x[0] - cg.cx[0]) / h;
    const double v = (x[1] - cg.cy[0]) / h;
    const double fi = std::floor(u), fj = std::floor(v);
    if (!std::isfinite(fi) || !std::isfinite(fj)) return c;
    int i = static_cast<int>(fi), j = static_cast<int>(fj);
    const double fu = u - fi, fv = v - fj;
    if (grid.periodic()) {
        i = (i % cg.nx + cg.nx) % cg.nx;
        j = (j % cg.ny + cg.ny) % cg.ny;
    } else if (i < 0 || j < 0 || i + 1 >= cg.nx || j + 1 >= cg.ny) {
        return c;
    }
    const int base = cg.cell(i, j);
    c.id[0] = base;
    c.id[1] = grid.neighbor(chart, base, 1, 0);
    c.id[2] = grid.neighbor(chart, base, 0, 1);
    c.id[3] = grid.neighbor(chart, base, 1, 1);
    for (int k = 0; k < 4; ++k)
        if (cg.cls[c.id[k]] != kEvolvable) return c;
    c.w[0] = (1.0 - fu) * (1.0 - fv);
    c.w[1] = fu * (1.0 - fv);
    c.w[2] = (1.0 - fu) * fv;
    c.w[3] = fu * fv;
    c.ok = true;
    return c;
}

double interp(const std::vector<double>& a, const Corners& c) {
    return c.w[0] * a[c.id[0]] + c.w[1] * a[c.id[1]] + c.w[2] * a[c.id[2]] +
           c.w[3] * a[c.id[3]];
}

// Interpolated map value, with the four corner values unified into the
// first corner's target chart.  Chart domains are convex in coordinates,
// so the blend stays inside the chart whenever the corners do.
bool interp_value(const MapField& f, int chart, const Corners& c,
                  ChartPoint& out) {
    const MapField::ChartData& d = f.data[chart];
    const std::int8_t tc = d.tchart[c.id[0]];
    double y0 = 0.0, y1 = 0.0;
    for (int k = 0; k < 4; ++k) {
        double a = d.y0[c.id[k]], b = d.y1[c.id[k]];
        std::int8_t yc = d.tchart[c.id[k]];
        if (yc != tc && !MapField::reexpress(f.target(), a, b, yc, tc))
            return false;
        y0 += c.w[k] * a;
        y1 += c.w[k] * b;
    }
    Eigen::VectorXd y(2);
    y << y0, y1;
    out = ChartPoint(tc, y);
    return true;
}

// Keep a tracker's coordinates canonical: wrap on periodic grids, hop to
// the antipodal chart once the radius passes 1.2 (inside the re-ownership
// threshold, so interpolation corners stay evolvable).
void tracker_normalize(const DomainGrid& grid, Tracker& tr) {
    if (grid.periodic()) {
        const ChartGrid& cg = grid.charts[0];
        const double p = grid.period();
        const double lo[2] = {cg.cx[0], cg.cy[0]};
        for (int k = 0; k < 2; ++k)
            tr.x[k] = lo[k] + std::fmod(std::fmod(tr.x[k] - lo[k], p) + p, p);
        return;
    }
    if (grid.chart_count() < 2) return;
    const double r2 = tr.x[0] * tr.x[0] + tr.x[1] * tr.x[1];
    if (r2 > 1.44) {
        tr.x[0] /= r2;
        tr.x[1] /= r2;
        tr.chart ^= 1;
    }
}

// Midpoint update of the tracked material points against the same two
// geometry snapshots the field update used.  dx/dt = w, and the path length
// accumulates |H|, the product-metric speed of the track.
void advance_trackers(std::vector<Tracker>& trs, const DomainGrid& grid,
                      const GraphField& geom0, const GraphField& geom_mid,
                      double dt) {
    for (Tracker& tr : trs) {
        if (!tr.alive) continue;
        const Corners c0 = locate(grid, tr.chart, tr.x);
        if (!c0.ok) {
            tr.alive = false;
            continue;
        }
        const GraphField::ChartGeom& A = geom0.charts[tr.chart];
        const double xm[2] = {tr.x[0] + 0.5 * dt * interp(A.w0, c0),
                              tr.x[1] + 0.5 * dt * interp(A.w1, c0)};
        const Corners cm = locate(grid, tr.chart, xm);
        if (!cm.ok) {
            tr.alive = false;
            continue;
        }
        const GraphField::ChartGeom& B = geom_mid.charts[tr.chart];
        tr.x[0] += dt * interp(B.w0, cm);
        tr.x[1] += dt * interp(B.w1, cm);
        tr.path_len +=
            dt * std::sqrt(std::max(0.0, interp(B.normH2, cm)));
        tracker_normalize(grid, tr);
        if (!locate(grid, tr.chart, tr.x).ok) tr.alive = false;
    }
}

// Pointwise Euler update of every evolvable node.  Velocities are stored in
// each node's own target chart, so no frame transport is needed here.
void advance_field(MapField& f, const DomainGrid& grid,
                   const ModelManifold& N, const GraphField& geom,
                   double dt) {
    for (int c = 0; c < grid.chart_count(); ++c) {
        const ChartGrid& cg = grid.charts[c];
        const GraphField::ChartGeom& G = geom.charts[c];
        MapField::ChartData& d = f.data[c];
        for (int id : cg.evolvable_ids) {
            const double ny0 = d.y0[id] + dt * G.vel0[id];
            const double ny1 = d.y1[id] + dt * G.vel1[id];
            if (!std::isfinite(ny0) || !std::isfinite(ny1))
                throw NumericalError("non-finite value in the field update");
            Eigen::VectorXd y(2);
            y << ny0, ny1;
            if (!N.point_ok(ChartPoint(d.tchart[id], y)))
                throw ChartEscapeError(
                    "a target value left its chart during the update");
            d.y0[id] = ny0;
            d.y1[id] = ny1;
        }
    }
}

}  // namespace

FlowState make_flow_state(const DomainGrid& grid, const ModelManifold& N,
                          MapField f, int tracker_stride) {
    FlowState st;
    st.grid = &grid;
    st.N = &N;
    st.f = std::move(f);
    st.f.halo_exchange();
    st.f.validate();
    st.jets.resize(grid);
    st.jets_mid.resize(grid);
    st.jets_next.resize(grid);
    st.geom.resize(grid);
    st.geom_mid.resize(grid);
    st.geom_next.resize(grid);
    compute_jets(st.f, st.jets);
    compute_graph_geometry(grid, N, st.jets, st.geom);

    if (tracker_stride > 0) {
        for (int c = 0; c < grid.chart_count(); ++c) {
            const ChartGrid& cg = grid.charts[c];
            for (std::size_t k = 0; k < cg.owned_ids.size();
                 k += static_cast<std::size_t>(tracker_stride)) {
                const int id = cg.owned_ids[k];
                Tracker tr;
                tr.chart = c;
                tr.x[0] = cg.cx[id];
                tr.x[1] = cg.cy[id];
                tr.start_dom = grid.point(c, id);
                tr.start_img = st.f.value(c, id);
                st.trackers.push_back(tr);
            }
        }
    }
    return st;
}

double cfl_dt(const DomainGrid& grid, const GraphField& geom,
              double cfl_safety) {
    double worst = std::numeric_limits<double>::infinity();
    for (int c = 0; c < grid.chart_count(); ++c) {
        const ChartGrid& cg = grid.charts[c];
        const GraphField::ChartGeom& G = geom.charts[c];
        for (int id : cg.evolvable_ids) {
            const double tr = G.g00[id] + G.g11[id];
            const double disc =
                std::max(tr * tr - 4.0 * G.detg[id], 0.0);
            const double lmin = 0.5 * (tr - std::sqrt(disc));
            worst = std::min(worst, lmin * lmin);
        }
    }
    const double h = grid.spacing();
    const double dt = cfl_safety * h * h * worst;
    if (!(dt > 0.0) || !std::isfinite(dt))
        throw NumericalError("degenerate induced metric in the step bound");
    return dt;
}

StepResult flow_step(FlowState& st, const FlowControls& ctl, double dt_cap) {
    StepResult r;
    const DomainGrid& grid = *st.grid;
    const ModelManifold& N = *st.N;
    const double h = grid.spacing();

    double dt = std::min(cfl_dt(grid, st.geom, ctl.cfl_safety), dt_cap);

    // blow-up sniff: under the theorem's hypotheses the curvature stays
    // bounded, so a step that would move material by more than O(1) in
    // curvature units means the run has left the regime
    double maxA2 = 0.0;
    for (int c = 0; c < grid.chart_count(); ++c)
        for (int id : grid.charts[c].evolvable_ids)
            maxA2 = std::max(maxA2, st.geom.charts[c].normA2[id]);
    if (maxA2 * dt > 10.0) return r;

    for (int attempt = 0; attempt <= ctl.retry_max; ++attempt, dt *= 0.5) {
        if (dt < 1e-12 * h * h) break;
        try {
            st.f_mid = st.f;
            advance_field(st.f_mid, grid, N, st.geom, 0.5 * dt);
            st.f_mid.halo_exchange();
            compute_jets(st.f_mid, st.jets_mid);
            compute_graph_geometry(grid, N, st.jets_mid, st.geom_mid);

            st.f_next = st.f;
            advance_field(st.f_next, grid, N, st.geom_mid, dt);
            st.f_next.halo_exchange();
            const int moved = st.f_next.reown_targets(MapField::kReownRadius);
            if (moved > 0) st.f_next.halo_exchange();
            st.f_next.validate();
            compute_jets(st.f_next, st.jets_next);
            compute_graph_geometry(grid, N, st.jets_next, st.geom_next);

            std::vector<Tracker> trs = st.trackers;
            advance_trackers(trs, grid, st.geom, st.geom_mid, dt);

            std::swap(st.f, st.f_next);
            std::swap(st.jets, st.jets_next);
            std::swap(st.geom, st.geom_next);
            st.trackers = std::move(trs);
            st.t += dt;
            st.steps += 1;

            r.accepted = true;
            r.dt_used = dt;
            r.chart_migrations = moved;
            for (int c = 0; c < grid.chart_count(); ++c) {
                const ChartGrid& cg = grid.charts[c];
                const GraphField::ChartGeom& Gm = st.geom_mid.charts[c];
                for (int id : cg.owned_ids) {
                    const double sp =
                        Gm.lamN[id] * std::hypot(Gm.vel0[id], Gm.vel1[id]);
                    r.max_velocity = std::max(r.max_velocity, sp);
                    r.gauge_residual =
                        std::max(r.gauge_residual, Gm.gauge_res[id]);
                }
            }
            return r;
        } catch (const ChartEscapeError&) {
        } catch (const NumericalError&) {
        }
    }
    return r;
}

namespace {

// Current product-space displacement of the live trackers against their
// accumulated |H| budget; a tracker whose position can no longer be probed
// drops out of the estimate.
double tracker_residual(FlowState& st) {
    const DomainGrid& grid = *st.grid;
    const ModelManifold& M = grid.domain();
    const ModelManifold& N = *st.N;
    double worst = 0.0;
    for (Tracker& tr : st.trackers) {
        if (!tr.alive) continue;
        const Corners c = locate(grid, tr.chart, tr.x);
        ChartPoint img;
        if (!c.ok || !interp_value(st.f, tr.chart, c, img)) {
            tr.alive = false;
            continue;
        }
        Eigen::VectorXd x(2);
        x << tr.x[0], tr.x[1];
        const double dM = M.distance(tr.start_dom, ChartPoint(tr.chart, x));
        const double dN = N.distance(tr.start_img, img);
        worst = std::max(worst, std::hypot(dM, dN) - tr.path_len);
    }
    return worst;
}

}  // namespace

RunResult run_flow(FlowState& st, const FlowControls& ctl,
                   const MonitorConfig& mcfg, const SnapshotFn& snapshot) {
    RunResult rr;
    const DomainGrid& grid = *st.grid;
    const ModelManifold& N = *st.N;
    const long stride = std::max(1, ctl.monitor_stride);

    const KappaChoice kappa = choose_kappa(grid, st.jets, st.geom);
    rr.report.kappa_used = kappa.kappa;
    rr.report.kappa_enabled = kappa.enabled;

    auto take_sample = [&]() {
        st.disp_residual = std::max(st.disp_residual, tracker_residual(st));
        rr.report.samples.push_back(sample_monitors(
            grid, N, st.f, st.jets, st.geom, st.t, kappa, st.disp_residual));
    };

    take_sample();
    while (true) {
        if (rr.report.samples.back().image_diameter < ctl.diam_tol) {
            rr.termination = "converged";
            break;
        }
        if (st.t >= ctl.t_max * (1.0 - 1e-12)) {
            rr.termination = "t_max";
            break;
        }
        const StepResult sr = flow_step(st, ctl, ctl.t_max - st.t);
        if (!sr.accepted) {
            rr.termination = "singularity-suspected";
            break;
        }
        if (ctl.snapshot_stride > 0 && snapshot &&
            st.steps % ctl.snapshot_stride == 0)
            snapshot(st);
        if (st.steps % stride == 0) take_sample();
    }
    if (rr.report.samples.back().t < st.t) take_sample();

    rr.report.final_diameter = exact_image_diameter(grid, N, st.f);
    assert_suite(rr.report, mcfg, grid.spacing());
    rr.t_end = st.t;
    rr.steps = st.steps;
    return rr;
}

}  // namespace graphflow
