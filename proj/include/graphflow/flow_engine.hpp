#pragma once

#include <functional>
#include <string>
#include <vector>

#include "graphflow/graph_geometry.hpp"
#include "graphflow/grid.hpp"
#include "graphflow/jets.hpp"
#include "graphflow/map_field.hpp"
#include "graphflow/monitors.hpp"

namespace graphflow {

struct FlowControls {
    double cfl_safety = 0.2;
    double t_max = 10.0;
    double diam_tol = 1e-3;   // image-diameter bound that counts as converged
    int retry_max = 8;        // dt halvings before a step gives up
    int monitor_stride = 20;  // steps between monitor samples
    int snapshot_stride = 0;  // steps between snapshot callbacks, 0 = never
    int tracker_stride = 8;   // every k-th owned node seeds a tracker
};

struct StepResult {
    bool accepted = false;
    double dt_used = 0.0;
    double max_velocity = 0.0;    // target-metric speed, max over owned nodes
    double gauge_residual = 0.0;  // max |pr(lifted velocity) - H|/(1+|H|)
    int chart_migrations = 0;     // target values re-owned after the update
};

// A tracker follows the material point that starts at a grid node: the
// domain position drifts with dx/dt = w (the tangential reparametrization
// the graph gauge absorbs), while path_len accumulates the integral of |H|
// along the track.  The product-space displacement from the start can never
// exceed that integral, which is what the displacement monitor checks.
struct Tracker {
    int chart = 0;
    double x[2] = {0.0, 0.0};
    ChartPoint start_dom;
    ChartPoint start_img;
    double path_len = 0.0;
    bool alive = true;
};

// Committed state of one run.  jets and geom always describe f; flow_step
// maintains that pairing across commits.  The _mid/_next members are
// persistent scratch so a step does not reallocate the whole field set.
struct FlowState {
    const DomainGrid* grid = nullptr;
    const ModelManifold* N = nullptr;

    MapField f;
    JetField jets;
    GraphField geom;
    double t = 0.0;
    long steps = 0;
    std::vector<Tracker> trackers;
    double disp_residual = 0.0;  // running max of the tracker residual

    MapField f_mid, f_next;
    JetField jets_mid, jets_next;
    GraphField geom_mid, geom_next;
};

FlowState make_flow_state(const DomainGrid& grid, const ModelManifold& N,
                          MapField f, int tracker_stride);

// Largest stable time step: cfl_safety * h^2 * min over evolvable nodes of
// lambda_min(g) / lambda_max(g^ij).
double cfl_dt(const DomainGrid& grid, const GraphField& geom,
              double cfl_safety);

// One explicit midpoint step, dt = min(CFL bound, dt_cap).  On chart escape
// or a numerical breakdown the step is retried with dt halved, up to
// retry_max times; a step that still fails (or whose dt fell below
// 1e-12 h^2, or with ||A||^2 dt > 10) reports accepted = false and leaves
// the state untouched.  Velocities stay expressed in each node's stored
// target chart throughout, so no frame transport is needed; re-ownership
// runs once after the full update.
StepResult flow_step(FlowState& st, const FlowControls& ctl, double dt_cap);

using SnapshotFn = std::function<void(const FlowState&)>;

struct RunResult {
    MonitorReport report;
    std::string termination;  // converged | t_max | singularity-suspected
    double t_end = 0.0;
    long steps = 0;
};

// Advance until the image-diameter bound falls under diam_tol, t reaches
// t_max, or a step cannot be completed.  Samples the monitors every
// monitor_stride steps plus once at the final state, fills the verdicts,
// and measures the exact final diameter.
RunResult run_flow(FlowState& st, const FlowControls& ctl,
                   const MonitorConfig& mcfg, const SnapshotFn& snapshot = {});

}  // namespace graphflow
