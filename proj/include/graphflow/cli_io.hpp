#pragma once

#include <iosfwd>
#include <string>

#include "graphflow/flow_engine.hpp"
#include "graphflow/initial_maps.hpp"

namespace graphflow {

// One model space as named in a config file.
struct ManifoldSpec {
    std::string kind = "sphere"; // sphere | hyperbolic | euclidean
    int dimension = 2;
    double curvature = 1.0;

    ModelManifold build() const;

    friend bool operator==(const ManifoldSpec&, const ManifoldSpec&) = default;
};

// A full run description.  The config grammar is flat `key = value` lines,
// one per field, with '#' comments; parse_config documents the key names.
struct RunConfig {
    ManifoldSpec domain;
    ManifoldSpec target;
    InitialMapSpec map;
    int resolution = 64;
    double cfl_safety = 0.2;
    double t_max = 10.0;
    double diam_tol = 1e-3;
    double tol_eps = 1e-3;
    double tol_logdet = 1e-6;
    int monitor_stride = 20;
    int snapshot_stride = 0;
    int tracker_stride = 8;
    std::string output_dir = "out";
    unsigned long seed = 0;
    double sigma = 1.0;
    double mu = 1.0;

    friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

RunConfig default_config();

// Parses a config document.  Unknown keys, type mismatches, and invariant
// violations are all collected and thrown together in one ConfigError so a
// bad file is fixed in a single pass.  Missing keys keep their defaults.
RunConfig parse_config(const std::string& text);

// Inverse of parse_config: emits every key in a fixed order with exact
// round-trip number formatting, so parse_config(emit_config(c)) == c.
std::string emit_config(const RunConfig& cfg);

// True when the initial map satisfies the strict length-decreasing
// hypothesis; false marks the run as exploratory.
bool theorem_compliant(const RunConfig& cfg);

// Orchestration, one call per CLI subcommand.  Each returns the process
// exit status and writes progress lines to `log`; files go to
// cfg.output_dir.  Module failures are thrown, not converted.
//
//   orchestrate        hypothesis check, flow run, series/plots/verdicts
//                      (exit 0 iff every enabled verdict passes)
//   run_oracle         reduced rotational solver, reduced series file
//                      (exit 0 unless the profile hits a singularity)
//   run_hypothesis_check   curvature-chain check only (exit 0 iff it holds)
int orchestrate(const RunConfig& cfg, std::ostream& log);
int run_oracle(const RunConfig& cfg, std::ostream& log);
int run_hypothesis_check(const RunConfig& cfg, std::ostream& log);

// Per-monitor two-column (t, value) plot files in `dir`, deterministic
// names plot_<monitor>.csv, header row always present.
void emit_plotdata(const MonitorReport& report, const std::string& dir);

// One row per owned node: chart,i,j,x0,x1,tchart,y0,y1.
void write_snapshot(const DomainGrid& grid, const MapField& f,
                    const std::string& path);

std::string version_string();

} // namespace graphflow
