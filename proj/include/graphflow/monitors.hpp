#pragma once

#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include "graphflow/graph_geometry.hpp"
#include "graphflow/grid.hpp"
#include "graphflow/jets.hpp"
#include "graphflow/map_field.hpp"

namespace graphflow {

// One row of the run's time series: the scalars whose behaviour the flow
// is expected to control.  All reductions run over owned nodes only, in
// node index order, so a fixed input yields bit-identical samples.
struct MonitorSample {
  double t = 0.0;
  double eps_min = 0.0;      // min over nodes of (1-l^2)/(1+l^2), l the
                             // largest singular value at the node
  double lambda_max = 0.0;
  double max_H2 = 0.0;
  double max_A2 = 0.0;
  double max_logdet = 0.0;   // max over nodes of sum_i log(1+l_i^2)
  double P_max_eig = 0.0;    // largest eigenvalue of kappa theta + s_perp
                             // on the normal frame, max over nodes
  double image_diameter = 0.0;
  double displacement_residual = 0.0;
};

// The pinching weight kappa is fixed from the initial data:
//   kappa = min( eps0^2 / (2 m (1 + max|H|^2)),
//                min over nodes (eps_node - eps0/2) / |H|^2 ),
// the second entry forcing the largest P eigenvalue to at most -eps0/2 at
// t = 0.  When the data is not strictly length decreasing (eps0 <= 0) the
// P monitor is disabled and kappa reported as zero.
struct KappaChoice {
  double kappa = 0.0;
  bool enabled = false;
  double eps0 = 0.0;
};

KappaChoice choose_kappa(const DomainGrid& grid, const JetField& jets,
                         const GraphField& geom);

// Assemble one sample from current field data.  The diameter entry is the
// certified upper bound below; the displacement residual is carried in by
// the caller, which owns the trackers.
MonitorSample sample_monitors(const DomainGrid& grid, const ModelManifold& N,
                              const MapField& f, const JetField& jets,
                              const GraphField& geom, double t,
                              const KappaChoice& kappa, double disp_residual);

// 2 max distance from a fixed reference image point: an upper bound on the
// image diameter by the triangle inequality, cheap enough for every sample.
double image_diameter_bound(const DomainGrid& grid, const ModelManifold& N,
                            const MapField& f);

// Exact all-pairs image diameter over owned nodes; used once for the final
// verdict.
double exact_image_diameter(const DomainGrid& grid, const ModelManifold& N,
                            const MapField& f);

struct Verdict {
  std::string name;
  bool enabled = true;
  bool pass = false;
  double first_violation_t = std::numeric_limits<double>::quiet_NaN();
  std::string detail;
};

struct MonitorConfig {
  double tol_eps = 1e-3;     // allowed dip of eps_min below its start
  double h2_ceiling = -1.0;  // bound for max_H2; < 0 means 10*max_H2(0)+1
  double tol_logdet = 1e-6;  // allowed increase of max_logdet per unit time
  double tol_disp = -1.0;    // displacement residual bound; < 0 means 5 h^2
  double diam_tol = 1e-3;    // final diameter target
};

struct MonitorReport {
  std::vector<MonitorSample> samples;
  std::vector<Verdict> verdicts;
  double kappa_used = 0.0;
  bool kappa_enabled = false;
  double final_diameter = std::numeric_limits<double>::quiet_NaN();
};

// Fill report.verdicts from the sample series:
//   eps-preserved        eps_min(t) >= eps_min(0) - tol_eps
//   H2-bounded           max_H2(t) <= max(max_H2(0), ceiling)
//   logdet-monotone      max_logdet non-increasing up to tol_logdet drift
//   P-negative           P_max_eig(t) < 0        (skipped when disabled)
//   displacement-budget  displacement_residual <= tol_disp
//   diameter-converged   final_diameter < diam_tol
// h is the grid spacing, used for the default displacement tolerance.
void assert_suite(MonitorReport& report, const MonitorConfig& cfg, double h);

// Comma-separated series, header row plus one row per sample, 17 significant
// digits, LF line ends.
void emit_series(std::ostream& os, const std::vector<MonitorSample>& samples);

}  // namespace graphflow
