#include "graphflow/monitors.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "graphflow/singular_frames.hpp"

namespace graphflow {

namespace {

// Per-node singular data for monitor reductions: conformal factor metrics
// and the first-derivative block of the jets.
SingularData node_singular(const ChartGrid& cg, const JetField::ChartJets& J,
                           const GraphField::ChartGeom& G, int id) {
  const double lamM2 = cg.lamM[id] * cg.lamM[id];
  const double lamN2 = G.lamN[id] * G.lamN[id];
  Eigen::Matrix2d gM = lamM2 * Eigen::Matrix2d::Identity();
  Eigen::Matrix2d gN = lamN2 * Eigen::Matrix2d::Identity();
  Eigen::Matrix2d df;
  df << J.d1[0][id], J.d1[1][id], J.d1[2][id], J.d1[3][id];
  return singular_decompose(gM, gN, df);
}

// G-inner product of the mean curvature with a frame vector.
double pair_H(const GraphField::ChartGeom& G, const ChartGrid& cg, int id,
              const double xi[4]) {
  const double lamM2 = cg.lamM[id] * cg.lamM[id];
  const double lamN2 = G.lamN[id] * G.lamN[id];
  return lamM2 * (G.H[0][id] * xi[0] + G.H[1][id] * xi[1]) +
         lamN2 * (G.H[2][id] * xi[2] + G.H[3][id] * xi[3]);
}

double largest_p_eig(double kappa, const double hpair[2],
                     const double sperp[2]) {
  const double a = kappa * hpair[0] * hpair[0] + sperp[0];
  const double b = kappa * hpair[0] * hpair[1];
  const double c = kappa * hpair[1] * hpair[1] + sperp[1];
  const double mid = 0.5 * (a + c);
  const double rad = std::sqrt(0.25 * (a - c) * (a - c) + b * b);
  return mid + rad;
}

}  // namespace

KappaChoice choose_kappa(const DomainGrid& grid, const JetField& jets,
                         const GraphField& geom) {
  std::vector<double> eps, h2;
  for (int c = 0; c < grid.chart_count(); ++c) {
    const ChartGrid& cg = grid.charts[c];
    const JetField::ChartJets& J = jets.charts[c];
    const GraphField::ChartGeom& G = geom.charts[c];
    for (int id : cg.owned_ids) {
      SingularData sd = node_singular(cg, J, G, id);
      eps.push_back(s_tensor_values(sd).eps_node);
      h2.push_back(G.normH2[id]);
    }
  }

  KappaChoice out;
  double eps0 = 1.0, maxh2 = 0.0;
  for (std::size_t k = 0; k < eps.size(); ++k) {
    eps0 = std::min(eps0, eps[k]);
    maxh2 = std::max(maxh2, h2[k]);
  }
  out.eps0 = eps0;
  if (!(eps0 > 0.0)) return out;

  const double m = 2.0;
  double kappa = 0.5 * eps0 * eps0 / (m * (1.0 + maxh2));
  for (std::size_t k = 0; k < eps.size(); ++k)
    if (h2[k] > 1e-20)
      kappa = std::min(kappa, (eps[k] - 0.5 * eps0) / h2[k]);
  out.kappa = kappa;
  out.enabled = true;
  return out;
}

MonitorSample sample_monitors(const DomainGrid& grid, const ModelManifold& N,
                              const MapField& f, const JetField& jets,
                              const GraphField& geom, double t,
                              const KappaChoice& kappa, double disp_residual) {
  MonitorSample s;
  s.t = t;
  s.eps_min = 1.0;
  s.P_max_eig = -std::numeric_limits<double>::infinity();

  for (int c = 0; c < grid.chart_count(); ++c) {
    const ChartGrid& cg = grid.charts[c];
    const JetField::ChartJets& J = jets.charts[c];
    const GraphField::ChartGeom& G = geom.charts[c];
    for (int id : cg.owned_ids) {
      SingularData sd = node_singular(cg, J, G, id);
      STensorValues sv = s_tensor_values(sd);

      s.lambda_max = std::max(s.lambda_max, sd.lambda[1]);
      s.eps_min = std::min(s.eps_min, sv.eps_node);
      s.max_logdet = std::max(
          s.max_logdet, std::log1p(sd.lambda[0] * sd.lambda[0]) +
                            std::log1p(sd.lambda[1] * sd.lambda[1]));
      s.max_H2 = std::max(s.max_H2, G.normH2[id]);
      s.max_A2 = std::max(s.max_A2, G.normA2[id]);

      const double hp[2] = {pair_H(G, cg, id, sd.xi[0]),
                            pair_H(G, cg, id, sd.xi[1])};
      s.P_max_eig = std::max(
          s.P_max_eig, largest_p_eig(kappa.kappa, hp, sv.sperp_diag));
    }
  }

  s.image_diameter = image_diameter_bound(grid, N, f);
  s.displacement_residual = disp_residual;
  return s;
}

double image_diameter_bound(const DomainGrid& grid, const ModelManifold& N,
                            const MapField& f) {
  Eigen::VectorXd ref;
  double worst = 0.0;
  bool have_ref = false;
  for (int c = 0; c < grid.chart_count(); ++c) {
    for (int id : grid.charts[c].owned_ids) {
      Eigen::VectorXd e = N.embed(f.value(c, id));
      if (!have_ref) {
        ref = e;
        have_ref = true;
        continue;
      }
      worst = std::max(worst, N.embedded_distance(ref, e));
    }
  }
  return 2.0 * worst;
}

double exact_image_diameter(const DomainGrid& grid, const ModelManifold& N,
                            const MapField& f) {
  std::vector<Eigen::VectorXd> pts;
  for (int c = 0; c < grid.chart_count(); ++c)
    for (int id : grid.charts[c].owned_ids)
      pts.push_back(N.embed(f.value(c, id)));
  double worst = 0.0;
  for (std::size_t a = 0; a < pts.size(); ++a)
    for (std::size_t b = a + 1; b < pts.size(); ++b)
      worst = std::max(worst, N.embedded_distance(pts[a], pts[b]));
  return worst;
}

void assert_suite(MonitorReport& report, const MonitorConfig& cfg, double h) {
  report.verdicts.clear();
  const std::vector<MonitorSample>& s = report.samples;
  char buf[160];

  auto scan = [&](const std::string& name, bool enabled, auto violated,
                  const std::string& what) {
    Verdict v;
    v.name = name;
    v.enabled = enabled;
    v.pass = true;
    if (!enabled) {
      v.detail = "disabled";
      report.verdicts.push_back(v);
      return;
    }
    double worst = 0.0;
    for (std::size_t k = 0; k < s.size(); ++k) {
      double excess = violated(k);
      if (excess > 0.0 && v.pass) {
        v.pass = false;
        v.first_violation_t = s[k].t;
      }
      worst = std::max(worst, excess);
    }
    std::snprintf(buf, sizeof buf, "%s, worst excess %.3e", what.c_str(),
                  worst);
    v.detail = buf;
    report.verdicts.push_back(v);
  };

  const bool have = !s.empty();
  const double eps0 = have ? s.front().eps_min : 0.0;
  const double h20 = have ? s.front().max_H2 : 0.0;
  const double ceiling =
      cfg.h2_ceiling < 0.0 ? 10.0 * h20 + 1.0 : cfg.h2_ceiling;
  const double h2_bound = std::max(h20, ceiling);
  const double disp_tol = cfg.tol_disp < 0.0 ? 5.0 * h * h : cfg.tol_disp;

  scan("eps-preserved", have,
       [&](std::size_t k) { return (eps0 - cfg.tol_eps) - s[k].eps_min; },
       "eps_min >= eps_min(0) - tol");
  scan("H2-bounded", have,
       [&](std::size_t k) { return s[k].max_H2 - h2_bound; },
       "max_H2 <= bound");
  scan("logdet-monotone", have,
       [&](std::size_t k) {
         if (k == 0) return 0.0;
         const double slack = cfg.tol_logdet * (s[k].t - s[k - 1].t);
         return s[k].max_logdet - (s[k - 1].max_logdet + slack);
       },
       "max_logdet non-increasing");
  scan("P-negative", have && report.kappa_enabled,
       [&](std::size_t k) { return s[k].P_max_eig >= 0.0 ? s[k].P_max_eig + 1e-300 : 0.0; },
       "P_max_eig < 0");
  scan("displacement-budget", have,
       [&](std::size_t k) { return s[k].displacement_residual - disp_tol; },
       "residual <= tol");

  Verdict diam;
  diam.name = "diameter-converged";
  diam.enabled = true;
  diam.pass = std::isfinite(report.final_diameter) &&
              report.final_diameter < cfg.diam_tol;
  std::snprintf(buf, sizeof buf, "final diameter %.3e vs %.3e",
                report.final_diameter, cfg.diam_tol);
  diam.detail = buf;
  if (!diam.pass && have) diam.first_violation_t = s.back().t;
  report.verdicts.push_back(diam);
}

void emit_series(std::ostream& os, const std::vector<MonitorSample>& samples) {
  os << "t,eps_min,lambda_max,max_H2,max_A2,max_logdet,P_max_eig,"
        "image_diameter,displacement_residual\n";
  char buf[512];
  for (const MonitorSample& s : samples) {
    std::snprintf(buf, sizeof buf,
                  "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                  s.t, s.eps_min, s.lambda_max, s.max_H2, s.max_A2,
                  s.max_logdet, s.P_max_eig, s.image_diameter,
                  s.displacement_residual);
    os << buf;
  }
}

}  // namespace graphflow
