#include "graphflow/graph_geometry.hpp"

#include <cmath>
#include <limits>

#include "graphflow/errors.hpp"
#include "graphflow/parallel.hpp"

namespace graphflow {

namespace {

// Christoffel contraction of a conformal metric, out^k = Gamma^k(u, v),
// from phi = grad log lambda.
inline void conf_gamma(const double phi[2], const double u[2],
                       const double v[2], double out[2]) {
  const double cross = u[0] * v[1] + u[1] * v[0];
  out[0] = phi[0] * u[0] * v[0] + phi[1] * cross - phi[0] * u[1] * v[1];
  out[1] = -phi[1] * u[0] * v[0] + phi[0] * cross + phi[1] * u[1] * v[1];
}

struct ProductMetric {
  double lamM2, lamN2;
  double dot(const double* a, const double* b) const {
    return lamM2 * (a[0] * b[0] + a[1] * b[1]) +
           lamN2 * (a[2] * b[2] + a[3] * b[3]);
  }
};

// Orthogonal projection onto the normal space of the graph: subtract the
// tangential part spanned by the dF columns.
inline void project_normal(const ProductMetric& pm, const double gi[3],
                           const double dF[2][4], const double v[4],
                           double out[4]) {
  const double t0 = pm.dot(v, dF[0]);
  const double t1 = pm.dot(v, dF[1]);
  const double c0 = gi[0] * t0 + gi[1] * t1;
  const double c1 = gi[1] * t0 + gi[2] * t1;
  for (int r = 0; r < 4; ++r) out[r] = v[r] - c0 * dF[0][r] - c1 * dF[1][r];
}

}  // namespace

void graph_geometry_node(const ModelManifold& N, const NodeJet& in,
                         NodeGeometry& out) {
  const double lamM2 = in.lamM * in.lamM;
  N.factor2(in.val, out.lamN, out.phiN);
  const double lamN2 = out.lamN * out.lamN;
  const ProductMetric pm{lamM2, lamN2};

  // d1 columns: image of the i-th coordinate direction in the target chart.
  const double col[2][2] = {{in.d1[0][0], in.d1[1][0]},
                            {in.d1[0][1], in.d1[1][1]}};

  out.g[0] = lamM2 + lamN2 * (col[0][0] * col[0][0] + col[0][1] * col[0][1]);
  out.g[1] = lamN2 * (col[0][0] * col[1][0] + col[0][1] * col[1][1]);
  out.g[2] = lamM2 + lamN2 * (col[1][0] * col[1][0] + col[1][1] * col[1][1]);
  out.detg = out.g[0] * out.g[2] - out.g[1] * out.g[1];
  if (!(out.g[0] > 0.0) || !(out.detg > 0.0))
    throw NumericalError("graph geometry: induced metric lost positivity");
  out.gi[0] = out.g[2] / out.detg;
  out.gi[1] = -out.g[1] / out.detg;
  out.gi[2] = out.g[0] / out.detg;

  out.dF[0][0] = 1.0; out.dF[0][1] = 0.0;
  out.dF[0][2] = col[0][0]; out.dF[0][3] = col[0][1];
  out.dF[1][0] = 0.0; out.dF[1][1] = 1.0;
  out.dF[1][2] = col[1][0]; out.dF[1][3] = col[1][1];

  // Hessian of the graph embedding with the product connection; the slot
  // order pairs (0,0), (0,1), (1,1) with the d2 layout.
  static const int kSlotI[3] = {0, 0, 1};
  static const int kSlotJ[3] = {0, 1, 1};
  double hess[3][4];
  for (int s = 0; s < 3; ++s) {
    const int i = kSlotI[s], j = kSlotJ[s];
    const double ei[2] = {i == 0 ? 1.0 : 0.0, i == 1 ? 1.0 : 0.0};
    const double ej[2] = {j == 0 ? 1.0 : 0.0, j == 1 ? 1.0 : 0.0};
    double gm[2], gn[2];
    conf_gamma(in.phiM, ei, ej, gm);
    conf_gamma(out.phiN, col[i], col[j], gn);
    hess[s][0] = gm[0];
    hess[s][1] = gm[1];
    hess[s][2] = in.d2[0][s] + gn[0];
    hess[s][3] = in.d2[1][s] + gn[1];
  }

  for (int s = 0; s < 3; ++s) project_normal(pm, out.gi, out.dF, hess[s], out.A[s]);

  // Trace parts.  T is the full g^ij Hessian; its domain block w is the
  // tangential piece the graph gauge removes from the velocity.
  double T[4], w[2];
  for (int r = 0; r < 4; ++r)
    T[r] = out.gi[0] * hess[0][r] + 2.0 * out.gi[1] * hess[1][r] +
           out.gi[2] * hess[2][r];
  w[0] = T[0];
  w[1] = T[1];
  out.w[0] = w[0];
  out.w[1] = w[1];
  for (int r = 0; r < 4; ++r)
    out.H[r] = out.gi[0] * out.A[0][r] + 2.0 * out.gi[1] * out.A[1][r] +
               out.gi[2] * out.A[2][r];
  out.vel[0] = T[2] - w[0] * in.d1[0][0] - w[1] * in.d1[0][1];
  out.vel[1] = T[3] - w[0] * in.d1[1][0] - w[1] * in.d1[1][1];

  out.normH2 = pm.dot(out.H, out.H);
  const double gimat[2][2] = {{out.gi[0], out.gi[1]}, {out.gi[1], out.gi[2]}};
  double na2 = 0.0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l)
          na2 += gimat[i][k] * gimat[j][l] * pm.dot(out.A[i + j], out.A[k + l]);
  out.normA2 = na2;

  // The lifted velocity (0, vel) differs from T by the tangent vector
  // w^k dF_k, so the projected difference from H measures how well the
  // assembled pieces satisfy the gauge identity.
  double tanpart[4], res[4];
  for (int r = 0; r < 4; ++r) tanpart[r] = w[0] * out.dF[0][r] + w[1] * out.dF[1][r];
  project_normal(pm, out.gi, out.dF, tanpart, res);
  out.gauge_residual = std::sqrt(pm.dot(res, res)) / (1.0 + std::sqrt(out.normH2));
}

void GraphField::resize(const DomainGrid& grid) {
  charts.assign(grid.chart_count(), ChartGeom{});
  for (int c = 0; c < grid.chart_count(); ++c) {
    const std::size_t n = grid.charts[c].cls.size();
    ChartGeom& cg = charts[c];
    for (auto* v : {&cg.g00, &cg.g01, &cg.g11, &cg.gi00, &cg.gi01, &cg.gi11,
                    &cg.detg, &cg.lamN, &cg.vel0, &cg.vel1, &cg.w0, &cg.w1,
                    &cg.normA2, &cg.normH2, &cg.gauge_res})
      v->assign(n, 0.0);
    for (int s = 0; s < 3; ++s)
      for (int r = 0; r < 4; ++r) cg.A[s][r].assign(n, 0.0);
    for (int r = 0; r < 4; ++r) cg.H[r].assign(n, 0.0);
  }
}

void compute_graph_geometry(const DomainGrid& grid, const ModelManifold& N,
                            const JetField& jets, GraphField& out) {
  if (out.charts.size() != static_cast<std::size_t>(grid.chart_count()))
    out.resize(grid);
  for (int c = 0; c < grid.chart_count(); ++c) {
    const ChartGrid& cg = grid.charts[c];
    const JetField::ChartJets& J = jets.charts[c];
    GraphField::ChartGeom& G = out.charts[c];
    parallel_for(cg.evolvable_ids.size(), [&](std::size_t k) {
      const int id = cg.evolvable_ids[k];
      NodeJet nj;
      nj.lamM = cg.lamM[id];
      nj.phiM[0] = cg.phiM0[id];
      nj.phiM[1] = cg.phiM1[id];
      nj.val[0] = J.val[0][id];
      nj.val[1] = J.val[1][id];
      for (int a = 0; a < 2; ++a)
        for (int i = 0; i < 2; ++i) nj.d1[a][i] = J.d1[a * 2 + i][id];
      for (int a = 0; a < 2; ++a)
        for (int s = 0; s < 3; ++s) nj.d2[a][s] = J.d2[a * 3 + s][id];
      NodeGeometry ng;
      graph_geometry_node(N, nj, ng);
      G.g00[id] = ng.g[0]; G.g01[id] = ng.g[1]; G.g11[id] = ng.g[2];
      G.gi00[id] = ng.gi[0]; G.gi01[id] = ng.gi[1]; G.gi11[id] = ng.gi[2];
      G.detg[id] = ng.detg;
      G.lamN[id] = ng.lamN;
      for (int s = 0; s < 3; ++s)
        for (int r = 0; r < 4; ++r) G.A[s][r][id] = ng.A[s][r];
      for (int r = 0; r < 4; ++r) G.H[r][id] = ng.H[r];
      G.vel0[id] = ng.vel[0];
      G.vel1[id] = ng.vel[1];
      G.w0[id] = ng.w[0];
      G.w1[id] = ng.w[1];
      G.normA2[id] = ng.normA2;
      G.normH2[id] = ng.normH2;
      G.gauge_res[id] = ng.gauge_residual;
    });
  }
}

namespace {

// Jacobian of the sphere chart transition y -> y/|y|^2, applied to a target
// vector expressed at y.
inline void transition_jacobian_apply(const double y[2], const double v[2],
                                      double out[2]) {
  const double r2 = y[0] * y[0] + y[1] * y[1];
  if (!(r2 > 0.0))
    throw NumericalError("chart transition Jacobian at a chart origin");
  const double inv2 = 1.0 / (r2 * r2);
  out[0] = ((y[1] * y[1] - y[0] * y[0]) * v[0] - 2.0 * y[0] * y[1] * v[1]) * inv2;
  out[1] = (-2.0 * y[0] * y[1] * v[0] + (y[0] * y[0] - y[1] * y[1]) * v[1]) * inv2;
}

struct ResidualScratch {
  const DomainGrid& grid;
  const ModelManifold& N;
  const JetField& jets;
  const GraphField& geom;
  int c;
  double h;

  const ChartGrid& cg() const { return grid.charts[c]; }
  const JetField::ChartJets& J() const { return jets.charts[c]; }
  const GraphField::ChartGeom& G() const { return geom.charts[c]; }

  int nb(int id, int di, int dj) const { return grid.neighbor(c, id, di, dj); }

  // Christoffels of the induced metric at a node, from 3-point differences
  // of the stored metric field.  gam[l][s] with s the symmetric ij slot.
  void induced_gamma(int id, double gam[2][3]) const {
    const GraphField::ChartGeom& g = G();
    double dg[2][3];
    for (int i = 0; i < 2; ++i) {
      const int ip = nb(id, i == 0 ? 1 : 0, i == 1 ? 1 : 0);
      const int im = nb(id, i == 0 ? -1 : 0, i == 1 ? -1 : 0);
      dg[i][0] = (g.g00[ip] - g.g00[im]) / (2.0 * h);
      dg[i][1] = (g.g01[ip] - g.g01[im]) / (2.0 * h);
      dg[i][2] = (g.g11[ip] - g.g11[im]) / (2.0 * h);
    }
    const double gi[2][2] = {{g.gi00[id], g.gi01[id]}, {g.gi01[id], g.gi11[id]}};
    static const int kSlotI[3] = {0, 0, 1};
    static const int kSlotJ[3] = {0, 1, 1};
    for (int l = 0; l < 2; ++l)
      for (int s = 0; s < 3; ++s) {
        const int i = kSlotI[s], k = kSlotJ[s];
        double sum = 0.0;
        for (int m = 0; m < 2; ++m)
          sum += gi[l][m] * (dg[i][m + k] + dg[k][m + i] - dg[m][i + k]);
        gam[l][s] = 0.5 * sum;
      }
  }

  // A_{jk} components at a node, re-expressed so the target block lives in
  // the chart `want`.
  void a_at(int id, int slot, int want, double out[4]) const {
    const GraphField::ChartGeom& g = G();
    out[0] = g.A[slot][0][id];
    out[1] = g.A[slot][1][id];
    double v[2] = {g.A[slot][2][id], g.A[slot][3][id]};
    if (J().tchart[id] != want) {
      const double y[2] = {J().val[0][id], J().val[1][id]};
      double t[2];
      transition_jacobian_apply(y, v, t);
      v[0] = t[0];
      v[1] = t[1];
    }
    out[2] = v[0];
    out[3] = v[1];
  }
};

}  // namespace

void curvature_residuals(const DomainGrid& grid, const ModelManifold& N,
                         const JetField& jets, const GraphField& geom,
                         ResidualField& out) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const double h = grid.spacing();
  const double kappaM = grid.domain().curvature();
  const double kappaN = N.curvature();
  out.charts.assign(grid.chart_count(), {});
  out.max_gauss = 0.0;
  out.max_codazzi = 0.0;

  for (int c = 0; c < grid.chart_count(); ++c) {
    const ChartGrid& cg = grid.charts[c];
    ResidualField::ChartVals& R = out.charts[c];
    R.gauss.assign(cg.cls.size(), nan);
    R.codazzi.assign(cg.cls.size(), nan);
    ResidualScratch S{grid, N, jets, geom, c, h};

    parallel_for(cg.evolvable_ids.size(), [&](std::size_t k) {
      const int id = cg.evolvable_ids[k];
      bool core = true;
      for (int dj = -2; dj <= 2 && core; ++dj)
        for (int di = -2; di <= 2 && core; ++di) {
          const int q = grid.neighbor(c, id, di, dj);
          if (cg.cls[q] != kEvolvable) core = false;
        }
      if (!core) return;

      const GraphField::ChartGeom& G = S.G();
      const JetField::ChartJets& J = S.J();
      const double lamM = cg.lamM[id];
      const double lamM2 = lamM * lamM;
      const double lamN2 = G.lamN[id] * G.lamN[id];
      const ProductMetric pm{lamM2, lamN2};
      const double gi[3] = {G.gi00[id], G.gi01[id], G.gi11[id]};
      const double gmat[2][2] = {{G.g00[id], G.g01[id]}, {G.g01[id], G.g11[id]}};
      const int want = J.tchart[id];

      double dF[2][4];
      const double col[2][2] = {{J.d1[0][id], J.d1[2 + 0][id]},
                                {J.d1[1][id], J.d1[2 + 1][id]}};
      dF[0][0] = 1.0; dF[0][1] = 0.0; dF[0][2] = col[0][0]; dF[0][3] = col[0][1];
      dF[1][0] = 0.0; dF[1][1] = 1.0; dF[1][2] = col[1][0]; dF[1][3] = col[1][1];

      // Induced curvature component R(0,1,0,1) from differenced Christoffels.
      double gamC[2][3], gamE[2][3], gamW[2][3], gamNn[2][3], gamSs[2][3];
      S.induced_gamma(id, gamC);
      S.induced_gamma(S.nb(id, 1, 0), gamE);
      S.induced_gamma(S.nb(id, -1, 0), gamW);
      S.induced_gamma(S.nb(id, 0, 1), gamNn);
      S.induced_gamma(S.nb(id, 0, -1), gamSs);
      double up[2];
      for (int m = 0; m < 2; ++m) {
        const double d0_g11 = (gamE[m][2] - gamW[m][2]) / (2.0 * h);
        const double d1_g01 = (gamNn[m][1] - gamSs[m][1]) / (2.0 * h);
        double quad = 0.0;
        for (int q = 0; q < 2; ++q)
          quad += gamC[m][q] * gamC[q][2] - gamC[m][1 + q] * gamC[q][1];
        up[m] = d0_g11 - d1_g01 + quad;
      }
      const double r_ind = gmat[0][0] * up[0] + gmat[0][1] * up[1];

      const double p00 = gmat[0][0] - lamM2;
      const double p01 = gmat[0][1];
      const double p11 = gmat[1][1] - lamM2;
      const double frk = kappaM * lamM2 * lamM2 + kappaN * (p00 * p11 - p01 * p01);

      double a00[4], a01[4], a11[4];
      S.a_at(id, 0, want, a00);
      S.a_at(id, 1, want, a01);
      S.a_at(id, 2, want, a11);
      const double aterm = pm.dot(a00, a11) - pm.dot(a01, a01);
      const double gauss = std::abs(r_ind - frk - aterm);
      R.gauss[id] = gauss;

      // Codazzi: antisymmetrised normal derivative of A against the ambient
      // curvature term, for each free index.
      const double phiM[2] = {cg.phiM0[id], cg.phiM1[id]};
      double lamN_unused, phiN[2];
      {
        const double val[2] = {J.val[0][id], J.val[1][id]};
        N.factor2(val, lamN_unused, phiN);
      }
      double worst = 0.0;
      for (int kk = 0; kk < 2; ++kk) {
        double lhs[4] = {0.0, 0.0, 0.0, 0.0};
        // pr(d_0 A_{1k} - d_1 A_{0k} + Gamma_K corrections)
        double inner[4];
        for (int r = 0; r < 4; ++r) inner[r] = 0.0;
        for (int i = 0; i < 2; ++i) {
          const int slot = 1 - i + kk;  // (j,k) with j = 1-i
          const int ip = S.nb(id, i == 0 ? 1 : 0, i == 1 ? 1 : 0);
          const int im = S.nb(id, i == 0 ? -1 : 0, i == 1 ? -1 : 0);
          double ap[4], am[4], ac[4];
          S.a_at(ip, slot, want, ap);
          S.a_at(im, slot, want, am);
          S.a_at(id, slot, want, ac);
          const double sign = i == 0 ? 1.0 : -1.0;
          double gm[2], gn[2];
          const double ei[2] = {i == 0 ? 1.0 : 0.0, i == 1 ? 1.0 : 0.0};
          conf_gamma(phiM, ei, ac, gm);  // domain block of A is ac[0..1]
          conf_gamma(phiN, col[i], ac + 2, gn);
          for (int r = 0; r < 4; ++r) {
            const double fd = (ap[r] - am[r]) / (2.0 * h);
            const double corr = r < 2 ? gm[r] : gn[r - 2];
            inner[r] += sign * (fd + corr);
          }
        }
        project_normal(pm, gi, dF, inner, lhs);
        // - Gamma^l_{0k} A_{1l} + Gamma^l_{1k} A_{0l}
        const double* arow[2][2] = {{a00, a01}, {a01, a11}};
        for (int l = 0; l < 2; ++l) {
          const double g0k = gamC[l][0 + kk];
          const double g1k = gamC[l][1 + kk];
          for (int r = 0; r < 4; ++r)
            lhs[r] += -g0k * arow[1][l][r] + g1k * arow[0][l][r];
        }

        // pr(R_K(dF_0, dF_1) dF_k) blockwise for constant curvature factors.
        double rk[4];
        const double gm1k = lamM2 * (kk == 1 ? 1.0 : 0.0);
        const double gm0k = lamM2 * (kk == 0 ? 1.0 : 0.0);
        rk[0] = kappaM * (gm1k * dF[0][0] - gm0k * dF[1][0]);
        rk[1] = kappaM * (gm1k * dF[0][1] - gm0k * dF[1][1]);
        const double gn1k =
            lamN2 * (col[1][0] * col[kk][0] + col[1][1] * col[kk][1]);
        const double gn0k =
            lamN2 * (col[0][0] * col[kk][0] + col[0][1] * col[kk][1]);
        rk[2] = kappaN * (gn1k * col[0][0] - gn0k * col[1][0]);
        rk[3] = kappaN * (gn1k * col[0][1] - gn0k * col[1][1]);
        double rkp[4];
        project_normal(pm, gi, dF, rk, rkp);

        double diff2 = 0.0;
        {
          double d[4];
          for (int r = 0; r < 4; ++r) d[r] = lhs[r] - rkp[r];
          diff2 = pm.dot(d, d);
        }
        worst = std::max(worst, std::sqrt(diff2));
      }
      R.codazzi[id] = worst;
    });

    for (int id : cg.owned_ids) {
      if (std::isnan(R.gauss[id])) continue;
      out.max_gauss = std::max(out.max_gauss, R.gauss[id]);
      out.max_codazzi = std::max(out.max_codazzi, R.codazzi[id]);
    }
  }
}

void hdiv_gauge_residual(const DomainGrid& grid, const ModelManifold& N,
                         const JetField& jets, const GraphField& geom,
                         GaugeOrderField& out) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const double h = grid.spacing();
  out.charts.assign(grid.chart_count(), {});
  out.max_residual = 0.0;

  for (int c = 0; c < grid.chart_count(); ++c) {
    const ChartGrid& cg = grid.charts[c];
    const JetField::ChartJets& J = jets.charts[c];
    const GraphField::ChartGeom& G = geom.charts[c];
    std::vector<double>& R = out.charts[c];
    R.assign(cg.cls.size(), nan);

    // flux component i of the ambient embedding at a node, target block
    // re-expressed so the vector lives in the chart `want`:
    //   sqrt(det g) g^{ij} d_j F,  with d_j F = (e_j, d_j f)
    auto flux = [&](int id, int i, int want, double fx[4]) {
      double colv[2][2] = {{J.d1[0][id], J.d1[2][id]},
                           {J.d1[1][id], J.d1[3][id]}};
      if (J.tchart[id] != want) {
        const double y[2] = {J.val[0][id], J.val[1][id]};
        for (int j = 0; j < 2; ++j) {
          double t[2];
          transition_jacobian_apply(y, colv[j], t);
          colv[j][0] = t[0];
          colv[j][1] = t[1];
        }
      }
      const double gi[2][2] = {{G.gi00[id], G.gi01[id]},
                               {G.gi01[id], G.gi11[id]}};
      const double s = std::sqrt(G.detg[id]);
      fx[0] = s * gi[i][0];
      fx[1] = s * gi[i][1];
      for (int a = 0; a < 2; ++a)
        fx[2 + a] = s * (gi[i][0] * colv[0][a] + gi[i][1] * colv[1][a]);
    };

    parallel_for(cg.evolvable_ids.size(), [&](std::size_t k) {
      const int id = cg.evolvable_ids[k];
      bool core = true;
      for (int dj = -1; dj <= 1 && core; ++dj)
        for (int di = -1; di <= 1 && core; ++di)
          if (cg.cls[grid.neighbor(c, id, di, dj)] != kEvolvable) core = false;
      if (!core) return;

      const int want = J.tchart[id];
      const double val[2] = {J.val[0][id], J.val[1][id]};
      double lamN, phiN[2];
      N.factor2(val, lamN, phiN);
      const double lamM2 = cg.lamM[id] * cg.lamM[id];
      const ProductMetric pm{lamM2, lamN * lamN};

      double hd[4] = {0.0, 0.0, 0.0, 0.0};
      const double invs = 1.0 / std::sqrt(G.detg[id]);
      for (int i = 0; i < 2; ++i) {
        const int ip = grid.neighbor(c, id, i == 0 ? 1 : 0, i == 1 ? 1 : 0);
        const int im = grid.neighbor(c, id, i == 0 ? -1 : 0, i == 1 ? -1 : 0);
        double fp[4], fm[4];
        flux(ip, i, want, fp);
        flux(im, i, want, fm);
        for (int r = 0; r < 4; ++r)
          hd[r] += invs * (fp[r] - fm[r]) / (2.0 * h);
      }
      const double col[2][2] = {{J.d1[0][id], J.d1[2][id]},
                                {J.d1[1][id], J.d1[3][id]}};
      const double phiM[2] = {cg.phiM0[id], cg.phiM1[id]};
      const double gi[3] = {G.gi00[id], G.gi01[id], G.gi11[id]};
      static const int kSI[3] = {0, 0, 1};
      static const int kSJ[3] = {0, 1, 1};
      for (int s = 0; s < 3; ++s) {
        const double ei[2] = {kSI[s] == 0 ? 1.0 : 0.0, kSI[s] == 1 ? 1.0 : 0.0};
        const double ej[2] = {kSJ[s] == 0 ? 1.0 : 0.0, kSJ[s] == 1 ? 1.0 : 0.0};
        double gm[2], gn[2];
        conf_gamma(phiM, ei, ej, gm);
        conf_gamma(phiN, col[kSI[s]], col[kSJ[s]], gn);
        const double wgt = s == 1 ? 2.0 * gi[1] : gi[s];
        hd[0] += wgt * gm[0];
        hd[1] += wgt * gm[1];
        hd[2] += wgt * gn[0];
        hd[3] += wgt * gn[1];
      }

      // both routes are normal after projection; their gap is the spatial
      // discretisation error of the differenced route
      double dF[2][4];
      dF[0][0] = 1.0; dF[0][1] = 0.0; dF[0][2] = col[0][0]; dF[0][3] = col[0][1];
      dF[1][0] = 0.0; dF[1][1] = 1.0; dF[1][2] = col[1][0]; dF[1][3] = col[1][1];
      const double lift_vel[4] = {0.0, 0.0, G.vel0[id], G.vel1[id]};
      double hdn[4], vn[4];
      project_normal(pm, gi, dF, hd, hdn);
      project_normal(pm, gi, dF, lift_vel, vn);
      double d[4];
      for (int r = 0; r < 4; ++r) d[r] = vn[r] - hdn[r];
      R[id] = std::sqrt(pm.dot(d, d)) /
              (1.0 + std::sqrt(pm.dot(hdn, hdn)));
    });

    for (int id : cg.owned_ids) {
      if (std::isnan(R[id])) continue;
      out.max_residual = std::max(out.max_residual, R[id]);
    }
  }
}

}  // namespace graphflow
