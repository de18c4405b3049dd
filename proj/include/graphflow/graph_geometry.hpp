#pragma once

#include <vector>

#include "graphflow/grid.hpp"
#include "graphflow/jets.hpp"
#include "graphflow/model_manifold.hpp"

namespace graphflow {

// Pointwise geometry of the graph of f inside the product M x N, assembled
// from the chart jets of f.  Product vectors are stored as four components
// (domain part, target part); the product metric is conformal blockwise,
// diag(lamM^2, lamM^2, lamN^2, lamN^2), with lamN evaluated at the value of
// f expressed in the chart the jets were taken in.
struct NodeGeometry {
  double g[3];      // induced metric, symmetric slots 00, 01, 11
  double gi[3];     // its inverse
  double detg;
  double lamN;
  double phiN[2];   // gradient of log lamN at the value
  double dF[2][4];  // dF[i] = image of the i-th coordinate direction
  double A[3][4];   // second fundamental form, A[ij slot][product component]
  double H[4];      // mean curvature vector, g^ij A_ij
  double vel[2];    // graph-gauge velocity of the map (target chart)
  double w[2];      // domain drift of the material point, dx/dt = w
  double normA2;
  double normH2;
  double gauge_residual;  // |pr of the lifted velocity - H| / (1 + |H|)
};

// Everything graph_geometry_node needs about one node.
struct NodeJet {
  double lamM;
  double phiM[2];
  double val[2];
  double d1[2][2];  // d1[a][i] = d f^a / d x^i
  double d2[2][3];  // symmetric slots 00, 01, 11
};

void graph_geometry_node(const ModelManifold& N, const NodeJet& in,
                         NodeGeometry& out);

// Per-node geometry over the whole grid, flat arrays per chart, filled at
// evolvable nodes only.
struct GraphField {
  struct ChartGeom {
    std::vector<double> g00, g01, g11;
    std::vector<double> gi00, gi01, gi11;
    std::vector<double> detg, lamN;
    std::vector<double> A[3][4];
    std::vector<double> H[4];
    std::vector<double> vel0, vel1;
    std::vector<double> w0, w1;
    std::vector<double> normA2, normH2, gauge_res;
  };
  std::vector<ChartGeom> charts;

  void resize(const DomainGrid& grid);
};

void compute_graph_geometry(const DomainGrid& grid, const ModelManifold& N,
                            const JetField& jets, GraphField& out);

// Residuals of the structural curvature identities, evaluated at nodes whose
// full 5x5 neighbourhood is evolvable (elsewhere NaN).  Both compare
// finite-difference derivatives of grid fields against pointwise closed
// forms, so they measure the consistency of the whole discretisation and
// shrink at second order under refinement.
//
//   gauss:   induced curvature from differenced induced-metric Christoffels
//            minus the pullback of the product curvature minus the A-terms
//   codazzi: antisymmetrised normal derivative of A minus the projected
//            product curvature term, largest norm over the free index
struct ResidualField {
  struct ChartVals {
    std::vector<double> gauss, codazzi;
  };
  std::vector<ChartVals> charts;
  double max_gauss = 0.0;    // over owned nodes with full neighbourhoods
  double max_codazzi = 0.0;
};

void curvature_residuals(const DomainGrid& grid, const ModelManifold& N,
                         const JetField& jets, const GraphField& geom,
                         ResidualField& out);

// Gauge consistency against an independent discretisation: the divergence
// form of the mean curvature,
//   H_div^a = (1/sqrt(det g)) d_i( sqrt(det g) g^ij d_j F^a )
//           + g^ij Gamma^a(d_i F, d_j F),
// differenced from the stored metric and jet fields, compared with the
// normal projection of the lifted stepping velocity.  The stepping velocity
// itself is assembled from the pointwise Hessian, so the two routes share
// no differencing; their gap measures the spatial discretisation error and
// shrinks at second order.  Values at nodes without a full neighbourhood
// are NaN.
struct GaugeOrderField {
  std::vector<std::vector<double>> charts;  // residual per node
  double max_residual = 0.0;                // over owned nodes
};

void hdiv_gauge_residual(const DomainGrid& grid, const ModelManifold& N,
                         const JetField& jets, const GraphField& geom,
                         GaugeOrderField& out);

}  // namespace graphflow
