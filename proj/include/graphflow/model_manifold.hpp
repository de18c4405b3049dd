#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <vector>

#include "graphflow/errors.hpp"

namespace graphflow {

enum class SpaceKind { Sphere, Hyperbolic, Euclidean };

std::string to_string(SpaceKind k);

// A point given by a chart id and chart coordinates.
struct ChartPoint {
    int chart = 0;
    Eigen::VectorXd x;

    ChartPoint() = default;
    ChartPoint(int c, Eigen::VectorXd coords) : chart(c), x(std::move(coords)) {}
};

// Christoffel symbols at a point, Gamma(k,i,j) = Gamma^k_{ij}.
struct Christoffels {
    int dim = 0;
    std::vector<double> comp; // dim^3, k-major

    double operator()(int k, int i, int j) const {
        return comp[(k * dim + i) * dim + j];
    }
    double& at(int k, int i, int j) { return comp[(k * dim + i) * dim + j]; }
};

// Curvature tensor at a point with the pairing R(X,Y,Z,W) = <R(X,Y)W, Z>,
// so that R(X,Y,X,Y) is the sectional numerator.  For the model spaces
// R_{ijkl} = curv * (g_ik g_jl - g_il g_jk).
struct RiemannData {
    int dim = 0;
    std::vector<double> comp; // dim^4
    double sectional = 0.0;   // the constant sectional curvature

    double operator()(int i, int j, int k, int l) const {
        return comp[((i * dim + j) * dim + k) * dim + l];
    }
    double& at(int i, int j, int k, int l) {
        return comp[((i * dim + j) * dim + k) * dim + l];
    }
};

struct HypothesisCheck {
    bool holds = false;
    double margin = 0.0; // smallest slack across the inequality chain
    std::string detail;
};

// Simply connected model space of constant curvature in conformal charts.
//
// All three kinds use a conformally flat chart g = lambda(x)^2 * delta:
//   Sphere (curv > 0):  two stereographic charts of the unit sphere (chart 0
//       projects from the north pole so its origin is the south pole, chart 1
//       from the south pole), each restricted to |x| <= 1.8, transition map
//       x -> x/|x|^2 on the overlap annulus 1/1.8 <= |x| <= 1.8.  The metric
//       carries the curvature scale: lambda(x) = 2 / (sqrt(curv) (1+|x|^2)).
//   Hyperbolic (curv < 0): one chart on the open unit ball,
//       lambda(x) = 2 / (sqrt(-curv) (1-|x|^2)).
//   Euclidean (curv = 0): one chart on all of R^dim, lambda = 1.
//
// With these normalizations the sectional curvature equals `curv` exactly
// (the finite-difference curvature test is the arbiter for the sign and
// scale conventions).
class ModelManifold {
public:
    static constexpr double kSphereChartRadius = 1.8;
    static constexpr double kSphereOwnRadius = 1.0;
    static constexpr double kChartBoundaryTol = 1e-9;

    ModelManifold(SpaceKind kind, int dim, double curvature);

    SpaceKind kind() const { return kind_; }
    int dim() const { return dim_; }
    double curvature() const { return curv_; }
    int chart_count() const { return kind_ == SpaceKind::Sphere ? 2 : 1; }

    // Throws DomainError if the point is not in the chart's admissible range.
    void check_point(const ChartPoint& p) const;
    bool point_ok(const ChartPoint& p) const;

    double conformal_factor(const ChartPoint& p) const;
    Eigen::VectorXd conformal_log_grad(const ChartPoint& p) const;

    Eigen::MatrixXd metric_at(const ChartPoint& p) const;
    Christoffels christoffel_at(const ChartPoint& p) const;
    RiemannData riemann_at(const ChartPoint& p) const;

    // Geodesic distance between two points (any chart combination).
    double distance(const ChartPoint& p, const ChartPoint& q) const;

    // Re-express a point in the other chart (sphere only).  Own inverse.
    ChartPoint transition(const ChartPoint& p) const;

    // Isometric model embedding used for distances and diameters:
    //   sphere -> unit vector in R^{dim+1} (scale 1/sqrt(curv) on distances),
    //   hyperbolic -> hyperboloid point (x0, xv) in R^{dim+1},
    //   euclidean -> the chart coordinates themselves.
    Eigen::VectorXd embed(const ChartPoint& p) const;

    // Distance between two embedded points (same convention as embed()).
    double embedded_distance(const Eigen::VectorXd& u, const Eigen::VectorXd& v) const;

    // Hot-loop helper, dim 2, no chart validation: conformal factor and
    // gradient of log(lambda) at chart coordinates y.  Both sphere charts
    // share the same formulas.
    void factor2(const double y[2], double& lambda, double phi[2]) const {
        double r2 = y[0] * y[0] + y[1] * y[1];
        switch (kind_) {
        case SpaceKind::Sphere: {
            double d = 1.0 + r2;
            lambda = 2.0 / (sqrt_abs_curv_ * d);
            phi[0] = -2.0 * y[0] / d;
            phi[1] = -2.0 * y[1] / d;
            break;
        }
        case SpaceKind::Hyperbolic: {
            double d = 1.0 - r2;
            lambda = 2.0 / (sqrt_abs_curv_ * d);
            phi[0] = 2.0 * y[0] / d;
            phi[1] = 2.0 * y[1] / d;
            break;
        }
        case SpaceKind::Euclidean:
            lambda = 1.0;
            phi[0] = 0.0;
            phi[1] = 0.0;
            break;
        }
    }

private:
    SpaceKind kind_;
    int dim_;
    double curv_;
    double sqrt_abs_curv_;
};

// Curvature hypothesis chain for a flow M -> N with constants sigma, mu > 0:
//   sec_M > -sigma,
//   Ric_M >= (m-1) sigma,
//   (m-1) sigma >= (m-1) sec_N,
//   (m-1) sec_N >= -mu,
// evaluated with the model spaces' constant curvatures (Ric_M = (m-1) sec_M).
// margin is the smallest slack over all four inequalities.
HypothesisCheck check_hypotheses(const ModelManifold& M, const ModelManifold& N,
                                 double sigma, double mu);

} // namespace graphflow
