#include "graphflow/model_manifold.hpp"

#include <algorithm>
#include <sstream>

namespace graphflow {

std::string to_string(SpaceKind k) {
    switch (k) {
    case SpaceKind::Sphere: return "sphere";
    case SpaceKind::Hyperbolic: return "hyperbolic";
    case SpaceKind::Euclidean: return "euclidean";
    }
    return "?";
}

ModelManifold::ModelManifold(SpaceKind kind, int dim, double curvature)
    : kind_(kind), dim_(dim), curv_(curvature) {
    std::vector<std::string> bad;
    if (dim < 1) bad.push_back("manifold dimension must be >= 1");
    if (kind == SpaceKind::Sphere && !(curvature > 0.0))
        bad.push_back("sphere requires curvature > 0");
    if (kind == SpaceKind::Hyperbolic && !(curvature < 0.0))
        bad.push_back("hyperbolic space requires curvature < 0");
    if (kind == SpaceKind::Euclidean && curvature != 0.0)
        bad.push_back("euclidean space requires curvature == 0");
    if (!std::isfinite(curvature)) bad.push_back("curvature must be finite");
    if (!bad.empty()) throw ConfigError(bad);
    sqrt_abs_curv_ = std::sqrt(std::abs(curvature));
    if (kind == SpaceKind::Euclidean) sqrt_abs_curv_ = 1.0;
}

bool ModelManifold::point_ok(const ChartPoint& p) const {
    if (p.x.size() != dim_) return false;
    if (!p.x.allFinite()) return false;
    double r = p.x.norm();
    switch (kind_) {
    case SpaceKind::Sphere:
        return (p.chart == 0 || p.chart == 1) && r <= kSphereChartRadius + kChartBoundaryTol;
    case SpaceKind::Hyperbolic:
        return p.chart == 0 && r < 1.0;
    case SpaceKind::Euclidean:
        return p.chart == 0;
    }
    return false;
}

void ModelManifold::check_point(const ChartPoint& p) const {
    if (!point_ok(p)) {
        std::ostringstream os;
        os << to_string(kind_) << " chart " << p.chart << ": coordinates (";
        for (int i = 0; i < p.x.size(); ++i) os << (i ? "," : "") << p.x[i];
        os << ") outside the admissible chart range";
        throw DomainError(os.str());
    }
}

double ModelManifold::conformal_factor(const ChartPoint& p) const {
    check_point(p);
    double r2 = p.x.squaredNorm();
    switch (kind_) {
    case SpaceKind::Sphere: return 2.0 / (sqrt_abs_curv_ * (1.0 + r2));
    case SpaceKind::Hyperbolic: return 2.0 / (sqrt_abs_curv_ * (1.0 - r2));
    case SpaceKind::Euclidean: return 1.0;
    }
    return 0.0;
}

Eigen::VectorXd ModelManifold::conformal_log_grad(const ChartPoint& p) const {
    check_point(p);
    double r2 = p.x.squaredNorm();
    switch (kind_) {
    case SpaceKind::Sphere: return -2.0 / (1.0 + r2) * p.x;
    case SpaceKind::Hyperbolic: return 2.0 / (1.0 - r2) * p.x;
    case SpaceKind::Euclidean: return Eigen::VectorXd::Zero(dim_);
    }
    return {};
}

Eigen::MatrixXd ModelManifold::metric_at(const ChartPoint& p) const {
    double lam = conformal_factor(p);
    return lam * lam * Eigen::MatrixXd::Identity(dim_, dim_);
}

Christoffels ModelManifold::christoffel_at(const ChartPoint& p) const {
    // Conformal metric lambda^2 delta with phi = log(lambda):
    //   Gamma^k_{ij} = delta_ki phi_j + delta_kj phi_i - delta_ij phi_k.
    Eigen::VectorXd phi = conformal_log_grad(p);
    Christoffels G;
    G.dim = dim_;
    G.comp.assign(static_cast<std::size_t>(dim_) * dim_ * dim_, 0.0);
    for (int k = 0; k < dim_; ++k)
        for (int i = 0; i < dim_; ++i)
            for (int j = 0; j < dim_; ++j) {
                double v = 0.0;
                if (k == i) v += phi[j];
                if (k == j) v += phi[i];
                if (i == j) v -= phi[k];
                G.at(k, i, j) = v;
            }
    return G;
}

RiemannData ModelManifold::riemann_at(const ChartPoint& p) const {
    Eigen::MatrixXd g = metric_at(p);
    RiemannData R;
    R.dim = dim_;
    R.sectional = curv_;
    R.comp.assign(static_cast<std::size_t>(dim_) * dim_ * dim_ * dim_, 0.0);
    for (int i = 0; i < dim_; ++i)
        for (int j = 0; j < dim_; ++j)
            for (int k = 0; k < dim_; ++k)
                for (int l = 0; l < dim_; ++l)
                    R.at(i, j, k, l) = curv_ * (g(i, k) * g(j, l) - g(i, l) * g(j, k));
    return R;
}

ChartPoint ModelManifold::transition(const ChartPoint& p) const {
    if (kind_ != SpaceKind::Sphere)
        throw DomainError("transition: " + to_string(kind_) + " has a single chart");
    check_point(p);
    double r2 = p.x.squaredNorm();
    if (r2 == 0.0)
        throw ChartEscapeError("transition: chart origin has no image in the other chart");
    ChartPoint q(1 - p.chart, p.x / r2);
    if (!point_ok(q))
        throw ChartEscapeError("transition: image outside the other chart's range");
    return q;
}

Eigen::VectorXd ModelManifold::embed(const ChartPoint& p) const {
    check_point(p);
    switch (kind_) {
    case SpaceKind::Sphere: {
        // chart 0 projects from the north pole: embed(0) = south pole.
        double r2 = p.x.squaredNorm();
        Eigen::VectorXd u(dim_ + 1);
        u.head(dim_) = 2.0 * p.x / (1.0 + r2);
        double last = (r2 - 1.0) / (1.0 + r2);
        u[dim_] = p.chart == 0 ? last : -last;
        return u;
    }
    case SpaceKind::Hyperbolic: {
        double r2 = p.x.squaredNorm();
        Eigen::VectorXd u(dim_ + 1);
        u[0] = (1.0 + r2) / (1.0 - r2);
        u.tail(dim_) = 2.0 * p.x / (1.0 - r2);
        return u;
    }
    case SpaceKind::Euclidean:
        return p.x;
    }
    return {};
}

double ModelManifold::embedded_distance(const Eigen::VectorXd& u, const Eigen::VectorXd& v) const {
    switch (kind_) {
    case SpaceKind::Sphere:
        // half-angle form; acos(u.v) loses half the digits near 0 and pi
        return 2.0 * std::atan2((u - v).norm(), (u + v).norm()) / sqrt_abs_curv_;
    case SpaceKind::Hyperbolic: {
        // cosh(d) = <u,v>_Lorentz and cosh(d) - 1 = 2 sinh^2(d/2)
        double m = u[0] * v[0] - u.tail(dim_).dot(v.tail(dim_));
        return 2.0 * std::asinh(std::sqrt(0.5 * std::max(m - 1.0, 0.0))) / sqrt_abs_curv_;
    }
    case SpaceKind::Euclidean:
        return (u - v).norm();
    }
    return 0.0;
}

double ModelManifold::distance(const ChartPoint& p, const ChartPoint& q) const {
    return embedded_distance(embed(p), embed(q));
}

HypothesisCheck check_hypotheses(const ModelManifold& M, const ModelManifold& N,
                                 double sigma, double mu) {
    if (!(sigma > 0.0) || !(mu > 0.0))
        throw ConfigError({"check_hypotheses requires sigma > 0 and mu > 0"});

    HypothesisCheck out;
    int m = M.dim();
    double kM = M.curvature();
    double kN = N.curvature();
    std::ostringstream os;

    if (m < 2) {
        out.holds = false;
        out.margin = -1.0;
        out.detail = "dim M < 2: the curvature chain needs m >= 2";
        return out;
    }

    // Slacks of: sec_M > -sigma (strict), Ric_M >= (m-1) sigma,
    // (m-1) sigma >= (m-1) sec_N, (m-1) sec_N >= -mu.
    double s1 = kM + sigma;
    double s2 = (m - 1) * (kM - sigma);
    double s3 = (m - 1) * (sigma - kN);
    double s4 = (m - 1) * kN + mu;

    out.margin = std::min(std::min(s1, s2), std::min(s3, s4));
    out.holds = s1 > 0.0 && s2 >= 0.0 && s3 >= 0.0 && s4 >= 0.0;

    os << "sec_M > -sigma: " << kM << " > " << -sigma << (s1 > 0.0 ? " ok" : " FAIL")
       << "; Ric_M >= (m-1)sigma: " << (m - 1) * kM << " >= " << (m - 1) * sigma
       << (s2 >= 0.0 ? " ok" : " FAIL")
       << "; (m-1)sigma >= (m-1)sec_N: " << (m - 1) * sigma << " >= " << (m - 1) * kN
       << (s3 >= 0.0 ? " ok" : " FAIL")
       << "; (m-1)sec_N >= -mu: " << (m - 1) * kN << " >= " << -mu
       << (s4 >= 0.0 ? " ok" : " FAIL");
    out.detail = os.str();
    return out;
}

} // namespace graphflow
