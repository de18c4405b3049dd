#include "graphflow/equivariant.hpp"

#include <algorithm>
#include <cmath>

#include "graphflow/errors.hpp"

namespace graphflow {

namespace {

constexpr double kPi = 3.14159265358979323846;

double sn(double kappa, double r) {
    if (kappa > 0.0) {
        const double s = std::sqrt(kappa);
        return std::sin(s * r) / s;
    }
    if (kappa < 0.0) {
        const double s = std::sqrt(-kappa);
        return std::sinh(s * r) / s;
    }
    return r;
}

double snp(double kappa, double r) {
    if (kappa > 0.0) return std::cos(std::sqrt(kappa) * r);
    if (kappa < 0.0) return std::cosh(std::sqrt(-kappa) * r);
    return 1.0;
}

// inverse of sn for the target space, valid for arguments in its range
double sn_inv(double kappa, double v) {
    if (kappa > 0.0) {
        const double s = std::sqrt(kappa);
        return std::asin(std::min(s * v, 1.0)) / s;
    }
    if (kappa < 0.0) {
        const double s = std::sqrt(-kappa);
        return std::asinh(s * v) / s;
    }
    return v;
}

// one-sided second-order derivative at an endpoint, oriented inward
double edge_slope(const Profile& p, bool at_start) {
    const int n = p.nodes();
    const double h = p.dr();
    if (at_start)
        return (-3.0 * p.rho[0] + 4.0 * p.rho[1] - p.rho[2]) / (2.0 * h);
    return (3.0 * p.rho[n - 1] - 4.0 * p.rho[n - 2] + p.rho[n - 3]) / (2.0 * h);
}

} // namespace

double Profile::dr() const {
    if (kappaM <= 0.0)
        throw ConfigError(
            {"reduced profiles need a sphere domain (positive curvature)"});
    return kPi / std::sqrt(kappaM) / (rho.size() - 1);
}

Profile make_reduced_profile(const InitialMapSpec& spec, const ModelManifold& M,
                             const ModelManifold& N, int nodes) {
    if (M.kind() != SpaceKind::Sphere)
        throw ConfigError({"reduced profiles need a sphere domain"});
    if (nodes < 9)
        throw ConfigError({"reduced profile too coarse: need at least 9 nodes"});

    Profile p;
    p.kappaM = M.curvature();
    p.kappaN = N.curvature();
    p.rho.assign(nodes, 0.0);

    if (spec.family == "constant") {
        if (spec.constant_y0 != 0.0 || spec.constant_y1 != 0.0 ||
            spec.constant_chart != 0)
            throw ConfigError(
                {"only the constant map at the target origin is rotationally symmetric"});
        return p;
    }
    if (spec.family == "identity") {
        if (N.kind() != SpaceKind::Sphere || N.curvature() != M.curvature())
            throw ConfigError({"the identity profile needs identical model spheres"});
        for (int i = 0; i < nodes; ++i) p.rho[i] = p.r(i);
        return p;
    }
    if (spec.family == "dilation") {
        const double c = spec.dilation_factor;
        if (!(c > 0.0))
            throw ConfigError({"dilation factor must be positive"});
        for (int i = 0; i < nodes; ++i) {
            const double s = c * sn(p.kappaM, p.r(i));
            p.rho[i] = c < 1.0 ? sn_inv(p.kappaN, s) : s;
        }
        // both poles land exactly on the target origin
        p.rho[0] = 0.0;
        p.rho[nodes - 1] = 0.0;
        return p;
    }
    throw ConfigError(
        {"initial map family '" + spec.family + "' has no reduced profile"});
}

std::vector<double> reduced_rhs(const Profile& p) {
    const int n = p.nodes();
    const double h = p.dr();
    std::vector<double> v(n, 0.0);
    for (int i = 1; i + 1 < n; ++i) {
        const double r = p.r(i);
        const double d1 = (p.rho[i + 1] - p.rho[i - 1]) / (2.0 * h);
        const double d2 = (p.rho[i + 1] - 2.0 * p.rho[i] + p.rho[i - 1]) / (h * h);
        const double sm = sn(p.kappaM, r);
        const double smp = snp(p.kappaM, r);
        const double sx = sn(p.kappaN, p.rho[i]);
        const double sxp = snp(p.kappaN, p.rho[i]);
        v[i] = d2 / (1.0 + d1 * d1) +
               (sm * smp * d1 - sx * sxp) / (sm * sm + sx * sx);
    }
    return v;
}

ReducedSample reduced_monitors(const Profile& p, double t) {
    const int n = p.nodes();
    const double h = p.dr();
    std::vector<double> v = reduced_rhs(p);

    ReducedSample out;
    out.t = t;
    out.eps_min = 1.0;
    for (int i = 0; i < n; ++i) {
        double lrad, ltan;
        if (i == 0) {
            lrad = std::abs(edge_slope(p, true));
            ltan = lrad;
        } else if (i == n - 1) {
            lrad = std::abs(edge_slope(p, false));
            ltan = lrad;
        } else {
            lrad = std::abs((p.rho[i + 1] - p.rho[i - 1]) / (2.0 * h));
            ltan = std::abs(sn(p.kappaN, p.rho[i]) / sn(p.kappaM, p.r(i)));
        }
        const double lmax = std::max(lrad, ltan);
        out.lambda_max = std::max(out.lambda_max, lmax);
        out.eps_min = std::min(out.eps_min,
                               (1.0 - lmax * lmax) / (1.0 + lmax * lmax));
        out.max_logdet = std::max(out.max_logdet, std::log1p(lrad * lrad) +
                                                      std::log1p(ltan * ltan));
        const double d1 = i == 0 || i == n - 1
                              ? (i == 0 ? edge_slope(p, true) : edge_slope(p, false))
                              : (p.rho[i + 1] - p.rho[i - 1]) / (2.0 * h);
        out.max_H2 = std::max(out.max_H2, v[i] * v[i] / (1.0 + d1 * d1));
    }
    double sup = 0.0;
    for (double x : p.rho) sup = std::max(sup, x);
    out.diameter = 2.0 * sup;
    if (p.kappaN > 0.0)
        out.diameter = std::min(out.diameter, kPi / std::sqrt(p.kappaN));
    return out;
}

ReducedRun run_reduced(Profile p, const ReducedControls& c) {
    const int n = p.nodes();
    const double h = p.dr();
    const double dt = c.cfl_safety * h * h;

    ReducedRun out;
    out.series.push_back(reduced_monitors(p, 0.0));
    double t = 0.0;
    long step = 0;
    std::string stop;
    while (true) {
        if (out.series.back().diameter < c.diam_tol) {
            stop = "converged";
            break;
        }
        if (t >= c.t_max) {
            stop = "t_max";
            break;
        }

        std::vector<double> k1 = reduced_rhs(p);
        Profile mid = p;
        for (int i = 0; i < n; ++i) mid.rho[i] = p.rho[i] + 0.5 * dt * k1[i];
        std::vector<double> k2 = reduced_rhs(mid);
        bool bad = false;
        for (int i = 0; i < n; ++i) {
            p.rho[i] += dt * k2[i];
            if (!std::isfinite(p.rho[i])) bad = true;
        }
        t += dt;
        ++step;
        if (bad) {
            stop = "singularity-suspected";
            out.series.push_back(ReducedSample{t, 0, 0, 0, 0, 0});
            break;
        }
        if (step % c.monitor_stride == 0)
            out.series.push_back(reduced_monitors(p, t));
    }
    if (out.series.back().t != t && stop != "singularity-suspected")
        out.series.push_back(reduced_monitors(p, t));
    out.final = std::move(p);
    out.t_end = t;
    out.termination = stop;
    return out;
}

double sample_series(const std::vector<ReducedSample>& series, double t,
                     double ReducedSample::*field) {
    if (series.empty())
        throw NumericalError("cannot sample an empty monitor series");
    if (t <= series.front().t) return series.front().*field;
    if (t >= series.back().t) return series.back().*field;
    for (std::size_t k = 1; k < series.size(); ++k) {
        if (series[k].t >= t) {
            const ReducedSample& a = series[k - 1];
            const ReducedSample& b = series[k];
            const double w = (t - a.t) / (b.t - a.t);
            return a.*field + w * (b.*field - a.*field);
        }
    }
    return series.back().*field;
}

} // namespace graphflow
