#include "graphflow/initial_maps.hpp"

#include <cmath>
#include <map>
#include <vector>

#include "graphflow/errors.hpp"

namespace graphflow {

namespace {

std::map<std::string, std::function<MapFn(const ModelManifold&, const ModelManifold&)>>&
custom_registry() {
    static std::map<std::string,
                    std::function<MapFn(const ModelManifold&, const ModelManifold&)>> reg;
    return reg;
}

MapFn make_dilation(double c, const ModelManifold& M, const ModelManifold& N) {
    std::vector<std::string> bad;
    if (M.kind() != SpaceKind::Sphere)
        bad.push_back("dilation maps are defined on sphere domains only");
    if (!(std::isfinite(c) && c > 0.0))
        bad.push_back("dilation factor must be positive and finite");
    if (M.kind() == SpaceKind::Sphere && N.kind() == SpaceKind::Sphere) {
        const double ratio = c * std::sqrt(N.curvature() / M.curvature());
        if (c < 1.0 && ratio > 1.0)
            bad.push_back("dilation factor too large: the contracted image "
                          "would overshoot the target equator");
        if (c >= 1.0 && ratio >= 3.141592653589793)
            bad.push_back("dilation factor too large: the stretched image "
                          "would wrap past the target antipode");
    }
    if (!bad.empty()) throw ConfigError(bad);

    const double root_m = std::sqrt(M.curvature());
    return [c, root_m, N](const ChartPoint& p) {
        const double r = p.x.norm();
        // curvature-scaled sine of the polar distance from the chart-0
        // origin; the same expression serves both charts since
        // sin(pi - u) = sin(u)
        const double snm = 2.0 * r / (root_m * (1.0 + r * r));
        const double s = c * snm;
        double R = 0.0; // target chart-0 radius
        switch (N.kind()) {
        case SpaceKind::Sphere: {
            const double root_n = std::sqrt(N.curvature());
            if (c < 1.0) {
                // psi = asin(root_n s)/root_n, R = tan(root_n psi / 2)
                const double u = std::min(root_n * s, 1.0);
                R = u / (1.0 + std::sqrt(1.0 - u * u));
            } else {
                R = std::tan(0.5 * root_n * c * snm);
            }
            break;
        }
        case SpaceKind::Hyperbolic: {
            const double root_n = std::sqrt(-N.curvature());
            const double arg = root_n * ((c < 1.0) ? s : c * snm);
            // psi = asinh(arg)/root_n, R = tanh(root_n psi / 2)
            R = arg / (1.0 + std::sqrt(1.0 + arg * arg));
            break;
        }
        case SpaceKind::Euclidean:
            R = (c < 1.0) ? s : c * snm;
            break;
        }
        Eigen::VectorXd y(2);
        if (r == 0.0) y << 0.0, 0.0;
        else y << R * (p.x[0] / r), R * (p.x[1] / r);
        return ChartPoint(0, y);
    };
}

} // namespace

MapFn make_initial_map(const InitialMapSpec& spec, const ModelManifold& M,
                       const ModelManifold& N) {
    if (spec.family == "constant") {
        Eigen::VectorXd y(2);
        y << spec.constant_y0, spec.constant_y1;
        ChartPoint q(spec.constant_chart, y);
        if (!N.point_ok(q))
            throw ConfigError({"constant map value lies outside the target atlas"});
        return [q](const ChartPoint&) { return q; };
    }
    if (spec.family == "identity") {
        std::vector<std::string> bad;
        if (M.kind() != N.kind() || M.dim() != N.dim() ||
            M.curvature() != N.curvature())
            bad.push_back("identity map needs identical domain and target spaces");
        if (M.kind() == SpaceKind::Euclidean)
            bad.push_back("identity map is not defined on a periodic domain "
                          "(chart coordinates jump at the seam; register a "
                          "custom family instead)");
        if (!bad.empty()) throw ConfigError(bad);
        return [](const ChartPoint& p) { return p; };
    }
    if (spec.family == "dilation")
        return make_dilation(spec.dilation_factor, M, N);
    if (spec.family.rfind("custom:", 0) == 0) {
        const std::string name = spec.family.substr(7);
        auto it = custom_registry().find(name);
        if (it == custom_registry().end()) {
            std::string msg = "unknown custom map family '" + name + "'";
            if (!custom_registry().empty()) {
                msg += " (registered:";
                for (const auto& kv : custom_registry()) msg += " " + kv.first;
                msg += ")";
            }
            throw ConfigError({msg});
        }
        return it->second(M, N);
    }
    throw ConfigError({"unknown initial map family '" + spec.family +
                       "' (expected constant, identity, dilation, or custom:<name>)"});
}

bool initial_map_length_decreasing(const InitialMapSpec& spec) {
    if (spec.family == "constant") return true;
    if (spec.family == "identity") return false;
    if (spec.family == "dilation") return spec.dilation_factor < 1.0;
    return true; // custom families are classified by the measured data
}

void register_custom_map(
    const std::string& name,
    std::function<MapFn(const ModelManifold&, const ModelManifold&)> maker) {
    custom_registry()[name] = std::move(maker);
}

MapField build_map_field(const DomainGrid& grid, const ModelManifold& N,
                         const MapFn& fn) {
    MapField field(grid, N);
    for (int c = 0; c < grid.chart_count(); ++c) {
        const ChartGrid& g = grid.charts[c];
        for (std::size_t id = 0; id < g.cx.size(); ++id) {
            if (g.cls[id] == kInactive) continue;
            ChartPoint q = fn(grid.point(c, static_cast<int>(id)));
            if (N.kind() == SpaceKind::Sphere && q.x.squaredNorm() > 1.0) {
                // store the expression with the smaller radius
                Eigen::VectorXd flipped = q.x / q.x.squaredNorm();
                q = ChartPoint(1 - q.chart, flipped);
            }
            field.set(c, static_cast<int>(id), q);
        }
    }
    field.validate();
    return field;
}

} // namespace graphflow
