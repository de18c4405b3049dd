#pragma once

#include <functional>
#include <string>

#include "graphflow/map_field.hpp"

namespace graphflow {

// Initial map evaluated pointwise in chart coordinates of M.
using MapFn = std::function<ChartPoint(const ChartPoint&)>;

struct InitialMapSpec {
    std::string family = "dilation"; // constant | identity | dilation | custom:<name>
    double dilation_factor = 0.5;
    int constant_chart = 0;
    double constant_y0 = 0.0;
    double constant_y1 = 0.0;

    friend bool operator==(const InitialMapSpec&,
                           const InitialMapSpec&) = default;
};

// Builds the evaluator for the requested family and validates it against the
// given spaces.  Throws ConfigError for ill-posed combinations.
//
// Families:
//   constant   f == q for a fixed target point q.
//   identity   f(p) = p; requires M and N to be the same model space.
//   dilation   geodesic-polar contraction about the chart-0 origin with
//              constant tangential stretch c: a point at polar distance rho
//              maps to distance psi(rho) = sn_N^{-1}(c * sn_M(rho)) along the
//              same direction, where sn is the curvature-scaled sine (sin,
//              sinh, or identity).  For c < 1 every singular value is <= c,
//              the bound is attained, and both poles map to the target
//              chart-0 origin.  For c >= 1 (exploratory, no longer length
//              decreasing) the profile switches to psi = c * sn_M(rho).
MapFn make_initial_map(const InitialMapSpec& spec, const ModelManifold& M,
                       const ModelManifold& N);

// True when the family/spaces combination satisfies the flow theorem's
// pointwise requirement (strictly length decreasing everywhere).
bool initial_map_length_decreasing(const InitialMapSpec& spec);

// Test hook: families named "custom:<name>" resolve through this registry.
void register_custom_map(
    const std::string& name,
    std::function<MapFn(const ModelManifold& M, const ModelManifold& N)> maker);

// Evaluates fn at every active cell and normalizes storage charts.
MapField build_map_field(const DomainGrid& grid, const ModelManifold& N,
                         const MapFn& fn);

} // namespace graphflow
