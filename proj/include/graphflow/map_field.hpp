#pragma once

#include <cstdint>
#include <vector>

#include "graphflow/grid.hpp"
#include "graphflow/model_manifold.hpp"

namespace graphflow {

// Nodal values of the evolving map f: M -> N, stored per chart of M as flat
// component arrays plus the target chart id each value is expressed in.
class MapField {
public:
    // Stored sphere-target values are flipped to the antipodal chart once
    // their radius passes this threshold; with chart radius 1.8 the gap
    // between the two gives hysteresis, so values near the flip radius do
    // not oscillate between charts.
    static constexpr double kReownRadius = 1.4;

    MapField() = default;
    MapField(const DomainGrid& grid, const ModelManifold& target);

    struct ChartData {
        std::vector<double> y0, y1;
        std::vector<std::int8_t> tchart;
    };
    std::vector<ChartData> data;

    const DomainGrid& grid() const { return *grid_; }
    const ModelManifold& target() const { return *target_; }

    ChartPoint value(int chart, int id) const {
        const ChartData& d = data[chart];
        Eigen::VectorXd y(2);
        y << d.y0[id], d.y1[id];
        return ChartPoint(d.tchart[id], y);
    }

    void set(int chart, int id, const ChartPoint& q) {
        ChartData& d = data[chart];
        d.y0[id] = q.x[0];
        d.y1[id] = q.x[1];
        d.tchart[id] = static_cast<std::int8_t>(q.chart);
    }

    // Re-express the target value (y0, y1, yc) in target chart tc in place.
    // Returns false when the value has no valid expression there.
    static bool reexpress(const ModelManifold& target, double& y0, double& y1,
                          std::int8_t& yc, int tc);

    // Refresh every ring cell by interpolating the other chart's data.
    // No-op on single-chart grids.  Throws ChartEscapeError when a source
    // window cannot be unified into one target chart.
    void halo_exchange();

    // Flip stored values to the other target chart wherever the stored
    // radius exceeds the threshold (sphere targets only).  Returns the
    // number of flipped cells.
    int reown_targets(double radius_threshold);

    // Throws ChartEscapeError if any active cell's value lies outside its
    // target chart domain (radius > chart radius, or outside the disk for
    // hyperbolic targets).
    void validate() const;

private:
    const DomainGrid* grid_ = nullptr;
    const ModelManifold* target_ = nullptr;
};

} // namespace graphflow
