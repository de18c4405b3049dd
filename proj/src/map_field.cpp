#include "graphflow/map_field.hpp"

#include <cmath>
#include <string>

#include "graphflow/errors.hpp"
#include "graphflow/parallel.hpp"

namespace graphflow {

MapField::MapField(const DomainGrid& grid, const ModelManifold& target)
    : grid_(&grid), target_(&target) {
    data.resize(grid.chart_count());
    for (int c = 0; c < grid.chart_count(); ++c) {
        const std::size_t n = grid.charts[c].cx.size();
        data[c].y0.assign(n, 0.0);
        data[c].y1.assign(n, 0.0);
        data[c].tchart.assign(n, 0);
    }
}

bool MapField::reexpress(const ModelManifold& target, double& y0, double& y1,
                         std::int8_t& yc, int tc) {
    if (yc == tc) return true;
    if (target.kind() != SpaceKind::Sphere) return false;
    const double r2 = y0 * y0 + y1 * y1;
    const double R = ModelManifold::kSphereChartRadius;
    // |y|^-1 must fit inside the destination chart
    if (r2 * R * R < 1.0) return false;
    const double inv = 1.0 / r2;
    y0 *= inv;
    y1 *= inv;
    yc = static_cast<std::int8_t>(tc);
    return true;
}

void MapField::halo_exchange() {
    if (grid_->chart_count() < 2) return;
    for (int c = 0; c < 2; ++c) {
        ChartData& dst = data[c];
        const ChartData& src = data[1 - c];
        const ChartGrid& g = grid_->charts[c];
        const ChartGrid& sg = grid_->charts[1 - c];
        parallel_for(g.ring_ids.size(), [&](std::size_t k) {
            const int id = g.ring_ids[k];
            const InterpPlan& p = g.ring_plans[k];

            // Interpolate the window with every value unified into chart
            // ref.  Center-relative accumulation keeps constant data exact:
            // all residuals are then bitwise zero and the result is the
            // center value itself.
            auto attempt = [&](int ref, double& out0, double& out1) {
                const int cid = sg.cell(p.ix[2], p.iy[2]);
                double c0 = src.y0[cid], c1 = src.y1[cid];
                std::int8_t cc = src.tchart[cid];
                if (!reexpress(*target_, c0, c1, cc, ref)) return false;
                double acc0 = 0.0, acc1 = 0.0;
                for (int bj = 0; bj < 5; ++bj)
                    for (int bi = 0; bi < 5; ++bi) {
                        const int sid = sg.cell(p.ix[bi], p.iy[bj]);
                        double v0 = src.y0[sid], v1 = src.y1[sid];
                        std::int8_t vc = src.tchart[sid];
                        if (!reexpress(*target_, v0, v1, vc, ref)) return false;
                        const double w = p.wx[bi] * p.wy[bj];
                        acc0 += w * (v0 - c0);
                        acc1 += w * (v1 - c1);
                    }
                out0 = c0 + acc0;
                out1 = c1 + acc1;
                return true;
            };

            int ref = src.tchart[sg.cell(p.ix[2], p.iy[2])];
            double acc0, acc1;
            if (!attempt(ref, acc0, acc1)) {
                ref = 1 - ref;
                if (!attempt(ref, acc0, acc1))
                    throw ChartEscapeError(
                        "halo exchange: window values span both target charts "
                        "with no common expression (domain chart " +
                        std::to_string(c) + ")");
            }
            std::int8_t rc = static_cast<std::int8_t>(ref);
            if (target_->kind() == SpaceKind::Sphere) {
                const double r2 = acc0 * acc0 + acc1 * acc1;
                if (r2 > kReownRadius * kReownRadius) {
                    const double inv = 1.0 / r2;
                    acc0 *= inv;
                    acc1 *= inv;
                    rc = static_cast<std::int8_t>(1 - ref);
                }
            }
            dst.y0[id] = acc0;
            dst.y1[id] = acc1;
            dst.tchart[id] = rc;
        });
    }
}

int MapField::reown_targets(double radius_threshold) {
    if (target_->kind() != SpaceKind::Sphere) return 0;
    const double t2 = radius_threshold * radius_threshold;
    int flipped = 0;
    for (int c = 0; c < grid_->chart_count(); ++c) {
        ChartData& d = data[c];
        const ChartGrid& g = grid_->charts[c];
        for (std::size_t id = 0; id < d.y0.size(); ++id) {
            if (g.cls[id] == kInactive) continue;
            const double r2 = d.y0[id] * d.y0[id] + d.y1[id] * d.y1[id];
            if (r2 > t2) {
                const double inv = 1.0 / r2;
                d.y0[id] *= inv;
                d.y1[id] *= inv;
                d.tchart[id] = static_cast<std::int8_t>(1 - d.tchart[id]);
                ++flipped;
            }
        }
    }
    return flipped;
}

void MapField::validate() const {
    for (int c = 0; c < grid_->chart_count(); ++c) {
        const ChartData& d = data[c];
        const ChartGrid& g = grid_->charts[c];
        for (std::size_t id = 0; id < d.y0.size(); ++id) {
            if (g.cls[id] == kInactive) continue;
            Eigen::VectorXd y(2);
            y << d.y0[id], d.y1[id];
            ChartPoint q(d.tchart[id], y);
            if (!target_->point_ok(q))
                throw ChartEscapeError(
                    "map value left the target atlas at domain chart " +
                    std::to_string(c) + " node (" + std::to_string(g.cx[id]) +
                    ", " + std::to_string(g.cy[id]) + ")");
        }
    }
}

} // namespace graphflow
