#include "graphflow/jets.hpp"

#include <string>

#include "graphflow/errors.hpp"
#include "graphflow/parallel.hpp"

namespace graphflow {

void JetField::resize(const DomainGrid& grid) {
    charts.resize(grid.chart_count());
    for (int c = 0; c < grid.chart_count(); ++c) {
        const std::size_t n = grid.charts[c].cx.size();
        ChartJets& J = charts[c];
        for (auto& v : J.val) v.assign(n, 0.0);
        for (auto& v : J.d1) v.assign(n, 0.0);
        for (auto& v : J.d2) v.assign(n, 0.0);
        J.tchart.assign(n, 0);
    }
}

void compute_jets(const MapField& f, JetField& out) {
    const DomainGrid& grid = f.grid();
    if (out.charts.empty() ||
        out.charts[0].val[0].size() != grid.charts[0].cx.size())
        out.resize(grid);

    const double h = grid.spacing();
    const double inv12h = 1.0 / (12.0 * h);
    const double inv12h2 = 1.0 / (12.0 * h * h);
    const double inv144h2 = 1.0 / (144.0 * h * h);
    // offset -2..+2 <-> weight for the quartic first-derivative stencil
    static const double kD1[5] = {1.0, -8.0, 0.0, 8.0, -1.0};

    for (int c = 0; c < grid.chart_count(); ++c) {
        const ChartGrid& g = grid.charts[c];
        const MapField::ChartData& d = f.data[c];
        JetField::ChartJets& J = out.charts[c];
        const bool wrap = grid.periodic();
        const int nx = g.nx;

        parallel_for(g.evolvable_ids.size(), [&](std::size_t k) {
            const int id = g.evolvable_ids[k];

            // center-subtracted stencil values, w[dj+2][di+2], all unified
            // into chart tc; falls back to the other target chart when the
            // node's own chart cannot express the whole stencil
            double w0[5][5], w1[5][5];
            double c0 = 0.0, c1 = 0.0;
            auto gather = [&](int tc) {
                c0 = d.y0[id];
                c1 = d.y1[id];
                std::int8_t cc = d.tchart[id];
                if (!MapField::reexpress(f.target(), c0, c1, cc, tc)) return false;
                for (int bj = 0; bj < 5; ++bj)
                    for (int bi = 0; bi < 5; ++bi) {
                        const int nid = wrap ? grid.neighbor(c, id, bi - 2, bj - 2)
                                             : id + (bi - 2) + (bj - 2) * nx;
                        double v0 = d.y0[nid], v1 = d.y1[nid];
                        std::int8_t vc = d.tchart[nid];
                        if (vc != tc &&
                            !MapField::reexpress(f.target(), v0, v1, vc, tc))
                            return false;
                        w0[bj][bi] = v0 - c0;
                        w1[bj][bi] = v1 - c1;
                    }
                return true;
            };

            int tc = d.tchart[id];
            if (!gather(tc)) {
                tc = 1 - tc;
                if (!gather(tc))
                    throw ChartEscapeError(
                        "jet stencil spans both target charts at domain "
                        "chart " + std::to_string(c) + " node (" +
                        std::to_string(g.cx[id]) + ", " +
                        std::to_string(g.cy[id]) + ")");
            }

            J.val[0][id] = c0;
            J.val[1][id] = c1;
            J.tchart[id] = static_cast<std::int8_t>(tc);

            J.d1[0][id] = (w0[2][0] - 8.0 * w0[2][1] + 8.0 * w0[2][3] - w0[2][4]) * inv12h;
            J.d1[2][id] = (w1[2][0] - 8.0 * w1[2][1] + 8.0 * w1[2][3] - w1[2][4]) * inv12h;
            J.d1[1][id] = (w0[0][2] - 8.0 * w0[1][2] + 8.0 * w0[3][2] - w0[4][2]) * inv12h;
            J.d1[3][id] = (w1[0][2] - 8.0 * w1[1][2] + 8.0 * w1[3][2] - w1[4][2]) * inv12h;

            J.d2[0][id] = (-w0[2][0] + 16.0 * w0[2][1] + 16.0 * w0[2][3] - w0[2][4]) * inv12h2;
            J.d2[3][id] = (-w1[2][0] + 16.0 * w1[2][1] + 16.0 * w1[2][3] - w1[2][4]) * inv12h2;
            J.d2[2][id] = (-w0[0][2] + 16.0 * w0[1][2] + 16.0 * w0[3][2] - w0[4][2]) * inv12h2;
            J.d2[5][id] = (-w1[0][2] + 16.0 * w1[1][2] + 16.0 * w1[3][2] - w1[4][2]) * inv12h2;

            double m0 = 0.0, m1 = 0.0;
            for (int bj = 0; bj < 5; ++bj) {
                if (kD1[bj] == 0.0) continue;
                double r0 = 0.0, r1 = 0.0;
                for (int bi = 0; bi < 5; ++bi) {
                    if (kD1[bi] == 0.0) continue;
                    r0 += kD1[bi] * w0[bj][bi];
                    r1 += kD1[bi] * w1[bj][bi];
                }
                m0 += kD1[bj] * r0;
                m1 += kD1[bj] * r1;
            }
            J.d2[1][id] = m0 * inv144h2;
            J.d2[4][id] = m1 * inv144h2;
        });
    }
}

} // namespace graphflow
