#include "graphflow/grid.hpp"

#include <cmath>
#include <cstdlib>
#include <string>
#include <vector>

#include "graphflow/errors.hpp"

namespace graphflow {

namespace {

// Lattice coordinate of index i on a sphere chart with resolution r:
// x_i = (2i - r) * (1.8/r).  Integer mirror i -> r - i negates the
// coordinate exactly, which the folded window construction relies on.
double sphere_coord(int i, int res, double half_h) {
    return static_cast<double>(2 * i - res) * half_h;
}

// Fractional lattice index of coordinate q (inverse of sphere_coord).
double sphere_findex(double q, int res, double half_h) {
    return 0.5 * (q / half_h + static_cast<double>(res));
}

void lagrange_weights(double q, const double node[5], double w[5]) {
    for (int k = 0; k < 5; ++k) {
        double num = 1.0, den = 1.0;
        for (int j = 0; j < 5; ++j) {
            if (j == k) continue;
            num *= q - node[j];
            den *= node[k] - node[j];
        }
        w[k] = num / den;
    }
}

void cache_domain_geometry(const ModelManifold& M, ChartGrid& g) {
    const std::size_t n = g.cx.size();
    g.lamM.assign(n, 0.0);
    g.phiM0.assign(n, 0.0);
    g.phiM1.assign(n, 0.0);
    for (std::size_t id = 0; id < n; ++id) {
        if (g.cls[id] == kInactive) continue;
        double xy[2] = {g.cx[id], g.cy[id]};
        double lam, phi[2];
        M.factor2(xy, lam, phi);
        g.lamM[id] = lam;
        g.phiM0[id] = phi[0];
        g.phiM1[id] = phi[1];
    }
}

} // namespace

DomainGrid DomainGrid::build(const ModelManifold& M, int resolution, double period) {
    std::vector<std::string> bad;
    if (M.dim() != 2)
        bad.push_back("grid construction supports 2-dimensional domains only");
    if (resolution < 8)
        bad.push_back("resolution " + std::to_string(resolution) +
                      " too small: the 5-point stencil needs at least 8 nodes per side");
    if (M.kind() == SpaceKind::Hyperbolic)
        bad.push_back("hyperbolic domains are not supported: the flow needs a "
                      "compact domain (sphere or periodic flat square)");
    if (M.kind() == SpaceKind::Euclidean &&
        !(std::isfinite(period) && period > 0.0))
        bad.push_back("period must be positive and finite");
    if (!bad.empty()) throw ConfigError(bad);

    DomainGrid grid(M);
    grid.resolution_ = resolution;

    if (M.kind() == SpaceKind::Euclidean) {
        grid.periodic_ = true;
        grid.period_ = period;
        grid.h_ = period / resolution;
        ChartGrid g;
        g.nx = g.ny = resolution;
        const std::size_t cells = static_cast<std::size_t>(g.nx) * g.ny;
        g.cls.assign(cells, kEvolvable);
        g.own.assign(cells, 1);
        g.cx.resize(cells);
        g.cy.resize(cells);
        g.evolvable_ids.reserve(cells);
        g.owned_ids.reserve(cells);
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) {
                int id = g.cell(i, j);
                g.cx[id] = i * grid.h_;
                g.cy[id] = j * grid.h_;
                g.evolvable_ids.push_back(id);
                g.owned_ids.push_back(id);
            }
        cache_domain_geometry(M, g);
        grid.charts.push_back(std::move(g));
        return grid;
    }

    // Sphere: two charts, lattice over [-1.8, 1.8]^2.
    const int res = resolution;
    const double half_h = ModelManifold::kSphereChartRadius / res;
    grid.h_ = 2.0 * half_h;
    const double active_r2 = ModelManifold::kSphereChartRadius *
                             ModelManifold::kSphereChartRadius * (1.0 + 1e-12);
    const double own_r2 = ModelManifold::kSphereOwnRadius *
                          ModelManifold::kSphereOwnRadius * (1.0 + 1e-12);

    for (int c = 0; c < 2; ++c) {
        ChartGrid g;
        g.nx = g.ny = res + 1;
        const std::size_t cells = static_cast<std::size_t>(g.nx) * g.ny;
        g.cls.assign(cells, kInactive);
        g.own.assign(cells, 0);
        g.cx.resize(cells);
        g.cy.resize(cells);
        for (int j = 0; j <= res; ++j)
            for (int i = 0; i <= res; ++i) {
                int id = g.cell(i, j);
                g.cx[id] = sphere_coord(i, res, half_h);
                g.cy[id] = sphere_coord(j, res, half_h);
                double r2 = g.cx[id] * g.cx[id] + g.cy[id] * g.cy[id];
                if (r2 <= active_r2) g.cls[id] = kRing; // provisional: active
            }
        // A cell is evolvable when its whole 5x5 stencil footprint is active.
        for (int j = 0; j <= res; ++j)
            for (int i = 0; i <= res; ++i) {
                int id = g.cell(i, j);
                if (g.cls[id] == kInactive) continue;
                bool full = (i >= 2 && i + 2 <= res && j >= 2 && j + 2 <= res);
                for (int dj = -2; full && dj <= 2; ++dj)
                    for (int di = -2; di <= 2; ++di)
                        if (g.cls[g.cell(i + di, j + dj)] == kInactive) {
                            full = false;
                            break;
                        }
                if (full) g.cls[id] = kEvolvable;
            }
        for (int j = 0; j <= res; ++j)
            for (int i = 0; i <= res; ++i) {
                int id = g.cell(i, j);
                if (g.cls[id] == kInactive) continue;
                double r2 = g.cx[id] * g.cx[id] + g.cy[id] * g.cy[id];
                if (r2 <= own_r2) {
                    if (g.cls[id] != kEvolvable)
                        throw ConfigError({"resolution " + std::to_string(res) +
                                           " too small: an owned sphere node at radius " +
                                           std::to_string(std::sqrt(r2)) +
                                           " has no full stencil"});
                    g.own[id] = 1;
                    g.owned_ids.push_back(id);
                }
                if (g.cls[id] == kEvolvable) g.evolvable_ids.push_back(id);
                else g.ring_ids.push_back(id);
            }
        cache_domain_geometry(M, g);
        grid.charts.push_back(std::move(g));
    }

    // Interpolation plans for ring cells.  The source window lives in the
    // other chart and may only touch evolvable cells there, so an exchange
    // never reads a cell it writes (double application is bit-identical).
    for (int c = 0; c < 2; ++c) {
        ChartGrid& g = grid.charts[c];
        const ChartGrid& src = grid.charts[1 - c];
        g.ring_plans.resize(g.ring_ids.size());
        for (std::size_t k = 0; k < g.ring_ids.size(); ++k) {
            int id = g.ring_ids[k];
            double x0 = g.cx[id], x1 = g.cy[id];
            double r2 = x0 * x0 + x1 * x1;
            // Ring cells sit near the chart edge, far from the puncture.
            double q0 = std::fabs(x0 / r2), q1 = std::fabs(x1 / r2);
            bool neg0 = x0 < 0.0, neg1 = x1 < 0.0;

            auto unfold = [&](bool neg, int idx) { return neg ? res - idx : idx; };
            int base0 = static_cast<int>(std::llround(sphere_findex(q0, res, half_h))) - 2;
            int base1 = static_cast<int>(std::llround(sphere_findex(q1, res, half_h))) - 2;

            static const int kShift[5] = {0, -1, 1, -2, -3};
            bool found = false;
            InterpPlan plan{};
            for (int s1 = 0; s1 < 5 && !found; ++s1)
                for (int s0 = 0; s0 < 5 && !found; ++s0) {
                    int b0 = base0 + kShift[s0];
                    int b1 = base1 + kShift[s1];
                    if (b0 < 0 || b0 + 4 > res || b1 < 0 || b1 + 4 > res) continue;
                    // evaluation point must lie inside the window hull
                    if (q0 < sphere_coord(b0, res, half_h) ||
                        q0 > sphere_coord(b0 + 4, res, half_h) ||
                        q1 < sphere_coord(b1, res, half_h) ||
                        q1 > sphere_coord(b1 + 4, res, half_h))
                        continue;
                    bool ok = true;
                    for (int bj = 0; ok && bj < 5; ++bj)
                        for (int bi = 0; bi < 5; ++bi) {
                            int si = unfold(neg0, b0 + bi);
                            int sj = unfold(neg1, b1 + bj);
                            if (src.cls[src.cell(si, sj)] != kEvolvable) {
                                ok = false;
                                break;
                            }
                        }
                    if (!ok) continue;
                    double n0[5], n1[5];
                    for (int t = 0; t < 5; ++t) {
                        n0[t] = sphere_coord(b0 + t, res, half_h);
                        n1[t] = sphere_coord(b1 + t, res, half_h);
                        plan.ix[t] = unfold(neg0, b0 + t);
                        plan.iy[t] = unfold(neg1, b1 + t);
                    }
                    lagrange_weights(q0, n0, plan.wx);
                    lagrange_weights(q1, n1, plan.wy);
                    found = true;
                }
            if (!found)
                throw ConfigError({"resolution " + std::to_string(res) +
                                   " too small: no interpolation window for the ring node at (" +
                                   std::to_string(x0) + ", " + std::to_string(x1) + ")"});
            g.ring_plans[k] = plan;
        }
    }
    return grid;
}

} // namespace graphflow
