#pragma once

#include <cstdint>
#include <vector>

#include "graphflow/model_manifold.hpp"

namespace graphflow {

// Cell classification.  Evolvable cells carry a complete 5x5 difference
// stencil inside the active region and are advanced by the PDE; ring cells
// are active but sit too close to the chart edge for a full stencil and are
// refreshed by interpolation from the other chart after every update.
enum CellClass : std::uint8_t { kInactive = 0, kRing = 1, kEvolvable = 2 };

// Precomputed quartic interpolation window for one ring cell: 5 lattice
// indices and Lagrange weights per axis in the source chart.  Windows are
// chosen in folded (first-quadrant) coordinates so mirrored ring cells get
// mirrored windows with bit-identical weights, which keeps symmetric fields
// exactly symmetric through the exchange.
struct InterpPlan {
    int ix[5];
    int iy[5];
    double wx[5];
    double wy[5];
};

struct ChartGrid {
    int nx = 0, ny = 0;
    std::vector<std::uint8_t> cls;   // CellClass per cell
    std::vector<std::uint8_t> own;   // 1 if the cell participates in reductions
    std::vector<double> cx, cy;      // chart coordinates per cell
    // cached domain geometry (conformal factor and grad log factor)
    std::vector<double> lamM, phiM0, phiM1;
    std::vector<int> evolvable_ids, owned_ids, ring_ids;
    std::vector<InterpPlan> ring_plans; // parallel to ring_ids

    int cell(int i, int j) const { return j * nx + i; }
    int cell_i(int id) const { return id % nx; }
    int cell_j(int id) const { return id / nx; }
};

// Uniform per-chart lattices over the domain manifold.
//
// Sphere: two lattices with (resolution+1) nodes per side spanning
// [-1.8, 1.8]^2 in each stereographic chart, spacing h = 3.6/resolution.
// Cells with |x| <= 1.8 are active; the two unit disks both evolve (the
// overlap is redundant by design) and cells with |x| <= 1 are the reduction
// set of their chart.  Euclidean: one periodic lattice with `resolution`
// nodes per side over a square of the configured period.
class DomainGrid {
public:
    static constexpr double kDefaultPeriod = 6.283185307179586;

    static DomainGrid build(const ModelManifold& M, int resolution,
                            double period = kDefaultPeriod);

    const ModelManifold& domain() const { return M_; }
    int resolution() const { return resolution_; }
    double spacing() const { return h_; }
    bool periodic() const { return periodic_; }
    double period() const { return period_; }
    int chart_count() const { return static_cast<int>(charts.size()); }

    std::vector<ChartGrid> charts;

    // Flat cell id of the (di, dj) lattice neighbor; wraps on periodic grids.
    int neighbor(int chart, int id, int di, int dj) const {
        const ChartGrid& g = charts[chart];
        int i = g.cell_i(id) + di;
        int j = g.cell_j(id) + dj;
        if (periodic_) {
            i = (i % g.nx + g.nx) % g.nx;
            j = (j % g.ny + g.ny) % g.ny;
        }
        return g.cell(i, j);
    }

    ChartPoint point(int chart, int id) const {
        Eigen::VectorXd x(2);
        x << charts[chart].cx[id], charts[chart].cy[id];
        return ChartPoint(chart, x);
    }

    std::size_t total_owned() const {
        std::size_t n = 0;
        for (const auto& c : charts) n += c.owned_ids.size();
        return n;
    }

private:
    explicit DomainGrid(const ModelManifold& M) : M_(M) {}
    ModelManifold M_;
    int resolution_ = 0;
    double h_ = 0.0;
    bool periodic_ = false;
    double period_ = 0.0;
};

} // namespace graphflow
