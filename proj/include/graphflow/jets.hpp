#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "graphflow/map_field.hpp"

namespace graphflow {

// Raw chart-coordinate derivatives of the map at every evolvable cell,
// computed with 5-point central stencils (quartic order; mixed partials by
// nested first-derivative stencils).  Values and derivatives at a cell are
// expressed in that cell's own target chart; stencil neighbors stored in the
// other target chart are re-expressed before differencing.
struct JetField {
    struct ChartJets {
        std::array<std::vector<double>, 2> val; // f^a
        std::array<std::vector<double>, 4> d1;  // [a*2+i] = d_i f^a
        std::array<std::vector<double>, 6> d2;  // [a*3+s], s: 0=xx 1=xy 2=yy
        std::vector<std::int8_t> tchart;        // chart the jet is expressed in
    };
    std::vector<ChartJets> charts;

    void resize(const DomainGrid& grid);
};

// Requires ring cells to be current (halo_exchange already applied when the
// field was last modified).  Throws ChartEscapeError when a stencil cannot
// be unified into the center cell's target chart.
void compute_jets(const MapField& f, JetField& out);

} // namespace graphflow
