#pragma once

#include <string>
#include <vector>

#include "graphflow/initial_maps.hpp"
#include "graphflow/model_manifold.hpp"

namespace graphflow {

// Rotationally symmetric maps between 2D model spaces reduce to a single
// radial profile: a point at geodesic distance r from the domain pole maps
// to geodesic distance rho(r) from the target origin, with the azimuth
// carried over unchanged.  The profile is sampled uniformly in the domain
// colatitude theta = sqrt(kappaM) * r on [0, pi], so the domain must be a
// sphere.  Both poles are rotation-fixed, which pins rho at the endpoints.
//
// Restricting the graph-gauge flow to this ansatz gives the 1D equation
//
//   drho/dt = rho'' / (1 + rho'^2)
//           + (sn_M sn_M' rho' - sn_N(rho) sn_N'(rho)) / (sn_M^2 + sn_N(rho)^2)
//
// with sn the curvature-scaled sine of the respective space and ' the
// derivative in r.  This solver shares no code with the 2D engine; the two
// act as mutual oracles on symmetric data.
struct Profile {
    double kappaM = 1.0;
    double kappaN = 1.0;
    std::vector<double> rho;

    int nodes() const { return static_cast<int>(rho.size()); }
    double dr() const;
    double r(int i) const { return i * dr(); }
};

// Closed-form profiles for the initial-map families (sphere domains only).
// The dilation profile is the same fold as the 2D family: rho(r) =
// sn_N^{-1}(c * sn_M(r)) for c < 1, c * sn_M(r) for c >= 1.
Profile make_reduced_profile(const InitialMapSpec& spec, const ModelManifold& M,
                             const ModelManifold& N, int nodes);

// Velocity of the profile under the reduced flow.  Endpoint velocities are
// zero (the poles map to rotation-fixed points for all time); interior
// nodes use 3-point central differences.
std::vector<double> reduced_rhs(const Profile& p);

// Reduced counterparts of the 2D monitor quantities.  The radial singular
// value is |rho'|, the azimuthal one sn_N(rho)/sn_M(r) with the endpoint
// limits |rho'|; the image diameter of a symmetric map is twice the largest
// target radius (clamped to the target diameter on spheres).
struct ReducedSample {
    double t = 0.0;
    double lambda_max = 0.0;
    double eps_min = 0.0;
    double max_H2 = 0.0;
    double max_logdet = 0.0;
    double diameter = 0.0;
};

ReducedSample reduced_monitors(const Profile& p, double t);

struct ReducedControls {
    double cfl_safety = 0.2;
    double t_max = 10.0;
    double diam_tol = 1e-3;
    int monitor_stride = 1;
};

struct ReducedRun {
    std::vector<ReducedSample> series;
    Profile final;
    double t_end = 0.0;
    std::string termination; // "converged", "t_max", or "singularity-suspected"
};

// Explicit midpoint integration of the reduced flow with dt = cfl * dr^2
// (the diffusion coefficient never exceeds 1).  Samples monitors every
// monitor_stride steps and always at the first and last step.
ReducedRun run_reduced(Profile p, const ReducedControls& c);

// Linear interpolation of one monitor component at time t.
double sample_series(const std::vector<ReducedSample>& series, double t,
                     double ReducedSample::*field);

} // namespace graphflow
