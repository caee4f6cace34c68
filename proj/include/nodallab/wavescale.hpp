#ifndef NODALLAB_WAVESCALE_HPP
#define NODALLAB_WAVESCALE_HPP

#include "nodallab/eigen.hpp"
#include "nodallab/geometry.hpp"

namespace nlab {

struct WavescaleParams {
    double epsilon = 0.1;       // radius bound factor: r < epsilon / sqrt(lambda)
    double C1 = 1.2;            // gradient-estimate constant (calibrated sweep, frozen)
    double C2 = 3.0;            // one-sided sup constant (calibrated sweep, frozen)
    double harnack_floor = 0.2; // lower bound asserted for the Harnack corollary constant
    int boundary_samples = 512;
    double tol = 1e-3;
    std::uint64_t seed = 1;
};

struct WeakMaxReport {
    double sup_ball = 0.0;      // sup over the closed ball
    double boundary_max = 0.0;  // max over the boundary sphere
    double ratio = 0.0;         // sup_ball / (2 * boundary_max)
    bool holds = false;         // sup_ball <= 2 * boundary_max within tol
};

// sup_{B_r} |u| <= 2 max_{boundary B_r} |u| for r below the wavelength factor.
WeakMaxReport check_weak_max(const Eigenfunction& u, const Ball& B, const WavescaleParams& p);

struct GradientBoundReport {
    double sup_grad = 0.0;      // sup of the metric gradient norm over B_{r/2}
    double boundary_max = 0.0;  // max |u| over the boundary of B_r
    double implied = 0.0;       // sup_grad * r / boundary_max
    bool holds = false;
};

// sup_{B_{r/2}} |grad u| <= C1 max_{boundary B_r} |u| / r.
GradientBoundReport check_gradient_bound(const Eigenfunction& u, const Ball& B,
                                         const WavescaleParams& p);

struct SidedSupReport {
    double A = 0.0;          // one-sided boundary max of u
    double sup_inner = 0.0;  // sup |u| over B_{2r/3}
    double implied = 0.0;    // sup_inner / A
    bool holds = false;
};

// With u(center) >= 0: sup_{B_{2r/3}} |u| <= C2 * max_{boundary B_r} u.
SidedSupReport check_sided_sup(const Eigenfunction& u, const Ball& B, const WavescaleParams& p);

struct HarnackReport {
    double sup_full = 0.0;        // sup of h over B
    double sup_two_thirds = 0.0;  // sup |h| over (2/3)B
    double implied_c = 0.0;       // sup_full / sup_two_thirds
    bool holds = false;           // implied_c >= harnack_floor
};

// Harnack corollary on the product manifold: h(center) >= 0 implies
// sup_B h >= c sup_{(2/3)B} |h|.
HarnackReport check_harnack_corollary(const Lifted& h, const Ball& B, const WavescaleParams& p);

}  // namespace nlab

#endif
