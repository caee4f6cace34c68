#ifndef NODALLAB_QUAD_HPP
#define NODALLAB_QUAD_HPP

#include <cstdint>

#include "nodallab/common.hpp"
#include "nodallab/geometry.hpp"

namespace nlab {

struct QuadratureSpec {
    enum class Kind { TensorGauss, MidpointComposite };
    int order = 24;  // points per axis
    Kind kind = Kind::TensorGauss;
};

// Gauss-Legendre nodes/weights on [-1,1]; cached per order.
void gauss_legendre(int order, std::vector<double>& nodes, std::vector<double>& weights);

// Points-per-axis so that |u|^2 (oscillating at frequency 2*sqrt(lambda)) gets
// at least 8 quadrature points per oscillation across the box side.
int auto_order(double lambda, double max_half, int min_order = 8, int max_order = 96);

// Tensor-product approximation of the integral of f^2 over the box.
// Deterministic summation order; throws NumericError on a nonfinite sample.
double integrate_sq(FieldView f, const Box& box, const QuadratureSpec& spec);

struct CheckedIntegral {
    double value = 0.0;     // finer-resolution result
    double rel_diff = 0.0;  // |coarse - fine| / fine
    bool converged = true;
};

// Two-resolution convergence estimate (order vs 2*order).
CheckedIntegral integrate_sq_checked(FieldView f, const Box& box, const QuadratureSpec& spec,
                                     double rel_tol = 1e-8);

// ---------------------------------------------------------------------------
// Sampled suprema. Quasi-uniform nested sample sets plus a local refinement
// pass around the best point; deterministic for fixed inputs.
// ---------------------------------------------------------------------------

enum class SupMode { Abs, Pos, Neg };  // max |f|, max f, max (-f)

struct SupResult {
    double value = 0.0;  // the supremum estimate in the chosen mode
    Vec4 point{};        // where it was attained
};

SupResult sup_over_box(FieldView f, const Box& box, int samples, std::uint64_t seed,
                       SupMode mode = SupMode::Abs);
SupResult sup_over_ball(FieldView f, const Ball& ball, int samples, std::uint64_t seed,
                        SupMode mode = SupMode::Abs);
SupResult sup_over_ball_boundary(FieldView f, const Ball& ball, int samples, std::uint64_t seed,
                                 SupMode mode = SupMode::Abs);

}  // namespace nlab

#endif
