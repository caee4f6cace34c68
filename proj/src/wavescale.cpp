#include "nodallab/wavescale.hpp"

#include <cmath>

#include "nodallab/quad.hpp"

namespace nlab {

namespace {

void require_wavelength_radius(const Eigenfunction& u, const Ball& B, const WavescaleParams& p) {
    if (!(u.lambda() > 0.0)) throw std::invalid_argument("wavescale: lambda > 0 required");
    if (!(B.radius < p.epsilon / std::sqrt(u.lambda()) * (1.0 + 1e-12)))
        throw std::invalid_argument("wavescale: radius exceeds epsilon/sqrt(lambda)");
}

// Riemannian gradient norm; cap charts scale chart gradients by 1/conformal.
struct GradNormCtx {
    const Eigenfunction* u;
    ChartKind chart;
};

double grad_norm_eval(const void* ctx, const double* x) {
    const auto* c = static_cast<const GradNormCtx*>(ctx);
    double g[3] = {0.0, 0.0, 0.0};
    c->u->gradient(x, g, c->chart);
    double n2 = 0.0;
    for (int d = 0; d < c->u->dim(); ++d) n2 += g[d] * g[d];
    double norm = std::sqrt(n2);
    if (c->chart != ChartKind::Flat) norm /= cap_conformal_factor(x[0], x[1]);
    return norm;
}

}  // namespace

WeakMaxReport check_weak_max(const Eigenfunction& u, const Ball& B, const WavescaleParams& p) {
    require_wavelength_radius(u, B, p);
    auto f = u.field(B.chart);
    WeakMaxReport rep;
    rep.sup_ball = sup_over_ball(f, B, p.boundary_samples, p.seed).value;
    rep.boundary_max = sup_over_ball_boundary(f, B, p.boundary_samples, p.seed).value;
    rep.ratio = rep.sup_ball / std::max(2.0 * rep.boundary_max, 1e-300);
    rep.holds = rep.sup_ball <= 2.0 * rep.boundary_max * (1.0 + p.tol);
    return rep;
}

GradientBoundReport check_gradient_bound(const Eigenfunction& u, const Ball& B,
                                         const WavescaleParams& p) {
    require_wavelength_radius(u, B, p);
    GradNormCtx ctx{&u, B.chart};
    FieldView grad_field;
    grad_field.dim = u.dim();
    grad_field.ctx = &ctx;
    grad_field.eval = grad_norm_eval;

    Ball half = B;
    half.radius = 0.5 * B.radius;
    GradientBoundReport rep;
    rep.sup_grad = sup_over_ball(grad_field, half, p.boundary_samples, p.seed).value;
    auto f = u.field(B.chart);
    rep.boundary_max = sup_over_ball_boundary(f, B, p.boundary_samples, p.seed).value;
    rep.implied = rep.sup_grad * B.radius / std::max(rep.boundary_max, 1e-300);
    rep.holds = rep.implied <= p.C1 * (1.0 + p.tol);
    return rep;
}

SidedSupReport check_sided_sup(const Eigenfunction& u, const Ball& B, const WavescaleParams& p) {
    require_wavelength_radius(u, B, p);
    if (u.evaluate(B.center.data(), B.chart) < 0.0)
        throw std::invalid_argument("check_sided_sup: u(center) must be nonnegative");
    auto f = u.field(B.chart);
    SidedSupReport rep;
    rep.A = sup_over_ball_boundary(f, B, p.boundary_samples, p.seed, SupMode::Pos).value;
    Ball inner = B;
    inner.radius = 2.0 / 3.0 * B.radius;
    rep.sup_inner = sup_over_ball(f, inner, p.boundary_samples, p.seed).value;
    rep.implied = rep.sup_inner / std::max(rep.A, 1e-300);
    rep.holds = rep.A > 0.0 && rep.implied <= p.C2 * (1.0 + p.tol);
    return rep;
}

HarnackReport check_harnack_corollary(const Lifted& h, const Ball& B, const WavescaleParams& p) {
    if (B.chart != ChartKind::Flat)
        throw std::invalid_argument("check_harnack_corollary: flat product charts only");
    if (B.dim != h.dim())
        throw std::invalid_argument("check_harnack_corollary: ball dimension mismatch");
    if (h.evaluate(B.center.data()) < 0.0)
        throw std::invalid_argument("check_harnack_corollary: h(center) must be nonnegative");
    auto f = h.field();
    HarnackReport rep;
    rep.sup_full = sup_over_ball(f, B, p.boundary_samples, p.seed, SupMode::Pos).value;
    Ball inner = B;
    inner.radius = 2.0 / 3.0 * B.radius;
    rep.sup_two_thirds = sup_over_ball(f, inner, p.boundary_samples, p.seed).value;
    rep.implied_c = rep.sup_full / std::max(rep.sup_two_thirds, 1e-300);
    rep.holds = rep.implied_c >= p.harnack_floor;
    return rep;
}

}  // namespace nlab
