#include "nodallab/doubling.hpp"

#include <cmath>

namespace nlab {

void DoublingParams::validate(int dim) const {
    if (l % 2 == 0 || l < 1) throw std::invalid_argument("DoublingParams: l must be odd");
    if (double(l) <= 2.0 * std::sqrt(double(dim)))
        throw std::invalid_argument("DoublingParams: l must exceed 2*sqrt(dim)");
    if (tilde_depth < 0) throw std::invalid_argument("DoublingParams: tilde_depth >= 0");
}

MassSource quadrature_mass(FieldView f, const DoublingParams& p, double lambda) {
    QuadratureSpec base = p.quad;
    const int min_order = std::max(p.min_order, base.order);
    const int max_order = std::max(p.max_order, min_order);
    auto mass = [f, base, lambda, min_order, max_order](const Box& b) {
        QuadratureSpec spec = base;
        if (lambda > 0.0) {
            double h = 0.0;
            for (int d = 0; d < b.dim; ++d) h = std::max(h, b.half[d]);
            spec.order = auto_order(lambda, h, min_order, max_order);
        }
        return integrate_sq(f, b, spec);
    };
    auto resolved = [lambda, min_order, max_order](const Box& b) {
        if (lambda <= 0.0) return true;
        double h = 0.0;
        for (int d = 0; d < b.dim; ++d) h = std::max(h, b.half[d]);
        // under-resolved when the cap truncates the 8-points-per-oscillation rule
        return auto_order(lambda, h, min_order, 1 << 24) <= max_order;
    };
    return MassSource(f.dim, false, std::move(mass), std::move(resolved));
}

MassSource eigen_mass(const Eigenfunction& u, const DoublingParams& p, ChartKind chart) {
    if (u.has_exact_mass() && !p.force_quadrature)
        return MassSource(u.dim(), true, [&u](const Box& b) { return u.box_mass(b); });
    return quadrature_mass(u.field(chart), p, u.lambda());
}

MassSource lifted_mass(const Lifted& h, const DoublingParams& p, ChartKind chart) {
    if (h.has_exact_mass() && !p.force_quadrature)
        return MassSource(h.dim(), true, [&h](const Box& b) { return h.box_mass(b); });
    return quadrature_mass(h.field(chart), p, h.base().lambda());
}

DoublingRecord doubling_index(const MassSource& ms, const Box& q, const DoublingParams& p,
                              const ChartSpec& chart) {
    p.validate(q.dim);
    const Box outer = dilate(q, double(p.l));
    if (!chart.contains(outer))
        throw std::invalid_argument("doubling_index: dilated cube escapes the chart");
    DoublingRecord rec;
    rec.cube = q;
    rec.exact = ms.exact();
    rec.mass_inner = ms(q);
    if (!(rec.mass_inner > p.mass_floor))
        throw NumericError("doubling_index: mass-underflow on the inner cube");
    rec.mass_outer = ms(outer);
    if (!std::isfinite(rec.mass_outer))
        throw NumericError("doubling_index: nonfinite outer mass");
    rec.N = 0.5 * std::log2(rec.mass_outer / rec.mass_inner);
    rec.converged = ms.resolved(q) && ms.resolved(outer);
    return rec;
}

TildeResult tilde_index(const MassSource& ms, const Cube& q, const DoublingParams& p,
                        const ChartSpec& chart) {
    p.validate(q.dim);
    TildeResult out;
    out.value = -std::numeric_limits<double>::infinity();
    for (int depth = 0; depth <= p.tilde_depth; ++depth) {
        double depth_max = -std::numeric_limits<double>::infinity();
        for (const Cube& sub : dyadic_subcubes(q, depth)) {
            if (!chart.contains(dilate(sub, double(p.l)))) {
                ++out.skipped;
                continue;
            }
            const auto rec = doubling_index(ms, sub, p, chart);
            ++out.probed;
            depth_max = std::max(depth_max, rec.N);
            if (rec.N > out.value) {
                out.value = rec.N;
                out.argmax = sub;
            }
        }
        out.per_depth_max.push_back(depth_max);
    }
    if (out.probed == 0) throw std::invalid_argument("tilde_index: no probe survives the chart");
    return out;
}

SubdivisionReport verify_subdivision_lemma(const MassSource& ms, const Cube& Q, int K,
                                           const DoublingParams& p, double tol,
                                           const ChartSpec& chart) {
    p.validate(Q.dim);
    if (K < 1) throw std::invalid_argument("verify_subdivision_lemma: K >= 1 required");
    SubdivisionReport rep;
    rep.threshold = 2.0 * double(Q.dim) * std::log2(double(p.l));

    double n0 = std::numeric_limits<double>::infinity();
    for (const Cube& qi : subdivide(Q, K * p.l)) {
        if (!contains(Q, dilate(qi, double(p.l)))) continue;
        const auto rec = doubling_index(ms, qi, p, chart);
        n0 = std::min(n0, rec.N);
        ++rep.inner_count;
    }
    if (rep.inner_count == 0)
        throw std::invalid_argument("verify_subdivision_lemma: no subcube q_i has l*q_i inside Q");
    rep.N0 = n0;

    const Cube inner = dilate(Q, 1.0 / double(p.l));
    rep.N_sub = doubling_index(ms, inner, p, chart).N;
    rep.claimed_bound = double(K) * rep.N0;
    rep.proven_bound = double(K) * (rep.N0 - 0.5 * double(Q.dim) * std::log2(double(p.l)));
    rep.vacuous = rep.N0 < rep.threshold;
    const double slack_claimed = tol * std::max(std::abs(rep.claimed_bound), 1.0);
    const double slack_proven = tol * std::max(std::abs(rep.proven_bound), 1.0);
    rep.holds = rep.vacuous || rep.N_sub >= rep.claimed_bound - slack_claimed;
    rep.proven_holds = rep.vacuous || rep.N_sub >= rep.proven_bound - slack_proven;
    return rep;
}

MonotonicityReport check_monotonicity(const MassSource& ms, const Cube& q1, const Cube& q,
                                      const DoublingParams& p, const ChartSpec& chart) {
    if (!contains(q, dilate(q1, double(p.A))))
        throw std::invalid_argument("check_monotonicity: A*q1 is not contained in q");
    MonotonicityReport rep;
    rep.N_q1 = doubling_index(ms, q1, p, chart).N;
    rep.N_q = doubling_index(ms, q, p, chart).N;
    rep.ratio = rep.N_q1 / std::max(rep.N_q, 0.1);
    rep.bound = p.C0;
    rep.holds = rep.ratio <= p.C0;
    return rep;
}

LinftyReport check_linfty_estimate(FieldView f, const MassSource& ms, const Ball& B,
                                   const DoublingParams& p, int samples, std::uint64_t seed,
                                   const ChartSpec& chart) {
    if (B.chart != ChartKind::Flat)
        throw std::invalid_argument("check_linfty_estimate: flat charts only");
    Ball twoB = B;
    twoB.radius = 2.0 * B.radius;
    Box two_box;
    two_box.dim = B.dim;
    two_box.center = B.center;
    for (int d = 0; d < B.dim; ++d) two_box.half[d] = twoB.radius;
    if (!chart.contains(two_box))
        throw std::invalid_argument("check_linfty_estimate: 2B escapes the chart");

    Cube inscribed;
    inscribed.dim = B.dim;
    inscribed.center = B.center;
    inscribed.half_side = B.radius / std::sqrt(double(B.dim));

    LinftyReport rep;
    rep.N = doubling_index(ms, inscribed, p, chart).N;
    Ball outer = B;
    outer.radius = 4.0 / 3.0 * B.radius;
    rep.sup_outer = sup_over_ball(f, outer, samples, seed).value;
    rep.sup_inner = sup_over_ball(f, B, samples, seed).value;
    rep.implied = rep.sup_outer / (std::exp2(rep.N) * std::max(rep.sup_inner, 1e-300));
    rep.holds = rep.implied <= p.C7;
    return rep;
}

}  // namespace nlab
