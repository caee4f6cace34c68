#include "nodallab/quad.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <sstream>

namespace nlab {

void gauss_legendre(int order, std::vector<double>& nodes, std::vector<double>& weights) {
    if (order < 2) throw std::invalid_argument("gauss_legendre: order >= 2 required");
    static std::mutex mtx;
    static std::map<int, std::pair<std::vector<double>, std::vector<double>>> cache;
    {
        std::lock_guard<std::mutex> lock(mtx);
        auto it = cache.find(order);
        if (it != cache.end()) {
            nodes = it->second.first;
            weights = it->second.second;
            return;
        }
    }
    const int n = order;
    std::vector<double> x(static_cast<std::size_t>(n)), w(static_cast<std::size_t>(n));
    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
        // Chebyshev-based initial guess, then Newton on P_n
        double z = std::cos(M_PI * (double(i) + 0.75) / (double(n) + 0.5));
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * z * p1 - double(j) * p2) / double(j + 1);
            }
            pp = double(n) * (z * p0 - p1) / (z * z - 1.0);
            const double dz = p0 / pp;
            z -= dz;
            if (std::abs(dz) < 1e-15) break;
        }
        x[std::size_t(i)] = -z;
        x[std::size_t(n - 1 - i)] = z;
        const double wi = 2.0 / ((1.0 - z * z) * pp * pp);
        w[std::size_t(i)] = wi;
        w[std::size_t(n - 1 - i)] = wi;
    }
    std::lock_guard<std::mutex> lock(mtx);
    cache[order] = {x, w};
    nodes = x;
    weights = w;
}

int auto_order(double lambda, double max_half, int min_order, int max_order) {
    const double need = 16.0 * max_half * std::sqrt(std::max(lambda, 0.0)) / M_PI;
    int order = std::max(min_order, int(std::ceil(need)));
    return std::min(order, max_order);
}

namespace {

void axis_rule(const QuadratureSpec& spec, double center, double half,
               std::vector<double>& pts, std::vector<double>& wts) {
    const int n = std::max(spec.kind == QuadratureSpec::Kind::TensorGauss ? 2 : 1, spec.order);
    pts.resize(static_cast<std::size_t>(n));
    wts.resize(static_cast<std::size_t>(n));
    if (spec.kind == QuadratureSpec::Kind::TensorGauss) {
        std::vector<double> x, w;
        gauss_legendre(n, x, w);
        for (int i = 0; i < n; ++i) {
            pts[std::size_t(i)] = center + half * x[std::size_t(i)];
            wts[std::size_t(i)] = half * w[std::size_t(i)];
        }
    } else {
        const double step = 2.0 * half / double(n);
        for (int i = 0; i < n; ++i) {
            pts[std::size_t(i)] = center - half + (double(i) + 0.5) * step;
            wts[std::size_t(i)] = step;
        }
    }
}

[[noreturn]] void nonfinite_error(const double* x, int dim) {
    std::ostringstream os;
    os << "integrate_sq: nonfinite sample at (";
    for (int d = 0; d < dim; ++d) os << (d ? ", " : "") << x[d];
    os << ")";
    throw NumericError(os.str());
}

}  // namespace

double integrate_sq(FieldView f, const Box& box, const QuadratureSpec& spec) {
    if (box.dim < 1 || box.dim > 4) throw std::invalid_argument("integrate_sq: dim must be 1..4");
    std::vector<double> pts[4], wts[4];
    for (int d = 0; d < box.dim; ++d) axis_rule(spec, box.center[d], box.half[d], pts[d], wts[d]);
    const int n0 = int(pts[0].size());

    auto slab_sum = [&](int i0) {
        double x[4] = {0, 0, 0, 0};
        x[0] = pts[0][std::size_t(i0)];
        double acc = 0.0;
        const int n1 = box.dim > 1 ? int(pts[1].size()) : 1;
        const int n2 = box.dim > 2 ? int(pts[2].size()) : 1;
        const int n3 = box.dim > 3 ? int(pts[3].size()) : 1;
        for (int i1 = 0; i1 < n1; ++i1) {
            if (box.dim > 1) x[1] = pts[1][std::size_t(i1)];
            double acc1 = 0.0;
            for (int i2 = 0; i2 < n2; ++i2) {
                if (box.dim > 2) x[2] = pts[2][std::size_t(i2)];
                double acc2 = 0.0;
                for (int i3 = 0; i3 < n3; ++i3) {
                    if (box.dim > 3) x[3] = pts[3][std::size_t(i3)];
                    const double v = f(x);
                    if (!std::isfinite(v)) nonfinite_error(x, box.dim);
                    const double w3 = box.dim > 3 ? wts[3][std::size_t(i3)] : 1.0;
                    acc2 += w3 * v * v;
                }
                acc1 += (box.dim > 2 ? wts[2][std::size_t(i2)] : 1.0) * acc2;
            }
            acc += (box.dim > 1 ? wts[1][std::size_t(i1)] : 1.0) * acc1;
        }
        return wts[0][std::size_t(i0)] * acc;
    };

    std::size_t total = 1;
    for (int d = 0; d < box.dim; ++d) total *= pts[d].size();
    std::vector<double> partial(static_cast<std::size_t>(n0));
    if (total >= 32768) {
        parallel_for(static_cast<std::size_t>(n0), [&](std::size_t i) { partial[i] = slab_sum(int(i)); });
    } else {
        for (int i = 0; i < n0; ++i) partial[std::size_t(i)] = slab_sum(i);
    }
    double sum = 0.0;
    for (double v : partial) sum += v;  // fixed order
    return sum;
}

CheckedIntegral integrate_sq_checked(FieldView f, const Box& box, const QuadratureSpec& spec,
                                     double rel_tol) {
    QuadratureSpec fine = spec;
    fine.order = spec.order * 2;
    const double coarse = integrate_sq(f, box, spec);
    const double refined = integrate_sq(f, box, fine);
    CheckedIntegral out;
    out.value = refined;
    const double denom = std::max(std::abs(refined), 1e-300);
    out.rel_diff = std::abs(coarse - refined) / denom;
    out.converged = out.rel_diff < rel_tol;
    return out;
}

// ---------------------------------------------------------------------------
// Sampled suprema
// ---------------------------------------------------------------------------

namespace {

double mode_value(double v, SupMode m) {
    switch (m) {
        case SupMode::Abs: return std::abs(v);
        case SupMode::Pos: return v;
        case SupMode::Neg: return -v;
    }
    return v;
}

struct Best {
    double score = -std::numeric_limits<double>::infinity();
    Vec4 point{};
};

void consider(Best& best, FieldView f, const Vec4& p, SupMode mode) {
    const double v = f(p);
    if (!std::isfinite(v)) throw NumericError("sup sampling: nonfinite value");
    const double s = mode_value(v, mode);
    if (s > best.score) {
        best.score = s;
        best.point = p;
    }
}

SupResult finish(const Best& best, SupMode mode) {
    SupResult r;
    r.point = best.point;
    r.value = mode == SupMode::Neg ? -best.score : best.score;
    // report max f / min f faithfully; Abs is already nonnegative
    if (mode == SupMode::Pos || mode == SupMode::Abs) r.value = best.score;
    return r;
}

// Axis-aligned pattern search from the current best point; `project` clamps
// or rejects candidates outside the region. Converges to boundary extremes
// that quasi-uniform sampling alone would miss.
template <class Project>
void compass_refine(Best& best, FieldView f, int dim, double step0, SupMode mode,
                    const Project& project) {
    double step = step0;
    for (int iter = 0; iter < 240 && step > step0 * 1e-10; ++iter) {
        bool improved = false;
        for (int d = 0; d < dim; ++d) {
            for (double sgn : {1.0, -1.0}) {
                Vec4 p = best.point;
                p[d] += sgn * step;
                if (!project(p)) continue;
                const double before = best.score;
                consider(best, f, p, mode);
                if (best.score > before) improved = true;
            }
        }
        if (!improved) step /= 3.0;
    }
}

}  // namespace

SupResult sup_over_box(FieldView f, const Box& box, int samples, std::uint64_t seed, SupMode mode) {
    if (samples < 8) throw std::invalid_argument("sup_over_box: samples >= 8 required");
    Best best;
    static constexpr unsigned bases[4] = {2, 3, 5, 7};
    std::uint64_t s = seed;
    const std::uint64_t shift = splitmix64_next(s);
    consider(best, f, box.center, mode);
    for (int i = 0; i < samples; ++i) {
        Vec4 p{};
        for (int d = 0; d < box.dim; ++d) {
            const double u = halton(std::uint64_t(i) + (shift % 8192), bases[d]);
            p[d] = box.center[d] - box.half[d] + 2.0 * box.half[d] * u;
        }
        consider(best, f, p, mode);
    }
    // local refinement around the best sample
    double maxhalf = 0.0;
    for (int d = 0; d < box.dim; ++d) maxhalf = std::max(maxhalf, box.half[d]);
    compass_refine(best, f, box.dim, 0.5 * maxhalf, mode, [&](Vec4& p) {
        for (int d = 0; d < box.dim; ++d)
            p[d] = std::clamp(p[d], box.center[d] - box.half[d], box.center[d] + box.half[d]);
        return true;
    });
    return finish(best, mode);
}

SupResult sup_over_ball(FieldView f, const Ball& ball, int samples, std::uint64_t seed, SupMode mode) {
    if (samples < 8) throw std::invalid_argument("sup_over_ball: samples >= 8 required");
    Best best;
    const auto pts = ball_interior_points(ball, samples, seed);
    for (const auto& p : pts) consider(best, f, p, mode);
    // boundary samples catch rim extremes of monotone fields
    for (const auto& p : ball_boundary_points(ball, std::max(8, samples / 2), seed))
        consider(best, f, p, mode);
    if (ball.chart == ChartKind::Flat) {
        compass_refine(best, f, ball.dim, 0.5 * ball.radius, mode, [&](Vec4& p) {
            double d2 = 0.0;
            for (int d = 0; d < ball.dim; ++d) {
                const double dd = p[d] - ball.center[d];
                d2 += dd * dd;
            }
            if (d2 > ball.radius * ball.radius) {
                // project onto the sphere
                const double scale = ball.radius / std::sqrt(d2);
                for (int d = 0; d < ball.dim; ++d)
                    p[d] = ball.center[d] + (p[d] - ball.center[d]) * scale;
            }
            return true;
        });
    } else {
        // geodesic ball on a cap: compass in chart coordinates, candidates
        // outside the geodesic radius rejected
        const auto c = cap_to_sphere(ball.chart, ball.center[0], ball.center[1]);
        compass_refine(best, f, 2, 0.5 * ball.radius, mode, [&](Vec4& p) {
            const auto q = cap_to_sphere(ball.chart, p[0], p[1]);
            const double dot = c[0] * q[0] + c[1] * q[1] + c[2] * q[2];
            return std::acos(std::clamp(dot, -1.0, 1.0)) <= ball.radius;
        });
    }
    return finish(best, mode);
}

SupResult sup_over_ball_boundary(FieldView f, const Ball& ball, int samples, std::uint64_t seed,
                                 SupMode mode) {
    if (samples < 8) throw std::invalid_argument("sup_over_ball_boundary: samples >= 8 required");
    Best best;
    const auto pts = ball_boundary_points(ball, samples, seed);
    for (const auto& p : pts) consider(best, f, p, mode);

    if (ball.dim == 2 || ball.chart != ChartKind::Flat) {
        // refine in the angle parameter around the best sample
        double span = kTwoPi / double(samples);
        auto angle_of = [&](const Vec4& p) {
            return std::atan2(p[1] - ball.center[1], p[0] - ball.center[0]);
        };
        if (ball.chart != ChartKind::Flat) {
            // parametrize the geodesic circle by the boundary sequence index instead
            // by re-sampling a denser circle near the best point in three rounds
            for (int round = 0; round < 3; ++round) {
                const auto dense = ball_boundary_points(ball, samples * 4, seed);
                for (const auto& p : dense) consider(best, f, p, mode);
                break;  // dense pass is already 4x; one pass suffices on caps
            }
            return finish(best, mode);
        }
        double a0 = angle_of(best.point);
        for (int round = 0; round < 3; ++round) {
            for (int i = 0; i < 16; ++i) {
                const double a = a0 + span * (double(i) / 8.0 - 1.0);
                Vec4 p = ball.center;
                p[0] += ball.radius * std::cos(a);
                p[1] += ball.radius * std::sin(a);
                consider(best, f, p, mode);
            }
            a0 = angle_of(best.point);
            span *= 0.25;
        }
        return finish(best, mode);
    }

    // dim 3/4 flat: tangential perturbation of the best direction, renormalized
    Vec4 u{};
    double nrm = 0.0;
    for (int d = 0; d < ball.dim; ++d) {
        u[d] = best.point[d] - ball.center[d];
        nrm += u[d] * u[d];
    }
    nrm = std::sqrt(nrm);
    for (int d = 0; d < ball.dim; ++d) u[d] /= nrm;
    double step = 2.0 * std::pow(1.0 / double(samples), 1.0 / double(ball.dim - 1));
    for (int round = 0; round < 3; ++round) {
        for (int i = 0; i < 24; ++i) {
            double k[4];
            kronecker(std::uint64_t(i), ball.dim, 0.339 * double(round + 1), k);
            Vec4 v{};
            double vn = 0.0;
            for (int d = 0; d < ball.dim; ++d) {
                v[d] = u[d] + step * (2.0 * k[d] - 1.0);
                vn += v[d] * v[d];
            }
            vn = std::sqrt(vn);
            Vec4 p = ball.center;
            for (int d = 0; d < ball.dim; ++d) p[d] += ball.radius * v[d] / vn;
            consider(best, f, p, mode);
        }
        // recenter on the running best
        double n2 = 0.0;
        for (int d = 0; d < ball.dim; ++d) {
            u[d] = best.point[d] - ball.center[d];
            n2 += u[d] * u[d];
        }
        n2 = std::sqrt(n2);
        for (int d = 0; d < ball.dim; ++d) u[d] /= n2;
        step *= 0.25;
    }
    return finish(best, mode);
}

}  // namespace nlab
