#include "nodallab/eigen.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace nlab {

namespace {

bool canonical_sign(const std::array<int, 3>& k) {
    for (int v : k) {
        if (v > 0) return true;
        if (v < 0) return false;
    }
    return true;  // zero vector
}

std::array<int, 3> negate(const std::array<int, 3>& k) { return {-k[0], -k[1], -k[2]}; }

long long sq_norm(const std::array<int, 3>& k) {
    return 1LL * k[0] * k[0] + 1LL * k[1] * k[1] + 1LL * k[2] * k[2];
}

double sinc(double z) {
    if (std::abs(z) < 1e-8) return 1.0 - z * z / 6.0;
    return std::sin(z) / z;
}

// log of (2m-1)!!/(2m)!!
double log_double_factorial_ratio(int m) {
    double s = 0.0;
    for (int j = 1; j <= m; ++j) s += std::log(double(2 * j - 1)) - std::log(double(2 * j));
    return s;
}

// Scaled fully-normalized Legendre values Q_{l,m}(z) = Pbar_{l,m}(z) / sin^m(theta),
// so that the real harmonic is Q_{l,m}(Z) * {Re,Im}[(X+iY)^m] (times sqrt2 for m>0).
// Returns Q_{l,m} and optionally dQ/dz. No Condon-Shortley phase.
void scaled_legendre(int l, int m, double z, double& q, double* dq) {
    const double gamma =
        std::exp(0.5 * (std::log(double(2 * m + 1)) - std::log(4.0 * M_PI) +
                        log_double_factorial_ratio(m)));
    double qmm = gamma, dqmm = 0.0;
    if (l == m) {
        q = qmm;
        if (dq) *dq = 0.0;
        return;
    }
    double qprev = qmm, dprev = dqmm;
    double qcur = std::sqrt(double(2 * m + 3)) * z * qmm;
    double dcur = std::sqrt(double(2 * m + 3)) * qmm;
    for (int ll = m + 2; ll <= l; ++ll) {
        const double a = std::sqrt(double((2 * ll - 1) * (2 * ll + 1)) /
                                   double((ll - m) * (ll + m)));
        const double b = std::sqrt(double((2 * ll + 1) * (ll + m - 1) * (ll - m - 1)) /
                                   double((ll - m) * (ll + m) * (2 * ll - 3)));
        const double qnext = a * z * qcur - b * qprev;
        const double dnext = a * (qcur + z * dcur) - b * dprev;
        qprev = qcur;
        dprev = dcur;
        qcur = qnext;
        dcur = dnext;
    }
    q = qcur;
    if (dq) *dq = dcur;
}

}  // namespace

// ---------------------------------------------------------------------------
// Construction
// ---------------------------------------------------------------------------

Eigenfunction Eigenfunction::torus(Manifold m, std::vector<TorusMode> modes) {
    if (m == Manifold::Sphere2) throw std::invalid_argument("torus eigenfunction on sphere id");
    if (modes.empty()) throw std::invalid_argument("eigenfunction needs at least one mode");
    const int d = manifold_dim(m);
    long long lam = -1;
    double coef_norm = 0.0;
    for (auto& mode : modes) {
        for (int i = d; i < 3; ++i)
            if (mode.k[std::size_t(i)] != 0)
                throw std::invalid_argument("mode index exceeds manifold dimension");
        if (!canonical_sign(mode.k)) {
            // fold -k onto the canonical representative: cos even, sin odd
            mode.k = negate(mode.k);
            mode.sin_coef = -mode.sin_coef;
        }
        const long long n2 = sq_norm(mode.k);
        if (lam < 0) lam = n2;
        if (n2 != lam) throw std::invalid_argument("modes mix different eigenvalues");
        coef_norm += mode.cos_coef * mode.cos_coef + mode.sin_coef * mode.sin_coef;
    }
    if (coef_norm == 0.0) throw std::invalid_argument("all coefficients vanish");
    // merge duplicate representatives
    std::map<std::array<int, 3>, TorusMode> merged;
    for (const auto& mode : modes) {
        auto& slot = merged[mode.k];
        slot.k = mode.k;
        slot.cos_coef += mode.cos_coef;
        slot.sin_coef += mode.sin_coef;
    }
    Eigenfunction u;
    u.manifold_ = m;
    u.lambda_ = double(lam);
    for (const auto& [k, mode] : merged) u.tmodes_.push_back(mode);
    u.build_mass_terms();
    return u;
}

Eigenfunction Eigenfunction::sphere(int degree, std::vector<double> coef_cos,
                                    std::vector<double> coef_sin) {
    if (degree < 0) throw std::invalid_argument("sphere degree must be >= 0");
    if (int(coef_cos.size()) != degree + 1 || int(coef_sin.size()) != degree + 1)
        throw std::invalid_argument("sphere coefficient arrays must have degree+1 entries");
    double norm = 0.0;
    for (double c : coef_cos) norm += c * c;
    for (int m = 1; m <= degree; ++m) norm += coef_sin[std::size_t(m)] * coef_sin[std::size_t(m)];
    if (norm == 0.0) throw std::invalid_argument("all coefficients vanish");
    Eigenfunction u;
    u.manifold_ = Manifold::Sphere2;
    u.degree_ = degree;
    u.lambda_ = double(degree) * double(degree + 1);
    u.ccos_ = std::move(coef_cos);
    u.csin_ = std::move(coef_sin);
    return u;
}

double Eigenfunction::sphere_coef(int m) const {
    if (degree_ < 0) throw std::logic_error("not a sphere eigenfunction");
    if (std::abs(m) > degree_) throw std::out_of_range("harmonic order out of range");
    return m >= 0 ? ccos_[std::size_t(m)] : csin_[std::size_t(-m)];
}

void Eigenfunction::build_mass_terms() {
    // u = sum_p c_p e^{i<p,x>} over the full (signed) lattice list; then
    // u^2 = sum_{p,q} c_p c_q e^{i<p+q,x>}, grouped by sigma = p + q.
    std::vector<std::pair<std::array<int, 3>, std::complex<double>>> full;
    for (const auto& mode : tmodes_) {
        if (mode.k == std::array<int, 3>{0, 0, 0}) {
            full.push_back({mode.k, {mode.cos_coef, 0.0}});
            continue;
        }
        full.push_back({mode.k, {0.5 * mode.cos_coef, -0.5 * mode.sin_coef}});
        full.push_back({negate(mode.k), {0.5 * mode.cos_coef, 0.5 * mode.sin_coef}});
    }
    std::map<std::array<int, 3>, std::complex<double>> groups;
    for (const auto& [p, cp] : full)
        for (const auto& [q, cq] : full) {
            std::array<int, 3> sigma = {p[0] + q[0], p[1] + q[1], p[2] + q[2]};
            groups[sigma] += cp * cq;
        }
    mass_terms_.clear();
    mass_terms_.reserve(groups.size());
    for (const auto& [sigma, w] : groups) mass_terms_.push_back({sigma, w});
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

double Eigenfunction::evaluate(const double* x, ChartKind chart) const {
    if (manifold_ == Manifold::Sphere2) return eval_sphere(x, chart, nullptr);
    double v = 0.0;
    for (const auto& mode : tmodes_) {
        double phase = 0.0;
        for (int d = 0; d < dim(); ++d) phase += double(mode.k[std::size_t(d)]) * x[d];
        v += mode.cos_coef * std::cos(phase) + mode.sin_coef * std::sin(phase);
    }
    return v;
}

void Eigenfunction::evaluate_row(const double* start, int axis, double step, int count,
                                 double* out, ChartKind chart) const {
    if (manifold_ == Manifold::Sphere2) {
        Vec4 p = vec4(start[0], start[1]);
        for (int i = 0; i < count; ++i) {
            out[i] = eval_sphere(p.data(), chart, nullptr);
            p[axis] += step;
        }
        return;
    }
    const int d = dim();
    for (int i = 0; i < count; ++i) out[i] = 0.0;
    for (const auto& mode : tmodes_) {
        double phase0 = 0.0;
        for (int j = 0; j < d; ++j) phase0 += double(mode.k[std::size_t(j)]) * start[j];
        const double dphi = double(mode.k[std::size_t(axis)]) * step;
        const double cd = std::cos(dphi), sd = std::sin(dphi);
        double c = std::cos(phase0), s = std::sin(phase0);
        for (int i = 0; i < count; ++i) {
            if ((i & 31) == 0 && i > 0) {
                // resynchronize the phasor to keep rotation drift below 1e-14
                const double phi = phase0 + double(i) * dphi;
                c = std::cos(phi);
                s = std::sin(phi);
            }
            out[i] += mode.cos_coef * c + mode.sin_coef * s;
            const double cn = c * cd - s * sd;
            s = c * sd + s * cd;
            c = cn;
        }
    }
}

void Eigenfunction::gradient(const double* x, double* g, ChartKind chart) const {
    if (manifold_ == Manifold::Sphere2) {
        eval_sphere(x, chart, g);
        return;
    }
    const int d = dim();
    for (int i = 0; i < d; ++i) g[i] = 0.0;
    for (const auto& mode : tmodes_) {
        double phase = 0.0;
        for (int i = 0; i < d; ++i) phase += double(mode.k[std::size_t(i)]) * x[i];
        const double dv = -mode.cos_coef * std::sin(phase) + mode.sin_coef * std::cos(phase);
        for (int i = 0; i < d; ++i) g[i] += dv * double(mode.k[std::size_t(i)]);
    }
}

double Eigenfunction::eval_sphere(const double* s, ChartKind chart, double* grad) const {
    if (chart == ChartKind::Flat) chart = ChartKind::SphereCapNorth;
    const auto p = cap_to_sphere(chart, s[0], s[1]);
    const double X = p[0], Y = p[1], Z = p[2];
    const int l = degree_;

    // powers of (X + iY) for the azimuthal part
    std::vector<double> re(std::size_t(l) + 1), im(std::size_t(l) + 1);
    re[0] = 1.0;
    im[0] = 0.0;
    for (int m = 1; m <= l; ++m) {
        re[std::size_t(m)] = re[std::size_t(m - 1)] * X - im[std::size_t(m - 1)] * Y;
        im[std::size_t(m)] = re[std::size_t(m - 1)] * Y + im[std::size_t(m - 1)] * X;
    }

    double value = 0.0;
    double gx = 0.0, gy = 0.0, gz = 0.0;
    const double sqrt2 = std::sqrt(2.0);
    for (int m = 0; m <= l; ++m) {
        const double a = ccos_[std::size_t(m)];
        const double b = m > 0 ? csin_[std::size_t(m)] : 0.0;
        if (a == 0.0 && b == 0.0) continue;
        const double scale = m == 0 ? 1.0 : sqrt2;
        double q, dq;
        scaled_legendre(l, m, Z, q, grad ? &dq : nullptr);
        const double br = re[std::size_t(m)], bi = im[std::size_t(m)];
        value += scale * q * (a * br + b * bi);
        if (grad) {
            const double rm1 = m > 0 ? re[std::size_t(m - 1)] : 0.0;
            const double im1 = m > 0 ? im[std::size_t(m - 1)] : 0.0;
            // d/dX Re[(X+iY)^m] = m Re[(X+iY)^{m-1}], d/dY Re = -m Im; Im swaps
            gx += scale * q * double(m) * (a * rm1 + b * im1);
            gy += scale * q * double(m) * (-a * im1 + b * rm1);
            gz += scale * dq * (a * br + b * bi);
        }
    }
    if (grad) {
        // chain rule through the stereographic chart
        const double t = s[0] * s[0] + s[1] * s[1];
        const double D = 1.0 + t, D2 = D * D;
        const double dX1 = (2.0 * D - 4.0 * s[0] * s[0]) / D2, dX2 = -4.0 * s[0] * s[1] / D2;
        const double dY1 = dX2, dY2 = (2.0 * D - 4.0 * s[1] * s[1]) / D2;
        const double zsign = chart == ChartKind::SphereCapSouth ? 1.0 : -1.0;
        const double dZ1 = zsign * 4.0 * s[0] / D2, dZ2 = zsign * 4.0 * s[1] / D2;
        grad[0] = gx * dX1 + gy * dY1 + gz * dZ1;
        grad[1] = gx * dX2 + gy * dY2 + gz * dZ2;
    }
    return value;
}

double Eigenfunction::norm_l2() const {
    if (manifold_ == Manifold::Sphere2) {
        double n = 0.0;
        for (double c : ccos_) n += c * c;
        for (int m = 1; m <= degree_; ++m) n += csin_[std::size_t(m)] * csin_[std::size_t(m)];
        return std::sqrt(n);
    }
    const double vol = std::pow(kTwoPi, dim());
    double n = 0.0;
    for (const auto& mode : tmodes_) {
        if (mode.k == std::array<int, 3>{0, 0, 0})
            n += vol * mode.cos_coef * mode.cos_coef;
        else
            n += 0.5 * vol * (mode.cos_coef * mode.cos_coef + mode.sin_coef * mode.sin_coef);
    }
    return std::sqrt(n);
}

double Eigenfunction::box_mass(const Box& box) const {
    if (!has_exact_mass()) throw std::logic_error("box_mass: exact masses exist on tori only");
    if (box.dim != dim()) throw std::invalid_argument("box_mass: dimension mismatch");
    std::complex<double> total = 0.0;
    for (const auto& term : mass_terms_) {
        std::complex<double> factor = term.w;
        for (int d = 0; d < box.dim; ++d) {
            const double sig = double(term.sigma[std::size_t(d)]);
            const double len = 2.0 * box.half[d] * sinc(sig * box.half[d]);
            factor *= len * std::polar(1.0, sig * box.center[d]);
        }
        total += factor;
    }
    return std::max(total.real(), 0.0);
}

FieldView Eigenfunction::field(ChartKind chart) const {
    FieldView v;
    v.dim = dim();
    v.ctx = static_cast<const void*>(this);
    switch (chart) {
        case ChartKind::Flat:
        case ChartKind::SphereCapNorth:
            v.eval = [](const void* ctx, const double* x) {
                return static_cast<const Eigenfunction*>(ctx)->evaluate(x, ChartKind::SphereCapNorth);
            };
            break;
        case ChartKind::SphereCapSouth:
            v.eval = [](const void* ctx, const double* x) {
                return static_cast<const Eigenfunction*>(ctx)->evaluate(x, ChartKind::SphereCapSouth);
            };
            break;
    }
    if (manifold_ != Manifold::Sphere2) {
        v.eval = [](const void* ctx, const double* x) {
            return static_cast<const Eigenfunction*>(ctx)->evaluate(x, ChartKind::Flat);
        };
    }
    return v;
}

// ---------------------------------------------------------------------------
// Spectra and ensembles
// ---------------------------------------------------------------------------

std::vector<std::pair<double, int>> eigenvalue_list(Manifold m, double lambda_max) {
    if (lambda_max < 1.0) throw std::invalid_argument("eigenvalue_list: lambda_max >= 1 required");
    std::vector<std::pair<double, int>> out;
    if (m == Manifold::Sphere2) {
        for (int l = 0;; ++l) {
            const double lam = double(l) * double(l + 1);
            if (lam > lambda_max) break;
            out.push_back({lam, 2 * l + 1});
        }
        return out;
    }
    const int d = manifold_dim(m);
    const long long cap = (long long)std::floor(lambda_max);
    const int kmax = int(std::floor(std::sqrt(double(cap))));
    std::map<long long, int> counts;
    if (d == 2) {
        for (int n = -kmax; n <= kmax; ++n)
            for (int mm = -kmax; mm <= kmax; ++mm) {
                const long long v = 1LL * n * n + 1LL * mm * mm;
                if (v <= cap) counts[v]++;
            }
    } else {
        for (int n = -kmax; n <= kmax; ++n)
            for (int mm = -kmax; mm <= kmax; ++mm)
                for (int k = -kmax; k <= kmax; ++k) {
                    const long long v = 1LL * n * n + 1LL * mm * mm + 1LL * k * k;
                    if (v <= cap) counts[v]++;
                }
    }
    for (const auto& [lam, count] : counts) out.push_back({double(lam), count});
    return out;
}

std::vector<std::array<int, 3>> lattice_representatives(Manifold m, long long lam) {
    if (m == Manifold::Sphere2) throw std::invalid_argument("lattice_representatives: tori only");
    std::vector<std::array<int, 3>> reps;
    if (lam == 0) {
        reps.push_back({0, 0, 0});
        return reps;
    }
    const int d = manifold_dim(m);
    const int kmax = int(std::floor(std::sqrt(double(lam)) + 0.5));
    auto push_if = [&](std::array<int, 3> k) {
        if (sq_norm(k) == lam && canonical_sign(k)) reps.push_back(k);
    };
    if (d == 2) {
        for (int a = -kmax; a <= kmax; ++a)
            for (int b = -kmax; b <= kmax; ++b) push_if({a, b, 0});
    } else {
        for (int a = -kmax; a <= kmax; ++a)
            for (int b = -kmax; b <= kmax; ++b)
                for (int c = -kmax; c <= kmax; ++c) push_if({a, b, c});
    }
    std::sort(reps.begin(), reps.end());
    return reps;
}

Eigenfunction synth_random(Manifold m, double lambda, std::uint64_t seed) {
    const long long lam = (long long)std::llround(lambda);
    if (std::abs(lambda - double(lam)) > 1e-9 && m != Manifold::Sphere2)
        throw std::invalid_argument("synth_random: lambda is not an eigenvalue (tori need integers)");
    Rng rng(seed ^ (std::uint64_t(m) << 56) ^ (std::uint64_t(lam) * 0x9e3779b97f4a7c15ULL));

    if (m == Manifold::Sphere2) {
        // lambda = l(l+1)
        const int l = int(std::floor((-1.0 + std::sqrt(1.0 + 4.0 * lambda)) / 2.0 + 0.5));
        if (std::abs(double(l) * double(l + 1) - lambda) > 1e-9)
            throw std::invalid_argument("synth_random: lambda is not l(l+1)");
        std::vector<double> cc(std::size_t(l) + 1), cs(std::size_t(l) + 1, 0.0);
        double norm = 0.0;
        for (int mm = 0; mm <= l; ++mm) {
            cc[std::size_t(mm)] = rng.normal();
            norm += cc[std::size_t(mm)] * cc[std::size_t(mm)];
            if (mm > 0) {
                cs[std::size_t(mm)] = rng.normal();
                norm += cs[std::size_t(mm)] * cs[std::size_t(mm)];
            }
        }
        norm = std::sqrt(norm);
        for (auto& c : cc) c /= norm;
        for (auto& c : cs) c /= norm;
        return Eigenfunction::sphere(l, std::move(cc), std::move(cs));
    }

    const auto reps = lattice_representatives(m, lam);
    if (reps.empty()) throw std::invalid_argument("synth_random: lambda is not an eigenvalue");
    std::vector<TorusMode> modes;
    modes.reserve(reps.size());
    for (const auto& k : reps) {
        TorusMode mode;
        mode.k = k;
        mode.cos_coef = rng.normal();
        mode.sin_coef = (k == std::array<int, 3>{0, 0, 0}) ? 0.0 : rng.normal();
        modes.push_back(mode);
    }
    Eigenfunction u = Eigenfunction::torus(m, std::move(modes));
    const double n = u.norm_l2();
    std::vector<TorusMode> scaled = u.torus_modes();
    for (auto& mode : scaled) {
        mode.cos_coef /= n;
        mode.sin_coef /= n;
    }
    return Eigenfunction::torus(m, std::move(scaled));
}

Eigenfunction torus2_product(int n, int m) {
    if (n < 1 || m < 1) throw std::invalid_argument("torus2_product: n, m >= 1 required");
    // sin(nx) sin(my) = 1/2 cos(nx - my) - 1/2 cos(nx + my)
    std::vector<TorusMode> modes;
    modes.push_back({{n, -m, 0}, 0.5, 0.0});
    modes.push_back({{n, m, 0}, -0.5, 0.0});
    return Eigenfunction::torus(Manifold::Torus2, std::move(modes));
}

Eigenfunction torus3_axis_wave(int k) {
    if (k < 1) throw std::invalid_argument("torus3_axis_wave: k >= 1 required");
    std::vector<TorusMode> modes;
    modes.push_back({{k, 0, 0}, 0.0, 1.0});
    return Eigenfunction::torus(Manifold::Torus3, std::move(modes));
}

Eigenfunction torus_plane_wave(Manifold m, const std::array<int, 3>& k) {
    std::vector<TorusMode> modes;
    modes.push_back({k, 0.0, 1.0});
    return Eigenfunction::torus(m, std::move(modes));
}

Eigenfunction sphere_sectoral(int l) {
    if (l < 1) throw std::invalid_argument("sphere_sectoral: l >= 1 required");
    std::vector<double> cc(std::size_t(l) + 1, 0.0), cs(std::size_t(l) + 1, 0.0);
    cc[std::size_t(l)] = 1.0;
    return Eigenfunction::sphere(l, std::move(cc), std::move(cs));
}

Eigenfunction sphere_harmonic(int l, int m) {
    if (std::abs(m) > l) throw std::invalid_argument("sphere_harmonic: |m| <= l required");
    std::vector<double> cc(std::size_t(l) + 1, 0.0), cs(std::size_t(l) + 1, 0.0);
    if (m >= 0)
        cc[std::size_t(m)] = 1.0;
    else
        cs[std::size_t(-m)] = 1.0;
    return Eigenfunction::sphere(l, std::move(cc), std::move(cs));
}

Eigenfunction constant_function(Manifold m, double value) {
    if (value == 0.0) throw std::invalid_argument("constant_function: value must be nonzero");
    if (m == Manifold::Sphere2) return Eigenfunction::sphere(0, {value * std::sqrt(4.0 * M_PI)}, {0.0});
    std::vector<TorusMode> modes;
    modes.push_back({{0, 0, 0}, value, 0.0});
    return Eigenfunction::torus(m, std::move(modes));
}

// ---------------------------------------------------------------------------
// Harmonic lift
// ---------------------------------------------------------------------------

Lifted::Lifted(Eigenfunction u) : base_(std::move(u)) {
    if (!(base_.lambda() > 0.0))
        throw std::invalid_argument("lift: lambda must be positive (constant lift is degenerate)");
    sqrt_lambda_ = std::sqrt(base_.lambda());
}

Lifted lift(const Eigenfunction& u) { return Lifted(u); }

double Lifted::evaluate(const double* x, ChartKind chart) const {
    const int d = base_.dim();
    return base_.evaluate(x, chart) * std::exp(sqrt_lambda_ * x[d]);
}

void Lifted::gradient(const double* x, double* g, ChartKind chart) const {
    const int d = base_.dim();
    const double e = std::exp(sqrt_lambda_ * x[d]);
    base_.gradient(x, g, chart);
    const double u = base_.evaluate(x, chart);
    for (int i = 0; i < d; ++i) g[i] *= e;
    g[d] = sqrt_lambda_ * u * e;
}

double Lifted::box_mass(const Box& box) const {
    const int d = base_.dim();
    if (box.dim != d + 1) throw std::invalid_argument("lifted box_mass: dimension mismatch");
    Box base_box;
    base_box.dim = d;
    for (int i = 0; i < d; ++i) {
        base_box.center[i] = box.center[i];
        base_box.half[i] = box.half[i];
    }
    // integral of exp(2 sqrt(lambda) t) over the t-extent
    const double a = 2.0 * sqrt_lambda_;
    const double tmass = 2.0 * std::exp(a * box.center[d]) * std::sinh(a * box.half[d]) / a;
    return base_.box_mass(base_box) * tmass;
}

FieldView Lifted::field(ChartKind chart) const {
    FieldView v;
    v.dim = dim();
    v.ctx = static_cast<const void*>(this);
    if (base_.manifold() == Manifold::Sphere2 && chart == ChartKind::SphereCapSouth) {
        v.eval = [](const void* ctx, const double* x) {
            return static_cast<const Lifted*>(ctx)->evaluate(x, ChartKind::SphereCapSouth);
        };
    } else {
        v.eval = [](const void* ctx, const double* x) {
            return static_cast<const Lifted*>(ctx)->evaluate(x, ChartKind::SphereCapNorth);
        };
    }
    return v;
}

}  // namespace nlab
