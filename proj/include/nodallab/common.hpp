#ifndef NODALLAB_COMMON_HPP
#define NODALLAB_COMMON_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace nlab {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

// Coordinates of a chart point. Charts have dimension 2..4; unused slots are zero.
using Vec4 = std::array<double, 4>;

inline Vec4 vec4(double x, double y = 0.0, double z = 0.0, double w = 0.0) {
    return {x, y, z, w};
}

// Non-owning view of a scalar field on a chart. The callable must outlive the view.
struct FieldView {
    int dim = 0;
    const void* ctx = nullptr;
    double (*eval)(const void*, const double*) = nullptr;

    double operator()(const double* x) const { return eval(ctx, x); }
    double operator()(const Vec4& x) const { return eval(ctx, x.data()); }
};

// Wraps any callable `double f(const double* x)` into a FieldView.
template <class F>
FieldView make_field(int dim, const F& f) {
    FieldView v;
    v.dim = dim;
    v.ctx = static_cast<const void*>(&f);
    v.eval = [](const void* ctx, const double* x) {
        return (*static_cast<const F*>(ctx))(x);
    };
    return v;
}

// ---------------------------------------------------------------------------
// Deterministic random numbers. std::normal_distribution has an unspecified
// draw sequence, so seeded reproducibility across toolchains requires an
// explicit generator: splitmix64 streams + Box-Muller.
// ---------------------------------------------------------------------------

inline std::uint64_t splitmix64_next(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed ^ 0x6a09e667f3bcc908ULL) {
        // warm up so that small seeds decorrelate
        splitmix64_next(state_);
        splitmix64_next(state_);
    }

    std::uint64_t next_u64() { return splitmix64_next(state_); }

    // uniform in [0,1)
    double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform(), u2 = uniform();
        while (u1 <= 0x1.0p-60) u1 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = kTwoPi * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    // Independent substream for a tagged subtask.
    Rng split(std::uint64_t tag) const {
        std::uint64_t s = state_;
        std::uint64_t h = splitmix64_next(s) ^ (tag * 0x9e3779b97f4a7c15ULL);
        return Rng(h);
    }

private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

// ---------------------------------------------------------------------------
// Low-discrepancy sequences. Prefixes are nested: the first n points of a
// sequence are a subset of the first 2n, which makes sampled suprema
// monotone in the sample count.
// ---------------------------------------------------------------------------

inline double halton(std::uint64_t index, unsigned base) {
    double f = 1.0, r = 0.0;
    for (std::uint64_t i = index + 1; i > 0; i /= base) {
        f /= double(base);
        r += f * double(i % base);
    }
    return r;
}

// Kronecker (additive) sequence in [0,1)^dim, dim <= 4.
inline void kronecker(std::uint64_t index, int dim, double offset, double* out) {
    static constexpr double alpha[4] = {
        0.6180339887498949,   // 1/phi
        0.4142135623730951,   // sqrt(2)-1
        0.7320508075688772,   // sqrt(3)-1
        0.23606797749978969,  // sqrt(5)-2
    };
    for (int d = 0; d < dim; ++d) {
        double v = offset + double(index + 1) * alpha[d];
        out[d] = v - std::floor(v);
    }
}

// ---------------------------------------------------------------------------
// Worker pool. parallel_for runs fn(i) for i in [0,n) across `jobs` threads.
// Callers keep determinism by writing result i to slot i.
// ---------------------------------------------------------------------------

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn, int jobs = 0);

// Effective worker count (config override or hardware concurrency).
int default_jobs();
void set_default_jobs(int jobs);

class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace nlab

#endif
