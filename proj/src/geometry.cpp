#include "nodallab/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace nlab {

int manifold_dim(Manifold m) {
    switch (m) {
        case Manifold::Torus2: return 2;
        case Manifold::Sphere2: return 2;
        case Manifold::Torus3: return 3;
    }
    return 0;
}

const char* manifold_name(Manifold m) {
    switch (m) {
        case Manifold::Torus2: return "torus2";
        case Manifold::Sphere2: return "sphere2";
        case Manifold::Torus3: return "torus3";
    }
    return "?";
}

Manifold manifold_from_name(const std::string& name) {
    if (name == "torus2") return Manifold::Torus2;
    if (name == "sphere2") return Manifold::Sphere2;
    if (name == "torus3") return Manifold::Torus3;
    throw std::invalid_argument("unknown manifold: " + name);
}

Box to_box(const Cube& q) {
    Box b;
    b.center = q.center;
    b.dim = q.dim;
    for (int d = 0; d < q.dim; ++d) b.half[d] = q.half_side;
    return b;
}

double volume(const Cube& q) {
    double v = 1.0;
    for (int d = 0; d < q.dim; ++d) v *= 2.0 * q.half_side;
    return v;
}

double volume(const Box& b) {
    double v = 1.0;
    for (int d = 0; d < b.dim; ++d) v *= 2.0 * b.half[d];
    return v;
}

Cube dilate(const Cube& q, double s) {
    if (!(s > 0.0)) throw std::invalid_argument("dilate: scale must be positive");
    Cube r = q;
    r.half_side = q.half_side * s;
    return r;
}

Box dilate(const Box& b, double s) {
    if (!(s > 0.0)) throw std::invalid_argument("dilate: scale must be positive");
    Box r = b;
    for (int d = 0; d < b.dim; ++d) r.half[d] = b.half[d] * s;
    return r;
}

std::vector<Cube> subdivide(const Cube& q, int m) {
    if (m < 1) throw std::invalid_argument("subdivide: m must be >= 1");
    std::size_t total = 1;
    for (int d = 0; d < q.dim; ++d) total *= std::size_t(m);
    std::vector<Cube> out;
    out.reserve(total);
    const double h = q.half_side / double(m);
    std::array<int, 4> idx{};
    for (std::size_t n = 0; n < total; ++n) {
        Cube c;
        c.dim = q.dim;
        c.half_side = h;
        for (int d = 0; d < q.dim; ++d)
            c.center[d] = m == 1 ? q.center[d]
                                 : q.center[d] - q.half_side + (2 * idx[d] + 1) * h;
        out.push_back(c);
        // lexicographic: last axis fastest
        for (int d = q.dim - 1; d >= 0; --d) {
            if (++idx[d] < m) break;
            idx[d] = 0;
        }
    }
    return out;
}

std::vector<Box> subdivide_box(const Box& b, std::span<const int> factors) {
    if (int(factors.size()) != b.dim) throw std::invalid_argument("subdivide_box: factor count != dim");
    std::size_t total = 1;
    for (int f : factors) {
        if (f < 1) throw std::invalid_argument("subdivide_box: factors must be >= 1");
        total *= std::size_t(f);
    }
    std::vector<Box> out;
    out.reserve(total);
    std::array<int, 4> idx{};
    for (std::size_t n = 0; n < total; ++n) {
        Box c;
        c.dim = b.dim;
        for (int d = 0; d < b.dim; ++d) {
            c.half[d] = b.half[d] / double(factors[d]);
            c.center[d] = factors[d] == 1
                              ? b.center[d]
                              : b.center[d] - b.half[d] + (2 * idx[d] + 1) * c.half[d];
        }
        out.push_back(c);
        for (int d = b.dim - 1; d >= 0; --d) {
            if (++idx[d] < factors[d]) break;
            idx[d] = 0;
        }
    }
    return out;
}

std::vector<Cube> dyadic_subcubes(const Cube& q, int depth) {
    if (depth < 0) throw std::invalid_argument("dyadic_subcubes: negative depth");
    int m = 1;
    for (int k = 0; k < depth; ++k) m *= 2;
    return subdivide(q, m);
}

bool contains(const Cube& outer, const Cube& inner, double tol) {
    return contains(to_box(outer), to_box(inner), tol);
}

bool contains(const Box& outer, const Box& inner, double tol) {
    if (outer.dim != inner.dim) return false;
    for (int d = 0; d < outer.dim; ++d) {
        if (inner.center[d] - inner.half[d] < outer.center[d] - outer.half[d] - tol) return false;
        if (inner.center[d] + inner.half[d] > outer.center[d] + outer.half[d] + tol) return false;
    }
    return true;
}

std::vector<int> balanced_factors(long long Y, int dim, int rotation) {
    if (Y < 1 || dim < 1) throw std::invalid_argument("balanced_factors: Y and dim must be >= 1");
    // prime factorization, largest primes first
    std::vector<long long> primes;
    long long y = Y;
    for (long long p = 2; p * p <= y; ++p)
        while (y % p == 0) {
            primes.push_back(p);
            y /= p;
        }
    if (y > 1) primes.push_back(y);
    std::sort(primes.rbegin(), primes.rend());
    std::vector<long long> f(std::size_t(dim), 1);
    for (long long p : primes) {
        auto smallest = std::min_element(f.begin(), f.end());
        *smallest *= p;
    }
    std::sort(f.rbegin(), f.rend());
    std::vector<int> out(static_cast<std::size_t>(dim));
    for (int d = 0; d < dim; ++d) {
        long long v = f[std::size_t((d + rotation) % dim)];
        out[std::size_t(d)] = int(v);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Sphere caps
// ---------------------------------------------------------------------------

double cap_chart_radius() { return std::tan(kCapThetaMax / 2.0); }

std::array<double, 3> cap_to_sphere(ChartKind cap, double s1, double s2) {
    const double t = s1 * s1 + s2 * s2;
    const double d = 1.0 + t;
    if (cap == ChartKind::SphereCapNorth) return {2.0 * s1 / d, 2.0 * s2 / d, (1.0 - t) / d};
    if (cap == ChartKind::SphereCapSouth) return {2.0 * s1 / d, 2.0 * s2 / d, (t - 1.0) / d};
    throw std::invalid_argument("cap_to_sphere: flat chart");
}

std::array<double, 2> sphere_to_cap(ChartKind cap, const std::array<double, 3>& p) {
    if (cap == ChartKind::SphereCapNorth) {
        const double d = 1.0 + p[2];
        return {p[0] / d, p[1] / d};
    }
    if (cap == ChartKind::SphereCapSouth) {
        const double d = 1.0 - p[2];
        return {p[0] / d, p[1] / d};
    }
    throw std::invalid_argument("sphere_to_cap: flat chart");
}

double cap_conformal_factor(double s1, double s2) {
    return 2.0 / (1.0 + s1 * s1 + s2 * s2);
}

ChartSpec flat_chart() { return ChartSpec{}; }

ChartSpec cap_chart(ChartKind cap) {
    if (cap == ChartKind::Flat) return flat_chart();
    ChartSpec c;
    c.kind = cap;
    c.cap_radius = cap_chart_radius();
    return c;
}

bool ChartSpec::contains(const Box& b) const {
    if (kind == ChartKind::Flat) return true;
    // farthest corner of the box must stay inside the cap disk
    double r2 = 0.0;
    for (int d = 0; d < b.dim; ++d) {
        const double e = std::abs(b.center[d]) + b.half[d];
        r2 += e * e;
    }
    return r2 <= cap_radius * cap_radius;
}

bool ball_in_chart(const Ball& b) {
    if (b.chart == ChartKind::Flat) return b.radius > 0.0;
    // geodesic angle of the center from the pole plus the radius must fit
    const double theta = 2.0 * std::atan(std::hypot(b.center[0], b.center[1]));
    return b.radius > 0.0 && theta + b.radius <= kCapThetaMax;
}

namespace {

// orthonormal frame perpendicular to a unit vector
void frame_of(const std::array<double, 3>& p, std::array<double, 3>& e1, std::array<double, 3>& e2) {
    if (std::abs(p[2]) < 0.9) {
        e1 = {-p[1], p[0], 0.0};
    } else {
        e1 = {0.0, -p[2], p[1]};
    }
    double n = std::sqrt(e1[0] * e1[0] + e1[1] * e1[1] + e1[2] * e1[2]);
    for (auto& v : e1) v /= n;
    e2 = {p[1] * e1[2] - p[2] * e1[1], p[2] * e1[0] - p[0] * e1[2], p[0] * e1[1] - p[1] * e1[0]};
}

double seed_phase(std::uint64_t seed) {
    std::uint64_t s = seed;
    return double(splitmix64_next(s) >> 11) * 0x1.0p-53;
}

// Unit direction sequences per dimension; index-addressable and nested.
Vec4 unit_direction(int dim, std::uint64_t index, double phase) {
    Vec4 u{};
    if (dim == 2) {
        const double a = kTwoPi * (phase + 0.6180339887498949 * double(index + 1));
        u[0] = std::cos(a);
        u[1] = std::sin(a);
    } else if (dim == 3) {
        // spherical Fibonacci lattice with a seeded rotation
        const double z = 1.0 - 2.0 * halton(index, 2);
        const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        const double a = kTwoPi * (phase + 0.6180339887498949 * double(index + 1));
        u[0] = r * std::cos(a);
        u[1] = r * std::sin(a);
        u[2] = z;
    } else if (dim == 4) {
        // Hopf coordinates with a Kronecker lattice: uniform on S^3
        double k[3];
        kronecker(index, 3, phase, k);
        const double eta = std::asin(std::sqrt(k[2]));
        const double a1 = kTwoPi * k[0], a2 = kTwoPi * k[1];
        u[0] = std::cos(eta) * std::cos(a1);
        u[1] = std::cos(eta) * std::sin(a1);
        u[2] = std::sin(eta) * std::cos(a2);
        u[3] = std::sin(eta) * std::sin(a2);
    } else {
        throw std::invalid_argument("unit_direction: dim must be 2..4");
    }
    return u;
}

}  // namespace

std::vector<Vec4> ball_boundary_points(const Ball& b, int count, std::uint64_t seed) {
    if (count < 1) throw std::invalid_argument("ball_boundary_points: count >= 1 required");
    if (!ball_in_chart(b)) throw std::invalid_argument("ball_boundary_points: ball outside chart");
    std::vector<Vec4> out;
    out.reserve(std::size_t(count));
    const double phase = seed_phase(seed);
    if (b.chart == ChartKind::Flat) {
        if (b.dim == 2) {
            // equally spaced; doubling the count refines the same set
            for (int i = 0; i < count; ++i) {
                const double a = kTwoPi * (phase + double(i) / double(count));
                out.push_back(vec4(b.center[0] + b.radius * std::cos(a),
                                   b.center[1] + b.radius * std::sin(a)));
            }
        } else {
            for (int i = 0; i < count; ++i) {
                Vec4 u = unit_direction(b.dim, std::uint64_t(i), phase);
                Vec4 p = b.center;
                for (int d = 0; d < b.dim; ++d) p[d] += b.radius * u[d];
                out.push_back(p);
            }
        }
        return out;
    }
    // geodesic circle on S^2, mapped back to the cap chart
    const auto p0 = cap_to_sphere(b.chart, b.center[0], b.center[1]);
    std::array<double, 3> e1, e2;
    frame_of(p0, e1, e2);
    const double cr = std::cos(b.radius), sr = std::sin(b.radius);
    for (int i = 0; i < count; ++i) {
        const double a = kTwoPi * (phase + double(i) / double(count));
        std::array<double, 3> q;
        for (int d = 0; d < 3; ++d)
            q[std::size_t(d)] = cr * p0[std::size_t(d)] +
                                sr * (std::cos(a) * e1[std::size_t(d)] + std::sin(a) * e2[std::size_t(d)]);
        const auto s = sphere_to_cap(b.chart, q);
        out.push_back(vec4(s[0], s[1]));
    }
    return out;
}

std::vector<Vec4> ball_interior_points(const Ball& b, int count, std::uint64_t seed) {
    if (count < 1) throw std::invalid_argument("ball_interior_points: count >= 1 required");
    if (!ball_in_chart(b)) throw std::invalid_argument("ball_interior_points: ball outside chart");
    std::vector<Vec4> out;
    out.reserve(std::size_t(count) + 1);
    const double phase = seed_phase(seed);
    if (b.chart == ChartKind::Flat) {
        out.push_back(b.center);
        for (int i = 1; i < count; ++i) {
            Vec4 u = unit_direction(b.dim, std::uint64_t(i), phase);
            // uniform radius: r^dim law from the radial Halton coordinate
            const double rho = b.radius * std::pow(halton(std::uint64_t(i), 5), 1.0 / double(b.dim));
            Vec4 p = b.center;
            for (int d = 0; d < b.dim; ++d) p[d] += rho * u[d];
            out.push_back(p);
        }
        return out;
    }
    const auto p0 = cap_to_sphere(b.chart, b.center[0], b.center[1]);
    std::array<double, 3> e1, e2;
    frame_of(p0, e1, e2);
    out.push_back(b.center);
    for (int i = 1; i < count; ++i) {
        const double u = halton(std::uint64_t(i), 5);
        const double rho = std::acos(1.0 - u * (1.0 - std::cos(b.radius)));  // area-uniform
        const double a = kTwoPi * (phase + 0.6180339887498949 * double(i));
        std::array<double, 3> q;
        for (int d = 0; d < 3; ++d)
            q[std::size_t(d)] = std::cos(rho) * p0[std::size_t(d)] +
                                std::sin(rho) * (std::cos(a) * e1[std::size_t(d)] + std::sin(a) * e2[std::size_t(d)]);
        const auto s = sphere_to_cap(b.chart, q);
        out.push_back(vec4(s[0], s[1]));
    }
    return out;
}

}  // namespace nlab
