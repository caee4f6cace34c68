#include "nodallab/nodal.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <ostream>

#include "nodallab/quad.hpp"

namespace nlab {

namespace {

#include "mc_tables.inc"

// zero counts as positive: deterministic and keeps on-grid nodal lines single
inline bool positive(double v) { return v >= 0.0; }

struct EvalCtx {
    const Eigenfunction* u;
    ChartKind chart;
    double operator()(const Vec4& p) const { return u->evaluate(p.data(), chart); }
};

// Bisection (15 steps) along a sign-changing edge, then linear interpolation
// inside the final bracket.
Vec4 edge_zero(const EvalCtx& f, Vec4 pa, double va, Vec4 pb, double vb) {
    const bool sa = positive(va);
    for (int iter = 0; iter < 15; ++iter) {
        Vec4 mid;
        for (int d = 0; d < 4; ++d) mid[d] = 0.5 * (pa[d] + pb[d]);
        const double vm = f(mid);
        if (positive(vm) == sa) {
            pa = mid;
            va = vm;
        } else {
            pb = mid;
            vb = vm;
        }
    }
    double t = va == vb ? 0.5 : va / (va - vb);
    t = std::clamp(t, 0.0, 1.0);
    Vec4 z;
    for (int d = 0; d < 4; ++d) z[d] = pa[d] + t * (pb[d] - pa[d]);
    return z;
}

// Restriction of a torus mode sum to an axis-parallel line: a short 1D trig
// polynomial grouped by the distinct frequencies along that axis. Bisection
// steps on grid edges then cost the number of distinct frequencies instead of
// the full mode count.
struct EdgeTrig {
    std::vector<std::array<double, 3>> terms;  // (k, A, B): A cos(kt) + B sin(kt)

    double eval(double t) const {
        double v = 0.0;
        for (const auto& term : terms)
            v += term[1] * std::cos(term[0] * t) + term[2] * std::sin(term[0] * t);
        return v;
    }

    static bool build(const Eigenfunction& u, const Vec4& base, int axis, EdgeTrig& out) {
        if (u.manifold() == Manifold::Sphere2) return false;
        const int dim = u.dim();
        int kmax = 0;
        for (const auto& mode : u.torus_modes())
            kmax = std::max(kmax, std::abs(mode.k[std::size_t(axis)]));
        thread_local std::vector<double> A, B;
        A.assign(std::size_t(kmax) + 1, 0.0);
        B.assign(std::size_t(kmax) + 1, 0.0);
        for (const auto& mode : u.torus_modes()) {
            double r = 0.0;
            for (int d = 0; d < dim; ++d)
                if (d != axis) r += double(mode.k[std::size_t(d)]) * base[d];
            const double cr = std::cos(r), sr = std::sin(r);
            int kx = mode.k[std::size_t(axis)];
            double a = mode.cos_coef * cr + mode.sin_coef * sr;
            double b = -mode.cos_coef * sr + mode.sin_coef * cr;
            if (kx < 0) {  // fold onto kx >= 0
                kx = -kx;
                b = -b;
            }
            A[std::size_t(kx)] += a;
            B[std::size_t(kx)] += b;
        }
        out.terms.clear();
        out.terms.reserve(std::size_t(kmax) + 1);
        for (int k = 0; k <= kmax; ++k)
            if (A[std::size_t(k)] != 0.0 || B[std::size_t(k)] != 0.0)
                out.terms.push_back({double(k), A[std::size_t(k)], B[std::size_t(k)]});
        return true;
    }
};

// bisection along an axis-parallel edge using the 1D restriction
Vec4 edge_zero_1d(const EdgeTrig& trig, Vec4 base, int axis, double ta, double va, double tb,
                  double vb) {
    const bool sa = positive(va);
    for (int iter = 0; iter < 15; ++iter) {
        const double tm = 0.5 * (ta + tb);
        const double vm = trig.eval(tm);
        if (positive(vm) == sa) {
            ta = tm;
            va = vm;
        } else {
            tb = tm;
            vb = vm;
        }
    }
    double t = va == vb ? 0.5 : va / (va - vb);
    base[axis] = ta + std::clamp(t, 0.0, 1.0) * (tb - ta);
    return base;
}

double seg_metric(const Vec4& a, const Vec4& b, ChartKind chart) {
    const double len = std::hypot(b[0] - a[0], b[1] - a[1]);
    if (chart == ChartKind::Flat) return len;
    const double mx = 0.5 * (a[0] + b[0]), my = 0.5 * (a[1] + b[1]);
    return len * cap_conformal_factor(mx, my);
}

void push_segment(std::vector<Segment2>& out, const Vec4& a, const Vec4& b, ChartKind chart) {
    Segment2 s;
    s.a = a;
    s.b = b;
    s.chart = chart;
    s.measure = seg_metric(a, b, chart);
    out.push_back(s);
}

// edge ids within a 2D cell: 0 bottom, 1 right, 2 top, 3 left; the edge zero
// points are precomputed once per grid edge
void cell_segments_cached(const EvalCtx& f, ChartKind chart, const double v[4], const Vec4 e[4],
                          const Vec4& center, std::vector<Segment2>& out) {
    // corners: 0 = (x0,y0), 1 = (x1,y0), 2 = (x1,y1), 3 = (x0,y1)
    int code = 0;
    if (positive(v[0])) code |= 1;
    if (positive(v[1])) code |= 2;
    if (positive(v[2])) code |= 4;
    if (positive(v[3])) code |= 8;
    if (code == 0 || code == 15) return;

    auto emit = [&](int e1, int e2) { push_segment(out, e[e1], e[e2], chart); };

    switch (code) {
        case 1: case 14: emit(3, 0); break;
        case 2: case 13: emit(0, 1); break;
        case 3: case 12: emit(3, 1); break;
        case 4: case 11: emit(1, 2); break;
        case 6: case 9: emit(0, 2); break;
        case 7: case 8: emit(2, 3); break;
        case 5: {  // corners 0 and 2 positive: saddle, center sign decides
            if (positive(f(center))) {
                emit(3, 2);
                emit(0, 1);
            } else {
                emit(3, 0);
                emit(1, 2);
            }
            break;
        }
        case 10: {  // corners 1 and 3 positive
            if (positive(f(center))) {
                emit(3, 0);
                emit(1, 2);
            } else {
                emit(3, 2);
                emit(0, 1);
            }
            break;
        }
        default: break;
    }
}

// Values that are rounding noise relative to their grid neighbours are
// snapped to +0, so a zero sitting exactly on a grid line or a shared window
// face keeps one consistent sign on both sides. The rule is local: regions
// where the function is legitimately tiny (high-order zeros) are untouched.
void snap_grid_zeros(std::vector<double>& grid, int nx, int ny) {
    const std::vector<double> raw = grid;
    auto at = [&](int ix, int iy) { return std::abs(raw[std::size_t(iy) * std::size_t(nx) + std::size_t(ix)]); };
    for (int iy = 0; iy < ny; ++iy)
        for (int ix = 0; ix < nx; ++ix) {
            double nbr = 0.0;
            if (ix > 0) nbr = std::max(nbr, at(ix - 1, iy));
            if (ix + 1 < nx) nbr = std::max(nbr, at(ix + 1, iy));
            if (iy > 0) nbr = std::max(nbr, at(ix, iy - 1));
            if (iy + 1 < ny) nbr = std::max(nbr, at(ix, iy + 1));
            double& v = grid[std::size_t(iy) * std::size_t(nx) + std::size_t(ix)];
            if (std::abs(v) <= 1e-13 * nbr) v = 0.0;
        }
}

NodalSet extract_window_2d(const Eigenfunction& u, const Window2& win, int res,
                           bool periodic = false) {
    const EvalCtx f{&u, win.chart};
    const double dx = (win.hi[0] - win.lo[0]) / double(res);
    const double dy = (win.hi[1] - win.lo[1]) / double(res);
    if (!(dx > 0.0 && dy > 0.0)) throw std::invalid_argument("extract_nodal_2d: empty window");

    // corner grid, rows in parallel; a periodic window reuses the first
    // row/column at the far boundary so seam zeros are counted exactly once
    const int n = res + 1;
    std::vector<double> grid(std::size_t(n) * std::size_t(n));
    parallel_for(std::size_t(n), [&](std::size_t jy) {
        const double row_start[2] = {win.lo[0], win.lo[1] + double(jy) * dy};
        u.evaluate_row(row_start, 0, dx, n, &grid[jy * std::size_t(n)], win.chart);
    });
    if (periodic) {
        for (int jy = 0; jy < n; ++jy)
            grid[std::size_t(jy) * std::size_t(n) + std::size_t(res)] =
                grid[std::size_t(jy) * std::size_t(n)];
        for (int ix = 0; ix < n; ++ix)
            grid[std::size_t(res) * std::size_t(n) + std::size_t(ix)] = grid[std::size_t(ix)];
    }
    snap_grid_zeros(grid, n, n);

    // edge zeros are shared between neighbouring cells: bisect each
    // sign-changing grid edge once
    auto gval = [&](int ix, int jy) { return grid[std::size_t(jy) * std::size_t(n) + std::size_t(ix)]; };
    auto gpt = [&](int ix, int jy) {
        return vec4(win.lo[0] + double(ix) * dx, win.lo[1] + double(jy) * dy);
    };
    const bool trig_edges = win.chart == ChartKind::Flat && u.manifold() != Manifold::Sphere2;
    std::vector<Vec4> xedge(std::size_t(n) * std::size_t(res));   // (ix, jy) -> (ix+1, jy)
    std::vector<Vec4> yedge(std::size_t(n) * std::size_t(res));   // (ix, jy) -> (ix, jy+1)
    parallel_for(std::size_t(n), [&](std::size_t jy) {
        EdgeTrig trig;
        const bool have = trig_edges && EdgeTrig::build(u, gpt(0, int(jy)), 0, trig);
        for (int ix = 0; ix < res; ++ix) {
            const double va = gval(ix, int(jy)), vb = gval(ix + 1, int(jy));
            if (positive(va) != positive(vb))
                xedge[jy * std::size_t(res) + std::size_t(ix)] =
                    have ? edge_zero_1d(trig, gpt(ix, int(jy)), 0, gpt(ix, int(jy))[0], va,
                                        gpt(ix + 1, int(jy))[0], vb)
                         : edge_zero(f, gpt(ix, int(jy)), va, gpt(ix + 1, int(jy)), vb);
        }
    });
    parallel_for(std::size_t(res), [&](std::size_t jy) {
        for (int ix = 0; ix < n; ++ix) {
            const double va = gval(ix, int(jy)), vb = gval(ix, int(jy) + 1);
            if (positive(va) != positive(vb)) {
                EdgeTrig trig;
                const bool have = trig_edges && EdgeTrig::build(u, gpt(ix, int(jy)), 1, trig);
                yedge[jy * std::size_t(n) + std::size_t(ix)] =
                    have ? edge_zero_1d(trig, gpt(ix, int(jy)), 1, gpt(ix, int(jy))[1], va,
                                        gpt(ix, int(jy) + 1)[1], vb)
                         : edge_zero(f, gpt(ix, int(jy)), va, gpt(ix, int(jy) + 1), vb);
            }
        }
    });

    std::vector<std::vector<Segment2>> rows(static_cast<std::size_t>(res));
    parallel_for(std::size_t(res), [&](std::size_t jy) {
        auto& out = rows[jy];
        for (int ix = 0; ix < res; ++ix) {
            const double v[4] = {gval(ix, int(jy)), gval(ix + 1, int(jy)),
                                 gval(ix + 1, int(jy) + 1), gval(ix, int(jy) + 1)};
            const Vec4 e[4] = {xedge[jy * std::size_t(res) + std::size_t(ix)],
                               yedge[jy * std::size_t(n) + std::size_t(ix) + 1],
                               xedge[(jy + 1) * std::size_t(res) + std::size_t(ix)],
                               yedge[jy * std::size_t(n) + std::size_t(ix)]};
            const Vec4 center = vec4(win.lo[0] + (double(ix) + 0.5) * dx,
                                     win.lo[1] + (double(jy) + 0.5) * dy);
            cell_segments_cached(f, win.chart, v, e, center, out);
        }
    });

    NodalSet set;
    set.dim = 2;
    set.resolution = res;
    for (auto& row : rows)
        for (auto& s : row) {
            set.total_measure += s.measure;
            set.segments.push_back(s);
        }
    return set;
}

int required_resolution(double lambda, double width, int dim) {
    const double factor = dim == 2 ? 8.0 : 4.0;
    return std::max(1, int(std::ceil(width * factor * std::sqrt(std::max(lambda, 0.0)) / M_PI)));
}

}  // namespace

int min_resolution(double lambda, double width, int dim) {
    return required_resolution(lambda, width, dim);
}

NodalSet extract_nodal_2d(const Eigenfunction& u, const Window2& win, int resolution) {
    if (u.dim() != 2) throw std::invalid_argument("extract_nodal_2d: 2D manifolds only");
    const double width = std::max(win.hi[0] - win.lo[0], win.hi[1] - win.lo[1]);
    // caps compress chart lengths by up to 2x, so demand twice the cells there
    const double eff = win.chart == ChartKind::Flat ? width : 2.0 * width;
    const int need = required_resolution(u.lambda(), eff, 2);
    if (resolution < need)
        throw std::invalid_argument("extract_nodal_2d: resolution below the oscillation rule (need " +
                                    std::to_string(need) + ")");
    return extract_window_2d(u, win, resolution);
}

NodalSet extract_nodal_2d(const Eigenfunction& u, int resolution) {
    if (u.manifold() == Manifold::Torus2) {
        Window2 win;
        win.lo = vec4(0.0, 0.0);
        win.hi = vec4(kTwoPi, kTwoPi);
        const int need = required_resolution(u.lambda(), kTwoPi, 2);
        if (resolution < need)
            throw std::invalid_argument(
                "extract_nodal_2d: resolution below the oscillation rule (need " +
                std::to_string(need) + ")");
        return extract_window_2d(u, win, resolution, /*periodic=*/true);
    }
    if (u.manifold() != Manifold::Sphere2)
        throw std::invalid_argument("extract_nodal_2d: 2D manifolds only");
    // both caps over a padded disk window; a segment belongs to the cap whose
    // hemisphere holds its midpoint (the northern cap owns the equator)
    NodalSet set;
    set.dim = 2;
    set.resolution = resolution;
    for (ChartKind cap : {ChartKind::SphereCapNorth, ChartKind::SphereCapSouth}) {
        Window2 win;
        win.chart = cap;
        win.lo = vec4(-1.1, -1.1);
        win.hi = vec4(1.1, 1.1);
        NodalSet part = extract_nodal_2d(u, win, resolution);
        // the band keeps interpolation noise from reassigning equatorial pieces
        constexpr double kEquatorBand = 1e-9;
        for (const auto& s : part.segments) {
            const auto pa = cap_to_sphere(cap, s.a[0], s.a[1]);
            const auto pb = cap_to_sphere(cap, s.b[0], s.b[1]);
            const double z = 0.5 * (pa[2] + pb[2]);
            const bool owned =
                cap == ChartKind::SphereCapNorth ? z >= -kEquatorBand : z < -kEquatorBand;
            if (!owned) continue;
            set.segments.push_back(s);
            set.total_measure += s.measure;
        }
    }
    return set;
}

// ---------------------------------------------------------------------------
// Marching cubes
// ---------------------------------------------------------------------------

namespace {

double tri_area(const std::array<double, 9>& t) {
    const double ux = t[3] - t[0], uy = t[4] - t[1], uz = t[5] - t[2];
    const double vx = t[6] - t[0], vy = t[7] - t[1], vz = t[8] - t[2];
    const double cx = uy * vz - uz * vy, cy = uz * vx - ux * vz, cz = ux * vy - uy * vx;
    return 0.5 * std::sqrt(cx * cx + cy * cy + cz * cz);
}

NodalSet extract_box_3d(const Eigenfunction& u, const Box& window, int res,
                        bool periodic = false) {
    const EvalCtx f{&u, ChartKind::Flat};
    const int n = res + 1;
    double lo[3], step[3];
    for (int d = 0; d < 3; ++d) {
        lo[d] = window.center[d] - window.half[d];
        step[d] = 2.0 * window.half[d] / double(res);
    }

    // Bourke cell layout: corners 0..3 at z, 4..7 at z+1
    static const int corner_dx[8] = {0, 1, 1, 0, 0, 1, 1, 0};
    static const int corner_dy[8] = {0, 0, 1, 1, 0, 0, 1, 1};
    NodalSet set;
    set.dim = 3;
    set.resolution = res;

    std::vector<double> slab0(std::size_t(n) * std::size_t(n));
    std::vector<double> slab1(std::size_t(n) * std::size_t(n));
    auto fill_slab = [&](std::vector<double>& slab, int iz) {
        const double z = lo[2] + double(iz) * step[2];
        parallel_for(std::size_t(n), [&](std::size_t jy) {
            const double row_start[3] = {lo[0], lo[1] + double(jy) * step[1], z};
            u.evaluate_row(row_start, 0, step[0], n, &slab[jy * std::size_t(n)]);
        });
        if (periodic) {
            for (int jy = 0; jy < n; ++jy)
                slab[std::size_t(jy) * std::size_t(n) + std::size_t(res)] =
                    slab[std::size_t(jy) * std::size_t(n)];
            for (int ix = 0; ix < n; ++ix)
                slab[std::size_t(res) * std::size_t(n) + std::size_t(ix)] = slab[std::size_t(ix)];
        }
        snap_grid_zeros(slab, n, n);
    };
    fill_slab(slab0, 0);
    const std::vector<double> slab_base = slab0;  // reused at the wrap-around

    // per-plane edge-zero caches; a plane's in-plane edges are shared between
    // the slab pairs above and below it, and every edge is bisected once
    struct PlaneEdges {
        std::vector<Vec4> xe;  // (ix, iy): (ix,iy) -> (ix+1,iy)
        std::vector<Vec4> ye;  // (ix, iy): (ix,iy) -> (ix,iy+1)
    };
    auto fill_plane_edges = [&](PlaneEdges& pe, const std::vector<double>& slab, double z) {
        pe.xe.assign(std::size_t(res) * std::size_t(n), Vec4{});
        pe.ye.assign(std::size_t(n) * std::size_t(res), Vec4{});
        parallel_for(std::size_t(n), [&](std::size_t gy) {
            EdgeTrig trig;
            const Vec4 row = vec4(lo[0], lo[1] + double(gy) * step[1], z);
            const bool have = EdgeTrig::build(u, row, 0, trig);
            for (int gx = 0; gx < res; ++gx) {
                const double va = slab[gy * std::size_t(n) + std::size_t(gx)];
                const double vb = slab[gy * std::size_t(n) + std::size_t(gx) + 1];
                if (positive(va) != positive(vb)) {
                    const Vec4 a = vec4(lo[0] + gx * step[0], row[1], z);
                    const Vec4 b = vec4(lo[0] + (gx + 1) * step[0], row[1], z);
                    pe.xe[gy * std::size_t(res) + std::size_t(gx)] =
                        have ? edge_zero_1d(trig, a, 0, a[0], va, b[0], vb)
                             : edge_zero(f, a, va, b, vb);
                }
            }
        });
        parallel_for(std::size_t(res), [&](std::size_t gy) {
            for (int gx = 0; gx < n; ++gx) {
                const double va = slab[gy * std::size_t(n) + std::size_t(gx)];
                const double vb = slab[(gy + 1) * std::size_t(n) + std::size_t(gx)];
                if (positive(va) != positive(vb)) {
                    const Vec4 a = vec4(lo[0] + gx * step[0], lo[1] + double(gy) * step[1], z);
                    const Vec4 b = vec4(a[0], lo[1] + double(gy + 1) * step[1], z);
                    EdgeTrig trig;
                    const bool have = EdgeTrig::build(u, a, 1, trig);
                    pe.ye[gy * std::size_t(n) + std::size_t(gx)] =
                        have ? edge_zero_1d(trig, a, 1, a[1], va, b[1], vb)
                             : edge_zero(f, a, va, b, vb);
                }
            }
        });
    };

    PlaneEdges pe0, pe1;
    std::vector<Vec4> zedge(std::size_t(n) * std::size_t(n));
    fill_plane_edges(pe0, slab0, lo[2]);

    std::vector<std::vector<Triangle3>> rows(static_cast<std::size_t>(res));
    for (int iz = 0; iz < res; ++iz) {
        if (periodic && iz + 1 == res)
            slab1 = slab_base;
        else
            fill_slab(slab1, iz + 1);
        const double z0 = lo[2] + double(iz) * step[2];
        const double z1 = lo[2] + double(iz + 1) * step[2];
        fill_plane_edges(pe1, slab1, z1);
        parallel_for(std::size_t(n), [&](std::size_t gy) {
            for (int gx = 0; gx < n; ++gx) {
                const double va = slab0[gy * std::size_t(n) + std::size_t(gx)];
                const double vb = slab1[gy * std::size_t(n) + std::size_t(gx)];
                if (positive(va) != positive(vb)) {
                    const Vec4 a = vec4(lo[0] + gx * step[0], lo[1] + double(gy) * step[1], z0);
                    const Vec4 b = vec4(a[0], a[1], z1);
                    EdgeTrig trig;
                    const bool have = EdgeTrig::build(u, a, 2, trig);
                    zedge[gy * std::size_t(n) + std::size_t(gx)] =
                        have ? edge_zero_1d(trig, a, 2, z0, va, z1, vb)
                             : edge_zero(f, a, va, b, vb);
                }
            }
        });

        for (auto& r : rows) r.clear();
        parallel_for(std::size_t(res), [&](std::size_t jy) {
            auto& out = rows[jy];
            for (int ix = 0; ix < res; ++ix) {
                double val[8];
                for (int c = 0; c < 8; ++c) {
                    const int gx = ix + corner_dx[c], gy = int(jy) + corner_dy[c];
                    const auto& slab = c < 4 ? slab0 : slab1;
                    val[c] = slab[std::size_t(gy) * std::size_t(n) + std::size_t(gx)];
                }
                int code = 0;
                for (int c = 0; c < 8; ++c)
                    if (!positive(val[c])) code |= (1 << c);
                const int edges = kMcEdgeTable[code];
                if (edges == 0) continue;
                const std::size_t sx = std::size_t(res), sn = std::size_t(n);
                const Vec4 vert[12] = {
                    pe0.xe[jy * sx + std::size_t(ix)],           // e0: p0-p1
                    pe0.ye[jy * sn + std::size_t(ix) + 1],       // e1: p1-p2
                    pe0.xe[(jy + 1) * sx + std::size_t(ix)],     // e2: p2-p3
                    pe0.ye[jy * sn + std::size_t(ix)],           // e3: p3-p0
                    pe1.xe[jy * sx + std::size_t(ix)],           // e4
                    pe1.ye[jy * sn + std::size_t(ix) + 1],       // e5
                    pe1.xe[(jy + 1) * sx + std::size_t(ix)],     // e6
                    pe1.ye[jy * sn + std::size_t(ix)],           // e7
                    zedge[jy * sn + std::size_t(ix)],            // e8: p0-p4
                    zedge[jy * sn + std::size_t(ix) + 1],        // e9: p1-p5
                    zedge[(jy + 1) * sn + std::size_t(ix) + 1],  // e10: p2-p6
                    zedge[(jy + 1) * sn + std::size_t(ix)],      // e11: p3-p7
                };
                for (int t = 0; kMcTriTable[code][t] != -1; t += 3) {
                    Triangle3 tri;
                    for (int k = 0; k < 3; ++k) {
                        const Vec4& v = vert[kMcTriTable[code][t + k]];
                        tri.v[std::size_t(3 * k)] = v[0];
                        tri.v[std::size_t(3 * k + 1)] = v[1];
                        tri.v[std::size_t(3 * k + 2)] = v[2];
                    }
                    tri.area = tri_area(tri.v);
                    out.push_back(tri);
                }
            }
        });
        for (auto& r : rows)
            for (auto& t : r) {
                set.total_measure += t.area;
                set.triangles.push_back(t);
            }
        std::swap(slab0, slab1);
        std::swap(pe0, pe1);
    }
    return set;
}

}  // namespace

NodalSet extract_nodal_3d(const Eigenfunction& u, const Box& window, int resolution) {
    if (u.manifold() != Manifold::Torus3)
        throw std::invalid_argument("extract_nodal_3d: Torus3 only");
    if (resolution > 512) throw std::invalid_argument("extract_nodal_3d: memory guard above 512^3");
    double width = 0.0;
    for (int d = 0; d < 3; ++d) width = std::max(width, 2.0 * window.half[d]);
    const int need = required_resolution(u.lambda(), width, 3);
    if (resolution < need)
        throw std::invalid_argument("extract_nodal_3d: resolution below the oscillation rule (need " +
                                    std::to_string(need) + ")");
    return extract_box_3d(u, window, resolution);
}

NodalSet extract_nodal_3d(const Eigenfunction& u, int resolution) {
    if (u.manifold() != Manifold::Torus3)
        throw std::invalid_argument("extract_nodal_3d: Torus3 only");
    if (resolution > 512) throw std::invalid_argument("extract_nodal_3d: memory guard above 512^3");
    const int need = required_resolution(u.lambda(), kTwoPi, 3);
    if (resolution < need)
        throw std::invalid_argument("extract_nodal_3d: resolution below the oscillation rule (need " +
                                    std::to_string(need) + ")");
    Box window;
    window.dim = 3;
    window.center = vec4(M_PI, M_PI, M_PI);
    window.half = vec4(M_PI, M_PI, M_PI);
    return extract_box_3d(u, window, resolution, /*periodic=*/true);
}

void write_nodal_set(const NodalSet& set, std::ostream& os) {
    os << std::fixed << std::setprecision(9);
    for (const auto& s : set.segments) {
        os << "seg " << int(s.chart) << ' ' << s.a[0] << ' ' << s.a[1] << ' ' << s.b[0] << ' '
           << s.b[1] << '\n';
    }
    for (const auto& t : set.triangles) {
        os << "tri";
        for (double v : t.v) os << ' ' << v;
        os << '\n';
    }
}

// ---------------------------------------------------------------------------
// Distances and the density radius
// ---------------------------------------------------------------------------

namespace {

double point_segment_dist(const double* p, const Vec4& a, const Vec4& b, int dim) {
    double ab2 = 0.0, ap_ab = 0.0;
    for (int d = 0; d < dim; ++d) {
        const double e = b[d] - a[d];
        ab2 += e * e;
        ap_ab += (p[d] - a[d]) * e;
    }
    const double t = ab2 > 0.0 ? std::clamp(ap_ab / ab2, 0.0, 1.0) : 0.0;
    double d2 = 0.0;
    for (int d = 0; d < dim; ++d) {
        const double e = p[d] - (a[d] + t * (b[d] - a[d]));
        d2 += e * e;
    }
    return std::sqrt(d2);
}

double point_triangle_dist(const double* p, const std::array<double, 9>& t) {
    const double* A = &t[0];
    const double* B = &t[3];
    const double* C = &t[6];
    double AB[3], AC[3], AP[3];
    for (int d = 0; d < 3; ++d) {
        AB[d] = B[d] - A[d];
        AC[d] = C[d] - A[d];
        AP[d] = p[d] - A[d];
    }
    const double d00 = AB[0] * AB[0] + AB[1] * AB[1] + AB[2] * AB[2];
    const double d01 = AB[0] * AC[0] + AB[1] * AC[1] + AB[2] * AC[2];
    const double d11 = AC[0] * AC[0] + AC[1] * AC[1] + AC[2] * AC[2];
    const double d20 = AP[0] * AB[0] + AP[1] * AB[1] + AP[2] * AB[2];
    const double d21 = AP[0] * AC[0] + AP[1] * AC[1] + AP[2] * AC[2];
    const double denom = d00 * d11 - d01 * d01;
    if (denom > 1e-30) {
        const double v = (d11 * d20 - d01 * d21) / denom;
        const double w = (d00 * d21 - d01 * d20) / denom;
        if (v >= 0.0 && w >= 0.0 && v + w <= 1.0) {
            double d2 = 0.0;
            for (int d = 0; d < 3; ++d) {
                const double e = AP[d] - v * AB[d] - w * AC[d];
                d2 += e * e;
            }
            return std::sqrt(d2);
        }
    }
    Vec4 a4 = vec4(A[0], A[1], A[2]), b4 = vec4(B[0], B[1], B[2]), c4 = vec4(C[0], C[1], C[2]);
    double best = point_segment_dist(p, a4, b4, 3);
    best = std::min(best, point_segment_dist(p, a4, c4, 3));
    best = std::min(best, point_segment_dist(p, b4, c4, 3));
    return best;
}

// periodic shift bringing an element (by its midpoint) to the image nearest p
void nearest_image_shift(const double* p, const double* mid, int dim, double* shift) {
    for (int d = 0; d < dim; ++d) shift[d] = kTwoPi * std::round((p[d] - mid[d]) / kTwoPi);
}

}  // namespace

double density_radius(const Eigenfunction& u, int samples, std::uint64_t seed, int resolution) {
    if (samples < 1) throw std::invalid_argument("density_radius: samples >= 1");
    const int dim = u.dim();
    if (resolution == 0)
        resolution = required_resolution(u.lambda(), kTwoPi, dim) + (dim == 2 ? 64 : 16);

    if (u.manifold() == Manifold::Sphere2) {
        // distances measured between points on S^2; elements sampled by endpoints
        const NodalSet set = extract_nodal_2d(u, resolution);
        if (set.segments.empty()) throw NumericError("density_radius: empty nodal set");
        std::vector<std::array<double, 3>> pts;
        pts.reserve(set.segments.size() * 2);
        for (const auto& s : set.segments) {
            pts.push_back(cap_to_sphere(s.chart, s.a[0], s.a[1]));
            pts.push_back(cap_to_sphere(s.chart, s.b[0], s.b[1]));
        }
        Rng rng(seed);
        double worst = 0.0;
        for (int i = 0; i < samples; ++i) {
            const double z = rng.uniform(-1.0, 1.0);
            const double a = rng.uniform(0.0, kTwoPi);
            const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
            const std::array<double, 3> q{r * std::cos(a), r * std::sin(a), z};
            double best = 4.0;
            for (const auto& pt : pts) {
                const double dot = q[0] * pt[0] + q[1] * pt[1] + q[2] * pt[2];
                best = std::min(best, std::acos(std::clamp(dot, -1.0, 1.0)));
            }
            worst = std::max(worst, best);
        }
        return worst;
    }

    const NodalSet set = dim == 2 ? extract_nodal_2d(u, resolution) : extract_nodal_3d(u, resolution);
    if (set.segments.empty() && set.triangles.empty())
        throw NumericError("density_radius: empty nodal set");

    Rng rng(seed);
    std::vector<Vec4> queries;
    for (int i = 0; i < samples; ++i) {
        Vec4 q{};
        for (int d = 0; d < dim; ++d) q[d] = rng.uniform(0.0, kTwoPi);
        queries.push_back(q);
    }
    std::vector<double> dist(queries.size(), 0.0);
    parallel_for(queries.size(), [&](std::size_t i) {
        const double* p = queries[i].data();
        double best = 1e300;
        double shift[3];
        if (dim == 2) {
            for (const auto& s : set.segments) {
                const double mid[2] = {0.5 * (s.a[0] + s.b[0]), 0.5 * (s.a[1] + s.b[1])};
                nearest_image_shift(p, mid, 2, shift);
                Vec4 a = s.a, b = s.b;
                for (int d = 0; d < 2; ++d) {
                    a[d] += shift[d];
                    b[d] += shift[d];
                }
                best = std::min(best, point_segment_dist(p, a, b, 2));
            }
        } else {
            for (const auto& t : set.triangles) {
                const double mid[3] = {(t.v[0] + t.v[3] + t.v[6]) / 3.0,
                                       (t.v[1] + t.v[4] + t.v[7]) / 3.0,
                                       (t.v[2] + t.v[5] + t.v[8]) / 3.0};
                nearest_image_shift(p, mid, 3, shift);
                std::array<double, 9> tv = t.v;
                for (int k = 0; k < 3; ++k)
                    for (int d = 0; d < 3; ++d) tv[std::size_t(3 * k + d)] += shift[d];
                best = std::min(best, point_triangle_dist(p, tv));
            }
        }
        dist[i] = best;
    });
    double worst = 0.0;
    for (double d : dist) worst = std::max(worst, d);
    return worst;
}

// ---------------------------------------------------------------------------
// Inscribed-ball lower bound and the sign-ball construction
// ---------------------------------------------------------------------------

namespace {

// chart circle of the geodesic circle of radius rho around a cap point
void cap_circle(ChartKind cap, const Vec4& center, double rho, double& cx, double& cy,
                double& cr) {
    Ball b;
    b.dim = 2;
    b.chart = cap;
    b.center = center;
    b.radius = rho;
    const auto pts = ball_boundary_points(b, 3, 7);
    const double ax = pts[0][0], ay = pts[0][1];
    const double bx = pts[1][0], by = pts[1][1];
    const double qx = pts[2][0], qy = pts[2][1];
    const double d = 2.0 * (ax * (by - qy) + bx * (qy - ay) + qx * (ay - by));
    cx = ((ax * ax + ay * ay) * (by - qy) + (bx * bx + by * by) * (qy - ay) +
          (qx * qx + qy * qy) * (ay - by)) /
         d;
    cy = ((ax * ax + ay * ay) * (qx - bx) + (bx * bx + by * by) * (ax - qx) +
          (qx * qx + qy * qy) * (bx - ax)) /
         d;
    cr = std::hypot(ax - cx, ay - cy);
}

// clips [a,b] to the disk |x - c| <= R; returns false if disjoint
bool clip_segment_to_disk(Vec4& a, Vec4& b, double cx, double cy, double R) {
    const double dx = b[0] - a[0], dy = b[1] - a[1];
    const double fx = a[0] - cx, fy = a[1] - cy;
    const double A = dx * dx + dy * dy;
    const double B = 2.0 * (fx * dx + fy * dy);
    const double C = fx * fx + fy * fy - R * R;
    if (A <= 0.0) return C <= 0.0;
    const double disc = B * B - 4.0 * A * C;
    if (disc < 0.0) return false;
    const double sq = std::sqrt(disc);
    double t0 = (-B - sq) / (2.0 * A), t1 = (-B + sq) / (2.0 * A);
    t0 = std::max(t0, 0.0);
    t1 = std::min(t1, 1.0);
    if (t0 >= t1) return false;
    const Vec4 na = vec4(a[0] + t0 * dx, a[1] + t0 * dy);
    const Vec4 nb = vec4(a[0] + t1 * dx, a[1] + t1 * dy);
    a = na;
    b = nb;
    return true;
}

}  // namespace

LocalLowerBoundReport local_lower_bound_check(const Eigenfunction& u, const Vec4& O,
                                              ChartKind chart, double r,
                                              const LocalLowerBoundParams& p) {
    const int n = u.dim();
    const double lambda = u.lambda();
    if (!(lambda > 0.0)) throw std::invalid_argument("local_lower_bound_check: lambda > 0");
    if (r > p.epsilon / std::sqrt(lambda) * (1.0 + 1e-12))
        throw std::invalid_argument("local_lower_bound_check: r exceeds epsilon/sqrt(lambda)");

    Ball br;
    br.dim = n;
    br.center = O;
    br.radius = r;
    br.chart = chart;
    auto f = u.field(chart);
    const double sup_r = sup_over_ball(f, br, p.sup_samples, p.seed).value;
    if (!(std::abs(u.evaluate(O.data(), chart)) < p.eta * std::max(sup_r, 1e-300) + 1e-300))
        throw std::invalid_argument("local_lower_bound_check: u(O) is not a zero");

    Ball half = br, quarter = br;
    half.radius = 0.5 * r;
    quarter.radius = 0.25 * r;
    const double sup_half = sup_over_ball(f, half, p.sup_samples, p.seed).value;
    const double sup_quarter = sup_over_ball(f, quarter, p.sup_samples, p.seed).value;

    LocalLowerBoundReport rep;
    rep.r = r;
    const double ratio = sup_half / std::max(sup_quarter, 1e-300);
    rep.N = int(std::ceil(std::log2(std::max(ratio, 1.0)) - 1e-9));
    rep.vacuous = rep.N < 4;

    if (n == 2) {
        double cx = O[0], cy = O[1], cr = half.radius;
        if (chart != ChartKind::Flat) cap_circle(chart, O, half.radius, cx, cy, cr);
        Window2 win;
        win.chart = chart;
        win.lo = vec4(cx - cr, cy - cr);
        win.hi = vec4(cx + cr, cy + cr);
        const int need =
            required_resolution(lambda, 2.0 * cr * (chart == ChartKind::Flat ? 1.0 : 2.0), 2);
        const int res = std::max(p.resolution, need);
        const auto set = extract_window_2d(u, win, res);
        for (const auto& s : set.segments) {
            Vec4 a = s.a, b = s.b;
            if (!clip_segment_to_disk(a, b, cx, cy, cr)) continue;
            rep.measured += seg_metric(a, b, chart);
        }
    } else {
        Box win;
        win.dim = 3;
        win.center = O;
        win.half = vec4(half.radius, half.radius, half.radius);
        const int need = required_resolution(lambda, 2.0 * half.radius, 3);
        const int res = std::max(p.resolution, need);
        const auto set = extract_box_3d(u, win, res);
        // keep sub-triangles whose centroid lies in the ball (two split levels)
        const double R2 = half.radius * half.radius;
        for (const auto& t : set.triangles) {
            std::vector<std::array<double, 9>> stack = {t.v};
            for (int level = 0; level < 2; ++level) {
                std::vector<std::array<double, 9>> next;
                for (const auto& tv : stack) {
                    const double* A = &tv[0];
                    const double* B = &tv[3];
                    const double* C = &tv[6];
                    double AB[3], BC[3], CA[3];
                    for (int d = 0; d < 3; ++d) {
                        AB[d] = 0.5 * (A[d] + B[d]);
                        BC[d] = 0.5 * (B[d] + C[d]);
                        CA[d] = 0.5 * (C[d] + A[d]);
                    }
                    auto push = [&](const double* x, const double* y, const double* z) {
                        next.push_back({x[0], x[1], x[2], y[0], y[1], y[2], z[0], z[1], z[2]});
                    };
                    push(A, AB, CA);
                    push(AB, B, BC);
                    push(CA, BC, C);
                    push(AB, BC, CA);
                }
                stack = std::move(next);
            }
            for (const auto& tv : stack) {
                const double gx = (tv[0] + tv[3] + tv[6]) / 3.0;
                const double gy = (tv[1] + tv[4] + tv[7]) / 3.0;
                const double gz = (tv[2] + tv[5] + tv[8]) / 3.0;
                const double ex = gx - O[0], ey = gy - O[1], ez = gz - O[2];
                if (ex * ex + ey * ey + ez * ez <= R2) rep.measured += tri_area(tv);
            }
        }
    }

    rep.bound = std::pow(r, n - 1) * std::pow(double(std::max(rep.N, 1)), 2 - n);
    rep.ratio = rep.measured / rep.bound;
    rep.ratio_per_n = rep.ratio / double(std::max(rep.N, 1));
    rep.holds = rep.vacuous || rep.measured > 0.0;
    rep.empty_nodal_finding = !rep.vacuous && rep.measured == 0.0;
    return rep;
}

SignBallReport sign_ball_search(const Eigenfunction& u, const Vec4& O, ChartKind chart, double r,
                                int N, const SignBallParams& p) {
    if (N < 4) throw std::invalid_argument("sign_ball_search: N >= 4 required");
    SignBallReport rep;
    rep.N = N;
    rep.r = r;
    auto f = u.field(chart);

    std::vector<SupResult> maxima, minima;
    for (int j = 0; j <= N; ++j) {
        Ball s;
        s.dim = u.dim();
        s.center = O;
        s.chart = chart;
        s.radius = r * (3.0 / 8.0 + double(j) / (8.0 * double(N)));
        maxima.push_back(sup_over_ball_boundary(f, s, p.boundary_samples, p.seed, SupMode::Pos));
        minima.push_back(sup_over_ball_boundary(f, s, p.boundary_samples, p.seed, SupMode::Neg));
        rep.m_plus.push_back(maxima.back().value);
        rep.m_minus.push_back(minima.back().value);
    }
    for (int j = 0; j < N; ++j) {
        if (rep.m_plus[std::size_t(j)] > 2.0 * rep.m_plus[std::size_t(j) + 1] ||
            std::abs(rep.m_minus[std::size_t(j)]) > 2.0 * std::abs(rep.m_minus[std::size_t(j) + 1]))
            rep.weak_max_consistent = false;
        if (!(rep.m_plus[std::size_t(j)] > 0.0) || !(rep.m_minus[std::size_t(j)] < 0.0))
            rep.weak_max_consistent = false;
    }

    auto verify_sign = [&](const Vec4& center, double radius, bool want_positive) {
        Ball b;
        b.dim = u.dim();
        b.center = center;
        b.radius = radius;
        b.chart = chart;
        for (const auto& q : ball_interior_points(b, p.verify_samples, p.seed)) {
            const double v = f(q);
            if (want_positive ? v <= 0.0 : v >= 0.0) return false;
        }
        for (const auto& q : ball_boundary_points(b, p.verify_samples / 4 + 4, p.seed)) {
            const double v = f(q);
            if (want_positive ? v <= 0.0 : v >= 0.0) return false;
        }
        return true;
    };

    const double bound_factor = 128.0 * p.C2;
    const double ball_radius = p.c1 * r / double(N);
    for (int k = 0; k < N; ++k) {
        SignBallLayer layer;
        layer.k = k;
        layer.m_plus = rep.m_plus[std::size_t(k)];
        layer.m_minus = rep.m_minus[std::size_t(k)];
        const bool ratio_ok =
            rep.m_plus[std::size_t(k) + 1] <= bound_factor * rep.m_plus[std::size_t(k)] &&
            std::abs(rep.m_minus[std::size_t(k) + 1]) <=
                bound_factor * std::abs(rep.m_minus[std::size_t(k)]);
        layer.qualifies = ratio_ok && layer.m_plus > 0.0 && layer.m_minus < 0.0;
        if (layer.qualifies) {
            ++rep.qualifying;
            layer.pos_center = maxima[std::size_t(k)].point;
            layer.neg_center = minima[std::size_t(k)].point;
            layer.pos_verified = verify_sign(layer.pos_center, ball_radius, true);
            layer.neg_verified = verify_sign(layer.neg_center, ball_radius, false);
            if (layer.pos_verified && layer.neg_verified) ++rep.verified;
        }
        rep.layers.push_back(layer);
    }
    rep.enough = 2 * rep.verified >= N;
    return rep;
}

}  // namespace nlab
