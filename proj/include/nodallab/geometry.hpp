#ifndef NODALLAB_GEOMETRY_HPP
#define NODALLAB_GEOMETRY_HPP

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "nodallab/common.hpp"

namespace nlab {

// Model manifolds with explicit spectra: flat tori and the round unit sphere.
enum class Manifold { Torus2, Sphere2, Torus3 };

int manifold_dim(Manifold m);
const char* manifold_name(Manifold m);
Manifold manifold_from_name(const std::string& name);

// ---------------------------------------------------------------------------
// Cubes, boxes, balls in chart coordinates.
// ---------------------------------------------------------------------------

struct Cube {
    Vec4 center{};
    double half_side = 0.0;
    int dim = 0;
};

// Axis-aligned box with per-axis half-widths. Cascade subdivision steps with a
// non-cubic branching factor pass through boxes; everything else uses cubes.
struct Box {
    Vec4 center{};
    Vec4 half{};
    int dim = 0;
};

Box to_box(const Cube& q);
double volume(const Cube& q);
double volume(const Box& b);

// Homothety with the same center; scale factor s > 0.
Cube dilate(const Cube& q, double s);
Box dilate(const Box& b, double s);

// Splits q into m^dim congruent cubes tiling q, ordered lexicographically by
// grid index (axis 0 slowest).
std::vector<Cube> subdivide(const Cube& q, int m);

// Splits a box with an independent factor per axis; lexicographic order.
std::vector<Box> subdivide_box(const Box& b, std::span<const int> factors);

// All axis-aligned dyadic subcubes of q at exactly `depth` halvings
// (4^depth in 2D etc.), lexicographic.
std::vector<Cube> dyadic_subcubes(const Cube& q, int depth);

bool contains(const Cube& outer, const Cube& inner, double tol = 1e-12);
bool contains(const Box& outer, const Box& inner, double tol = 1e-12);

// Factors Y into `dim` near-equal integer factors (product exactly Y), sorted
// descending and rotated by `rotation` positions. Cascade steps rotate the
// assignment so a j-step run with Y = m^dim per step divides every axis
// equally overall.
std::vector<int> balanced_factors(long long Y, int dim, int rotation = 0);

// ---------------------------------------------------------------------------
// Charts. Tori use the global periodic chart (flat, no boundary). The sphere
// uses two stereographic caps: north (id 0, projection from the south pole)
// and south (id 1). Cap k covers geodesic angle < kCapThetaMax from its pole;
// the caps overlap in a band around the equator and the northern cap owns the
// equator for measurement purposes.
// ---------------------------------------------------------------------------

enum class ChartKind { Flat, SphereCapNorth, SphereCapSouth };

inline constexpr double kCapThetaMax = 2.0943951023931953;  // 2*pi/3
double cap_chart_radius();                                  // tan(kCapThetaMax / 2)

// chart point s -> unit vector on S^2
std::array<double, 3> cap_to_sphere(ChartKind cap, double s1, double s2);
// unit vector -> chart point of the given cap (caller checks coverage)
std::array<double, 2> sphere_to_cap(ChartKind cap, const std::array<double, 3>& p);
// metric length scale of the cap chart at s: |dx_sphere| = factor * |ds|
double cap_conformal_factor(double s1, double s2);

struct ChartSpec {
    ChartKind kind = ChartKind::Flat;
    // Valid radius of the cap chart disk; ignored for flat charts.
    double cap_radius = std::numeric_limits<double>::infinity();

    bool contains(const Box& b) const;
    bool contains(const Cube& q) const { return contains(to_box(q)); }
};

ChartSpec flat_chart();
ChartSpec cap_chart(ChartKind cap);

// ---------------------------------------------------------------------------
// Balls. On flat charts the radius is Euclidean; on sphere caps the center is
// a chart point and the radius is geodesic, so sampling happens intrinsically
// on S^2 and lands back in chart coordinates.
// ---------------------------------------------------------------------------

struct Ball {
    Vec4 center{};
    double radius = 0.0;
    int dim = 0;
    ChartKind chart = ChartKind::Flat;
};

bool ball_in_chart(const Ball& b);

// Deterministic quasi-uniform points on the boundary sphere of b. Doubling the
// count refines the same family of points (nested for powers of two in 2D).
std::vector<Vec4> ball_boundary_points(const Ball& b, int count, std::uint64_t seed);

// Deterministic quasi-uniform points in the closed ball, a nested sequence
// prefix: the first n points are a subset of the first n' > n.
std::vector<Vec4> ball_interior_points(const Ball& b, int count, std::uint64_t seed);

}  // namespace nlab

#endif
