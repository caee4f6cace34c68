#ifndef NODALLAB_NODAL_HPP
#define NODALLAB_NODAL_HPP

#include <iosfwd>

#include "nodallab/eigen.hpp"
#include "nodallab/geometry.hpp"

namespace nlab {

struct Segment2 {
    Vec4 a{}, b{};
    ChartKind chart = ChartKind::Flat;
    double measure = 0.0;  // chart length times the metric factor
};

struct Triangle3 {
    std::array<double, 9> v{};
    double area = 0.0;
};

// Extracted nodal set with its total (n-1)-measure. Elements are accumulated
// in a fixed grid order, so equal inputs give byte-identical sets.
struct NodalSet {
    int dim = 2;
    std::vector<Segment2> segments;
    std::vector<Triangle3> triangles;
    double total_measure = 0.0;
    int resolution = 0;
};

// Axis-aligned extraction window in chart coordinates.
struct Window2 {
    Vec4 lo{}, hi{};
    ChartKind chart = ChartKind::Flat;
};

// Cell-size rule: at least 8 grid cells per half-oscillation of u.
int min_resolution(double lambda, double width, int dim);

// Marching squares over a chart window. Saddle cells are resolved by the sign
// of u at the cell center; edge zeros are located by 15 bisection steps.
NodalSet extract_nodal_2d(const Eigenfunction& u, const Window2& win, int resolution);

// Full-manifold extraction: the periodic square for Torus2, or both sphere
// caps with the overlap assigned by the fixed ownership rule (the northern
// cap owns the equator).
NodalSet extract_nodal_2d(const Eigenfunction& u, int resolution);

// Marching cubes on Torus3 (full manifold or a window). Memory guard at 512^3.
NodalSet extract_nodal_3d(const Eigenfunction& u, int resolution);
NodalSet extract_nodal_3d(const Eigenfunction& u, const Box& window, int resolution);

// Plain-text export, one element per line, fixed decimal width.
void write_nodal_set(const NodalSet& set, std::ostream& os);

// Max over sampled manifold points of the distance to the nodal set.
// resolution = 0 applies the cell-size rule.
double density_radius(const Eigenfunction& u, int samples, std::uint64_t seed,
                      int resolution = 0);

struct LocalLowerBoundParams {
    double eta = 1e-9;          // zero tolerance relative to the local sup
    double epsilon = 0.1;       // wavelength factor bound for r
    int sup_samples = 1024;
    int resolution = 256;       // grid per axis for the local extraction
    std::uint64_t seed = 1;
};

struct LocalLowerBoundReport {
    int N = 0;                // vanishing-order estimate from the sup ratio
    double measured = 0.0;    // nodal measure inside B_{r/2}
    double bound = 0.0;       // r^{n-1} N^{2-n}
    double ratio = 0.0;       // measured / bound (the lemma's constant)
    double ratio_per_n = 0.0; // ratio / N (stable normalization across orders)
    bool vacuous = false;     // N < 4
    bool holds = false;       // measured > 0 when non-vacuous
    bool empty_nodal_finding = false;
    double r = 0.0;
};

// Inscribed-ball lower bound at a zero O of u: nodal measure of B_{r/2}
// against c r^{n-1} N^{2-n}.
LocalLowerBoundReport local_lower_bound_check(const Eigenfunction& u, const Vec4& O,
                                              ChartKind chart, double r,
                                              const LocalLowerBoundParams& p = {});

struct SignBallParams {
    double C2 = 2.5;          // one-sided sup constant (calibrated, frozen)
    double c1 = 0.05;         // sign-ball radius factor: radius c1 r / N
    int boundary_samples = 512;
    int verify_samples = 200;
    std::uint64_t seed = 1;
};

struct SignBallLayer {
    int k = 0;
    double m_plus = 0.0, m_minus = 0.0;        // extremes on S_k
    bool qualifies = false;                     // both ratio conditions hold
    Vec4 pos_center{}, neg_center{};
    bool pos_verified = false, neg_verified = false;
};

struct SignBallReport {
    int N = 0;
    double r = 0.0;
    std::vector<double> m_plus, m_minus;  // on S_0..S_N
    std::vector<SignBallLayer> layers;    // k = 0..N-1
    int qualifying = 0;
    int verified = 0;   // layers with both sign balls confirmed
    bool enough = false;  // verified >= N/2
    bool weak_max_consistent = true;  // m+_j <= 2 m+_{j+1} and likewise for m-
};

// Sphere/ratio construction: layers S_j at radii r(3/8 + j/(8N)), ratio-bounded
// layers, and verified constant-sign balls of radius c1 r / N.
SignBallReport sign_ball_search(const Eigenfunction& u, const Vec4& O, ChartKind chart,
                                double r, int N, const SignBallParams& p = {});

}  // namespace nlab

#endif
