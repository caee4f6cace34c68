#ifndef NODALLAB_EIGEN_HPP
#define NODALLAB_EIGEN_HPP

#include <complex>
#include <cstdint>
#include <vector>

#include "nodallab/common.hpp"
#include "nodallab/geometry.hpp"

namespace nlab {

// One real torus mode a*cos<k,x> + b*sin<k,x>. Lattice vectors are canonical
// (first nonzero component positive); k = 0 carries the constant in `cos_coef`.
struct TorusMode {
    std::array<int, 3> k{0, 0, 0};
    double cos_coef = 0.0;
    double sin_coef = 0.0;
};

// Exact eigenpair on a model manifold as a finite mode expansion.
//
// Tori combine lattice waves with |k|^2 = lambda; the sphere combines real
// orthonormal spherical harmonics of one degree l with lambda = l(l+1).
class Eigenfunction {
public:
    Manifold manifold() const { return manifold_; }
    double lambda() const { return lambda_; }
    int dim() const { return manifold_dim(manifold_); }

    double evaluate(const double* x, ChartKind chart = ChartKind::Flat) const;
    double evaluate(const Vec4& x, ChartKind chart = ChartKind::Flat) const {
        return evaluate(x.data(), chart);
    }
    // Evaluates count points start, start + step e_axis, ... On tori this runs
    // on rotating phasors (periodically resynchronized), an order of magnitude
    // faster than pointwise sums on large grids.
    void evaluate_row(const double* start, int axis, double step, int count, double* out,
                      ChartKind chart = ChartKind::Flat) const;
    // Analytic gradient in chart coordinates.
    void gradient(const double* x, double* g, ChartKind chart = ChartKind::Flat) const;

    double norm_l2() const;  // analytic L^2 norm on the manifold

    // Exact integral of u^2 over an axis-aligned chart box (tori only).
    bool has_exact_mass() const { return manifold_ != Manifold::Sphere2; }
    double box_mass(const Box& box) const;

    // Non-owning evaluation view on a fixed chart; `this` must outlive it.
    FieldView field(ChartKind chart = ChartKind::Flat) const;

    const std::vector<TorusMode>& torus_modes() const { return tmodes_; }
    int sphere_degree() const { return degree_; }
    // coefficient of the (l, m) real harmonic; m in [-l, l]
    double sphere_coef(int m) const;

    static Eigenfunction torus(Manifold m, std::vector<TorusMode> modes);
    static Eigenfunction sphere(int degree, std::vector<double> coef_cos,
                                std::vector<double> coef_sin);

private:
    Manifold manifold_ = Manifold::Torus2;
    double lambda_ = 0.0;
    std::vector<TorusMode> tmodes_;

    int degree_ = -1;
    std::vector<double> ccos_;  // m = 0..l
    std::vector<double> csin_;  // m = 1..l (index m, slot 0 unused)

    // difference-vector table for exact box masses (tori)
    struct MassTerm {
        std::array<int, 3> sigma;
        std::complex<double> w;
    };
    std::vector<MassTerm> mass_terms_;
    void build_mass_terms();

    double eval_sphere(const double* s, ChartKind chart, double* grad_or_null) const;
};

// All eigenvalues <= lambda_max in increasing order with real multiplicities.
std::vector<std::pair<double, int>> eigenvalue_list(Manifold m, double lambda_max);

// Canonical lattice representatives with |k|^2 = lam (tori).
std::vector<std::array<int, 3>> lattice_representatives(Manifold m, long long lam);

// Gaussian coefficients over the real eigenspace, normalized to unit L^2.
Eigenfunction synth_random(Manifold m, double lambda, std::uint64_t seed);

// Closed-form oracle families.
Eigenfunction torus2_product(int n, int m);          // sin(nx) sin(my)
Eigenfunction torus3_axis_wave(int k);               // sin(kx)
Eigenfunction torus_plane_wave(Manifold m, const std::array<int, 3>& k);  // sin<k,x>
Eigenfunction sphere_sectoral(int l);                // Y_{l,l}: 2l meridian nodal lines
Eigenfunction sphere_harmonic(int l, int m);
Eigenfunction constant_function(Manifold m, double value);

// Harmonic lift h(xi, t) = u(xi) exp(sqrt(lambda) t) on M x R. The product
// chart appends t as the last coordinate.
class Lifted {
public:
    explicit Lifted(Eigenfunction u);

    const Eigenfunction& base() const { return base_; }
    double sqrt_lambda() const { return sqrt_lambda_; }
    int dim() const { return base_.dim() + 1; }

    double evaluate(const double* x, ChartKind chart = ChartKind::Flat) const;
    void gradient(const double* x, double* g, ChartKind chart = ChartKind::Flat) const;

    bool has_exact_mass() const { return base_.has_exact_mass(); }
    double box_mass(const Box& box) const;  // separable: base mass x exp integral

    FieldView field(ChartKind chart = ChartKind::Flat) const;

private:
    Eigenfunction base_;
    double sqrt_lambda_ = 0.0;
};

Lifted lift(const Eigenfunction& u);

}  // namespace nlab

#endif
