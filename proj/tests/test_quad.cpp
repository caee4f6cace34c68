#include <doctest.h>

#include <cmath>

#include "nodallab/quad.hpp"

using namespace nlab;

namespace {
Box centered_box(int dim, double half) {
    Box b;
    b.dim = dim;
    for (int d = 0; d < dim; ++d) b.half[d] = half;
    return b;
}
}  // namespace

TEST_CASE("integrate_sq: constant field gives the volume") {
    auto one = [](const double*) { return 1.0; };
    FieldView f = make_field(3, one);
    const double a = 0.37;
    Box b = centered_box(3, a);
    b.center = vec4(5.0, -2.0, 0.5);
    QuadratureSpec spec;
    spec.order = 8;
    CHECK(integrate_sq(f, b, spec) == doctest::Approx(std::pow(2.0 * a, 3)).epsilon(1e-12));
}

TEST_CASE("integrate_sq: linear field against the closed form") {
    auto x1 = [](const double* x) { return x[0]; };
    const double a = 0.6;
    for (int dim : {2, 3, 4}) {
        FieldView f = make_field(dim, x1);
        Box b = centered_box(dim, a);
        QuadratureSpec spec;
        spec.order = 16;
        const double expect = std::pow(2.0 * a, dim - 1) * (2.0 * a * a * a / 3.0);
        CHECK(integrate_sq(f, b, spec) == doctest::Approx(expect).epsilon(1e-12));
    }
}

TEST_CASE("integrate_sq: exponential field against the closed form") {
    auto ex = [](const double* x) { return std::exp(x[0]); };
    const double a = 0.4;
    for (int dim : {2, 3}) {
        for (double c1 : {0.0, 0.8, -1.3}) {
            FieldView f = make_field(dim, ex);
            Box b = centered_box(dim, a);
            b.center[0] = c1;
            QuadratureSpec spec;
            spec.order = 24;
            const double expect = std::pow(2.0 * a, dim - 1) * std::exp(2.0 * c1) * std::sinh(2.0 * a);
            CHECK(integrate_sq(f, b, spec) == doctest::Approx(expect).epsilon(1e-11));
        }
    }
}

TEST_CASE("integrate_sq: midpoint rule converges to the Gauss value") {
    auto g = [](const double* x) { return std::sin(3.0 * x[0]) + 0.25 * x[1]; };
    FieldView f = make_field(2, g);
    Box b = centered_box(2, 0.9);
    QuadratureSpec gauss;
    gauss.order = 32;
    QuadratureSpec mid;
    mid.kind = QuadratureSpec::Kind::MidpointComposite;
    mid.order = 600;
    CHECK(integrate_sq(f, b, mid) == doctest::Approx(integrate_sq(f, b, gauss)).epsilon(1e-5));
}

TEST_CASE("integrate_sq: two-resolution convergence on wavelength-sized cubes") {
    // oscillatory field at frequency sqrt(lambda); cube of half-side ~ wavelength
    const double lambda = 2500.0;
    auto wave = [&](const double* x) { return std::sin(50.0 * x[0]) * std::cos(50.0 * x[1]); };
    FieldView f = make_field(2, wave);
    Box b = centered_box(2, 2.0 * M_PI / std::sqrt(lambda));
    QuadratureSpec spec;
    spec.order = auto_order(lambda, b.half[0]);
    for (int k = 8; k <= 16; k *= 2) {
        QuadratureSpec s1, s2;
        s1.order = 2 * k;
        s2.order = 4 * k;
        const double v1 = integrate_sq(f, b, s1);
        const double v2 = integrate_sq(f, b, s2);
        CHECK(std::abs(v1 - v2) / v2 < 1e-8);
    }
    CHECK(integrate_sq_checked(f, b, spec).converged);
}

TEST_CASE("integrate_sq: monotone under box inclusion") {
    auto g = [](const double* x) { return std::sin(2.0 * x[0]) + std::cos(x[1]); };
    FieldView f = make_field(2, g);
    Box b = centered_box(2, 0.3);
    b.center = vec4(0.7, -0.1);
    QuadratureSpec spec;
    spec.order = 32;
    double prev = integrate_sq(f, b, spec);
    for (double s : {1.5, 2.0, 3.0}) {
        const double cur = integrate_sq(f, dilate(b, s), spec);
        CHECK(cur >= prev * (1.0 - 1e-9));
        prev = cur;
    }
}

TEST_CASE("integrate_sq: nonfinite samples are reported with the point") {
    auto bad = [](const double* x) { return x[0] > 0.0 ? std::numeric_limits<double>::quiet_NaN() : 1.0; };
    FieldView f = make_field(2, bad);
    Box b = centered_box(2, 1.0);
    QuadratureSpec spec;
    spec.order = 8;
    CHECK_THROWS_AS(integrate_sq(f, b, spec), NumericError);
}

TEST_CASE("auto_order: eight points per oscillation with a floor and a cap") {
    CHECK(auto_order(1.0, 0.1) == 8);                       // floor
    CHECK(auto_order(1e4, 1.0, 8, 4096) == 510);            // 16*h*sqrt(lambda)/pi
    CHECK(auto_order(1e4, 1.0) == 96);                      // cap
    CHECK(auto_order(2500.0, 0.25, 8, 4096) == 64);
}

TEST_CASE("sup over ball: peak of sin(x) inside the ball") {
    auto g = [](const double* x) { return std::sin(x[0]); };
    FieldView f = make_field(2, g);
    Ball b;
    b.dim = 2;
    b.center = vec4(M_PI / 2.0, 0.0);
    b.radius = 0.05;
    const auto r = sup_over_ball(f, b, 512, 7);
    CHECK(r.value == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("sup over ball: constant field is exact") {
    auto g = [](const double*) { return -3.25; };
    FieldView f = make_field(3, g);
    Ball b;
    b.dim = 3;
    b.radius = 0.4;
    CHECK(sup_over_ball(f, b, 64, 1).value == 3.25);
    CHECK(sup_over_ball(f, b, 64, 1, SupMode::Pos).value == -3.25);
}

TEST_CASE("sup over ball: monotone max at the x-extreme of a small ball") {
    auto g = [](const double* x) { return std::sin(10.0 * x[0]); };
    FieldView f = make_field(2, g);
    Ball b;
    b.dim = 2;
    b.radius = 0.01;
    const auto r = sup_over_ball(f, b, 1024, 13);
    CHECK(r.value == doctest::Approx(std::sin(0.1)).epsilon(1e-5));
}

TEST_CASE("sup over ball: base sample grid is monotone in the count") {
    auto g = [](const double* x) { return std::cos(3.0 * x[0]) * std::sin(2.0 * x[1]) + 0.3 * x[0]; };
    FieldView f = make_field(2, g);
    Ball b;
    b.dim = 2;
    b.center = vec4(0.3, 0.4);
    b.radius = 0.8;
    double prev = 0.0;
    for (int samples : {16, 32, 64, 128, 256, 512}) {
        // nested interior sequences make the raw max monotone
        double raw = -1e300;
        for (const auto& p : ball_interior_points(b, samples, 9)) raw = std::max(raw, std::abs(f(p)));
        CHECK(raw >= prev);
        prev = raw;
        CHECK(sup_over_ball(f, b, samples, 9).value >= raw);
    }
}

TEST_CASE("sup over ball boundary: agrees with dense circle evaluation") {
    auto g = [](const double* x) { return std::sin(2.0 * x[0]) + 0.5 * std::cos(5.0 * x[1]); };
    FieldView f = make_field(2, g);
    Ball b;
    b.dim = 2;
    b.center = vec4(0.2, -0.4);
    b.radius = 0.35;
    double dense = -1e300;
    for (int i = 0; i < 200000; ++i) {
        const double a = kTwoPi * double(i) / 200000.0;
        const double x[2] = {b.center[0] + b.radius * std::cos(a), b.center[1] + b.radius * std::sin(a)};
        dense = std::max(dense, std::abs(f.eval(f.ctx, x)));
    }
    CHECK(sup_over_ball_boundary(f, b, 256, 3).value == doctest::Approx(dense).epsilon(1e-7));
}

TEST_CASE("sup over box: finds an interior peak") {
    auto g = [](const double* x) {
        return std::exp(-50.0 * ((x[0] - 0.21) * (x[0] - 0.21) + (x[1] + 0.13) * (x[1] + 0.13)));
    };
    FieldView f = make_field(2, g);
    Box b = centered_box(2, 1.0);
    CHECK(sup_over_box(f, b, 1024, 5).value == doctest::Approx(1.0).epsilon(1e-4));
}
