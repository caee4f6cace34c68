#include <doctest.h>

#include <cmath>
#include <sstream>

#include "nodallab/nodal.hpp"

using namespace nlab;

TEST_CASE("nodal 2d: sin(3x)sin(4y) length is 4*pi*(3+4) within 1%") {
    auto u = torus2_product(3, 4);
    const auto set = extract_nodal_2d(u, 1024);
    const double expect = 4.0 * M_PI * 7.0;
    CHECK(set.total_measure == doctest::Approx(expect).epsilon(0.01));
}

TEST_CASE("nodal 2d: constant function has an empty nodal set") {
    auto u = constant_function(Manifold::Torus2, 1.0);
    const auto set = extract_nodal_2d(u, 64);
    CHECK(set.segments.empty());
    CHECK(set.total_measure == 0.0);
}

TEST_CASE("nodal 2d: sectoral harmonic l = 10 has 2*pi*l of meridians within 1.5%") {
    auto u = sphere_sectoral(10);
    const auto set = extract_nodal_2d(u, 512);
    CHECK(set.total_measure == doctest::Approx(2.0 * M_PI * 10.0).epsilon(0.015));
}

TEST_CASE("nodal 2d: odd zonal harmonic counts the equator once") {
    // P_3 zeros: z = 0 and z = +-sqrt(3/5); circle lengths 2 pi sin(theta)
    auto u = sphere_harmonic(3, 0);
    const auto set = extract_nodal_2d(u, 512);
    const double s = std::sqrt(1.0 - 3.0 / 5.0);
    const double expect = kTwoPi * (1.0 + 2.0 * s);
    CHECK(set.total_measure == doctest::Approx(expect).epsilon(0.015));
}

TEST_CASE("nodal 2d: refinement convergence under grid doubling") {
    auto u = synth_random(Manifold::Torus2, 25.0, 5);
    const double m1 = extract_nodal_2d(u, 256).total_measure;
    const double m2 = extract_nodal_2d(u, 512).total_measure;
    CHECK(std::abs(m1 - m2) / m2 < 0.005);
}

TEST_CASE("nodal 2d: isometry and scalar invariance") {
    auto u = synth_random(Manifold::Torus2, 25.0, 12);
    const double base = extract_nodal_2d(u, 512).total_measure;

    // translate by (a, b): cos<k,x+tapped> folds into new coefficients
    const double ax = 0.73, ay = -1.21;
    std::vector<TorusMode> shifted;
    for (const auto& m : u.torus_modes()) {
        const double phase = m.k[0] * ax + m.k[1] * ay;
        TorusMode nm = m;
        nm.cos_coef = m.cos_coef * std::cos(phase) + m.sin_coef * std::sin(phase);
        nm.sin_coef = -m.cos_coef * std::sin(phase) + m.sin_coef * std::cos(phase);
        shifted.push_back(nm);
    }
    auto v = Eigenfunction::torus(Manifold::Torus2, shifted);
    const double moved = extract_nodal_2d(v, 512).total_measure;
    CHECK(moved == doctest::Approx(base).epsilon(0.001));

    std::vector<TorusMode> scaled = u.torus_modes();
    for (auto& m : scaled) {
        m.cos_coef *= -41.5;
        m.sin_coef *= -41.5;
    }
    auto w = Eigenfunction::torus(Manifold::Torus2, scaled);
    const double rescaled = extract_nodal_2d(w, 512).total_measure;
    CHECK(rescaled == doctest::Approx(base).epsilon(1e-6));
}

TEST_CASE("nodal 2d: element vertices sit on the nodal set to 1e-9 of the sup") {
    auto u = synth_random(Manifold::Torus2, 25.0, 3);
    const auto set = extract_nodal_2d(u, 512);
    double sup = 0.0;
    Rng rng(1);
    for (int i = 0; i < 2000; ++i) {
        const double p[2] = {rng.uniform(0.0, kTwoPi), rng.uniform(0.0, kTwoPi)};
        sup = std::max(sup, std::abs(u.evaluate(p)));
    }
    REQUIRE(!set.segments.empty());
    for (std::size_t i = 0; i < set.segments.size(); i += 37) {
        const auto& s = set.segments[i];
        CHECK(std::abs(u.evaluate(s.a.data())) < 1e-9 * sup);
        CHECK(std::abs(u.evaluate(s.b.data())) < 1e-9 * sup);
    }
}

TEST_CASE("nodal 2d: resolution rule is enforced") {
    auto u = synth_random(Manifold::Torus2, 400.0, 1);
    CHECK_THROWS_AS(extract_nodal_2d(u, 64), std::invalid_argument);
    CHECK_NOTHROW(extract_nodal_2d(u, 512));
}

TEST_CASE("nodal 3d: sheets of sin(kx) measure 2k(2pi)^2 within 1%") {
    auto u = torus3_axis_wave(1);
    const auto set = extract_nodal_3d(u, 128);
    CHECK(set.total_measure == doctest::Approx(2.0 * kTwoPi * kTwoPi).epsilon(0.01));
    CHECK_THROWS_AS(extract_nodal_3d(u, 600), std::invalid_argument);  // memory guard
}

TEST_CASE("nodal 3d: three-wave surface self-converges") {
    std::vector<TorusMode> modes;
    modes.push_back({{1, 0, 0}, 0.0, 1.0});
    modes.push_back({{0, 1, 0}, 0.0, 1.0});
    modes.push_back({{0, 0, 1}, 0.0, 1.0});
    auto u = Eigenfunction::torus(Manifold::Torus3, modes);
    const double c = extract_nodal_3d(u, 64).total_measure;
    const double fine = extract_nodal_3d(u, 128).total_measure;
    CHECK(std::abs(c - fine) / fine < 0.02);
}

TEST_CASE("density radius: product modes against the grid geometry") {
    for (int n : {2, 3}) {
        auto u = torus2_product(n, n);
        const double d = density_radius(u, 400, 9);
        CHECK(d == doctest::Approx(M_PI / (2.0 * n)).epsilon(0.05));
        CHECK(d == doctest::Approx(M_PI / std::sqrt(2.0 * u.lambda())).epsilon(0.05));
    }
}

TEST_CASE("density radius: sin(x) farthest points sit at distance pi/2") {
    auto u = torus_plane_wave(Manifold::Torus2, {1, 0, 0});
    const double d = density_radius(u, 600, 4);
    CHECK(d == doctest::Approx(M_PI / 2.0).epsilon(0.05));
}

TEST_CASE("local lower bound: sectoral harmonic at the pole") {
    const int l = 8;
    auto u = sphere_sectoral(l);
    const double r = 0.1 / std::sqrt(u.lambda());
    const auto rep = local_lower_bound_check(u, vec4(0.0, 0.0), ChartKind::SphereCapNorth, r);
    CHECK(rep.N == l);
    CHECK_FALSE(rep.vacuous);
    CHECK(rep.holds);
    CHECK_FALSE(rep.empty_nodal_finding);
    // 2l meridian stubs of geodesic length r/2 inside the half ball
    CHECK(rep.measured == doctest::Approx(double(l) * r).epsilon(0.05));
    CHECK(rep.ratio_per_n == doctest::Approx(1.0).epsilon(0.06));
}

TEST_CASE("local lower bound: quadratic zero is vacuous") {
    auto u = torus2_product(2, 2);
    const double r = 0.1 / std::sqrt(u.lambda());
    const auto rep = local_lower_bound_check(u, vec4(0.0, 0.0), ChartKind::Flat, r);
    CHECK(rep.N == 2);
    CHECK(rep.vacuous);
}

TEST_CASE("local lower bound: rejects non-zero base points and oversized radii") {
    auto u = torus2_product(2, 2);
    CHECK_THROWS_AS(
        local_lower_bound_check(u, vec4(M_PI / 4.0, M_PI / 4.0), ChartKind::Flat, 0.01),
        std::invalid_argument);
    CHECK_THROWS_AS(local_lower_bound_check(u, vec4(0.0, 0.0), ChartKind::Flat, 1.0),
                    std::invalid_argument);
}

TEST_CASE("sign balls: slow-growth boundary maxima qualify every layer") {
    // sin(x)sin(y) near a zero where the extremes on nested circles grow slowly
    auto u = torus2_product(1, 1);
    const double r = 0.07;
    const auto rep = sign_ball_search(u, vec4(0.0, 0.0), ChartKind::Flat, r, 6);
    CHECK(rep.qualifying == 6);
    CHECK(rep.verified >= 3);
    CHECK(rep.enough);
    CHECK(rep.weak_max_consistent);
}

TEST_CASE("sign balls: sectoral harmonic at the pole, N = l = 8") {
    auto u = sphere_sectoral(8);
    const double r = 0.1 / std::sqrt(u.lambda());
    const auto rep = sign_ball_search(u, vec4(0.0, 0.0), ChartKind::SphereCapNorth, r, 8);
    CHECK(rep.qualifying >= 4);
    CHECK(rep.verified >= 4);
    CHECK(rep.enough);
    CHECK(rep.weak_max_consistent);
    for (int j = 0; j < 8; ++j) {
        CHECK(rep.m_plus[std::size_t(j)] > 0.0);
        CHECK(rep.m_minus[std::size_t(j)] < 0.0);
        CHECK(rep.m_plus[std::size_t(j)] <= 2.0 * rep.m_plus[std::size_t(j) + 1]);
    }
}

TEST_CASE("nodal export: fixed-width plain text lines") {
    auto u = torus2_product(1, 1);
    const auto set = extract_nodal_2d(u, 64);
    std::ostringstream os;
    write_nodal_set(set, os);
    std::istringstream is(os.str());
    std::string word;
    is >> word;
    CHECK(word == "seg");
    int count = 0;
    std::string line;
    std::istringstream all(os.str());
    while (std::getline(all, line)) ++count;
    CHECK(count == int(set.segments.size()));
}
