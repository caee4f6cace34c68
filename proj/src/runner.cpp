#include "nodallab/runner.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace nlab {

ExponentFit fit_loglog(const std::vector<std::pair<double, double>>& xy) {
    std::set<double> distinct;
    for (const auto& [x, y] : xy) distinct.insert(x);
    if (distinct.size() < 3)
        throw std::invalid_argument("fit_loglog: need at least 3 distinct abscissae");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (const auto& [x, y] : xy) {
        if (!(x > 0.0) || !(y > 0.0))
            throw std::invalid_argument("fit_loglog: positive data required");
        const double lx = std::log(x), ly = std::log(y);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        ++n;
    }
    const double denom = double(n) * sxx - sx * sx;
    ExponentFit fit;
    fit.point_count = n;
    fit.slope = (double(n) * sxy - sx * sy) / denom;
    fit.intercept = (sy - fit.slope * sx) / double(n);
    double ss_res = 0, ss_tot = 0;
    const double mean_y = sy / double(n);
    for (const auto& [x, y] : xy) {
        const double ly = std::log(y);
        const double pred = fit.intercept + fit.slope * std::log(x);
        ss_res += (ly - pred) * (ly - pred);
        ss_tot += (ly - mean_y) * (ly - mean_y);
    }
    fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    return fit;
}

ExponentFit fit_exponent(const std::vector<Record>& records, const std::string& quantity) {
    std::map<double, std::vector<double>> groups;
    for (const auto& r : records)
        if (r.quantity == quantity) groups[r.lambda].push_back(r.value);
    std::vector<std::pair<double, double>> med;
    for (auto& [lambda, vals] : groups) {
        std::sort(vals.begin(), vals.end());
        const double m = vals.size() % 2 == 1
                             ? vals[vals.size() / 2]
                             : 0.5 * (vals[vals.size() / 2 - 1] + vals[vals.size() / 2]);
        med.push_back({lambda, m});
    }
    return fit_loglog(med);
}

std::vector<double> select_eigenvalues(const ExperimentConfig& cfg) {
    if (cfg.lambda_min < 1.0) throw std::invalid_argument("select_eigenvalues: lambda_min >= 1");
    if (cfg.lambda_max < cfg.lambda_min) return {};
    std::vector<double> pool;
    if (cfg.family == "product" && cfg.manifold == Manifold::Torus2) {
        std::set<long long> vals;
        const int cap = int(std::sqrt(cfg.lambda_max)) + 1;
        for (int n = 1; n <= cap; ++n)
            for (int m = 1; m <= cap; ++m) {
                const long long v = 1LL * n * n + 1LL * m * m;
                if (double(v) <= cfg.lambda_max) vals.insert(v);
            }
        for (long long v : vals) pool.push_back(double(v));
    } else if (cfg.family == "axis" && cfg.manifold == Manifold::Torus3) {
        for (int k = 1; double(k) * double(k) <= cfg.lambda_max; ++k)
            pool.push_back(double(k) * double(k));
    } else {
        for (const auto& [lambda, mult] : eigenvalue_list(cfg.manifold, cfg.lambda_max))
            if (lambda >= 1.0) pool.push_back(lambda);
    }
    if (pool.empty()) return {};

    std::vector<double> out;
    const int count = std::max(1, cfg.lambda_count);
    for (int i = 0; i < count; ++i) {
        const double t = count == 1 ? 0.0 : double(i) / double(count - 1);
        const double target = cfg.lambda_min * std::pow(cfg.lambda_max / cfg.lambda_min, t);
        double best = pool.front();
        for (double v : pool)
            if (std::abs(std::log(v / target)) < std::abs(std::log(best / target))) best = v;
        out.push_back(best);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

Eigenfunction make_family_member(const ExperimentConfig& cfg, double lambda, std::uint64_t seed) {
    if (cfg.family == "random") return synth_random(cfg.manifold, lambda, seed);
    if (cfg.family == "product") {
        if (cfg.manifold != Manifold::Torus2)
            throw std::invalid_argument("family product requires torus2");
        // deterministic representative with n, m >= 1, closest to the diagonal
        const long long lam = (long long)std::llround(lambda);
        int best_n = 0, best_m = 0;
        for (int n = 1; 1LL * n * n < lam; ++n) {
            const long long m2 = lam - 1LL * n * n;
            const int m = int(std::llround(std::sqrt(double(m2))));
            if (1LL * m * m == m2 && m >= 1) {
                if (best_n == 0 || std::abs(n - m) < std::abs(best_n - best_m)) {
                    best_n = n;
                    best_m = m;
                }
            }
        }
        if (best_n == 0)
            throw std::invalid_argument("family product: lambda has no n,m >= 1 representation");
        return torus2_product(best_n, best_m);
    }
    if (cfg.family == "sectoral") {
        if (cfg.manifold != Manifold::Sphere2)
            throw std::invalid_argument("family sectoral requires sphere2");
        const int l = int(std::floor((-1.0 + std::sqrt(1.0 + 4.0 * lambda)) / 2.0 + 0.5));
        return sphere_sectoral(l);
    }
    if (cfg.family == "axis") {
        if (cfg.manifold != Manifold::Torus3)
            throw std::invalid_argument("family axis requires torus3");
        const int k = int(std::llround(std::sqrt(lambda)));
        return torus3_axis_wave(k);
    }
    throw std::invalid_argument("unknown family: " + cfg.family);
}

namespace {

int sweep_resolution(const ExperimentConfig& cfg, double lambda, int dim) {
    return std::max(cfg.resolution, min_resolution(lambda, kTwoPi, dim));
}

std::filesystem::path out_path(const ExperimentConfig& cfg, const std::string& name) {
    std::filesystem::create_directories(cfg.out_dir);
    return std::filesystem::path(cfg.out_dir) / name;
}

}  // namespace

std::vector<Record> sweep_nodal_measure(const ExperimentConfig& cfg) {
    const auto file = out_path(cfg, std::string("sweep_") + manifold_name(cfg.manifold) + ".jsonl");
    auto records = read_records(file);
    std::set<std::tuple<double, std::uint64_t, std::string>> have;
    for (const auto& r : records)
        if (r.manifold == manifold_name(cfg.manifold))
            have.insert({r.lambda, r.seed, r.quantity});

    const int dim = manifold_dim(cfg.manifold);
    const std::string quantity = dim == 2 ? "nodal_length" : "nodal_area";
    for (double lambda : select_eigenvalues(cfg)) {
        for (int e = 0; e < cfg.ensemble; ++e) {
            const std::uint64_t seed = cfg.seed + std::uint64_t(e);
            if (have.count({lambda, seed, quantity})) continue;
            Record r;
            r.manifold = manifold_name(cfg.manifold);
            r.lambda = lambda;
            r.seed = seed;
            r.quantity = quantity;
            const int res = sweep_resolution(cfg, lambda, dim);
            r.meta = {{"resolution", res}, {"family", cfg.family}};
            try {
                const auto u = make_family_member(cfg, lambda, seed);
                const auto set = dim == 2 ? extract_nodal_2d(u, res) : extract_nodal_3d(u, res);
                r.value = set.total_measure;
                r.meta["elements"] = set.segments.size() + set.triangles.size();
            } catch (const std::exception& err) {
                r.value = std::numeric_limits<double>::quiet_NaN();
                r.meta["error"] = err.what();
            }
            if (std::isfinite(r.value)) records.push_back(r);
        }
    }
    write_records(file, records);
    return read_records(file);
}

std::vector<Record> df_doubling_sweep(const ExperimentConfig& cfg) {
    const auto file = out_path(cfg, std::string("df_") + manifold_name(cfg.manifold) + ".jsonl");
    auto records = read_records(file);
    std::set<std::tuple<double, std::uint64_t, std::string>> have;
    for (const auto& r : records) have.insert({r.lambda, r.seed, r.quantity});

    const ChartKind chart =
        cfg.manifold == Manifold::Sphere2 ? ChartKind::SphereCapNorth : ChartKind::Flat;
    const ChartSpec chart_spec =
        cfg.manifold == Manifold::Sphere2 ? cap_chart(chart) : flat_chart();

    for (double lambda : select_eigenvalues(cfg)) {
        const std::uint64_t seed = cfg.seed;
        if (have.count({lambda, seed, "max_tilde_index"})) continue;
        Record r;
        r.manifold = manifold_name(cfg.manifold);
        r.lambda = lambda;
        r.seed = seed;
        r.quantity = "max_tilde_index";
        try {
            const auto u = make_family_member(cfg, lambda, seed);
            const double w = cfg.df_panel_scale / std::sqrt(lambda);
            Cube panel;
            panel.dim = 2;
            panel.half_side = w;
            if (cfg.manifold != Manifold::Sphere2) panel.center = vec4(M_PI, M_PI);
            const auto ms = eigen_mass(u, cfg.doubling, chart);
            double max_tilde = 0.0;
            const auto cubes = subdivide(panel, cfg.df_grid);
            std::vector<double> tilde(cubes.size(), -1.0);
            parallel_for(cubes.size(), [&](std::size_t i) {
                try {
                    tilde[i] = tilde_index(ms, cubes[i], cfg.doubling, chart_spec).value;
                } catch (const std::exception&) {
                    tilde[i] = -1.0;
                }
            }, cfg.jobs);
            for (double t : tilde) max_tilde = std::max(max_tilde, t);
            r.value = max_tilde;
            r.meta = {{"grid", cfg.df_grid},
                      {"panel_scale", cfg.df_panel_scale},
                      {"family", cfg.family},
                      {"ratio_sqrt_lambda", max_tilde / std::sqrt(lambda)},
                      {"within_bound", max_tilde / std::sqrt(lambda) <= cfg.df_bound}};
            records.push_back(r);
        } catch (const std::exception& err) {
            r.meta["error"] = err.what();
        }
    }
    write_records(file, records);
    return read_records(file);
}

Pipeline2DReport pipeline_2d_upper(const ExperimentConfig& cfg, double lambda, std::uint64_t seed) {
    if (cfg.manifold != Manifold::Torus2)
        throw std::invalid_argument("pipeline_2d_upper: torus2 only");
    Pipeline2DReport rep;
    rep.lambda = lambda;
    rep.seed = seed;
    // side length ~ lambda^{-1/4}
    rep.squares_per_axis = int(std::llround(kTwoPi * std::pow(lambda, 0.25)));
    const int m = rep.squares_per_axis;
    if (m < 4) throw std::invalid_argument("pipeline_2d_upper: lambda too small for the partition");
    rep.side = kTwoPi / double(m);

    const auto u = make_family_member(cfg, lambda, seed);
    const int res = sweep_resolution(cfg, lambda, 2);
    const auto set = extract_nodal_2d(u, res);

    rep.per_square_length.assign(std::size_t(m) * std::size_t(m), 0.0);
    for (const auto& s : set.segments) {
        double mx = 0.5 * (s.a[0] + s.b[0]);
        double my = 0.5 * (s.a[1] + s.b[1]);
        mx -= kTwoPi * std::floor(mx / kTwoPi);
        my -= kTwoPi * std::floor(my / kTwoPi);
        const int ix = std::min(m - 1, int(mx / rep.side));
        const int iy = std::min(m - 1, int(my / rep.side));
        rep.per_square_length[std::size_t(ix) * std::size_t(m) + std::size_t(iy)] += s.measure;
        rep.total_length += s.measure;
    }

    DoublingParams dp = cfg.doubling;
    dp.tilde_depth = cfg.pipeline2d_tilde_depth;
    const auto ms = eigen_mass(u, dp);
    rep.per_square_tilde.assign(std::size_t(m) * std::size_t(m), 0.0);
    std::vector<Cube> squares = subdivide([&] {
        Cube full;
        full.dim = 2;
        full.center = vec4(M_PI, M_PI);
        full.half_side = M_PI;
        return full;
    }(), m);
    parallel_for(squares.size(), [&](std::size_t i) {
        const Cube big = dilate(squares[i], 100.0);
        rep.per_square_tilde[i] = tilde_index(ms, big, dp).value;
    }, cfg.jobs);

    double max_tilde = 0.0;
    for (std::size_t i = 0; i < squares.size(); ++i) {
        const double t = std::max(rep.per_square_tilde[i], 0.0);
        max_tilde = std::max(max_tilde, t);
        rep.total_sqrt_tilde += std::sqrt(t);
        const double implied = rep.per_square_length[i] / std::sqrt(std::max(t, 0.1));
        rep.max_implied = std::max(rep.max_implied, implied);
    }

    // halving-bin histogram of tilde values against the binomial group shape
    const long long Y = cfg.cascade.Y;
    int j = 1;
    while (std::pow(double(Y), j) < double(squares.size())) ++j;
    rep.halving_bins.assign(std::size_t(j) + 1, 0);
    for (double t : rep.per_square_tilde) {
        int bin = 0;
        while (bin < j && t < max_tilde / std::exp2(double(bin + 1))) ++bin;
        rep.halving_bins[std::size_t(bin)]++;
    }
    const auto theo = binomial_group_sizes(j, Y);
    const double scale = double(squares.size()) / std::pow(double(Y), j);
    for (const auto& c : theo) rep.theoretical_bins.push_back(c.approx * scale);
    rep.bound_series = std::pow(double(Y) - 1.0 + std::exp2(-0.5), j);
    return rep;
}

Pipeline3DReport pipeline_3d_lower(const ExperimentConfig& cfg, double lambda, std::uint64_t seed) {
    if (cfg.manifold != Manifold::Torus3)
        throw std::invalid_argument("pipeline_3d_lower: torus3 only");
    Pipeline3DReport rep;
    rep.lambda = lambda;
    rep.seed = seed;
    const auto u = make_family_member(cfg, lambda, seed);

    const int res = sweep_resolution(cfg, lambda, 3);
    rep.global_area = extract_nodal_3d(u, res).total_measure;

    const int m = std::max(2, int(std::llround(kTwoPi * std::sqrt(lambda) / cfg.cube_scale)));
    rep.cubes_per_axis = m;
    rep.side = kTwoPi / double(m);
    Cube full;
    full.dim = 3;
    full.center = vec4(M_PI, M_PI, M_PI);
    full.half_side = M_PI;
    const auto cubes = subdivide(full, m);
    rep.cubes = (long long)cubes.size();

    const double delta = cfg.cascade.delta > 0.0 ? cfg.cascade.delta : default_delta(cfg.cascade.Y);
    rep.threshold = std::max(30.0, cfg.pipeline_c1 * std::pow(lambda, 0.5 - 2.0 * delta));

    const auto ms = eigen_mass(u, cfg.doubling);
    // offset the local grids so they do not align with the global one and the
    // partition comparison stays a genuine cross-check of two discretizations
    const int local_res = std::max(min_resolution(lambda, kTwoPi / double(m), 3), 12) + 5;

    std::vector<double> areas(cubes.size(), 0.0), indices(cubes.size(), 0.0);
    std::vector<char> zero_found(cubes.size(), 0), resolved(cubes.size(), 1);
    // per-cube work is serial; extraction and quadrature parallelize inside
    for (std::size_t i = 0; i < cubes.size(); ++i) {
        const Cube& q = cubes[i];
        areas[i] = extract_nodal_3d(u, to_box(q), local_res).total_measure;
        // sign scan over the inner fraction
        const double inner = cfg.inner_fraction * q.half_side;
        bool pos = false, neg = false;
        for (int a = -2; a <= 2; ++a)
            for (int b = -2; b <= 2; ++b)
                for (int c = -2; c <= 2; ++c) {
                    const double x[3] = {q.center[0] + inner * double(a) / 2.0,
                                         q.center[1] + inner * double(b) / 2.0,
                                         q.center[2] + inner * double(c) / 2.0};
                    const double v = u.evaluate(x);
                    pos = pos || v >= 0.0;
                    neg = neg || v <= 0.0;
                }
        zero_found[i] = (pos && neg) ? 1 : 0;
        try {
            indices[i] = doubling_index(ms, q, cfg.doubling).N;
        } catch (const std::exception&) {
            resolved[i] = 0;
        }
    }

    double min_c2 = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < cubes.size(); ++i) {
        rep.total_local_area += areas[i];
        if (!zero_found[i]) {
            ++rep.density_violations;
            continue;
        }
        ++rep.with_zero;
        if (!resolved[i] || indices[i] > rep.threshold) continue;
        ++rep.good;
        if (areas[i] <= 0.0) {
            ++rep.empty_good;
            continue;
        }
        min_c2 = std::min(min_c2, areas[i] * lambda * std::max(indices[i], 0.1));
    }
    rep.min_good_c2 = std::isfinite(min_c2) ? min_c2 : 0.0;
    rep.partition_rel_diff =
        std::abs(rep.total_local_area - rep.global_area) / std::max(rep.global_area, 1e-300);
    return rep;
}


// ---------------------------------------------------------------------------
// Verify suites
// ---------------------------------------------------------------------------

namespace {

std::vector<double> eigen_pool(Manifold m, double lambda_max, double lambda_min = 1.0) {
    std::vector<double> pool;
    for (const auto& [lambda, mult] : eigenvalue_list(m, lambda_max))
        if (lambda >= lambda_min) pool.push_back(lambda);
    return pool;
}

VerifyItem verify_weak_max(const ExperimentConfig& cfg) {
    VerifyItem item;
    item.name = "weak-max factor 2";
    Rng rng(cfg.seed ^ 0xabcdef12ULL);
    long long violations = 0;
    long long tested = 0;
    const int total = cfg.verify_balls;
    struct Plan { Manifold m; int share; };
    const Plan plans[] = {{Manifold::Torus2, 60}, {Manifold::Sphere2, 20}, {Manifold::Torus3, 20}};
    for (const auto& plan : plans) {
        const auto pool = eigen_pool(plan.m, plan.m == Manifold::Torus3 ? 2000.0 : cfg.lambda_max);
        const int count = total * plan.share / 100;
        for (int i = 0; i < count; ++i) {
            const double lambda = pool[rng.next_u64() % pool.size()];
            const auto u = synth_random(plan.m, lambda, rng.next_u64());
            Ball B;
            B.dim = manifold_dim(plan.m);
            B.radius = (0.2 + 0.79 * rng.uniform()) * cfg.wavescale.epsilon / std::sqrt(lambda);
            if (plan.m == Manifold::Sphere2) {
                B.chart = ChartKind::SphereCapNorth;
                B.center = vec4(rng.uniform(-0.6, 0.6), rng.uniform(-0.6, 0.6));
            } else {
                for (int d = 0; d < B.dim; ++d) B.center[d] = rng.uniform(0.0, kTwoPi);
            }
            WavescaleParams p = cfg.wavescale;
            p.seed = rng.next_u64();
            const auto rep = check_weak_max(u, B, p);
            ++tested;
            if (!rep.holds) ++violations;
        }
    }
    item.pass = violations == 0;
    item.detail = std::to_string(tested) + " balls, " + std::to_string(violations) + " violations";
    return item;
}

VerifyItem verify_gradient(const ExperimentConfig& cfg) {
    VerifyItem item;
    item.name = "gradient bound C1";
    Rng rng(cfg.seed ^ 0x1234aaaaULL);
    double worst = 0.0;
    const auto pool = eigen_pool(Manifold::Torus2, cfg.lambda_max);
    long long violations = 0;
    for (int i = 0; i < 120; ++i) {
        const double lambda = pool[rng.next_u64() % pool.size()];
        const auto u = synth_random(Manifold::Torus2, lambda, rng.next_u64());
        Ball B;
        B.dim = 2;
        B.center = vec4(rng.uniform(0.0, kTwoPi), rng.uniform(0.0, kTwoPi));
        B.radius = (0.2 + 0.79 * rng.uniform()) * cfg.wavescale.epsilon / std::sqrt(lambda);
        WavescaleParams p = cfg.wavescale;
        p.seed = rng.next_u64();
        const auto rep = check_gradient_bound(u, B, p);
        worst = std::max(worst, rep.implied);
        if (!rep.holds) ++violations;
    }
    item.pass = violations == 0;
    std::ostringstream os;
    os << "max implied " << worst << " vs C1 " << cfg.wavescale.C1;
    item.detail = os.str();
    return item;
}

VerifyItem verify_sided(const ExperimentConfig& cfg) {
    VerifyItem item;
    item.name = "one-sided sup C2";
    Rng rng(cfg.seed ^ 0x5678bbbbULL);
    double worst = 0.0;
    const auto pool = eigen_pool(Manifold::Torus2, cfg.lambda_max);
    long long violations = 0, tested = 0;
    for (int i = 0; i < 240 && tested < 120; ++i) {
        const double lambda = pool[rng.next_u64() % pool.size()];
        const auto u = synth_random(Manifold::Torus2, lambda, rng.next_u64());
        Ball B;
        B.dim = 2;
        B.center = vec4(rng.uniform(0.0, kTwoPi), rng.uniform(0.0, kTwoPi));
        B.radius = (0.2 + 0.79 * rng.uniform()) * cfg.wavescale.epsilon / std::sqrt(lambda);
        if (u.evaluate(B.center.data()) < 0.0) continue;
        ++tested;
        WavescaleParams p = cfg.wavescale;
        p.seed = rng.next_u64();
        const auto rep = check_sided_sup(u, B, p);
        worst = std::max(worst, rep.implied);
        if (!rep.holds) ++violations;
    }
    item.pass = violations == 0 && tested >= 60;
    std::ostringstream os;
    os << tested << " balls, max implied " << worst << " vs C2 " << cfg.wavescale.C2;
    item.detail = os.str();
    return item;
}

VerifyItem verify_harnack(const ExperimentConfig& cfg) {
    VerifyItem item;
    item.name = "harnack corollary floor";
    Rng rng(cfg.seed ^ 0x9999ccccULL);
    double worst = std::numeric_limits<double>::infinity();
    const auto pool = eigen_pool(Manifold::Torus2, 400.0);
    long long violations = 0, tested = 0;
    for (int i = 0; i < 120 && tested < 50; ++i) {
        const double lambda = pool[rng.next_u64() % pool.size()];
        const auto u = synth_random(Manifold::Torus2, lambda, rng.next_u64());
        auto h = lift(u);
        Vec4 c = vec4(rng.uniform(0.0, kTwoPi), rng.uniform(0.0, kTwoPi), rng.uniform(-0.3, 0.3));
        if (h.evaluate(c.data()) < 0.0) continue;
        ++tested;
        Ball B;
        B.dim = 3;
        B.center = c;
        B.radius = (0.2 + 0.79 * rng.uniform()) * cfg.wavescale.epsilon / std::sqrt(lambda);
        WavescaleParams p = cfg.wavescale;
        p.seed = rng.next_u64();
        const auto rep = check_harnack_corollary(h, B, p);
        worst = std::min(worst, rep.implied_c);
        if (!rep.holds) ++violations;
    }
    item.pass = violations == 0 && tested >= 25;
    std::ostringstream os;
    os << tested << " balls, min implied c " << worst << " vs floor " << cfg.wavescale.harnack_floor;
    item.detail = os.str();
    return item;
}

VerifyItem verify_monotonicity(const ExperimentConfig& cfg) {
    VerifyItem item;
    item.name = "doubling monotonicity C0";
    Rng rng(cfg.seed ^ 0x2222ddddULL);
    double worst = 0.0;
    long long violations = 0;
    // harmonic polynomials
    for (int k = 1; k <= 20; ++k) {
        auto hp = [k](const double* x) {
            double re = 1.0, im = 0.0;
            for (int i = 0; i < k; ++i) {
                const double r2 = re * x[0] - im * x[1];
                im = re * x[1] + im * x[0];
                re = r2;
            }
            return re;
        };
        FieldView f = make_field(2, hp);
        DoublingParams dp = cfg.doubling;
        dp.quad.order = 48;
        const auto ms = quadrature_mass(f, dp);
        for (int trial = 0; trial < 3; ++trial) {
            const double a = 0.002 + 0.004 * rng.uniform();
            Cube q1;
            q1.dim = 2;
            q1.half_side = a;
            q1.center = vec4(rng.uniform(-0.02, 0.02), rng.uniform(-0.02, 0.02));
            Cube q;
            q.dim = 2;
            q.half_side = double(dp.A) * a * (1.0 + 0.5 * rng.uniform());
            q.center = q1.center;
            if (!contains(q, dilate(q1, double(dp.A)))) continue;
            const auto rep = check_monotonicity(ms, q1, q, dp);
            worst = std::max(worst, rep.ratio);
            if (!rep.holds) ++violations;
        }
    }
    // lifted eigenfunctions, concentric cubes
    const auto pool = eigen_pool(Manifold::Torus2, 100.0);
    for (int i = 0; i < 20; ++i) {
        const double lambda = pool[rng.next_u64() % pool.size()];
        const auto u = synth_random(Manifold::Torus2, lambda, rng.next_u64());
        auto h = lift(u);
        const auto ms = lifted_mass(h, cfg.doubling);
        Cube q;
        q.dim = 3;
        q.half_side = 0.32;
        q.center = vec4(rng.uniform(0.0, kTwoPi), rng.uniform(0.0, kTwoPi), 0.0);
        Cube q1 = q;
        q1.half_side = q.half_side / double(cfg.doubling.A);
        const auto rep = check_monotonicity(ms, q1, q, cfg.doubling);
        worst = std::max(worst, rep.ratio);
        if (!rep.holds) ++violations;
    }
    item.pass = violations == 0;
    std::ostringstream os;
    os << "max ratio " << worst << " vs C0 " << cfg.doubling.C0;
    item.detail = os.str();
    return item;
}

VerifyItem verify_linfty(const ExperimentConfig& cfg) {
    VerifyItem item;
    item.name = "L-infinity estimate C7";
    Rng rng(cfg.seed ^ 0x3333eeeeULL);
    double worst = 0.0;
    long long violations = 0;
    const auto pool = eigen_pool(Manifold::Torus2, 100.0);
    for (int i = 0; i < 50; ++i) {
        const double lambda = pool[rng.next_u64() % pool.size()];
        const auto u = synth_random(Manifold::Torus2, lambda, rng.next_u64());
        auto h = lift(u);
        const auto ms = lifted_mass(h, cfg.doubling);
        Ball B;
        B.dim = 3;
        B.center = vec4(rng.uniform(0.0, kTwoPi), rng.uniform(0.0, kTwoPi), 0.0);
        B.radius = (0.2 + 0.6 * rng.uniform()) / std::sqrt(lambda);
        auto f = h.field();
        const auto rep = check_linfty_estimate(f, ms, B, cfg.doubling, 512, rng.next_u64());
        worst = std::max(worst, rep.implied);
        if (!rep.holds) ++violations;
    }
    item.pass = violations == 0;
    std::ostringstream os;
    os << "max implied " << worst << " vs C7 " << cfg.doubling.C7;
    item.detail = os.str();
    return item;
}

VerifyItem verify_subdivision(const ExperimentConfig& cfg) {
    VerifyItem item;
    item.name = "subdivision chain bound";
    Rng rng(cfg.seed ^ 0x4444ffffULL);
    long long proven_violations = 0, nonvacuous = 0;
    DoublingParams dp = cfg.doubling;
    dp.max_order = 64;
    for (int trial = 0; trial < cfg.verify_trig; ++trial) {
        const double lambda = double(1 + int(rng.next_u64() % 20));
        std::vector<std::array<int, 3>> reps;
        try {
            reps = lattice_representatives(Manifold::Torus3, (long long)lambda);
        } catch (...) {
            continue;
        }
        if (reps.empty()) continue;
        const auto u = synth_random(Manifold::Torus3, lambda, rng.next_u64());
        const auto ms = eigen_mass(u, dp);
        Cube Q;
        Q.dim = 3;
        Q.half_side = 0.25 + 0.25 * rng.uniform();
        Q.center = vec4(rng.uniform(0.0, kTwoPi), rng.uniform(0.0, kTwoPi), rng.uniform(0.0, kTwoPi));
        const auto rep = verify_subdivision_lemma(ms, Q, cfg.cascade.K, dp, cfg.cascade.tol);
        if (!rep.vacuous) ++nonvacuous;
        if (!rep.proven_holds) ++proven_violations;
    }
    item.pass = proven_violations == 0;
    std::ostringstream os;
    os << cfg.verify_trig << " random fields, " << nonvacuous << " non-vacuous, "
       << proven_violations << " chain-bound violations";
    item.detail = os.str();
    return item;
}

VerifyItem verify_combinatorics(const ExperimentConfig&) {
    VerifyItem item;
    item.name = "cascade combinatorics exact";
    bool ok = true;
    for (long long Y : {2LL, 16LL, 625LL, 1000000LL})
        for (int j : {1, 5, 13, 30}) ok = ok && binomial_groups_sum_exact(j, Y);
    for (long long Y : {2LL, 16LL, 625LL}) {
        const int j0 = lln_j0(Y, 2600);
        for (int j = j0; j <= 2600; j += 89) ok = ok && lln_tail_at_least_half(j, Y);
    }
    item.pass = ok;
    item.detail = ok ? "binomial sums and lln tails verified exactly" : "exact check failed";
    return item;
}

VerifyItem verify_cascade_half(const ExperimentConfig& cfg) {
    VerifyItem item;
    item.name = "cascade good-half";
    const auto u = synth_random(Manifold::Torus2, 100.0, cfg.seed);
    auto h = lift(u);
    CascadeParams cp = cfg.cascade;
    cp.dp = cfg.doubling;
    cp.jobs = cfg.jobs;
    Cube Q;
    Q.dim = 3;
    const double per_axis = std::pow(double(cp.Y), double(cp.j) / 3.0);
    Q.half_side = per_axis / std::sqrt(100.0);
    Q.center = vec4(M_PI, M_PI, 0.0);
    const auto rep = run_cascade(h, Q, cp);
    item.pass = rep.good_half;
    std::ostringstream os;
    os << "good fraction " << rep.good_fraction << ", budget findings " << rep.budget_violations;
    item.detail = os.str();
    return item;
}

VerifyItem verify_density(const ExperimentConfig& cfg) {
    VerifyItem item;
    item.name = "nodal density radius";
    Rng rng(cfg.seed ^ 0x0dddULL);
    double worst = 0.0;
    long long violations = 0;
    for (double lambda : {100.0, 400.0, 2500.0}) {
        const auto u = synth_random(Manifold::Torus2, lambda, rng.next_u64());
        const double d = density_radius(u, 100, rng.next_u64());
        worst = std::max(worst, d * std::sqrt(lambda));
        if (d > cfg.c_dens / std::sqrt(lambda)) ++violations;
    }
    item.pass = violations == 0;
    std::ostringstream os;
    os << "max radius*sqrt(lambda) " << worst << " vs c_dens " << cfg.c_dens;
    item.detail = os.str();
    return item;
}

VerifyItem verify_epsilon(const ExperimentConfig& cfg) {
    VerifyItem item;
    item.name = "epsilon calibration";
    item.blocking = false;
    const double eps = calibrate_epsilon(cfg);
    item.pass = eps >= cfg.wavescale.epsilon;
    std::ostringstream os;
    os << "largest violation-free epsilon " << eps << " (configured " << cfg.wavescale.epsilon
       << ")";
    item.detail = os.str();
    return item;
}

}  // namespace

double calibrate_epsilon(const ExperimentConfig& cfg, int balls) {
    const auto pool = eigen_pool(Manifold::Torus2, cfg.lambda_max);
    auto violation_free = [&](double eps) {
        Rng rng(cfg.seed ^ 0xe95ULL);
        WavescaleParams p = cfg.wavescale;
        p.epsilon = eps;
        for (int i = 0; i < balls; ++i) {
            const double lambda = pool[rng.next_u64() % pool.size()];
            const auto u = synth_random(Manifold::Torus2, lambda, rng.next_u64());
            Ball B;
            B.dim = 2;
            B.center = vec4(rng.uniform(0.0, kTwoPi), rng.uniform(0.0, kTwoPi));
            B.radius = (0.2 + 0.79 * rng.uniform()) * eps / std::sqrt(lambda);
            p.seed = rng.next_u64();
            if (!check_weak_max(u, B, p).holds) return false;
        }
        return true;
    };
    double lo = 0.05, hi = 1.6;
    if (!violation_free(lo)) return 0.0;
    for (int iter = 0; iter < 10; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (violation_free(mid))
            lo = mid;
        else
            hi = mid;
    }
    return lo;
}

VerifySummary run_verify(const ExperimentConfig& cfg) {
    VerifySummary summary;
    summary.items.push_back(verify_weak_max(cfg));
    summary.items.push_back(verify_gradient(cfg));
    summary.items.push_back(verify_sided(cfg));
    summary.items.push_back(verify_harnack(cfg));
    summary.items.push_back(verify_monotonicity(cfg));
    summary.items.push_back(verify_linfty(cfg));
    summary.items.push_back(verify_subdivision(cfg));
    summary.items.push_back(verify_combinatorics(cfg));
    summary.items.push_back(verify_cascade_half(cfg));
    summary.items.push_back(verify_density(cfg));
    summary.items.push_back(verify_epsilon(cfg));
    for (const auto& item : summary.items)
        if (item.blocking && !item.pass) ++summary.blocking_failures;
    return summary;
}

// ---------------------------------------------------------------------------
// Command dispatch
// ---------------------------------------------------------------------------

namespace {

nlohmann::json fit_to_json(const ExponentFit& fit) {
    return {{"slope", fit.slope},
            {"intercept", fit.intercept},
            {"r_squared", fit.r_squared},
            {"points", fit.point_count}};
}

int command_sweep(const ExperimentConfig& cfg, nlohmann::json& out) {
    const auto records = sweep_nodal_measure(cfg);
    const int dim = manifold_dim(cfg.manifold);
    const std::string quantity = dim == 2 ? "nodal_length" : "nodal_area";
    write_summary_csv(out_path(cfg, "sweep_summary.csv"), records, quantity);
    write_plot_csv(out_path(cfg, "sweep_plot.csv"), records, quantity);
    out["records"] = records.size();
    out["quantity"] = quantity;
    try {
        out["fit"] = fit_to_json(fit_exponent(records, quantity));
    } catch (const std::exception& e) {
        out["fit_error"] = e.what();
    }
    return 0;
}

int command_doubling(const ExperimentConfig& cfg, nlohmann::json& out) {
    const auto records = df_doubling_sweep(cfg);
    write_summary_csv(out_path(cfg, "df_summary.csv"), records, "max_tilde_index");
    write_plot_csv(out_path(cfg, "df_plot.csv"), records, "max_tilde_index");
    double rmin = std::numeric_limits<double>::infinity(), rmax = 0.0;
    bool all_bounded = true;
    for (const auto& r : records) {
        if (r.quantity != "max_tilde_index") continue;
        const double ratio = r.value / std::sqrt(r.lambda);
        rmin = std::min(rmin, ratio);
        rmax = std::max(rmax, ratio);
        all_bounded = all_bounded && ratio <= cfg.df_bound;
    }
    out["records"] = records.size();
    out["ratio_min"] = rmin;
    out["ratio_max"] = rmax;
    out["ratio_spread"] = rmin > 0.0 ? rmax / rmin : 0.0;
    out["within_bound"] = all_bounded;
    return all_bounded ? 0 : 1;
}

int command_cascade(const ExperimentConfig& cfg, nlohmann::json& out) {
    CascadeParams cp = cfg.cascade;
    cp.dp = cfg.doubling;
    cp.jobs = cfg.jobs;
    nlohmann::json runs = nlohmann::json::array();
    bool all_good = true;
    for (double lambda : select_eigenvalues(cfg)) {
        for (int e = 0; e < cfg.ensemble; ++e) {
            const std::uint64_t seed = cfg.seed + std::uint64_t(e);
            const auto u = make_family_member(cfg, lambda, seed);
            auto h = lift(u);
            Cube Q;
            Q.dim = u.dim() + 1;
            const double per_axis = std::pow(double(cp.Y), double(cp.j) / double(Q.dim));
            Q.half_side = per_axis / std::sqrt(lambda);
            Rng rng(seed ^ 0x77ULL);
            Q.center = vec4(rng.uniform(0.0, kTwoPi), rng.uniform(0.0, kTwoPi), 0.0);
            if (u.dim() == 3) {
                Q.center[2] = rng.uniform(0.0, kTwoPi);
                Q.center[3] = 0.0;
            }
            const auto rep = run_cascade(h, Q, cp);
            std::ostringstream name;
            name << "cascade_" << manifold_name(cfg.manifold) << "_l" << lambda << "_s" << seed
                 << ".jsonl";
            std::ofstream os(out_path(cfg, name.str()), std::ios::trunc);
            write_cascade_records(rep, os);
            runs.push_back({{"lambda", lambda},
                            {"seed", seed},
                            {"N0", rep.N0},
                            {"good_fraction", rep.good_fraction},
                            {"good_half", rep.good_half},
                            {"budget_violations", rep.budget_violations},
                            {"vacuous_lemma3", rep.vacuous_lemma3}});
            all_good = all_good && rep.good_half;
        }
    }
    out["runs"] = runs;
    out["all_good_half"] = all_good;
    return all_good ? 0 : 1;
}

int command_nodal(const ExperimentConfig& cfg, nlohmann::json& out) {
    const auto lambdas = select_eigenvalues(cfg);
    if (lambdas.empty()) throw std::invalid_argument("nodal: no eigenvalue in range");
    const double lambda = lambdas.back();
    const auto u = make_family_member(cfg, lambda, cfg.seed);
    const int dim = manifold_dim(cfg.manifold);
    const int res = sweep_resolution(cfg, lambda, dim);
    const auto set = dim == 2 ? extract_nodal_2d(u, res) : extract_nodal_3d(u, res);
    std::ostringstream name;
    name << "nodal_" << manifold_name(cfg.manifold) << "_l" << lambda << "_s" << cfg.seed << ".txt";
    std::ofstream os(out_path(cfg, name.str()), std::ios::trunc);
    write_nodal_set(set, os);
    out["lambda"] = lambda;
    out["resolution"] = res;
    out["measure"] = set.total_measure;
    out["elements"] = set.segments.size() + set.triangles.size();
    out["file"] = name.str();
    try {
        out["density_radius"] = density_radius(u, 200, cfg.seed);
        out["density_radius_sqrt_lambda"] =
            double(out["density_radius"]) * std::sqrt(lambda);
    } catch (const std::exception& e) {
        out["density_error"] = e.what();
    }
    return 0;
}

int command_verify(const ExperimentConfig& cfg, nlohmann::json& out) {
    const auto summary = run_verify(cfg);
    nlohmann::json items = nlohmann::json::array();
    std::vector<Record> records;
    for (const auto& item : summary.items) {
        items.push_back({{"name", item.name},
                         {"pass", item.pass},
                         {"blocking", item.blocking},
                         {"detail", item.detail}});
        Record r;
        r.manifold = manifold_name(cfg.manifold);
        r.lambda = 0.0;
        r.seed = cfg.seed;
        r.quantity = "verify:" + item.name;
        r.value = item.pass ? 1.0 : 0.0;
        r.meta = {{"detail", item.detail}, {"blocking", item.blocking}};
        records.push_back(r);
    }
    write_records(out_path(cfg, "verify.jsonl"), records);
    out["items"] = items;
    out["blocking_failures"] = summary.blocking_failures;
    return summary.blocking_failures == 0 ? 0 : 1;
}

int command_fit(const ExperimentConfig& cfg, nlohmann::json& out) {
    const auto file = std::filesystem::path(cfg.out_dir) /
                      (std::string("sweep_") + manifold_name(cfg.manifold) + ".jsonl");
    const auto records = read_records(file);
    const int dim = manifold_dim(cfg.manifold);
    const std::string quantity = dim == 2 ? "nodal_length" : "nodal_area";
    out["file"] = file.string();
    out["records"] = records.size();
    out["fit"] = fit_to_json(fit_exponent(records, quantity));
    return 0;
}

int command_report(const ExperimentConfig& cfg, nlohmann::json& out) {
    nlohmann::json files = nlohmann::json::array();
    for (const auto& entry : std::filesystem::directory_iterator(cfg.out_dir)) {
        if (entry.path().extension() != ".jsonl") continue;
        const auto records = read_records(entry.path());
        if (records.empty()) continue;
        std::set<std::string> quantities;
        for (const auto& r : records) quantities.insert(r.quantity);
        for (const auto& q : quantities) {
            const auto base = entry.path().stem().string() + "_" + q;
            write_summary_csv(out_path(cfg, base + "_summary.csv"), records, q);
            write_plot_csv(out_path(cfg, base + "_plot.csv"), records, q);
        }
        files.push_back({{"file", entry.path().filename().string()},
                         {"records", records.size()}});
    }
    out["reported"] = files;
    return 0;
}

}  // namespace

int run_command(const ExperimentConfig& cfg, const std::string& command, std::string& summary_json) {
    if (cfg.jobs > 0) set_default_jobs(cfg.jobs);
    nlohmann::json out;
    out["command"] = command;
    out["manifold"] = manifold_name(cfg.manifold);
    out["seed"] = cfg.seed;
    int code = 0;
    try {
        if (command == "sweep") code = command_sweep(cfg, out);
        else if (command == "cascade") code = command_cascade(cfg, out);
        else if (command == "doubling") code = command_doubling(cfg, out);
        else if (command == "nodal") code = command_nodal(cfg, out);
        else if (command == "verify") code = command_verify(cfg, out);
        else if (command == "fit") code = command_fit(cfg, out);
        else if (command == "report") code = command_report(cfg, out);
        else {
            out["error"] = "unknown command: " + command;
            code = 2;
        }
    } catch (const std::exception& e) {
        out["error"] = e.what();
        code = 2;
    }
    summary_json = out.dump(2);
    return code;
}

}  // namespace nlab
