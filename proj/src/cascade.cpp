#include "nodallab/cascade.hpp"

#include <gmpxx.h>

#include <algorithm>
#include <cmath>
#include <ostream>

#include <json.hpp>

namespace nlab {

void CascadeParams::validate() const {
    if (Y < 2) throw std::invalid_argument("CascadeParams: Y >= 2 required");
    if (j < 1) throw std::invalid_argument("CascadeParams: j >= 1 required");
    if (n0_depth < 0 || leaf_depth < 0) throw std::invalid_argument("CascadeParams: depths >= 0");
}

double default_delta(long long Y) {
    if (Y < 2) throw std::invalid_argument("default_delta: Y >= 2 required");
    return 0.999 * std::log(2.0) / (4.0 * double(Y) * std::log(double(Y)));
}

namespace {

mpz_class binom(int n, int k) {
    mpz_class r;
    mpz_bin_uiui(r.get_mpz_t(), (unsigned long)n, (unsigned long)k);
    return r;
}

mpz_class pow_z(long long base, int exp) {
    mpz_class r;
    mpz_ui_pow_ui(r.get_mpz_t(), (unsigned long)base, (unsigned long)exp);
    return r;
}

BigCount to_count(const mpz_class& z) { return BigCount{z.get_str(), z.get_d()}; }

}  // namespace

std::vector<BigCount> binomial_group_sizes(int j, long long Y) {
    if (j < 0 || Y < 2) throw std::invalid_argument("binomial_group_sizes: j >= 0, Y >= 2");
    std::vector<BigCount> out;
    out.reserve(std::size_t(j) + 1);
    for (int k = 0; k <= j; ++k) out.push_back(to_count(binom(j, k) * pow_z(Y - 1, j - k)));
    return out;
}

bool binomial_groups_sum_exact(int j, long long Y) {
    mpz_class sum = 0;
    for (int k = 0; k <= j; ++k) sum += binom(j, k) * pow_z(Y - 1, j - k);
    return sum == pow_z(Y, j);
}

namespace {

mpq_class lln_tail_exact(int j, long long Y) {
    // threshold k >= j / (2Y)
    const long long kmin = (j + 2 * Y - 1) / (2 * Y);  // ceil(j / (2Y))
    const mpz_class denom = pow_z(Y, j);
    // sum the complement (k < kmin), which has few terms for large Y
    mpz_class below = 0;
    for (long long k = 0; k < kmin; ++k)
        below += binom(j, int(k)) * pow_z(Y - 1, j - int(k));
    mpq_class tail(denom - below, denom);
    tail.canonicalize();
    return tail;
}

}  // namespace

double lln_tail(int j, long long Y) {
    if (j < 1 || Y < 2) throw std::invalid_argument("lln_tail: j >= 1, Y >= 2");
    return lln_tail_exact(j, Y).get_d();
}

bool lln_tail_at_least_half(int j, long long Y) {
    if (j < 1 || Y < 2) throw std::invalid_argument("lln_tail_at_least_half: j >= 1, Y >= 2");
    return lln_tail_exact(j, Y) >= mpq_class(1, 2);
}

int lln_j0(long long Y, int horizon) {
    if (horizon < 1) throw std::invalid_argument("lln_j0: horizon >= 1");
    int last_fail = 0;
    for (int j = 1; j <= horizon; ++j)
        if (!lln_tail_at_least_half(j, Y)) last_fail = j;
    return last_fail + 1;
}

// ---------------------------------------------------------------------------
// Cascade runs
// ---------------------------------------------------------------------------

namespace {

struct WorkCube {
    Box box;
    int group = 0;
};

double measure_tilde_box(const MassSource& ms, const Box& box, const DoublingParams& dp,
                         int depth, const ChartSpec& chart) {
    // tilde probing on a (possibly anisotropic) box: dyadic split per axis
    double best = -std::numeric_limits<double>::infinity();
    std::vector<Box> level = {box};
    for (int d = 0; d <= depth; ++d) {
        for (const Box& b : level) {
            if (!chart.contains(dilate(b, double(dp.l)))) continue;
            best = std::max(best, doubling_index(ms, b, dp, chart).N);
        }
        if (d == depth) break;
        std::vector<Box> next;
        next.reserve(level.size() * std::size_t(1 << box.dim));
        std::vector<int> two(std::size_t(box.dim), 2);
        for (const Box& b : level) {
            auto kids = subdivide_box(b, two);
            next.insert(next.end(), kids.begin(), kids.end());
        }
        level = std::move(next);
    }
    if (!std::isfinite(best)) throw NumericError("cascade: no measurable probe in box");
    return best;
}

}  // namespace

CascadeReport run_cascade(const Lifted& h, const Cube& Q, const CascadeParams& cp,
                          const ChartSpec& chart) {
    if (Q.dim != h.dim())
        throw std::invalid_argument("run_cascade: cube/function dimension mismatch");
    return run_cascade(lifted_mass(h, cp.dp, chart.kind), Q, cp, chart);
}

CascadeReport run_cascade(const MassSource& ms, const Cube& Q, const CascadeParams& cp,
                          const ChartSpec& chart) {
    cp.validate();
    const int dim = Q.dim;

    CascadeReport rep;
    rep.Y = cp.Y;
    rep.steps = cp.j;
    rep.delta = cp.delta > 0.0 ? cp.delta : default_delta(cp.Y);

    DoublingParams n0_params = cp.dp;
    n0_params.tilde_depth = cp.n0_depth;
    rep.N0 = tilde_index(ms, Q, n0_params, chart).value;

    const double B = std::pow(double(cp.Y), cp.j);
    rep.good_threshold = std::max(rep.N0 / std::pow(B, rep.delta), 10.0 * double(dim));
    rep.vacuous_lemma3 = rep.N0 / std::pow(B, rep.delta) < 2.0 * double(dim);

    std::vector<WorkCube> level;
    level.push_back({to_box(Q), 0});

    const double budget_slack = cp.tol * std::max(rep.N0, 1.0);
    std::vector<double> measured;
    std::vector<char> ok;
    for (int step = 0; step < cp.j; ++step) {
        const auto factors = balanced_factors(cp.Y, dim, step);
        std::vector<Box> children;
        std::vector<std::size_t> parent_of;
        for (std::size_t pi = 0; pi < level.size(); ++pi) {
            auto kids = subdivide_box(level[pi].box, factors);
            for (auto& k : kids) {
                children.push_back(k);
                parent_of.push_back(pi);
            }
        }
        measured.assign(children.size(), 0.0);
        ok.assign(children.size(), 1);
        parallel_for(children.size(), [&](std::size_t i) {
            try {
                measured[i] = measure_tilde_box(ms, children[i], cp.dp, cp.leaf_depth, chart);
            } catch (const std::exception&) {
                ok[i] = 0;
                measured[i] = std::numeric_limits<double>::quiet_NaN();
            }
        }, cp.jobs);

        // each parent promotes its min-index child to the halved budget
        const std::size_t per_parent = children.size() / level.size();
        std::vector<WorkCube> next;
        next.reserve(children.size());
        for (std::size_t pi = 0; pi < level.size(); ++pi) {
            const std::size_t lo = pi * per_parent, hi = lo + per_parent;
            std::size_t argmin = lo;
            bool have = false;
            for (std::size_t i = lo; i < hi; ++i) {
                if (!ok[i]) continue;
                if (!have || measured[i] < measured[argmin]) {
                    argmin = i;
                    have = true;
                }
            }
            for (std::size_t i = lo; i < hi; ++i) {
                WorkCube wc;
                wc.box = children[i];
                wc.group = level[pi].group + ((have && i == argmin) ? 1 : 0);
                next.push_back(wc);
            }
        }
        level = std::move(next);

        std::vector<long long> counts(std::size_t(step) + 2, 0);
        for (const auto& wc : level) counts[std::size_t(wc.group)]++;
        rep.per_step_counts.push_back(std::move(counts));
    }

    rep.final_cubes.reserve(level.size());
    for (std::size_t i = 0; i < level.size(); ++i) {
        CascadeCube fc;
        fc.box = level[i].box;
        fc.group = level[i].group;
        fc.resolved = ok[i] != 0;
        fc.measured = measured[i];
        const double budget = rep.N0 / std::exp2(double(fc.group));
        fc.within_budget = !fc.resolved || fc.measured <= budget + budget_slack;
        rep.final_cubes.push_back(fc);
    }

    rep.theoretical_counts = binomial_group_sizes(cp.j, cp.Y);

    long long good = 0, resolved = 0;
    for (const auto& fc : rep.final_cubes) {
        if (!fc.resolved) {
            ++rep.unresolved;
            continue;
        }
        ++resolved;
        if (fc.measured <= rep.good_threshold + budget_slack) ++good;
        if (!fc.within_budget) ++rep.budget_violations;
    }
    rep.good_fraction = resolved > 0 ? double(good) / double(resolved) : 0.0;
    rep.good_half = rep.good_fraction >= 0.5;
    return rep;
}

double good_cube_fraction(const Eigenfunction& u, const Cube& Q, long long B, double threshold,
                          const CascadeParams& cp, const ChartSpec& chart) {
    if (B < 1) throw std::invalid_argument("good_cube_fraction: B >= 1 required");
    const int dim = Q.dim;
    // per-axis totals: B must factor into dim equal counts (B = m^dim)
    const double mreal = std::pow(double(B), 1.0 / double(dim));
    const int m = int(std::llround(mreal));
    long long check = 1;
    for (int d = 0; d < dim; ++d) check *= m;
    if (check != B)
        throw std::invalid_argument("good_cube_fraction: B is not a perfect dim-th power");

    const MassSource ms = eigen_mass(u, cp.dp, chart.kind);
    const auto cubes = subdivide(Q, m);
    std::vector<double> idx(cubes.size());
    std::vector<char> ok(cubes.size(), 1);
    parallel_for(cubes.size(), [&](std::size_t i) {
        try {
            idx[i] = doubling_index(ms, cubes[i], cp.dp, chart).N;
        } catch (const std::exception&) {
            ok[i] = 0;
        }
    }, cp.jobs);
    long long good = 0, resolved = 0;
    for (std::size_t i = 0; i < cubes.size(); ++i) {
        if (!ok[i]) continue;
        ++resolved;
        if (idx[i] <= threshold) ++good;
    }
    if (resolved == 0) throw NumericError("good_cube_fraction: no cube resolved");
    return double(good) / double(resolved);
}

void write_cascade_records(const CascadeReport& rep, std::ostream& os) {
    using nlohmann::json;
    for (std::size_t i = 0; i < rep.final_cubes.size(); ++i) {
        const auto& fc = rep.final_cubes[i];
        json rec;
        rec["schema"] = 1;
        rec["kind"] = "cascade_cube";
        rec["index"] = i;
        std::vector<double> center(fc.box.center.begin(), fc.box.center.begin() + fc.box.dim);
        std::vector<double> half(fc.box.half.begin(), fc.box.half.begin() + fc.box.dim);
        rec["center"] = center;
        rec["half"] = half;
        rec["group"] = fc.group;
        rec["measured"] = fc.resolved ? json(fc.measured) : json();
        rec["resolved"] = fc.resolved;
        rec["within_budget"] = fc.within_budget;
        os << rec.dump() << "\n";
    }
    json summary;
    summary["schema"] = 1;
    summary["kind"] = "cascade_summary";
    summary["N0"] = rep.N0;
    summary["Y"] = rep.Y;
    summary["steps"] = rep.steps;
    summary["delta"] = rep.delta;
    summary["good_threshold"] = rep.good_threshold;
    summary["good_fraction"] = rep.good_fraction;
    summary["good_half"] = rep.good_half;
    summary["budget_violations"] = rep.budget_violations;
    summary["unresolved"] = rep.unresolved;
    summary["vacuous_lemma3"] = rep.vacuous_lemma3;
    std::vector<std::string> theo;
    for (const auto& c : rep.theoretical_counts) theo.push_back(c.dec);
    summary["theoretical_counts"] = theo;
    os << summary.dump() << "\n";
}

}  // namespace nlab
