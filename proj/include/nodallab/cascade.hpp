#ifndef NODALLAB_CASCADE_HPP
#define NODALLAB_CASCADE_HPP

#include <iosfwd>
#include <string>

#include "nodallab/doubling.hpp"

namespace nlab {

struct CascadeParams {
    long long Y = 16;  // subcubes per step per cube
    int j = 3;         // number of steps; B = Y^j final cubes
    int K = 2;         // recorded subdivision constant (K > 2*C0 in the source argument)
    double delta = 0.0;  // 0 => derived from Y (largest delta with Y^delta < 2^{1/(4Y)})
    DoublingParams dp;
    int n0_depth = 2;    // tilde probing depth for N0 on the root cube
    int leaf_depth = 1;  // tilde probing depth for per-cube measured indices
    double tol = 1e-3;
    int jobs = 0;  // 0 => hardware concurrency

    void validate() const;
};

// Largest exponent delta with Y^delta < 2^{1/(4Y)} (up to a 0.999 safety factor).
double default_delta(long long Y);

// Exact big-integer value rendered in decimal with a double approximation.
struct BigCount {
    std::string dec;
    double approx = 0.0;
};

// Group sizes [C(j,k) (Y-1)^{j-k}]_{k=0..j}; exact arithmetic.
std::vector<BigCount> binomial_group_sizes(int j, long long Y);
// Exact check: the group sizes sum to Y^j.
bool binomial_groups_sum_exact(int j, long long Y);

// Exact tail probability P( Bin(j, 1/Y) >= j/(2Y) ), computed with rationals.
double lln_tail(int j, long long Y);
bool lln_tail_at_least_half(int j, long long Y);  // exact comparison
// Smallest j0 such that the tail is >= 1/2 for every j in [j0, horizon]
// (the tail tends to 1, so the horizon certifies the finite range).
int lln_j0(long long Y, int horizon = 3000);

struct CascadeCube {
    Box box;
    int group = 0;          // number of budget halvings along the ancestry
    double measured = 0.0;  // tilde index at leaf_depth
    bool resolved = true;
    bool within_budget = true;
};

struct CascadeReport {
    double N0 = 0.0;
    long long Y = 0;
    int steps = 0;
    double delta = 0.0;
    double good_threshold = 0.0;  // max(N0 / B^delta, 10*dim)
    // constructed group occupancy per step (counts[k] = cubes with k halvings)
    std::vector<std::vector<long long>> per_step_counts;
    std::vector<BigCount> theoretical_counts;  // C(j,k)(Y-1)^{j-k}
    std::vector<CascadeCube> final_cubes;      // deterministic lexicographic order
    double good_fraction = 0.0;
    long long budget_violations = 0;  // measured > budget + tol (findings, not errors)
    long long unresolved = 0;         // per-cube quadrature failures
    bool good_half = false;           // good_fraction >= 1/2
    bool vacuous_lemma3 = false;      // N0 / B^delta < 2*dim: source precondition fails
};

// Runs j subdivision steps from Q, measures every cube, propagates budgets
// (each parent promotes its min-index child), and assembles the report.
CascadeReport run_cascade(const Lifted& h, const Cube& Q, const CascadeParams& cp,
                          const ChartSpec& chart = ChartSpec{});
CascadeReport run_cascade(const MassSource& ms, const Cube& Q, const CascadeParams& cp,
                          const ChartSpec& chart = ChartSpec{});

// Fraction of the B-cube partition of Q (on the base manifold) whose doubling
// index is at most `threshold`. B must factor as a perfect power for the
// configured per-step branching.
double good_cube_fraction(const Eigenfunction& u, const Cube& Q, long long B, double threshold,
                          const CascadeParams& cp, const ChartSpec& chart = ChartSpec{});

// Line-delimited records: one object per final cube plus a summary object.
void write_cascade_records(const CascadeReport& rep, std::ostream& os);

}  // namespace nlab

#endif
