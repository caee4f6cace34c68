#ifndef NODALLAB_RUNNER_HPP
#define NODALLAB_RUNNER_HPP

#include "nodallab/config.hpp"
#include "nodallab/nodal.hpp"
#include "nodallab/records.hpp"

namespace nlab {

struct ExponentFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    int point_count = 0;
};

// Ordinary least squares on (ln x, ln y); requires >= 3 distinct x.
ExponentFit fit_loglog(const std::vector<std::pair<double, double>>& xy);

// Fit over ensemble medians per lambda for one record quantity.
ExponentFit fit_exponent(const std::vector<Record>& records, const std::string& quantity);

// Geometric lambda targets snapped to the nearest true eigenvalue (deduplicated).
// family-aware: "product" restricts Torus2 to n,m >= 1 products, "axis"
// restricts Torus3 to k^2, "sectoral" uses l(l+1).
std::vector<double> select_eigenvalues(const ExperimentConfig& cfg);

// Deterministic member of the configured eigenfunction family.
Eigenfunction make_family_member(const ExperimentConfig& cfg, double lambda, std::uint64_t seed);

// Nodal-measure sweep with keyed resume; returns the merged record set.
std::vector<Record> sweep_nodal_measure(const ExperimentConfig& cfg);

// Max tilde index over a wavelength-scale cube panel, one record per lambda.
std::vector<Record> df_doubling_sweep(const ExperimentConfig& cfg);

struct Pipeline2DReport {
    double lambda = 0.0;
    std::uint64_t seed = 0;
    int squares_per_axis = 0;
    double side = 0.0;
    std::vector<double> per_square_length;
    std::vector<double> per_square_tilde;  // tilde index of the 100-dilated square
    double total_length = 0.0;
    double total_sqrt_tilde = 0.0;
    double max_implied = 0.0;  // max length / sqrt(tilde)
    std::vector<long long> halving_bins;   // squares per halving bin of max tilde
    std::vector<double> theoretical_bins;  // binomial counts scaled to the square count
    double bound_series = 0.0;             // (Y - 1 + 2^{-1/2})^j
    int skipped = 0;
};

Pipeline2DReport pipeline_2d_upper(const ExperimentConfig& cfg, double lambda, std::uint64_t seed);

struct Pipeline3DReport {
    double lambda = 0.0;
    std::uint64_t seed = 0;
    int cubes_per_axis = 0;
    double side = 0.0;
    long long cubes = 0;
    long long with_zero = 0;
    long long density_violations = 0;  // cubes whose inner fraction shows no sign change
    long long good = 0;                // zero present and index below the threshold
    long long empty_good = 0;          // findings: good cube with no local area
    double threshold = 0.0;
    double total_local_area = 0.0;  // sum of per-cube local extractions
    double global_area = 0.0;       // one global extraction
    double partition_rel_diff = 0.0;
    double min_good_c2 = 0.0;  // min over good cubes of area * lambda * N
};

Pipeline3DReport pipeline_3d_lower(const ExperimentConfig& cfg, double lambda, std::uint64_t seed);

struct VerifyItem {
    std::string name;
    bool pass = false;
    bool blocking = true;
    std::string detail;
};

struct VerifySummary {
    std::vector<VerifyItem> items;
    int blocking_failures = 0;
};

// Lemma-check suites over randomized sweeps; release-blocking failures set the
// nonzero exit code of the verify subcommand.
VerifySummary run_verify(const ExperimentConfig& cfg);

// Largest epsilon for which the weak-max factor-2 sweep stays violation-free
// (bisection over [0.05, 1.6]; the configured default must survive it).
double calibrate_epsilon(const ExperimentConfig& cfg, int balls = 120);

// CLI entry: runs one subcommand (sweep, cascade, doubling, nodal, verify,
// fit, report) and produces a JSON summary. Returns the process exit code.
int run_command(const ExperimentConfig& cfg, const std::string& command, std::string& summary_json);

}  // namespace nlab

#endif
