#ifndef NODALLAB_CONFIG_HPP
#define NODALLAB_CONFIG_HPP

#include <filesystem>
#include <string>

#include "nodallab/cascade.hpp"
#include "nodallab/doubling.hpp"
#include "nodallab/wavescale.hpp"

namespace nlab {

// Full experiment configuration. The on-disk format is plain text, one
// `[section]` per module with `key = value` lines and `#` comments.
struct ExperimentConfig {
    Manifold manifold = Manifold::Torus2;
    double lambda_min = 100.0;
    double lambda_max = 10000.0;
    int lambda_count = 20;  // geometric targets snapped to true eigenvalues
    int ensemble = 5;       // seeds per eigenvalue
    std::uint64_t seed = 1;
    int resolution = 0;     // 0: the oscillation rule decides
    std::string family = "random";  // random | product | sectoral | axis
    std::string out_dir = "out";
    int jobs = 0;

    DoublingParams doubling;
    CascadeParams cascade;
    WavescaleParams wavescale;

    // 3D pipeline
    double cube_scale = 20.0;      // wavelength cube side = cube_scale / sqrt(lambda)
    double inner_fraction = 0.1;   // zero search inside this central fraction
    double pipeline_c1 = 4.0;      // good-cube threshold factor C1 * lambda^{1/2 - 2 delta}

    // Donnelly-Fefferman doubling sweep
    int df_grid = 8;               // cubes per axis in the wavelength panel
    double df_panel_scale = 8.0;   // panel half-side = scale / sqrt(lambda)
    double df_bound = 3.5;         // asserted bound for maxTilde / sqrt(lambda)

    // nodal density: assert density_radius <= c_dens / sqrt(lambda)
    double c_dens = 4.0;

    // verify sweeps
    int verify_balls = 500;
    int verify_trig = 200;

    // 2D upper pipeline
    int pipeline2d_tilde_depth = 2;
};

// Applies "section.key" = value; throws on unknown keys or bad values.
void apply_config_kv(ExperimentConfig& cfg, const std::string& key, const std::string& value);

ExperimentConfig load_config(const std::filesystem::path& file);
std::string dump_config(const ExperimentConfig& cfg);

// NODAL_LAB_SEED overrides the configured seed when set.
void apply_env_overrides(ExperimentConfig& cfg);

}  // namespace nlab

#endif
