// nodal-lab command line: thin shell over the C API.

#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nodal_lab.h"

namespace {

struct ConfigDeleter {
    void operator()(nlab_config* c) const { nlab_config_destroy(c); }
};
using ConfigPtr = std::unique_ptr<nlab_config, ConfigDeleter>;

int die(const char* context) {
    std::fprintf(stderr, "nodal-lab: %s: %s\n", context, nlab_last_error());
    return 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"nodal-lab: nodal sets, doubling indices, and scaling sweeps on model manifolds"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    double lambda_max = -1.0;
    double lambda_min = -1.0;
    long long seed = -1;
    int jobs = 0;
    int resolution = -1;
    std::string manifold;
    std::string family;
    std::vector<std::string> overrides;

    app.add_option("--config", config_path, "configuration file (plain-text sections)");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--lambda-max", lambda_max, "largest eigenvalue target");
    app.add_option("--lambda-min", lambda_min, "smallest eigenvalue target");
    app.add_option("--seed", seed, "base seed (NODAL_LAB_SEED overrides)");
    app.add_option("--jobs", jobs, "worker threads (0 = hardware)");
    app.add_option("--resolution", resolution, "grid resolution override (0 = rule)");
    app.add_option("--manifold", manifold, "torus2 | sphere2 | torus3");
    app.add_option("--family", family, "random | product | sectoral | axis");
    app.add_option("--set", overrides, "extra section.key=value overrides")->take_all();

    for (const char* name : {"sweep", "cascade", "doubling", "nodal", "verify", "fit", "report"})
        app.add_subcommand(name)->fallthrough();

    CLI11_PARSE(app, argc, argv);
    const std::string command = app.get_subcommands().front()->get_name();

    ConfigPtr cfg;
    {
        nlab_config* raw = nullptr;
        const nlab_status rc = config_path.empty() ? nlab_config_create(&raw)
                                                   : nlab_config_load(config_path.c_str(), &raw);
        if (rc != NLAB_OK) return die("config");
        cfg.reset(raw);
    }

    auto set = [&](const char* key, const std::string& value) -> bool {
        if (nlab_config_set(cfg.get(), key, value.c_str()) != NLAB_OK) {
            die(key);
            return false;
        }
        return true;
    };
    if (!out_dir.empty() && !set("experiment.out", out_dir)) return 2;
    if (lambda_max > 0 && !set("experiment.lambda_max", std::to_string(lambda_max))) return 2;
    if (lambda_min > 0 && !set("experiment.lambda_min", std::to_string(lambda_min))) return 2;
    if (seed >= 0 && !set("experiment.seed", std::to_string(seed))) return 2;
    if (jobs > 0 && !set("experiment.jobs", std::to_string(jobs))) return 2;
    if (resolution >= 0 && !set("experiment.resolution", std::to_string(resolution))) return 2;
    if (!manifold.empty() && !set("experiment.manifold", manifold)) return 2;
    if (!family.empty() && !set("experiment.family", family)) return 2;
    for (const auto& kv : overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) {
            std::fprintf(stderr, "nodal-lab: --set expects key=value, got '%s'\n", kv.c_str());
            return 2;
        }
        if (!set(kv.substr(0, eq).c_str(), kv.substr(eq + 1))) return 2;
    }
    if (nlab_config_apply_env(cfg.get()) != NLAB_OK) return die("env");

    char* summary = nullptr;
    int exit_code = 0;
    const nlab_status rc = nlab_run(cfg.get(), command.c_str(), &summary, &exit_code);
    if (summary) {
        std::printf("%s\n", summary);
        nlab_string_free(summary);
    }
    if (rc != NLAB_OK && exit_code == 0) return die(command.c_str());
    return exit_code;
}
