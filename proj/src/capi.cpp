#include "nodal_lab.h"

#include <cstring>
#include <fstream>

#include "nodallab/runner.hpp"

using namespace nlab;

namespace {

thread_local std::string g_last_error;

nlab_status fail(nlab_status code, const char* what) {
    g_last_error = what;
    return code;
}

template <class Fn>
nlab_status guarded(Fn&& fn) {
    try {
        return fn();
    } catch (const NumericError& e) {
        return fail(NLAB_ENUMERIC, e.what());
    } catch (const std::invalid_argument& e) {
        return fail(NLAB_EINVAL, e.what());
    } catch (const std::filesystem::filesystem_error& e) {
        return fail(NLAB_EIO, e.what());
    } catch (const std::exception& e) {
        return fail(NLAB_EUNKNOWN, e.what());
    }
}

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

}  // namespace

struct nlab_config {
    ExperimentConfig cfg;
};

struct nlab_eigenfunction {
    Eigenfunction u;
};

struct nlab_nodal_set {
    NodalSet set;
};

extern "C" {

const char* nlab_version(void) { return "1.0.0"; }

const char* nlab_last_error(void) { return g_last_error.c_str(); }

void nlab_string_free(char* s) { std::free(s); }

nlab_status nlab_config_create(nlab_config** out) {
    if (!out) return fail(NLAB_EINVAL, "null output pointer");
    return guarded([&] {
        *out = new nlab_config{};
        return NLAB_OK;
    });
}

nlab_status nlab_config_load(const char* path, nlab_config** out) {
    if (!path || !out) return fail(NLAB_EINVAL, "null argument");
    return guarded([&] {
        auto cfg = std::make_unique<nlab_config>();
        cfg->cfg = load_config(path);
        *out = cfg.release();
        return NLAB_OK;
    });
}

nlab_status nlab_config_set(nlab_config* cfg, const char* key, const char* value) {
    if (!cfg || !key || !value) return fail(NLAB_EINVAL, "null argument");
    return guarded([&] {
        apply_config_kv(cfg->cfg, key, value);
        return NLAB_OK;
    });
}

nlab_status nlab_config_apply_env(nlab_config* cfg) {
    if (!cfg) return fail(NLAB_EINVAL, "null argument");
    return guarded([&] {
        apply_env_overrides(cfg->cfg);
        return NLAB_OK;
    });
}

nlab_status nlab_config_dump(const nlab_config* cfg, char** out) {
    if (!cfg || !out) return fail(NLAB_EINVAL, "null argument");
    return guarded([&] {
        *out = dup_string(dump_config(cfg->cfg));
        return NLAB_OK;
    });
}

void nlab_config_destroy(nlab_config* cfg) { delete cfg; }

nlab_status nlab_run(const nlab_config* cfg, const char* command, char** summary, int* exit_code) {
    if (!cfg || !command || !summary || !exit_code) return fail(NLAB_EINVAL, "null argument");
    return guarded([&] {
        std::string json;
        *exit_code = run_command(cfg->cfg, command, json);
        *summary = dup_string(json);
        if (*exit_code == 2) return fail(NLAB_EINVAL, "command failed; see summary");
        if (*exit_code != 0) return fail(NLAB_EFAILED, "release-blocking check failed");
        return NLAB_OK;
    });
}

nlab_status nlab_synth_random(const char* manifold, double lambda, uint64_t seed,
                              nlab_eigenfunction** out) {
    if (!manifold || !out) return fail(NLAB_EINVAL, "null argument");
    return guarded([&] {
        auto holder = std::make_unique<nlab_eigenfunction>(
            nlab_eigenfunction{synth_random(manifold_from_name(manifold), lambda, seed)});
        *out = holder.release();
        return NLAB_OK;
    });
}

nlab_status nlab_make_named(const char* spec, nlab_eigenfunction** out) {
    if (!spec || !out) return fail(NLAB_EINVAL, "null argument");
    return guarded([&] {
        const std::string s = spec;
        const auto colon = s.find(':');
        if (colon == std::string::npos) throw std::invalid_argument("expected family:args");
        const std::string family = s.substr(0, colon);
        const std::string args = s.substr(colon + 1);
        Eigenfunction u = [&] {
            if (family == "product") {
                const auto comma = args.find(',');
                if (comma == std::string::npos) throw std::invalid_argument("product needs n,m");
                return torus2_product(std::stoi(args.substr(0, comma)),
                                      std::stoi(args.substr(comma + 1)));
            }
            if (family == "axis") return torus3_axis_wave(std::stoi(args));
            if (family == "sectoral") return sphere_sectoral(std::stoi(args));
            throw std::invalid_argument("unknown family " + family);
        }();
        *out = new nlab_eigenfunction{std::move(u)};
        return NLAB_OK;
    });
}

nlab_status nlab_eigen_lambda(const nlab_eigenfunction* u, double* lambda) {
    if (!u || !lambda) return fail(NLAB_EINVAL, "null argument");
    *lambda = u->u.lambda();
    return NLAB_OK;
}

nlab_status nlab_eigen_eval(const nlab_eigenfunction* u, const double* point, int chart,
                            double* value) {
    if (!u || !point || !value) return fail(NLAB_EINVAL, "null argument");
    return guarded([&] {
        const ChartKind kind = chart == 1 ? ChartKind::SphereCapSouth : ChartKind::SphereCapNorth;
        *value = u->u.evaluate(point, u->u.manifold() == Manifold::Sphere2 ? kind
                                                                           : ChartKind::Flat);
        return NLAB_OK;
    });
}

void nlab_eigenfunction_destroy(nlab_eigenfunction* u) { delete u; }

nlab_status nlab_eigenvalue_list(const char* manifold, double lambda_max, double* lambdas,
                                 int* multiplicities, size_t capacity, size_t* count) {
    if (!manifold || !count) return fail(NLAB_EINVAL, "null argument");
    return guarded([&] {
        const auto list = eigenvalue_list(manifold_from_name(manifold), lambda_max);
        *count = list.size();
        const size_t n = std::min(capacity, list.size());
        for (size_t i = 0; i < n; ++i) {
            if (lambdas) lambdas[i] = list[i].first;
            if (multiplicities) multiplicities[i] = list[i].second;
        }
        return NLAB_OK;
    });
}

nlab_status nlab_extract_nodal(const nlab_eigenfunction* u, int resolution, nlab_nodal_set** out) {
    if (!u || !out) return fail(NLAB_EINVAL, "null argument");
    return guarded([&] {
        NodalSet set = u->u.dim() == 2 ? extract_nodal_2d(u->u, resolution)
                                       : extract_nodal_3d(u->u, resolution);
        *out = new nlab_nodal_set{std::move(set)};
        return NLAB_OK;
    });
}

nlab_status nlab_nodal_measure(const nlab_nodal_set* set, double* measure) {
    if (!set || !measure) return fail(NLAB_EINVAL, "null argument");
    *measure = set->set.total_measure;
    return NLAB_OK;
}

nlab_status nlab_nodal_elements(const nlab_nodal_set* set, size_t* elements) {
    if (!set || !elements) return fail(NLAB_EINVAL, "null argument");
    *elements = set->set.segments.size() + set->set.triangles.size();
    return NLAB_OK;
}

nlab_status nlab_nodal_write(const nlab_nodal_set* set, const char* path) {
    if (!set || !path) return fail(NLAB_EINVAL, "null argument");
    return guarded([&] {
        std::ofstream os(path, std::ios::trunc);
        if (!os) throw std::filesystem::filesystem_error(
            "cannot open", path, std::make_error_code(std::errc::io_error));
        write_nodal_set(set->set, os);
        return NLAB_OK;
    });
}

void nlab_nodal_set_destroy(nlab_nodal_set* set) { delete set; }

nlab_status nlab_doubling_index(const nlab_eigenfunction* u, const double* center,
                                double half_side, int lifted, double* N) {
    if (!u || !center || !N) return fail(NLAB_EINVAL, "null argument");
    return guarded([&] {
        DoublingParams p;
        Cube q;
        q.half_side = half_side;
        if (lifted) {
            Lifted h = lift(u->u);
            q.dim = h.dim();
            for (int d = 0; d < q.dim; ++d) q.center[d] = center[d];
            *N = doubling_index(lifted_mass(h, p), q, p).N;
        } else {
            q.dim = u->u.dim();
            for (int d = 0; d < q.dim; ++d) q.center[d] = center[d];
            const ChartSpec chart = u->u.manifold() == Manifold::Sphere2
                                        ? cap_chart(ChartKind::SphereCapNorth)
                                        : flat_chart();
            *N = doubling_index(eigen_mass(u->u, p, chart.kind), q, p, chart).N;
        }
        return NLAB_OK;
    });
}

nlab_status nlab_density_radius(const nlab_eigenfunction* u, int samples, uint64_t seed,
                                double* radius) {
    if (!u || !radius) return fail(NLAB_EINVAL, "null argument");
    return guarded([&] {
        *radius = density_radius(u->u, samples, seed);
        return NLAB_OK;
    });
}

}  // extern "C"
