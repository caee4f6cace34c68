#include "nodallab/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

namespace nlab {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& v) {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("config: bad number '" + v + "'");
    return d;
}

int to_int(const std::string& v) {
    std::size_t pos = 0;
    const long d = std::stol(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("config: bad integer '" + v + "'");
    return int(d);
}

}  // namespace

void apply_config_kv(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
    const auto dot = key.find('.');
    const std::string section = dot == std::string::npos ? "experiment" : key.substr(0, dot);
    const std::string name = dot == std::string::npos ? key : key.substr(dot + 1);

    if (section == "experiment") {
        if (name == "manifold") cfg.manifold = manifold_from_name(value);
        else if (name == "lambda_min") cfg.lambda_min = to_double(value);
        else if (name == "lambda_max") cfg.lambda_max = to_double(value);
        else if (name == "lambda_count") cfg.lambda_count = to_int(value);
        else if (name == "ensemble") cfg.ensemble = to_int(value);
        else if (name == "seed") cfg.seed = std::uint64_t(std::stoull(value));
        else if (name == "resolution") cfg.resolution = to_int(value);
        else if (name == "family") cfg.family = value;
        else if (name == "out") cfg.out_dir = value;
        else if (name == "jobs") cfg.jobs = to_int(value);
        else throw std::invalid_argument("config: unknown key experiment." + name);
        return;
    }
    if (section == "doubling") {
        if (name == "l") cfg.doubling.l = to_int(value);
        else if (name == "order") cfg.doubling.quad.order = to_int(value);
        else if (name == "tilde_depth") cfg.doubling.tilde_depth = to_int(value);
        else if (name == "A") cfg.doubling.A = to_int(value);
        else if (name == "C0") cfg.doubling.C0 = to_double(value);
        else if (name == "C7") cfg.doubling.C7 = to_double(value);
        else if (name == "min_order") cfg.doubling.min_order = to_int(value);
        else if (name == "max_order") cfg.doubling.max_order = to_int(value);
        else if (name == "force_quadrature") cfg.doubling.force_quadrature = to_int(value) != 0;
        else throw std::invalid_argument("config: unknown key doubling." + name);
        return;
    }
    if (section == "cascade") {
        if (name == "Y") cfg.cascade.Y = to_int(value);
        else if (name == "steps") cfg.cascade.j = to_int(value);
        else if (name == "K") cfg.cascade.K = to_int(value);
        else if (name == "delta") cfg.cascade.delta = to_double(value);
        else if (name == "n0_depth") cfg.cascade.n0_depth = to_int(value);
        else if (name == "leaf_depth") cfg.cascade.leaf_depth = to_int(value);
        else if (name == "tol") cfg.cascade.tol = to_double(value);
        else throw std::invalid_argument("config: unknown key cascade." + name);
        return;
    }
    if (section == "wavescale") {
        if (name == "epsilon") cfg.wavescale.epsilon = to_double(value);
        else if (name == "C1") cfg.wavescale.C1 = to_double(value);
        else if (name == "C2") cfg.wavescale.C2 = to_double(value);
        else if (name == "harnack_floor") cfg.wavescale.harnack_floor = to_double(value);
        else if (name == "boundary_samples") cfg.wavescale.boundary_samples = to_int(value);
        else if (name == "tol") cfg.wavescale.tol = to_double(value);
        else throw std::invalid_argument("config: unknown key wavescale." + name);
        return;
    }
    if (section == "pipeline3d") {
        if (name == "cube_scale") cfg.cube_scale = to_double(value);
        else if (name == "inner_fraction") cfg.inner_fraction = to_double(value);
        else if (name == "c1") cfg.pipeline_c1 = to_double(value);
        else throw std::invalid_argument("config: unknown key pipeline3d." + name);
        return;
    }
    if (section == "pipeline2d") {
        if (name == "tilde_depth") cfg.pipeline2d_tilde_depth = to_int(value);
        else throw std::invalid_argument("config: unknown key pipeline2d." + name);
        return;
    }
    if (section == "df") {
        if (name == "grid") cfg.df_grid = to_int(value);
        else if (name == "panel_scale") cfg.df_panel_scale = to_double(value);
        else if (name == "bound") cfg.df_bound = to_double(value);
        else throw std::invalid_argument("config: unknown key df." + name);
        return;
    }
    if (section == "nodal") {
        if (name == "c_dens") cfg.c_dens = to_double(value);
        else throw std::invalid_argument("config: unknown key nodal." + name);
        return;
    }
    if (section == "verify") {
        if (name == "balls") cfg.verify_balls = to_int(value);
        else if (name == "trig") cfg.verify_trig = to_int(value);
        else throw std::invalid_argument("config: unknown key verify." + name);
        return;
    }
    throw std::invalid_argument("config: unknown section " + section);
}

ExperimentConfig load_config(const std::filesystem::path& file) {
    std::ifstream is(file);
    if (!is) throw std::runtime_error("config: cannot open " + file.string());
    ExperimentConfig cfg;
    std::string line, section = "experiment";
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto comment = line.find_first_of("#;");
        if (comment != std::string::npos) line = line.substr(0, comment);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw std::invalid_argument("config line " + std::to_string(lineno) + ": bad section");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        apply_config_kv(cfg, section + "." + key, value);
    }
    return cfg;
}

std::string dump_config(const ExperimentConfig& cfg) {
    std::ostringstream os;
    os.precision(17);
    os << "[experiment]\n";
    os << "manifold = " << manifold_name(cfg.manifold) << "\n";
    os << "lambda_min = " << cfg.lambda_min << "\n";
    os << "lambda_max = " << cfg.lambda_max << "\n";
    os << "lambda_count = " << cfg.lambda_count << "\n";
    os << "ensemble = " << cfg.ensemble << "\n";
    os << "seed = " << cfg.seed << "\n";
    os << "resolution = " << cfg.resolution << "\n";
    os << "family = " << cfg.family << "\n";
    os << "out = " << cfg.out_dir << "\n";
    os << "jobs = " << cfg.jobs << "\n\n";
    os << "[doubling]\n";
    os << "l = " << cfg.doubling.l << "\n";
    os << "order = " << cfg.doubling.quad.order << "\n";
    os << "tilde_depth = " << cfg.doubling.tilde_depth << "\n";
    os << "A = " << cfg.doubling.A << "\n";
    os << "C0 = " << cfg.doubling.C0 << "\n";
    os << "C7 = " << cfg.doubling.C7 << "\n";
    os << "min_order = " << cfg.doubling.min_order << "\n";
    os << "max_order = " << cfg.doubling.max_order << "\n\n";
    os << "[cascade]\n";
    os << "Y = " << cfg.cascade.Y << "\n";
    os << "steps = " << cfg.cascade.j << "\n";
    os << "K = " << cfg.cascade.K << "\n";
    os << "delta = " << cfg.cascade.delta << "\n";
    os << "n0_depth = " << cfg.cascade.n0_depth << "\n";
    os << "leaf_depth = " << cfg.cascade.leaf_depth << "\n";
    os << "tol = " << cfg.cascade.tol << "\n\n";
    os << "[wavescale]\n";
    os << "epsilon = " << cfg.wavescale.epsilon << "\n";
    os << "C1 = " << cfg.wavescale.C1 << "\n";
    os << "C2 = " << cfg.wavescale.C2 << "\n";
    os << "harnack_floor = " << cfg.wavescale.harnack_floor << "\n";
    os << "boundary_samples = " << cfg.wavescale.boundary_samples << "\n\n";
    os << "[pipeline3d]\n";
    os << "cube_scale = " << cfg.cube_scale << "\n";
    os << "inner_fraction = " << cfg.inner_fraction << "\n";
    os << "c1 = " << cfg.pipeline_c1 << "\n\n";
    os << "[pipeline2d]\n";
    os << "tilde_depth = " << cfg.pipeline2d_tilde_depth << "\n\n";
    os << "[df]\n";
    os << "grid = " << cfg.df_grid << "\n";
    os << "panel_scale = " << cfg.df_panel_scale << "\n";
    os << "bound = " << cfg.df_bound << "\n\n";
    os << "[nodal]\n";
    os << "c_dens = " << cfg.c_dens << "\n\n";
    os << "[verify]\n";
    os << "balls = " << cfg.verify_balls << "\n";
    os << "trig = " << cfg.verify_trig << "\n";
    return os.str();
}

void apply_env_overrides(ExperimentConfig& cfg) {
    if (const char* env = std::getenv("NODAL_LAB_SEED")) {
        cfg.seed = std::uint64_t(std::stoull(env));
    }
}

}  // namespace nlab
