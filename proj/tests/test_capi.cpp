#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>

#include "nodal_lab.h"

TEST_CASE("capi: version and error strings") {
    CHECK(std::string(nlab_version()) == "1.0.0");
    CHECK(nlab_last_error() != nullptr);
}

TEST_CASE("capi: config lifecycle and overrides") {
    nlab_config* cfg = nullptr;
    REQUIRE(nlab_config_create(&cfg) == NLAB_OK);
    CHECK(nlab_config_set(cfg, "experiment.manifold", "sphere2") == NLAB_OK);
    CHECK(nlab_config_set(cfg, "doubling.l", "7") == NLAB_OK);
    CHECK(nlab_config_set(cfg, "experiment.bogus", "1") == NLAB_EINVAL);
    CHECK(std::string(nlab_last_error()).find("unknown key") != std::string::npos);
    char* dump = nullptr;
    REQUIRE(nlab_config_dump(cfg, &dump) == NLAB_OK);
    CHECK(std::string(dump).find("manifold = sphere2") != std::string::npos);
    CHECK(std::string(dump).find("l = 7") != std::string::npos);
    nlab_string_free(dump);
    nlab_config_destroy(cfg);
}

TEST_CASE("capi: eigenfunction synthesis and evaluation") {
    nlab_eigenfunction* u = nullptr;
    REQUIRE(nlab_synth_random("torus2", 25.0, 7, &u) == NLAB_OK);
    double lambda = 0.0;
    CHECK(nlab_eigen_lambda(u, &lambda) == NLAB_OK);
    CHECK(lambda == 25.0);
    const double p[2] = {1.0, 2.0};
    double v1 = 0.0, v2 = 0.0;
    CHECK(nlab_eigen_eval(u, p, 0, &v1) == NLAB_OK);
    nlab_eigenfunction* again = nullptr;
    REQUIRE(nlab_synth_random("torus2", 25.0, 7, &again) == NLAB_OK);
    CHECK(nlab_eigen_eval(again, p, 0, &v2) == NLAB_OK);
    CHECK(v1 == v2);
    nlab_eigenfunction_destroy(again);
    nlab_eigenfunction_destroy(u);

    nlab_eigenfunction* bad = nullptr;
    CHECK(nlab_synth_random("torus2", 3.0, 1, &bad) == NLAB_EINVAL);
    CHECK(nlab_synth_random("klein", 4.0, 1, &bad) == NLAB_EINVAL);
}

TEST_CASE("capi: named families") {
    nlab_eigenfunction* u = nullptr;
    REQUIRE(nlab_make_named("product:3,4", &u) == NLAB_OK);
    double lambda = 0.0;
    nlab_eigen_lambda(u, &lambda);
    CHECK(lambda == 25.0);
    const double peak[2] = {M_PI / 6.0, M_PI / 8.0};
    double v = 0.0;
    nlab_eigen_eval(u, peak, 0, &v);
    CHECK(v == doctest::Approx(1.0).epsilon(1e-12));
    nlab_eigenfunction_destroy(u);
    CHECK(nlab_make_named("nonsense", &u) == NLAB_EINVAL);
}

TEST_CASE("capi: eigenvalue listing") {
    double lambdas[8];
    int mults[8];
    size_t count = 0;
    REQUIRE(nlab_eigenvalue_list("torus2", 2.0, lambdas, mults, 8, &count) == NLAB_OK);
    REQUIRE(count == 3);
    CHECK(lambdas[0] == 0.0);
    CHECK(mults[1] == 4);
    CHECK(mults[2] == 4);
}

TEST_CASE("capi: nodal extraction round trip") {
    nlab_eigenfunction* u = nullptr;
    REQUIRE(nlab_make_named("product:3,4", &u) == NLAB_OK);
    nlab_nodal_set* set = nullptr;
    REQUIRE(nlab_extract_nodal(u, 256, &set) == NLAB_OK);
    double measure = 0.0;
    CHECK(nlab_nodal_measure(set, &measure) == NLAB_OK);
    CHECK(measure == doctest::Approx(4.0 * M_PI * 7.0).epsilon(0.02));
    size_t elements = 0;
    CHECK(nlab_nodal_elements(set, &elements) == NLAB_OK);
    CHECK(elements > 100);
    const auto path = std::filesystem::temp_directory_path() / "nlab_capi_nodal.txt";
    CHECK(nlab_nodal_write(set, path.string().c_str()) == NLAB_OK);
    CHECK(std::filesystem::file_size(path) > 1000);
    std::filesystem::remove(path);
    nlab_nodal_set_destroy(set);

    // resolution rule enforced through the C surface as well
    nlab_nodal_set* tiny = nullptr;
    CHECK(nlab_extract_nodal(u, 4, &tiny) == NLAB_EINVAL);
    nlab_eigenfunction_destroy(u);
}

TEST_CASE("capi: doubling index and density radius") {
    nlab_eigenfunction* u = nullptr;
    REQUIRE(nlab_make_named("product:2,2", &u) == NLAB_OK);
    const double center[3] = {M_PI, M_PI, 0.0};
    double n_plain = 0.0, n_lifted = 0.0;
    CHECK(nlab_doubling_index(u, center, 0.1, 0, &n_plain) == NLAB_OK);
    CHECK(n_plain >= 0.0);
    CHECK(nlab_doubling_index(u, center, 0.1, 1, &n_lifted) == NLAB_OK);
    CHECK(n_lifted >= 0.0);
    double radius = 0.0;
    CHECK(nlab_density_radius(u, 100, 3, &radius) == NLAB_OK);
    CHECK(radius == doctest::Approx(M_PI / 4.0).epsilon(0.08));
    nlab_eigenfunction_destroy(u);
}

TEST_CASE("capi: run command produces a summary and exit code") {
    nlab_config* cfg = nullptr;
    REQUIRE(nlab_config_create(&cfg) == NLAB_OK);
    const std::string out = (std::filesystem::temp_directory_path() / "nlab_capi_run").string();
    std::filesystem::remove_all(out);
    nlab_config_set(cfg, "experiment.out", out.c_str());
    nlab_config_set(cfg, "experiment.lambda_min", "9");
    nlab_config_set(cfg, "experiment.lambda_max", "25");
    nlab_config_set(cfg, "experiment.lambda_count", "3");
    nlab_config_set(cfg, "experiment.ensemble", "1");
    char* summary = nullptr;
    int exit_code = -1;
    REQUIRE(nlab_run(cfg, "sweep", &summary, &exit_code) == NLAB_OK);
    CHECK(exit_code == 0);
    CHECK(std::string(summary).find("nodal_length") != std::string::npos);
    nlab_string_free(summary);

    summary = nullptr;
    CHECK(nlab_run(cfg, "wat", &summary, &exit_code) == NLAB_EINVAL);
    if (summary) nlab_string_free(summary);
    nlab_config_destroy(cfg);
    std::filesystem::remove_all(out);
}
