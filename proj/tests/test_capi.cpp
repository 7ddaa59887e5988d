#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "fq/fq.h"

namespace {

nlohmann::json take_json(char* s) {
    auto j = nlohmann::json::parse(s);
    fq_string_free(s);
    return j;
}

std::string temp_file(const char* name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("status names and version") {
    CHECK(std::string(fq_status_name(FQ_OK)) == "ok");
    CHECK(std::string(fq_status_name(FQ_ERR_NO_ORACLE)) == "no_oracle");
    CHECK(std::strlen(fq_version()) > 0);
}

TEST_CASE("errors come back as codes") {
    fq_space* space = nullptr;
    CHECK(fq_space_trapezoid(0.0, 1.0, 1, 2.0, 1, &space) == FQ_ERR_INVALID_ARGUMENT);
    CHECK(space == nullptr);
    CHECK(std::strlen(fq_last_error()) > 0);
    CHECK(fq_space_trapezoid(0.0, 1.0, 8, 2.0, 1, nullptr) == FQ_ERR_INVALID_ARGUMENT);

    fq_config* cfg = nullptr;
    CHECK(fq_config_parse("[space]\nbogus = 1\n", &cfg) == FQ_ERR_CONFIG);
    CHECK(std::string(fq_last_error()).find("bogus") != std::string::npos);
    CHECK(fq_config_load("/nonexistent/cfg.toml", &cfg) != FQ_OK);
    fq_space_free(nullptr);
    fq_sample_free(nullptr);
    fq_codebook_free(nullptr);
    fq_config_free(nullptr);
}

TEST_CASE("quantization round trip through the C interface") {
    fq_space* space = nullptr;
    REQUIRE(fq_space_trapezoid(0.0, 1.0, 65, 2.0, 1, &space) == FQ_OK);
    CHECK(fq_space_m(space) == 65);
    CHECK(fq_space_d(space) == 1);
    CHECK(fq_space_p(space) == 2.0);
    CHECK(fq_space_total_mass(space) == doctest::Approx(1.0));

    std::vector<double> ones(65, 1.0);
    double norm = 0.0;
    REQUIRE(fq_lp_norm(space, ones.data(), &norm) == FQ_OK);
    CHECK(norm == doctest::Approx(1.0).epsilon(1e-14));

    fq_sample* sample = nullptr;
    REQUIRE(fq_sample_simulate(space, "{\"kind\": \"brownian\"}", 2000, 5, &sample) == FQ_OK);
    CHECK(fq_sample_size(sample) == 2000);
    CHECK(fq_sample_data(sample)[0] == 0.0);
    fq_sample* bad = nullptr;
    CHECK(fq_sample_simulate(space, "{\"kind\": \"sheet\"}", 10, 5, &bad) != FQ_OK);
    CHECK(fq_sample_simulate(space, "{not json", 10, 5, &bad) != FQ_OK);

    fq_codebook* cb = nullptr;
    REQUIRE(fq_splitting(space, sample, 4, 2.0, 1, &cb) == FQ_OK);
    CHECK(fq_codebook_size(cb) == 4);

    std::vector<std::uint32_t> cells(2000);
    REQUIRE(fq_assign(cb, sample, 0, cells.data()) == FQ_OK);
    std::vector<int> counts(4, 0);
    for (auto c : cells) ++counts[c];
    for (int c : counts) CHECK(c > 0);

    double value = 0.0, se = 0.0;
    REQUIRE(fq_distortion(cb, sample, 2.0, 0, &value, &se) == FQ_OK);
    CHECK(value > 0.0);
    CHECK(value < 0.5);
    CHECK(se > 0.0);

    char* report = nullptr;
    REQUIRE(fq_distortion_report(cb, sample, 2.0, 0, &report) == FQ_OK);
    auto rep = take_json(report);
    CHECK(rep["value"].get<double>() == doctest::Approx(value).epsilon(1e-15));
    CHECK(rep["per_cell_mass"].size() == 4);

    char* stat = nullptr;
    REQUIRE(fq_stationarity(cb, sample, 2.0, &stat) == FQ_OK);
    CHECK(take_json(stat)["admissible"] == true);

    char* holder = nullptr;
    REQUIRE(fq_holder_fit(cb, 1, 0, &holder) == FQ_OK);
    CHECK(take_json(holder)["series"].size() == 4);

    // One more Lloyd run from the splitting result.
    fq_codebook* opt = nullptr;
    char* trace = nullptr;
    REQUIRE(fq_optimize(cb, sample, 2.0, "{\"max_iters\": 50, \"tol\": 1e-12}", &opt, &trace) == FQ_OK);
    auto tr = take_json(trace);
    CHECK(tr["iterations"].get<int>() >= 1);
    double v2 = 0.0;
    REQUIRE(fq_distortion(opt, sample, 2.0, 0, &v2, &se) == FQ_OK);
    CHECK(v2 <= value * (1.0 + 1e-12));
    CHECK(fq_optimize(cb, sample, 2.0, "{\"method\": \"newton\"}", &opt, &trace) != FQ_OK);

    // Persist and reload.
    const auto cb_file = temp_file("fq_capi_cb.bin");
    const auto smp_file = temp_file("fq_capi_sample.bin");
    REQUIRE(fq_codebook_save(opt, cb_file.c_str()) == FQ_OK);
    REQUIRE(fq_sample_save(sample, smp_file.c_str()) == FQ_OK);
    fq_codebook* cb2 = nullptr;
    fq_sample* s2 = nullptr;
    REQUIRE(fq_codebook_load(space, cb_file.c_str(), &cb2) == FQ_OK);
    REQUIRE(fq_sample_load(smp_file.c_str(), &s2) == FQ_OK);
    std::vector<double> a(4 * 65), b(4 * 65);
    REQUIRE(fq_codebook_copy(opt, a.data(), a.size()) == FQ_OK);
    REQUIRE(fq_codebook_copy(cb2, b.data(), b.size()) == FQ_OK);
    CHECK(a == b);
    CHECK(fq_codebook_copy(cb2, b.data(), 10) == FQ_ERR_INVALID_ARGUMENT);
    CHECK(std::memcmp(fq_sample_data(s2), fq_sample_data(sample), 2000 * 65 * sizeof(double)) == 0);

    // Dimension mismatch surfaces as its own code.
    fq_space* other = nullptr;
    REQUIRE(fq_space_trapezoid(0.0, 1.0, 33, 2.0, 1, &other) == FQ_OK);
    fq_codebook* small = nullptr;
    std::vector<double> zeros(33, 0.0);
    REQUIRE(fq_codebook_from_data(other, 1, zeros.data(), &small) == FQ_OK);
    CHECK(fq_distortion(small, sample, 2.0, 0, &value, &se) == FQ_ERR_DIMENSION_MISMATCH);

    fq_codebook_free(small);
    fq_space_free(other);
    fq_codebook_free(cb2);
    fq_sample_free(s2);
    fq_codebook_free(opt);
    fq_codebook_free(cb);
    fq_sample_free(sample);
    fq_space_free(space);
    std::remove(cb_file.c_str());
    std::remove(smp_file.c_str());
}

TEST_CASE("experiments through the C interface") {
    fq_config* cfg = nullptr;
    REQUIRE(fq_config_parse("[space]\nm = 65\n[quantizer]\nn = 3\n[sample]\nn_paths = 800\n", &cfg) == FQ_OK);
    REQUIRE(fq_config_set_seed(cfg, 11) == FQ_OK);
    REQUIRE(fq_config_set_output_dir(cfg, "") == FQ_OK);
    char* hash = nullptr;
    REQUIRE(fq_config_hash(cfg, &hash) == FQ_OK);
    CHECK(std::strlen(hash) == 16);
    fq_string_free(hash);
    char* canon = nullptr;
    REQUIRE(fq_config_canonical(cfg, &canon) == FQ_OK);
    CHECK(std::string(canon).find("seed = 11") != std::string::npos);
    fq_string_free(canon);

    char* summary = nullptr;
    REQUIRE(fq_run_quantize(cfg, &summary) == FQ_OK);
    auto s = take_json(summary);
    CHECK(s["n"] == 3);
    CHECK(s["distortion"].get<double>() < 0.5);
    CHECK(s["files"].empty());

    char* bounds = nullptr;
    CHECK(fq_run_bounds(cfg, &bounds) == FQ_ERR_CONFIG);
    fq_config_free(cfg);

    char* manifest = nullptr;
    REQUIRE(fq_run_oracles("c0,sharp2", 10, "", &manifest) == FQ_OK);
    auto m = take_json(manifest);
    CHECK(m["all_pass"] == true);
    CHECK(fq_run_oracles("c0,bogus", 0, "", &manifest) != FQ_OK);

    char* schema = nullptr;
    REQUIRE(fq_config_schema(&schema) == FQ_OK);
    CHECK(std::string(schema).find("[quantizer]") != std::string::npos);
    fq_string_free(schema);
}
