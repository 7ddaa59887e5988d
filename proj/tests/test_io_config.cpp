#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "fq/config.hpp"
#include "fq/error.hpp"
#include "fq/io.hpp"
#include "fq/oracles.hpp"
#include "fq/pipeline.hpp"
#include "fq/process_sim.hpp"
#include "fq/rng.hpp"

using namespace fq;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
    auto dir = fs::temp_directory_path() / ("fq_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

ErrorCode config_error_code(const std::string& text) {
    try {
        parse_config(text);
    } catch (const Error& e) {
        return e.code();
    }
    return ErrorCode::internal;
}

std::string small_config(const std::string& extra = "") {
    return "[process]\nkind = brownian\n[space]\nm = 65\n[quantizer]\nn = 4\n"
           "[sample]\nn_paths = 1500\nseed = 3\n[diagnostics]\npin_nodes = first\n" + extra;
}

}  // namespace

TEST_CASE("binary round trips") {
    auto space = DiscretePathSpace::trapezoid(0.0, 1.0, 17, 2.0, 2);
    auto s = sample_paths(ProcessSpec{}, space, 20, 99);
    std::stringstream buf;
    write_sample_binary(s, buf);
    CHECK(buf.str().size() == 32 + 20 * 2 * 17 * 8);
    // Header is little-endian d, m, N, seed.
    const auto bytes = buf.str();
    CHECK(static_cast<unsigned char>(bytes[0]) == 2);
    CHECK(static_cast<unsigned char>(bytes[8]) == 17);
    CHECK(static_cast<unsigned char>(bytes[16]) == 20);
    CHECK(static_cast<unsigned char>(bytes[24]) == 99);
    auto back = read_sample_binary(buf, s.process_tag());
    CHECK(back.seed() == 99);
    CHECK(std::equal(back.data().begin(), back.data().end(), s.data().begin(), s.data().end()));

    Codebook cb(space, {Path(s[0]), Path(s[1]), Path(s[2])});
    auto dir = scratch_dir("bin");
    save_codebook(cb, dir / "cb.bin");
    auto cb2 = load_codebook(dir / "cb.bin", space);
    CHECK(cb2.atoms() == cb.atoms());
    CHECK_THROWS_AS(load_codebook(dir / "cb.bin", space.with_d(1)), Error);
    CHECK_THROWS_AS(load_sample(dir / "missing.bin"), Error);

    std::stringstream truncated(bytes.substr(0, 100));
    CHECK_THROWS_AS(read_sample_binary(truncated), Error);
}

TEST_CASE("csv round trip and shortest doubles") {
    auto space = DiscretePathSpace::trapezoid(0.0, 1.0, 9, 2.0, 2);
    auto s = sample_paths(ProcessSpec{}, space, 5, 4);
    std::stringstream buf;
    buf << "# comment\n";
    write_sample_csv(s, buf);
    auto back = read_sample_csv(buf);
    CHECK(back.d() == 2);
    CHECK(back.m() == 9);
    CHECK(std::equal(back.data().begin(), back.data().end(), s.data().begin(), s.data().end()));
    CHECK(format_double(0.1) == "0.1");
    CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("json numbers stay valid") {
    CHECK(json_number(std::numeric_limits<double>::infinity()) == "inf");
    CHECK(json_number(1.5) == 1.5);
    HolderFit fit;
    HolderSeries series;
    series.constant = true;
    series.beta = std::numeric_limits<double>::infinity();
    fit.series.push_back(series);
    auto j = to_json(fit);
    CHECK(nlohmann::json::parse(j.dump())["series"][0]["beta"] == "inf");
}

TEST_CASE("config parsing") {
    auto cfg = parse_config(
        "# comment\n[process]\nkind = \"fbm\"\nhurst = 0.75 # inline\n[space]\nm = 128\nd = 2\n"
        "[bounds]\nsizes = [2, 2]\n[output]\nformats = json, csv\n[diagnostics]\npin_nodes = first, 5, last\n");
    CHECK(cfg.process.kind == "fbm");
    CHECK(cfg.process.hurst == 0.75);
    CHECK(cfg.space.m == 128);
    CHECK(cfg.bounds.sizes == std::vector<std::size_t>{2, 2});
    CHECK(cfg.wants("json"));
    CHECK_FALSE(cfg.wants("binary"));
    CHECK(cfg.pin_indices() == std::vector<std::size_t>{0, 5, 127});

    CHECK(config_error_code("[nope]\n") == ErrorCode::config);
    CHECK(config_error_code("[space]\nbogus = 1\n") == ErrorCode::config);
    CHECK(config_error_code("[space]\nm = 3\nm = 4\n") == ErrorCode::config);
    CHECK(config_error_code("[space]\nm = many\n") == ErrorCode::config);
    CHECK(config_error_code("[quantizer]\nr = 0.5\n") == ErrorCode::config);
    CHECK(config_error_code("[process]\nkind = sheet\n") == ErrorCode::config);
    CHECK(config_error_code("[process]\nhurst = 1.5\nkind = fbm\n") == ErrorCode::config);
    CHECK(config_error_code("m = 3\n") == ErrorCode::config);
    CHECK_THROWS_WITH_AS(parse_config("[space]\n\nm = 3\nm = 4\n"), doctest::Contains("line 4"), Error);
    CHECK_THROWS_AS(load_config("/nonexistent/x.toml"), Error);
}

TEST_CASE("config hash and streams") {
    auto a = parse_config(small_config());
    auto b = parse_config(small_config("# trailing comment\n"));
    auto c = parse_config(small_config("[optimizer]\ntol = 1e-9\n"));
    CHECK(a.hash() == b.hash());
    CHECK(a.hash() != c.hash());
    CHECK(a.hash().size() == 16);
    CHECK(parse_config(a.canonical_text()).hash() == a.hash());
    CHECK(a.stream_seed("sample") == derive_seed(3, "sample"));
    CHECK(a.stream_seed("sample") != a.stream_seed("splitting"));
    const auto schema = config_schema();
    for (const char* key : {"kind", "hurst", "measure_b", "empty_cell_policy", "pin_nodes", "sizes"})
        CHECK(schema.find(key) != std::string::npos);
}

TEST_CASE("quantize pipeline") {
    auto cfg = parse_config(small_config());
    auto dir = scratch_dir("quantize");
    auto out = run_quantize(cfg, dir);
    for (const char* f : {"codebook.bin", "codebook.csv", "distortion.json", "stationarity.json",
                          "trace.csv", "holder.json", "holder.csv", "manifest.json"})
        CHECK(fs::exists(dir / f));
    CHECK(out.codebook.size() == 4);
    CHECK(out.pinning.has_value());
    CHECK(*out.pinning < 1e-6);
    CHECK(out.distortion.value < 0.5);

    auto dj = nlohmann::json::parse(read_text_file(dir / "distortion.json"));
    CHECK(dj["config_hash"] == cfg.hash());
    CHECK(read_text_file(dir / "trace.csv").rfind("# config_hash=" + cfg.hash(), 0) == 0);
    auto cb = load_codebook(dir / "codebook.bin", cfg.make_space());
    CHECK(cb.atoms() == out.codebook.atoms());

    // Identical config: byte-identical results apart from the manifest.
    auto dir2 = scratch_dir("quantize2");
    run_quantize(cfg, dir2);
    for (const char* f : {"codebook.bin", "codebook.csv", "distortion.json", "stationarity.json",
                          "trace.csv", "holder.json", "holder.csv"})
        CHECK(read_text_file(dir / f) == read_text_file(dir2 / f));

    auto json_only = parse_config(small_config("[output]\nformats = json\n"));
    auto dir3 = scratch_dir("quantize3");
    run_quantize(json_only, dir3);
    CHECK_FALSE(fs::exists(dir3 / "codebook.bin"));
    CHECK(fs::exists(dir3 / "distortion.json"));
}

TEST_CASE("bounds pipeline") {
    CHECK_THROWS_WITH_AS(run_bounds(parse_config(small_config()), ""),
                         doctest::Contains("requires d"), Error);
    auto cfg = parse_config(small_config("[bounds]\nsizes = 2, 2\n"));
    cfg.space.d = 2;
    cfg.space.m = 33;
    cfg.validate();
    auto rep = run_bounds(cfg, "");
    CHECK(rep["pass"] == true);
    CHECK(rep["lower_holds"] == true);
    CHECK(rep["upper_holds"] == true);
    cfg.bounds.mode = "sup";
    auto sup = run_bounds(cfg, "");
    CHECK(sup["pass"] == true);
    cfg.bounds.sizes = {3, 3};
    CHECK_THROWS_AS(run_bounds(cfg, ""), Error);
}

TEST_CASE("oracle pipeline") {
    OracleOptions opt;
    auto all = run_oracles(oracle_names(), opt, "");
    CHECK(all["all_pass"] == true);
    opt.sharp_m = 10;
    auto sharp = run_oracles({"sharp2"}, opt, "");
    bool seen = false;
    for (const auto& e : sharp["entries"])
        if (e["quantity"] == "ratio m=10") {
            CHECK(e["computed"].get<double>() == doctest::Approx(1.8).epsilon(1e-9));
            seen = true;
        }
    CHECK(seen);
    CHECK_THROWS_AS(run_oracles({"nope"}, opt, ""), Error);
}

TEST_CASE("diagnose pipeline") {
    auto cfg = parse_config(small_config());
    auto dir = scratch_dir("diagnose");
    auto rep = run_diagnose(cfg, dir);
    CHECK(fs::exists(dir / "diagnostics.json"));
    CHECK(rep["stationarity"]["admissible"] == true);
    CHECK(rep["monotonicity"].size() == 4);
    CHECK(rep["pinning"]["max_deviation"].get<double>() < 1e-6);
}
