#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

struct Run {
    int code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& f) {
    std::ifstream in(f);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path work_dir() {
    static const fs::path dir = [] {
        auto d = fs::temp_directory_path() / "fq_cli_test";
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

Run fq(const std::string& args) {
    const auto out = work_dir() / "stdout.txt";
    const auto err = work_dir() / "stderr.txt";
    const std::string cmd = "cd '" + work_dir().string() + "' && '" FQ_CLI_PATH "' " + args + " > '" +
                            out.string() + "' 2> '" + err.string() + "'";
    const int status = std::system(cmd.c_str());
    Run r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
}

fs::path write_config(const std::string& name, const std::string& text) {
    const auto f = work_dir() / name;
    std::ofstream(f) << text;
    return f;
}

const std::string kSmall =
    "[process]\nkind = brownian\n[space]\nm = 65\n[quantizer]\nn = 3\n[sample]\nn_paths = 1000\n";

}  // namespace

TEST_CASE("quantize bm_n8 beats the one-point quantizer") {
    auto r = fq("quantize --config '" FQ_SOURCE_DIR "/configs/bm_n8.toml' --out bm");
    REQUIRE(r.code == 0);
    const auto dir = work_dir() / "bm";
    for (const char* f : {"codebook.bin", "codebook.csv", "distortion.json", "stationarity.json",
                          "trace.csv", "holder.json", "holder.csv", "manifest.json"})
        CHECK(fs::exists(dir / f));
    auto dist = nlohmann::json::parse(slurp(dir / "distortion.json"));
    // n = 1 oracle: e_1 = sqrt(1/2), so D_1 = 1/2.
    CHECK(dist["value"].get<double>() < 0.5);
    auto summary = nlohmann::json::parse(r.out);
    CHECK(summary["n"] == 8);
    CHECK(summary["admissible"] == true);
    auto manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
    CHECK(manifest["config_hash"] == dist["config_hash"]);
}

TEST_CASE("missing config") {
    auto r = fq("quantize");
    CHECK(r.code == 2);
    CHECK(r.err.find("Usage") != std::string::npos);
    CHECK(r.err.find("\"error\"") != std::string::npos);
}

TEST_CASE("dry run writes nothing") {
    auto cfg = write_config("dry.toml", kSmall);
    auto r = fq("quantize --config '" + cfg.string() + "' --out dry --dry-run");
    CHECK(r.code == 0);
    CHECK_FALSE(fs::exists(work_dir() / "dry"));
}

TEST_CASE("config errors exit 2 with an error record") {
    auto cfg = write_config("bad.toml", "[space]\nm = 65\nbogus = 1\n");
    auto r = fq("quantize --config '" + cfg.string() + "' --out bad");
    CHECK(r.code == 2);
    auto err = nlohmann::json::parse(r.err.substr(r.err.find('{')));
    CHECK(err["error"] == "config");
    CHECK(err["exit_code"] == 2);
    CHECK(err["message"].get<std::string>().find("line 3") != std::string::npos);
    CHECK(fs::exists(work_dir() / "bad" / "error.json"));
}

TEST_CASE("seed override changes the config hash") {
    auto cfg = write_config("seed.toml", kSmall);
    auto a = fq("quantize --config '" + cfg.string() + "' --out s1");
    auto b = fq("quantize --config '" + cfg.string() + "' --out s2 --seed 99");
    REQUIRE(a.code == 0);
    REQUIRE(b.code == 0);
    CHECK(nlohmann::json::parse(a.out)["config_hash"] != nlohmann::json::parse(b.out)["config_hash"]);
    CHECK(slurp(work_dir() / "s1" / "codebook.bin") != slurp(work_dir() / "s2" / "codebook.bin"));
}

TEST_CASE("oracle subcommand") {
    auto all = fq("oracle --all --out oracles");
    REQUIRE(all.code == 0);
    auto m = nlohmann::json::parse(slurp(work_dir() / "oracles" / "oracles.json"));
    CHECK(m["all_pass"] == true);
    CHECK(m["summary"].size() == 5);

    auto c0 = fq("oracle c0");
    REQUIRE(c0.code == 0);
    auto j = nlohmann::json::parse(c0.out);
    REQUIRE(j["summary"].size() == 1);
    CHECK(j["summary"][0]["value"].get<double>() == 0.5);

    auto sharp = fq("oracle sharp2 --m 10");
    REQUIRE(sharp.code == 0);
    CHECK(nlohmann::json::parse(sharp.out)["summary"][0]["value"].get<double>() ==
          doctest::Approx(1.8).epsilon(1e-12));

    CHECK(fq("oracle nope").code == 2);
}

TEST_CASE("bounds subcommand") {
    auto one = write_config("b1.toml", kSmall);
    auto r1 = fq("bounds --config '" + one.string() + "'");
    CHECK(r1.code == 2);
    CHECK(r1.err.find("requires d") != std::string::npos);

    auto two = write_config("b2.toml", kSmall + "[bounds]\nsizes = 2, 2\n");
    std::string text = slurp(two);
    text.replace(text.find("m = 65"), 6, "m = 33\nd = 2");
    text.replace(text.find("n = 3"), 5, "n = 4");
    std::ofstream(two) << text;
    auto r2 = fq("bounds --config '" + two.string() + "' --out b2");
    CHECK(r2.code == 0);
    CHECK(nlohmann::json::parse(slurp(work_dir() / "b2" / "bounds.json"))["pass"] == true);
}

TEST_CASE("diagnose subcommand and schema") {
    auto cfg = write_config("diag.toml", kSmall + "[diagnostics]\npin_nodes = first\n");
    auto r = fq("diagnose --config '" + cfg.string() + "' --out diag");
    CHECK(r.code == 0);
    CHECK(fs::exists(work_dir() / "diag" / "diagnostics.json"));

    auto s = fq("--print-schema");
    CHECK(s.code == 0);
    CHECK(s.out.find("[sample]") != std::string::npos);
    auto v = fq("--version");
    CHECK(v.code == 0);
}
