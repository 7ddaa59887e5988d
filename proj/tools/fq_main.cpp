// fq: experiment runner over the C interface.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fq/fq.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitConfig = 2;
constexpr int kExitRun = 3;

struct Common {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out;
    bool dry_run = false;
    bool print_schema = false;
};

std::string take(char* s) {
    std::string out = s ? s : "";
    fq_string_free(s);
    return out;
}

int exit_code_for(fq_status st) {
    return st == FQ_ERR_CONFIG || st == FQ_ERR_INVALID_ARGUMENT ? kExitConfig : kExitRun;
}

// JSON error record on stderr, and in <out>/error.json when an output directory is known.
int report_error(int code, const std::string& kind, const std::string& message, const std::string& out_dir) {
    nlohmann::json rec = {{"status", "error"}, {"error", kind}, {"message", message}, {"exit_code", code}};
    std::cerr << rec.dump() << '\n';
    if (!out_dir.empty()) {
        std::error_code ec;
        std::filesystem::create_directories(out_dir, ec);
        std::ofstream f(std::filesystem::path(out_dir) / "error.json");
        if (f) f << rec.dump(2) << '\n';
    }
    return code;
}

int fail_status(fq_status st, const std::string& out_dir) {
    return report_error(exit_code_for(st), fq_status_name(st), fq_last_error(), out_dir);
}

void add_common(CLI::App* cmd, Common& c) {
    cmd->add_option("--config", c.config, "experiment config file");
    cmd->add_option("--seed", c.seed, "override sample.seed");
    cmd->add_option("--out", c.out, "override output.dir");
    cmd->add_flag("--dry-run", c.dry_run, "validate the config and exit without writing");
    cmd->add_flag("--print-schema", c.print_schema, "print the config schema and exit");
}

int print_schema() {
    char* text = nullptr;
    if (fq_config_schema(&text) != FQ_OK) return kExitRun;
    std::cout << take(text);
    return kExitOk;
}

using Runner = fq_status (*)(const fq_config*, char**);

int run_config_command(const std::string& name, const Common& c, Runner run, const std::string& usage) {
    if (c.print_schema) return print_schema();
    if (c.config.empty()) {
        std::cerr << usage << '\n';
        return report_error(kExitConfig, "config", name + ": missing --config", c.out);
    }
    fq_config* cfg = nullptr;
    fq_status st = fq_config_load(c.config.c_str(), &cfg);
    if (st != FQ_OK) return report_error(kExitConfig, fq_status_name(st), fq_last_error(), c.out);
    std::unique_ptr<fq_config, decltype(&fq_config_free)> guard(cfg, fq_config_free);
    if (c.seed) fq_config_set_seed(cfg, *c.seed);
    if (!c.out.empty()) fq_config_set_output_dir(cfg, c.out.c_str());
    char* dir_c = nullptr;
    fq_config_output_dir(cfg, &dir_c);
    const std::string out_dir = take(dir_c);
    char* hash_c = nullptr;
    fq_config_hash(cfg, &hash_c);
    const std::string hash = take(hash_c);

    if (c.dry_run) {
        nlohmann::json s = {{"status", "ok"}, {"command", name}, {"dry_run", true}, {"config_hash", hash}};
        std::cout << s.dump() << '\n';
        return kExitOk;
    }
    char* result = nullptr;
    st = run(cfg, &result);
    if (st != FQ_OK) return fail_status(st, out_dir);
    const auto j = nlohmann::json::parse(take(result));
    std::cout << j.dump(2) << '\n';
    if (j.contains("pass") && !j["pass"].get<bool>()) return kExitCheckFailed;
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fq: functional quantization of stochastic processes"};
    app.require_subcommand(0, 1);
    bool top_schema = false;
    bool version = false;
    app.add_flag("--print-schema", top_schema, "print the config schema and exit");
    app.add_flag("--version", version, "print the version and exit");

    Common qc, bc, dc;
    auto* quantize = app.add_subcommand("quantize", "simulate, optimize, diagnose and report");
    add_common(quantize, qc);
    auto* bounds = app.add_subcommand("bounds", "marginal sandwich bounds for d >= 2");
    add_common(bounds, bc);
    auto* diagnose = app.add_subcommand("diagnose", "stationarity, regularity and monotonicity checks");
    add_common(diagnose, dc);

    auto* oracle = app.add_subcommand("oracle", "exact reference computations");
    std::vector<std::string> names;
    bool all = false;
    std::size_t sharp_m = 0;
    std::string oracle_out;
    oracle->add_option("names", names, "c0, l1, sharp2, supnorm, closed_form");
    oracle->add_flag("--all", all, "run every oracle");
    oracle->add_option("--m", sharp_m, "support size for sharp2 (default sweeps 2..10)");
    oracle->add_option("--out", oracle_out, "directory for oracles.json");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitConfig;
    }

    if (version) {
        std::cout << fq_version() << '\n';
        return kExitOk;
    }
    if (top_schema) return print_schema();

    if (*quantize) return run_config_command("quantize", qc, fq_run_quantize, quantize->help());
    if (*bounds) return run_config_command("bounds", bc, fq_run_bounds, bounds->help());
    if (*diagnose) return run_config_command("diagnose", dc, fq_run_diagnose, diagnose->help());
    if (*oracle) {
        std::string selection;
        if (all) selection = "c0,l1,sharp2,supnorm,closed_form";
        for (const auto& n : names) selection += (selection.empty() ? "" : ",") + n;
        if (selection.empty()) {
            std::cerr << oracle->help() << '\n';
            return report_error(kExitConfig, "config", "oracle: name an oracle or pass --all", oracle_out);
        }
        char* manifest = nullptr;
        const fq_status st = fq_run_oracles(selection.c_str(), sharp_m, oracle_out.c_str(), &manifest);
        if (st != FQ_OK) return fail_status(st, oracle_out);
        const auto j = nlohmann::json::parse(take(manifest));
        std::cout << j.dump(2) << '\n';
        return j["all_pass"].get<bool>() ? kExitOk : kExitCheckFailed;
    }
    std::cerr << app.help() << '\n';
    return kExitConfig;
}
