#include "fq/fq.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <memory>
#include <sstream>
#include <string>

#include <json.hpp>

#include "fq/config.hpp"
#include "fq/diagnostics.hpp"
#include "fq/error.hpp"
#include "fq/io.hpp"
#include "fq/optimize.hpp"
#include "fq/pipeline.hpp"
#include "fq/process_sim.hpp"

struct fq_space {
    fq::DiscretePathSpace value;
};
struct fq_sample {
    fq::PathSample value;
};
struct fq_codebook {
    fq::Codebook value;
};
struct fq_config {
    fq::ExperimentConfig value;
};

namespace {

thread_local std::string g_last_error;

template <class F>
fq_status guarded(F&& body) {
    try {
        body();
        g_last_error.clear();
        return FQ_OK;
    } catch (const fq::Error& e) {
        g_last_error = e.what();
        return static_cast<fq_status>(static_cast<int>(e.code()));
    } catch (const nlohmann::json::exception& e) {
        g_last_error = std::string("malformed JSON: ") + e.what();
        return FQ_ERR_INVALID_ARGUMENT;
    } catch (const std::bad_alloc&) {
        g_last_error = "out of memory";
        return FQ_ERR_INTERNAL;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return FQ_ERR_INTERNAL;
    }
}

void need(const void* p, const char* what) {
    if (p == nullptr) fq::fail(fq::ErrorCode::invalid_argument, std::string(what) + " is NULL");
}

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (!out) throw std::bad_alloc();
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

void put_string(char** out, const std::string& s) {
    need(out, "output pointer");
    *out = dup_string(s);
}

std::string scalar_text(const nlohmann::json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_array()) {
        std::string s;
        for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + scalar_text(v[i]);
        return s;
    }
    if (v.is_number_unsigned()) return std::to_string(v.get<std::uint64_t>());
    if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
    return fq::format_double(v.get<double>());
}

fq::ProcessSpec process_from_json(const char* text, std::size_t d) {
    const auto j = nlohmann::json::parse(text && *text ? text : "{}");
    if (!j.is_object()) fq::fail(fq::ErrorCode::invalid_argument, "process spec must be a JSON object");
    std::ostringstream cfg;
    cfg << "[process]\n";
    for (auto it = j.begin(); it != j.end(); ++it) cfg << it.key() << " = " << scalar_text(it.value()) << '\n';
    cfg << "[space]\nd = " << d << '\n';
    return fq::parse_config(cfg.str()).make_process();
}

fq::OptimizerConfig optimizer_from_json(const char* text) {
    const auto j = nlohmann::json::parse(text && *text ? text : "{}");
    if (!j.is_object()) fq::fail(fq::ErrorCode::invalid_argument, "options must be a JSON object");
    std::ostringstream cfg;
    cfg << "[optimizer]\n";
    std::uint64_t seed = 0;
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (it.key() == "seed") {
            seed = it.value().get<std::uint64_t>();
            continue;
        }
        cfg << it.key() << " = " << scalar_text(it.value()) << '\n';
    }
    auto o = fq::parse_config(cfg.str()).optimizer;
    o.seed = seed;
    return o;
}

}  // namespace

extern "C" {

const char* fq_last_error(void) { return g_last_error.c_str(); }

const char* fq_status_name(fq_status status) {
    switch (status) {
        case FQ_OK: return "ok";
        case FQ_ERR_INVALID_ARGUMENT: return "invalid_argument";
        case FQ_ERR_DIMENSION_MISMATCH: return "dimension_mismatch";
        case FQ_ERR_CONFIG: return "config";
        case FQ_ERR_SIMULATION: return "simulation";
        case FQ_ERR_OPTIMIZATION: return "optimization";
        case FQ_ERR_NUMERICAL: return "numerical";
        case FQ_ERR_IO: return "io";
        case FQ_ERR_NO_ORACLE: return "no_oracle";
        case FQ_ERR_INTERNAL: return "internal";
    }
    return "unknown";
}

const char* fq_version(void) { return fq::kToolVersion; }

void fq_string_free(char* s) { std::free(s); }

fq_status fq_space_trapezoid(double t_start, double t_end, size_t m, double p, size_t d, fq_space** out) {
    return guarded([&] {
        need(out, "out");
        *out = new fq_space{fq::DiscretePathSpace::trapezoid(t_start, t_end, m, p, d)};
    });
}

fq_status fq_space_exponential(double t_start, double t_end, size_t m, double b, double p, size_t d,
                               fq_space** out) {
    return guarded([&] {
        need(out, "out");
        *out = new fq_space{fq::DiscretePathSpace::exponential(t_start, t_end, m, b, p, d)};
    });
}

void fq_space_free(fq_space* space) { delete space; }
size_t fq_space_m(const fq_space* space) { return space ? space->value.m() : 0; }
size_t fq_space_d(const fq_space* space) { return space ? space->value.d() : 0; }
double fq_space_p(const fq_space* space) { return space ? space->value.p() : 0.0; }
double fq_space_total_mass(const fq_space* space) { return space ? space->value.total_mass() : 0.0; }

fq_status fq_lp_norm(const fq_space* space, const double* values, double* out) {
    return guarded([&] {
        need(space, "space");
        need(values, "values");
        need(out, "out");
        const auto& s = space->value;
        fq::PathView v{std::span<const double>(values, s.d() * s.m()), s.d(), s.m()};
        *out = fq::lp_norm(s, v);
    });
}

fq_status fq_sample_simulate(const fq_space* space, const char* process_json, size_t n_paths,
                             uint64_t seed, fq_sample** out) {
    return guarded([&] {
        need(space, "space");
        need(out, "out");
        const auto spec = process_from_json(process_json, space->value.d());
        *out = new fq_sample{fq::sample_paths(spec, space->value, n_paths, seed)};
    });
}

fq_status fq_sample_from_data(size_t d, size_t m, size_t n_paths, const double* data, uint64_t seed,
                              fq_sample** out) {
    return guarded([&] {
        need(data, "data");
        need(out, "out");
        std::vector<double> v(data, data + d * m * n_paths);
        *out = new fq_sample{fq::PathSample(d, m, std::move(v), seed, "external")};
    });
}

void fq_sample_free(fq_sample* sample) { delete sample; }
size_t fq_sample_size(const fq_sample* sample) { return sample ? sample->value.size() : 0; }
const double* fq_sample_data(const fq_sample* sample) {
    return sample ? sample->value.data().data() : nullptr;
}

fq_status fq_sample_save(const fq_sample* sample, const char* path) {
    return guarded([&] {
        need(sample, "sample");
        need(path, "path");
        fq::save_sample(sample->value, path);
    });
}

fq_status fq_sample_load(const char* path, fq_sample** out) {
    return guarded([&] {
        need(path, "path");
        need(out, "out");
        *out = new fq_sample{fq::load_sample(path, "file")};
    });
}

fq_status fq_codebook_from_data(const fq_space* space, size_t n, const double* data, fq_codebook** out) {
    return guarded([&] {
        need(space, "space");
        need(data, "data");
        need(out, "out");
        const auto& s = space->value;
        const std::size_t len = s.d() * s.m();
        std::vector<fq::Path> atoms;
        for (std::size_t i = 0; i < n; ++i)
            atoms.emplace_back(s.d(), s.m(), std::vector<double>(data + i * len, data + (i + 1) * len));
        *out = new fq_codebook{fq::Codebook(s, std::move(atoms))};
    });
}

void fq_codebook_free(fq_codebook* codebook) { delete codebook; }
size_t fq_codebook_size(const fq_codebook* codebook) { return codebook ? codebook->value.size() : 0; }

fq_status fq_codebook_copy(const fq_codebook* codebook, double* out, size_t capacity) {
    return guarded([&] {
        need(codebook, "codebook");
        need(out, "out");
        const auto& s = codebook->value.space();
        const std::size_t len = s.d() * s.m();
        if (capacity < len * codebook->value.size())
            fq::fail(fq::ErrorCode::invalid_argument, "output buffer too small");
        for (std::size_t i = 0; i < codebook->value.size(); ++i) {
            const auto v = codebook->value.atom(i).values();
            std::copy(v.begin(), v.end(), out + i * len);
        }
    });
}

fq_status fq_codebook_save(const fq_codebook* codebook, const char* path) {
    return guarded([&] {
        need(codebook, "codebook");
        need(path, "path");
        fq::save_codebook(codebook->value, path);
    });
}

fq_status fq_codebook_load(const fq_space* space, const char* path, fq_codebook** out) {
    return guarded([&] {
        need(space, "space");
        need(path, "path");
        need(out, "out");
        *out = new fq_codebook{fq::load_codebook(path, space->value)};
    });
}

fq_status fq_assign(const fq_codebook* codebook, const fq_sample* sample, int sup_norm, uint32_t* cells) {
    return guarded([&] {
        need(codebook, "codebook");
        need(sample, "sample");
        need(cells, "cells");
        const auto asg = fq::assign(codebook->value, sample->value,
                                    sup_norm ? fq::NormKind::sup : fq::NormKind::lp);
        std::copy(asg.cell_index.begin(), asg.cell_index.end(), cells);
    });
}

fq_status fq_distortion(const fq_codebook* codebook, const fq_sample* sample, double r, int sup_norm,
                        double* value, double* std_error) {
    return guarded([&] {
        need(codebook, "codebook");
        need(sample, "sample");
        const auto rep = fq::distortion(codebook->value, sample->value, r,
                                        sup_norm ? fq::NormKind::sup : fq::NormKind::lp);
        if (value) *value = rep.value;
        if (std_error) *std_error = rep.std_error;
    });
}

fq_status fq_distortion_report(const fq_codebook* codebook, const fq_sample* sample, double r,
                               int sup_norm, char** report_json) {
    return guarded([&] {
        need(codebook, "codebook");
        need(sample, "sample");
        const auto rep = fq::distortion(codebook->value, sample->value, r,
                                        sup_norm ? fq::NormKind::sup : fq::NormKind::lp);
        put_string(report_json, fq::to_json(rep).dump());
    });
}

fq_status fq_optimize(const fq_codebook* init, const fq_sample* sample, double r, const char* options_json,
                      fq_codebook** out, char** trace_json) {
    return guarded([&] {
        need(init, "init");
        need(sample, "sample");
        need(out, "out");
        const auto cfg = optimizer_from_json(options_json);
        auto res = fq::optimize(cfg, init->value, sample->value, r);
        if (trace_json) {
            auto j = fq::to_json(res.trace);
            j["distortion"] = res.trace.distortion;
            *trace_json = dup_string(j.dump());
        }
        *out = new fq_codebook{std::move(res.codebook)};
    });
}

fq_status fq_splitting(const fq_space* space, const fq_sample* sample, size_t n, double r, uint64_t seed,
                       fq_codebook** out) {
    return guarded([&] {
        need(space, "space");
        need(sample, "sample");
        need(out, "out");
        *out = new fq_codebook{fq::splitting_init(sample->value, space->value, n, r, seed)};
    });
}

fq_status fq_stationarity(const fq_codebook* codebook, const fq_sample* sample, double r, char** report_json) {
    return guarded([&] {
        need(codebook, "codebook");
        need(sample, "sample");
        put_string(report_json,
                   fq::to_json(fq::stationarity_residual(codebook->value, sample->value, r)).dump());
    });
}

fq_status fq_holder_fit(const fq_codebook* codebook, size_t lag_min, size_t lag_max, char** report_json) {
    return guarded([&] {
        need(codebook, "codebook");
        put_string(report_json, fq::to_json(fq::holder_fit(codebook->value, {lag_min, lag_max})).dump());
    });
}

fq_status fq_config_load(const char* path, fq_config** out) {
    return guarded([&] {
        need(path, "path");
        need(out, "out");
        *out = new fq_config{fq::load_config(path)};
    });
}

fq_status fq_config_parse(const char* text, fq_config** out) {
    return guarded([&] {
        need(text, "text");
        need(out, "out");
        *out = new fq_config{fq::parse_config(text)};
    });
}

void fq_config_free(fq_config* config) { delete config; }

fq_status fq_config_set_seed(fq_config* config, uint64_t seed) {
    return guarded([&] {
        need(config, "config");
        config->value.sample.seed = seed;
    });
}

fq_status fq_config_set_output_dir(fq_config* config, const char* dir) {
    return guarded([&] {
        need(config, "config");
        need(dir, "dir");
        config->value.output.dir = dir;
    });
}

fq_status fq_config_output_dir(const fq_config* config, char** dir) {
    return guarded([&] {
        need(config, "config");
        put_string(dir, config->value.output.dir);
    });
}

fq_status fq_config_hash(const fq_config* config, char** hash) {
    return guarded([&] {
        need(config, "config");
        put_string(hash, config->value.hash());
    });
}

fq_status fq_config_canonical(const fq_config* config, char** text) {
    return guarded([&] {
        need(config, "config");
        put_string(text, config->value.canonical_text());
    });
}

fq_status fq_config_schema(char** text) {
    return guarded([&] { put_string(text, fq::config_schema()); });
}

fq_status fq_run_quantize(const fq_config* config, char** summary_json) {
    return guarded([&] {
        need(config, "config");
        const auto& cfg = config->value;
        const auto res = fq::run_quantize(cfg, cfg.output.dir);
        nlohmann::json s = {{"status", "ok"},
                            {"command", "quantize"},
                            {"out", cfg.output.dir},
                            {"config_hash", cfg.hash()},
                            {"n", res.codebook.size()},
                            {"distortion", fq::json_number(res.distortion.value)},
                            {"quant_error", fq::json_number(std::pow(res.distortion.value, 1.0 / res.distortion.r))},
                            {"std_error", fq::json_number(res.distortion.std_error)},
                            {"relative_residual", fq::json_number(res.stationarity.relative_max_residual())},
                            {"admissible", res.stationarity.admissible},
                            {"iterations", res.trace.iterations},
                            {"exit_reason", res.trace.exit_reason},
                            {"files", res.files}};
        if (res.pinning) s["pinning"] = *res.pinning;
        put_string(summary_json, s.dump());
    });
}

fq_status fq_run_bounds(const fq_config* config, char** report_json) {
    return guarded([&] {
        need(config, "config");
        put_string(report_json, fq::run_bounds(config->value, config->value.output.dir).dump());
    });
}

fq_status fq_run_diagnose(const fq_config* config, char** report_json) {
    return guarded([&] {
        need(config, "config");
        put_string(report_json, fq::run_diagnose(config->value, config->value.output.dir).dump());
    });
}

fq_status fq_run_oracles(const char* selection, size_t sharp_m, const char* out_dir, char** manifest_json) {
    return guarded([&] {
        need(selection, "selection");
        std::vector<std::string> names;
        std::stringstream ss(selection);
        std::string item;
        while (std::getline(ss, item, ','))
            if (!item.empty()) names.push_back(item);
        fq::OracleOptions opt;
        opt.sharp_m = sharp_m;
        put_string(manifest_json, fq::run_oracles(names, opt, out_dir ? out_dir : "").dump());
    });
}

}  // extern "C"
