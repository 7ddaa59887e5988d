#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "fq/optimize.hpp"
#include "fq/process_sim.hpp"

namespace fq {

struct ProcessConfig {
    std::string kind = "brownian";
    double hurst = 0.5;
    double ou_c = 1.0;
    double gamma_a = 1.0;
    double lambda = 1.0;
    std::string jump_law = "normal";
    double jump_mean = 0.0;
    double jump_sd = 1.0;
    double stable_rho = 1.5;
    double drift_a = 0.0;
    double drift_b = 0.0;
    double diffusion_a = 1.0;
    double diffusion_b = 0.0;
    std::vector<double> x0;
};

struct SpaceConfig {
    std::size_t m = 256;
    double t_start = 0.0;
    double t_end = 1.0;
    std::string measure = "lebesgue";  // lebesgue | exponential
    double measure_b = 1.0;            // weight exp(-b t) for the exponential measure
    std::size_t d = 1;
};

struct QuantizerConfig {
    std::size_t n = 8;
    double p = 2.0;
    double r = 2.0;
    std::string init = "splitting";  // splitting | sample
};

struct SampleConfig {
    std::size_t n_paths = 10000;
    std::uint64_t seed = 1;  // every random stream derives from this seed
};

struct OutputConfig {
    std::string dir = "out";
    std::vector<std::string> formats{"binary", "csv", "json"};
};

struct BoundsConfig {
    std::vector<std::size_t> sizes;  // per-coordinate n_i; empty selects floor(n^(1/d))
    std::string mode = "lp";         // lp | sup
};

struct DiagnosticsConfig {
    std::size_t lag_min = 1;
    std::size_t lag_max = 0;              // 0 selects (m-1)/8
    std::vector<std::string> pin_nodes;   // grid indices, "first" or "last"
    double pin_value = 0.0;
    std::string codebook;                 // binary codebook to diagnose; empty builds one
    bool ladder = true;                   // monotonicity over the splitting ladder 1..n
};

struct ExperimentConfig {
    ProcessConfig process;
    SpaceConfig space;
    QuantizerConfig quantizer;
    OptimizerConfig optimizer;
    SampleConfig sample;
    OutputConfig output;
    BoundsConfig bounds;
    DiagnosticsConfig diagnostics;

    void validate() const;
    DiscretePathSpace make_space() const;
    ProcessSpec make_process() const;
    std::vector<std::size_t> pin_indices() const;
    bool wants(const std::string& format) const;

    /// Stream seed for a named purpose ("sample", "optimizer", "splitting", ...).
    std::uint64_t stream_seed(std::string_view purpose) const;

    /// Every key in schema order; the config hash is FNV-1a of this text.
    std::string canonical_text() const;
    std::string hash() const;
};

/// Sectioned key = value text ([section] headers, '#' comments, optional
/// quotes, lists as "a, b" or "[a, b]"). Unknown sections or keys, malformed
/// values and failed validation throw ErrorCode::config.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& file);

/// Human-readable schema: section, key, type, default, meaning.
std::string config_schema();

}  // namespace fq
