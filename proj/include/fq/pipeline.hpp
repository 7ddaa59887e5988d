#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fq/config.hpp"
#include "fq/diagnostics.hpp"
#include "fq/optimize.hpp"

namespace fq {

inline constexpr const char* kToolVersion = "1.0.0";

struct QuantizeOutcome {
    Codebook codebook;
    DistortionReport distortion;
    StationarityReport stationarity;
    OptimizeTrace trace;
    std::optional<HolderFit> holder;
    std::optional<double> pinning;
    std::vector<std::string> files;
};

/// simulate -> optimize -> diagnose -> report. Writes nothing when out_dir is empty.
QuantizeOutcome run_quantize(const ExperimentConfig& config, const std::filesystem::path& out_dir);

struct OracleOptions {
    std::size_t c0_M = 16;
    std::size_t l1_M = 16;
    std::size_t sharp_m = 0;  // 0 runs m = 2..10
    std::size_t sup_n_funcs = 12;
    std::uint64_t seed = 1;
};

const std::vector<std::string>& oracle_names();

/// Runs the selected oracles and returns the manifest
/// {"summary": [{oracle, value, pass}], "entries": [{oracle, quantity, expected,
/// computed, tolerance, pass}], "all_pass"}. Summary values: c0 E||X-a||_inf at
/// a = 1/2, l1 e_F, sharp2 the ratio at the largest m, supnorm E||X-h||_sup,
/// closed_form the brownian n = 1 error.
/// Writes oracles.json when out_dir is non-empty.
nlohmann::json run_oracles(const std::vector<std::string>& selection, const OracleOptions& options,
                           const std::filesystem::path& out_dir);

/// Marginal sandwich report for d >= 2 (lp or sup mode).
nlohmann::json run_bounds(const ExperimentConfig& config, const std::filesystem::path& out_dir);

/// Stationarity, Hölder, pinning, cross-exponent and monotonicity diagnostics.
nlohmann::json run_diagnose(const ExperimentConfig& config, const std::filesystem::path& out_dir);

/// manifest.json: tool version, command, config hash, timestamp, files.
void write_manifest(const std::filesystem::path& out_dir, const std::string& command,
                    const std::string& config_hash, const std::vector<std::string>& files);

}  // namespace fq
