#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include <json.hpp>

#include "fq/diagnostics.hpp"
#include "fq/optimize.hpp"
#include "fq/quantize_core.hpp"

namespace fq {

/**
 * Binary layout: four little-endian uint64 (d, m, N, seed), then N*d*m
 * little-endian IEEE-754 doubles, path-major, then coordinate, then grid node.
 * Codebooks use the same layout with N = n and seed = 0.
 */
void write_sample_binary(const PathSample& sample, std::ostream& out);
PathSample read_sample_binary(std::istream& in, const std::string& process_tag = "");
void write_codebook_binary(const Codebook& codebook, std::ostream& out);
Codebook read_codebook_binary(std::istream& in, const DiscretePathSpace& space);

void save_sample(const PathSample& sample, const std::filesystem::path& file);
PathSample load_sample(const std::filesystem::path& file, const std::string& process_tag = "");
void save_codebook(const Codebook& codebook, const std::filesystem::path& file);
Codebook load_codebook(const std::filesystem::path& file, const DiscretePathSpace& space);

/// Shortest round-trip decimal form.
std::string format_double(double v);

/// CSV: header "path,coord,t0,...,t{m-1}" ("atom,..." for codebooks), one row per
/// path and coordinate.
void write_sample_csv(const PathSample& sample, std::ostream& out);
void write_codebook_csv(const Codebook& codebook, std::ostream& out);
PathSample read_sample_csv(std::istream& in);

/// "iteration,distortion,residual"
void write_trace_csv(const OptimizeTrace& trace, std::ostream& out);
/// "atom,coord,lag,max_increment"
void write_holder_csv(const HolderFit& fit, std::ostream& out);

nlohmann::json to_json(const DistortionReport& rep);
nlohmann::json to_json(const StationarityReport& rep);
nlohmann::json to_json(const HolderFit& fit);
nlohmann::json to_json(const OptimizeTrace& trace);
nlohmann::json to_json(const ExponentBounds& bounds);
nlohmann::json to_json(const std::vector<MonotonicityEntry>& entries);
nlohmann::json to_json(const DiscretePathSpace& space);

/// Non-finite values become strings ("inf", "-inf", "nan") so the output stays valid JSON.
nlohmann::json json_number(double v);

void write_text_file(const std::filesystem::path& file, const std::string& text);
std::string read_text_file(const std::filesystem::path& file);

}  // namespace fq
