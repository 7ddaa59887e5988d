#include "fq/io.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "fq/error.hpp"

namespace fq {

namespace {

void put_u64(std::ostream& out, std::uint64_t v) {
    std::array<char, 8> b{};
    for (int i = 0; i < 8; ++i) b[static_cast<std::size_t>(i)] = static_cast<char>((v >> (8 * i)) & 0xffu);
    out.write(b.data(), 8);
}

std::uint64_t get_u64(std::istream& in) {
    std::array<unsigned char, 8> b{};
    in.read(reinterpret_cast<char*>(b.data()), 8);
    if (!in) fail(ErrorCode::io, "truncated binary file");
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | b[static_cast<std::size_t>(i)];
    return v;
}

void put_values(std::ostream& out, std::span<const double> values) {
    std::vector<char> buf(values.size() * 8);
    for (std::size_t k = 0; k < values.size(); ++k) {
        const auto bits = std::bit_cast<std::uint64_t>(values[k]);
        for (int i = 0; i < 8; ++i) buf[k * 8 + static_cast<std::size_t>(i)] = static_cast<char>((bits >> (8 * i)) & 0xffu);
    }
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

void get_values(std::istream& in, std::span<double> values) {
    std::vector<unsigned char> buf(values.size() * 8);
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (!in) fail(ErrorCode::io, "truncated binary file");
    for (std::size_t k = 0; k < values.size(); ++k) {
        std::uint64_t bits = 0;
        for (int i = 7; i >= 0; --i) bits = (bits << 8) | buf[k * 8 + static_cast<std::size_t>(i)];
        values[k] = std::bit_cast<double>(bits);
    }
}

struct Header {
    std::uint64_t d, m, n, seed;
};

Header read_header(std::istream& in) {
    Header h{get_u64(in), get_u64(in), get_u64(in), get_u64(in)};
    require(h.d >= 1 && h.m >= 1 && h.d * h.m < (std::uint64_t{1} << 40), ErrorCode::io,
            "binary header has invalid shape");
    return h;
}

std::ofstream open_out(const std::filesystem::path& file, bool binary) {
    std::ofstream out(file, binary ? std::ios::binary | std::ios::trunc : std::ios::trunc);
    if (!out) fail(ErrorCode::io, "cannot open " + file.string() + " for writing");
    return out;
}

std::ifstream open_in(const std::filesystem::path& file, bool binary) {
    std::ifstream in(file, binary ? std::ios::binary : std::ios::in);
    if (!in) fail(ErrorCode::io, "cannot open " + file.string());
    return in;
}

void write_rows(std::ostream& out, const char* label, std::size_t count, std::size_t d,
                std::size_t m, auto&& row_of) {
    out << label << ",coord";
    for (std::size_t k = 0; k < m; ++k) out << ",t" << k;
    out << '\n';
    for (std::size_t i = 0; i < count; ++i)
        for (std::size_t j = 0; j < d; ++j) {
            out << i << ',' << j;
            for (double v : row_of(i, j)) out << ',' << format_double(v);
            out << '\n';
        }
}

nlohmann::json json_array(std::span<const double> v) {
    auto a = nlohmann::json::array();
    for (double x : v) a.push_back(json_number(x));
    return a;
}

}  // namespace

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    std::array<char, 32> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), res.ptr);
}

nlohmann::json json_number(double v) {
    if (std::isfinite(v)) return v;
    return format_double(v);
}

void write_sample_binary(const PathSample& sample, std::ostream& out) {
    put_u64(out, sample.d());
    put_u64(out, sample.m());
    put_u64(out, sample.size());
    put_u64(out, sample.seed());
    put_values(out, sample.data());
}

PathSample read_sample_binary(std::istream& in, const std::string& process_tag) {
    const auto h = read_header(in);
    std::vector<double> data(h.n * h.d * h.m);
    get_values(in, data);
    return PathSample(h.d, h.m, std::move(data), h.seed, process_tag);
}

void write_codebook_binary(const Codebook& codebook, std::ostream& out) {
    const auto& s = codebook.space();
    put_u64(out, s.d());
    put_u64(out, s.m());
    put_u64(out, codebook.size());
    put_u64(out, 0);
    for (const auto& a : codebook.atoms()) put_values(out, a.values());
}

Codebook read_codebook_binary(std::istream& in, const DiscretePathSpace& space) {
    const auto h = read_header(in);
    if (h.d != space.d() || h.m != space.m())
        fail(ErrorCode::dimension_mismatch,
             "codebook file is " + std::to_string(h.d) + "x" + std::to_string(h.m) +
                 " but the space is " + std::to_string(space.d()) + "x" + std::to_string(space.m()));
    std::vector<Path> atoms;
    for (std::uint64_t i = 0; i < h.n; ++i) {
        Path a(h.d, h.m);
        get_values(in, a.values());
        atoms.push_back(std::move(a));
    }
    return Codebook(space, std::move(atoms));
}

void save_sample(const PathSample& sample, const std::filesystem::path& file) {
    auto out = open_out(file, true);
    write_sample_binary(sample, out);
}

PathSample load_sample(const std::filesystem::path& file, const std::string& process_tag) {
    auto in = open_in(file, true);
    return read_sample_binary(in, process_tag);
}

void save_codebook(const Codebook& codebook, const std::filesystem::path& file) {
    auto out = open_out(file, true);
    write_codebook_binary(codebook, out);
}

Codebook load_codebook(const std::filesystem::path& file, const DiscretePathSpace& space) {
    auto in = open_in(file, true);
    return read_codebook_binary(in, space);
}

void write_sample_csv(const PathSample& sample, std::ostream& out) {
    write_rows(out, "path", sample.size(), sample.d(), sample.m(),
               [&](std::size_t i, std::size_t j) { return sample[i].row(j); });
}

void write_codebook_csv(const Codebook& codebook, std::ostream& out) {
    const auto& s = codebook.space();
    write_rows(out, "atom", codebook.size(), s.d(), s.m(),
               [&](std::size_t i, std::size_t j) { return codebook.atom(i).view().row(j); });
}

PathSample read_sample_csv(std::istream& in) {
    std::string line;
    do {
        if (!std::getline(in, line)) fail(ErrorCode::io, "empty CSV");
    } while (!line.empty() && line.front() == '#');
    const std::size_t m = static_cast<std::size_t>(std::count(line.begin(), line.end(), ',')) - 1;
    require(m >= 1, ErrorCode::io, "CSV header has no value columns");
    std::vector<double> data;
    std::size_t d = 0, rows = 0, max_path = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        require(cells.size() == m + 2, ErrorCode::io, "CSV row has wrong number of columns");
        const std::size_t path = std::stoul(cells[0]);
        const std::size_t coord = std::stoul(cells[1]);
        // Rows of path 0 fix d; later rows must follow (path, coord) order.
        const bool first_path = path == 0 && max_path == 0;
        const bool in_order = first_path ? coord == d
                                         : d > 0 && path == rows / d && coord == rows % d;
        require(in_order, ErrorCode::io, "CSV rows out of order");
        if (first_path) d = coord + 1;
        max_path = std::max(max_path, path);
        for (std::size_t k = 0; k < m; ++k) {
            double v = 0.0;
            const auto& c = cells[k + 2];
            const auto res = std::from_chars(c.data(), c.data() + c.size(), v);
            require(res.ec == std::errc(), ErrorCode::io, "CSV value is not a number: " + c);
            data.push_back(v);
        }
        ++rows;
    }
    require(d >= 1 && rows == (max_path + 1) * d, ErrorCode::io, "CSV does not hold whole paths");
    return PathSample(d, m, std::move(data), 0, "csv");
}

void write_trace_csv(const OptimizeTrace& trace, std::ostream& out) {
    out << "iteration,distortion,residual\n";
    for (std::size_t k = 0; k < trace.distortion.size(); ++k) {
        out << trace.iteration[k] << ',' << format_double(trace.distortion[k]) << ',';
        if (k < trace.residual.size()) out << format_double(trace.residual[k]);
        out << '\n';
    }
}

void write_holder_csv(const HolderFit& fit, std::ostream& out) {
    out << "atom,coord,lag,max_increment\n";
    for (const auto& s : fit.series)
        for (std::size_t k = 0; k < s.lags.size(); ++k)
            out << s.atom << ',' << s.coord << ',' << format_double(s.lags[k]) << ','
                << format_double(s.max_increments[k]) << '\n';
}

nlohmann::json to_json(const DistortionReport& rep) {
    return {{"value", json_number(rep.value)},
            {"quant_error", json_number(std::pow(rep.value, 1.0 / rep.r))},
            {"std_error", json_number(rep.std_error)},
            {"quant_error_std_error", json_number(quant_error_std_error(rep))},
            {"r", rep.r},
            {"norm", rep.norm == NormKind::lp ? "lp" : "sup"},
            {"n_paths", rep.n_paths},
            {"tie_mass", rep.tie_mass},
            {"per_cell_mass", json_array(rep.per_cell_mass)},
            {"per_cell_distortion", json_array(rep.per_cell_distortion)}};
}

nlohmann::json to_json(const StationarityReport& rep) {
    return {{"n", rep.n},
            {"d", rep.d},
            {"residuals", json_array(rep.residuals)},
            {"max_residual", json_number(rep.max_residual)},
            {"distortion_scale", json_number(rep.distortion_scale)},
            {"relative_max_residual", json_number(rep.relative_max_residual())},
            {"cell_masses", json_array(rep.cell_masses)},
            {"min_cell_mass", rep.min_cell_mass()},
            {"tie_mass", rep.tie_mass},
            {"atom_hit_mass", rep.atom_hit_mass},
            {"hit_atoms", rep.hit_atoms},
            {"regularity_eligible", rep.regularity_eligible},
            {"admissible", rep.admissible}};
}

nlohmann::json to_json(const HolderFit& fit) {
    auto series = nlohmann::json::array();
    for (const auto& s : fit.series)
        series.push_back({{"atom", s.atom},
                          {"coord", s.coord},
                          {"beta", json_number(s.beta)},
                          {"intercept", json_number(s.intercept)},
                          {"r_squared", json_number(s.r_squared)},
                          {"constant", s.constant}});
    return {{"lag_min_steps", fit.lag_min_steps},
            {"lag_max_steps", fit.lag_max_steps},
            {"dt", fit.dt},
            {"series", series}};
}

nlohmann::json to_json(const OptimizeTrace& trace) {
    return {{"iterations", trace.iterations},
            {"exit_reason", trace.exit_reason},
            {"exit_residual", json_number(trace.exit_residual)},
            {"empty_cell_events", trace.empty_cell_events},
            {"final_distortion",
             trace.distortion.empty() ? nlohmann::json() : json_number(trace.distortion.back())}};
}

nlohmann::json to_json(const ExponentBounds& b) {
    return {{"lower", json_number(b.lower)},
            {"value", json_number(b.value)},
            {"upper", json_number(b.upper)},
            {"low_exponent", b.low_exponent},
            {"high_exponent", b.high_exponent}};
}

nlohmann::json to_json(const std::vector<MonotonicityEntry>& entries) {
    auto a = nlohmann::json::array();
    for (const auto& e : entries)
        a.push_back({{"n", e.n},
                     {"error", json_number(e.error)},
                     {"std_error", json_number(e.std_error)},
                     {"significant_gap", e.significant_gap},
                     {"flagged", e.flagged},
                     {"reason", e.reason}});
    return a;
}

nlohmann::json to_json(const DiscretePathSpace& space) {
    return {{"m", space.m()},
            {"d", space.d()},
            {"p", space.p()},
            {"t_start", space.grid().front()},
            {"t_end", space.grid().back()},
            {"total_mass", space.total_mass()}};
}

void write_text_file(const std::filesystem::path& file, const std::string& text) {
    auto out = open_out(file, true);
    out << text;
    if (!out) fail(ErrorCode::io, "failed writing " + file.string());
}

std::string read_text_file(const std::filesystem::path& file) {
    auto in = open_in(file, true);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace fq
