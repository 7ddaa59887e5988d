#include "fq/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <map>
#include <sstream>

#include "fq/error.hpp"
#include "fq/io.hpp"
#include "fq/rng.hpp"

namespace fq {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::string unquote(std::string s) {
    if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front())
        return s.substr(1, s.size() - 2);
    return s;
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const char* want) {
    fail(ErrorCode::config, "invalid value for " + key + ": '" + value + "' (expected " + want + ")");
}

double to_double(const std::string& key, const std::string& v) {
    double out = 0.0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size()) bad_value(key, v, "a number");
    return out;
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
    std::uint64_t out = 0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size())
        bad_value(key, v, "a non-negative integer");
    return out;
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    bad_value(key, v, "true or false");
}

std::vector<std::string> to_list(std::string v) {
    v = trim(v);
    if (v.size() >= 2 && v.front() == '[' && v.back() == ']') v = v.substr(1, v.size() - 2);
    std::vector<std::string> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = unquote(trim(item));
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

std::string join(const std::vector<std::string>& items) {
    std::string s;
    for (std::size_t i = 0; i < items.size(); ++i) s += (i ? "," : "") + items[i];
    return s;
}

template <class T>
std::string join_numbers(const std::vector<T>& items) {
    std::vector<std::string> s;
    for (const auto& v : items) {
        if constexpr (std::is_floating_point_v<T>)
            s.push_back(format_double(v));
        else
            s.push_back(std::to_string(v));
    }
    return join(s);
}

struct Entry {
    std::string section;
    std::string key;
    std::string type;
    std::string help;
    std::function<void(ExperimentConfig&, const std::string&)> set;
    std::function<std::string(const ExperimentConfig&)> get;
};

#define FQ_DOUBLE(sec, field, help)                                                           \
    Entry{#sec, #field, "real", help,                                                         \
          [](ExperimentConfig& c, const std::string& v) { c.sec.field = to_double(#sec "." #field, v); }, \
          [](const ExperimentConfig& c) { return format_double(c.sec.field); }}
#define FQ_SIZE(sec, field, help)                                                             \
    Entry{#sec, #field, "integer", help,                                                      \
          [](ExperimentConfig& c, const std::string& v) {                                     \
              c.sec.field = static_cast<std::size_t>(to_u64(#sec "." #field, v));             \
          },                                                                                  \
          [](const ExperimentConfig& c) { return std::to_string(c.sec.field); }}
#define FQ_STRING(sec, field, type, help)                                                     \
    Entry{#sec, #field, type, help,                                                           \
          [](ExperimentConfig& c, const std::string& v) { c.sec.field = v; },                 \
          [](const ExperimentConfig& c) { return c.sec.field; }}

const std::vector<Entry>& schema() {
    static const std::vector<Entry> entries = {
        FQ_STRING(process, kind, "brownian|bridge|ou|fbm|diffusion_euler|gamma|compound_poisson|stable_levy",
                  "generating law"),
        FQ_DOUBLE(process, hurst, "fbm Hurst index H in (0,1)"),
        FQ_DOUBLE(process, ou_c, "stationary OU covariance exp(-c|s-t|)"),
        FQ_DOUBLE(process, gamma_a, "Gamma process rate a"),
        FQ_DOUBLE(process, lambda, "compound Poisson intensity"),
        FQ_STRING(process, jump_law, "normal|constant", "compound Poisson jump law"),
        FQ_DOUBLE(process, jump_mean, "jump mean (or the constant jump)"),
        FQ_DOUBLE(process, jump_sd, "jump standard deviation"),
        FQ_DOUBLE(process, stable_rho, "symmetric stable index in (0,2)"),
        FQ_DOUBLE(process, drift_a, "diffusion drift a + b x"),
        FQ_DOUBLE(process, drift_b, "diffusion drift a + b x"),
        FQ_DOUBLE(process, diffusion_a, "diffusion volatility a + b x"),
        FQ_DOUBLE(process, diffusion_b, "diffusion volatility a + b x"),
        Entry{"process", "x0", "real list", "initial value per coordinate (empty = 0)",
              [](ExperimentConfig& c, const std::string& v) {
                  c.process.x0.clear();
                  for (const auto& s : to_list(v)) c.process.x0.push_back(to_double("process.x0", s));
              },
              [](const ExperimentConfig& c) { return join_numbers(c.process.x0); }},
        FQ_SIZE(space, m, "grid nodes"),
        FQ_DOUBLE(space, t_start, "first grid node"),
        FQ_DOUBLE(space, t_end, "last grid node"),
        FQ_STRING(space, measure, "lebesgue|exponential", "quadrature measure"),
        FQ_DOUBLE(space, measure_b, "b of the weight exp(-b t) (exponential measure)"),
        FQ_SIZE(space, d, "path dimension"),
        FQ_SIZE(quantizer, n, "codebook size"),
        FQ_DOUBLE(quantizer, p, "norm exponent p >= 1"),
        FQ_DOUBLE(quantizer, r, "distortion exponent r >= 1"),
        FQ_STRING(quantizer, init, "splitting|sample", "initial codebook"),
        Entry{"optimizer", "method", "lloyd|sgd", "Lloyd needs p = 2 and r >= 2; SGD otherwise",
              [](ExperimentConfig& c, const std::string& v) {
                  if (v == "lloyd")
                      c.optimizer.method = OptimizerMethod::lloyd;
                  else if (v == "sgd")
                      c.optimizer.method = OptimizerMethod::sgd;
                  else
                      bad_value("optimizer.method", v, "lloyd or sgd");
              },
              [](const ExperimentConfig& c) { return to_string(c.optimizer.method); }},
        FQ_SIZE(optimizer, max_iters, "iteration cap"),
        FQ_DOUBLE(optimizer, tol, "Lloyd: relative distortion improvement; SGD: relative residual"),
        FQ_DOUBLE(optimizer, sgd_c0, "SGD step c0 / (1 + decay k); 0 selects 0.1 S^(2-r)"),
        FQ_DOUBLE(optimizer, sgd_decay, "SGD step decay; negative selects 1/N"),
        FQ_SIZE(optimizer, sgd_eval_interval, "SGD iterations between evaluations; 0 selects N"),
        Entry{"optimizer", "empty_cell_policy", "split_largest|resample", "empty cell repair",
              [](ExperimentConfig& c, const std::string& v) {
                  if (v == "split_largest")
                      c.optimizer.empty_cell_policy = EmptyCellPolicy::split_largest;
                  else if (v == "resample")
                      c.optimizer.empty_cell_policy = EmptyCellPolicy::resample;
                  else
                      bad_value("optimizer.empty_cell_policy", v, "split_largest or resample");
              },
              [](const ExperimentConfig& c) { return to_string(c.optimizer.empty_cell_policy); }},
        FQ_SIZE(sample, n_paths, "sample size N"),
        Entry{"sample", "seed", "integer", "top-level seed; streams derive from (seed, purpose)",
              [](ExperimentConfig& c, const std::string& v) { c.sample.seed = to_u64("sample.seed", v); },
              [](const ExperimentConfig& c) { return std::to_string(c.sample.seed); }},
        FQ_STRING(output, dir, "path", "output directory"),
        Entry{"output", "formats", "list of binary|csv|json", "result formats",
              [](ExperimentConfig& c, const std::string& v) { c.output.formats = to_list(v); },
              [](const ExperimentConfig& c) { return join(c.output.formats); }},
        Entry{"bounds", "sizes", "integer list", "per-coordinate sizes n_i (empty = floor(n^(1/d)))",
              [](ExperimentConfig& c, const std::string& v) {
                  c.bounds.sizes.clear();
                  for (const auto& s : to_list(v))
                      c.bounds.sizes.push_back(static_cast<std::size_t>(to_u64("bounds.sizes", s)));
              },
              [](const ExperimentConfig& c) { return join_numbers(c.bounds.sizes); }},
        FQ_STRING(bounds, mode, "lp|sup", "L^p sandwich or sup-norm sandwich"),
        FQ_SIZE(diagnostics, lag_min, "smallest Hölder lag in grid steps"),
        FQ_SIZE(diagnostics, lag_max, "largest Hölder lag in grid steps; 0 selects (m-1)/8"),
        Entry{"diagnostics", "pin_nodes", "list of integer|first|last", "nodes for boundary pinning",
              [](ExperimentConfig& c, const std::string& v) { c.diagnostics.pin_nodes = to_list(v); },
              [](const ExperimentConfig& c) { return join(c.diagnostics.pin_nodes); }},
        FQ_DOUBLE(diagnostics, pin_value, "expected value at the pinned nodes"),
        FQ_STRING(diagnostics, codebook, "path", "binary codebook to diagnose (empty builds one)"),
        Entry{"diagnostics", "ladder", "bool", "monotonicity check over the splitting ladder 1..n",
              [](ExperimentConfig& c, const std::string& v) {
                  c.diagnostics.ladder = to_bool("diagnostics.ladder", v);
              },
              [](const ExperimentConfig& c) { return std::string(c.diagnostics.ladder ? "true" : "false"); }},
    };
    return entries;
}

#undef FQ_DOUBLE
#undef FQ_SIZE
#undef FQ_STRING

}  // namespace

void ExperimentConfig::validate() const {
    auto check = [](bool ok, const std::string& msg) {
        if (!ok) fail(ErrorCode::config, msg);
    };
    try {
        parse_process_kind(process.kind);
    } catch (const Error& e) {
        fail(ErrorCode::config, e.what());
    }
    check(process.jump_law == "normal" || process.jump_law == "constant",
          "process.jump_law must be normal or constant");
    check(space.measure == "lebesgue" || space.measure == "exponential",
          "space.measure must be lebesgue or exponential");
    check(space.m >= 2, "space.m must be >= 2");
    check(space.d >= 1, "space.d must be >= 1");
    check(std::isfinite(space.t_start) && std::isfinite(space.t_end) && space.t_end > space.t_start,
          "space needs t_start < t_end");
    check(quantizer.n >= 1, "quantizer.n must be >= 1");
    check(quantizer.p >= 1.0 && std::isfinite(quantizer.p), "quantizer.p must be >= 1");
    check(quantizer.r >= 1.0 && std::isfinite(quantizer.r), "quantizer.r must be >= 1");
    check(quantizer.init == "splitting" || quantizer.init == "sample",
          "quantizer.init must be splitting or sample");
    check(sample.n_paths >= 1, "sample.n_paths must be >= 1");
    check(!process.x0.empty() ? process.x0.size() == space.d : true,
          "process.x0 needs one entry per coordinate");
    for (const auto& f : output.formats)
        check(f == "binary" || f == "csv" || f == "json", "unknown output format: " + f);
    check(bounds.mode == "lp" || bounds.mode == "sup", "bounds.mode must be lp or sup");
    for (auto s : bounds.sizes) check(s >= 1, "bounds.sizes entries must be >= 1");
    try {
        optimizer.validate();
        make_process().validate(space.d);
        make_space();
        pin_indices();
    } catch (const Error& e) {
        fail(ErrorCode::config, e.what());
    }
}

DiscretePathSpace ExperimentConfig::make_space() const {
    if (space.measure == "exponential")
        return DiscretePathSpace::exponential(space.t_start, space.t_end, space.m, space.measure_b,
                                              quantizer.p, space.d);
    return DiscretePathSpace::trapezoid(space.t_start, space.t_end, space.m, quantizer.p, space.d);
}

ProcessSpec ExperimentConfig::make_process() const {
    ProcessSpec spec;
    const auto kind = parse_process_kind(process.kind);
    if (kind == ProcessKind::diffusion_euler)
        spec = affine_diffusion(process.drift_a, process.drift_b, process.diffusion_a,
                                process.diffusion_b);
    spec.kind = kind;
    spec.hurst = process.hurst;
    spec.ou_c = process.ou_c;
    spec.gamma_a = process.gamma_a;
    spec.lambda = process.lambda;
    spec.jump.kind = process.jump_law == "constant" ? JumpLaw::Kind::constant : JumpLaw::Kind::normal;
    spec.jump.mean = process.jump_mean;
    spec.jump.sd = process.jump_sd;
    spec.stable_rho = process.stable_rho;
    spec.x0 = process.x0;
    return spec;
}

std::vector<std::size_t> ExperimentConfig::pin_indices() const {
    std::vector<std::size_t> out;
    for (const auto& s : diagnostics.pin_nodes) {
        std::size_t k = 0;
        if (s == "first")
            k = 0;
        else if (s == "last")
            k = space.m - 1;
        else
            k = static_cast<std::size_t>(to_u64("diagnostics.pin_nodes", s));
        if (k >= space.m) fail(ErrorCode::config, "pin node " + s + " is outside the grid");
        out.push_back(k);
    }
    return out;
}

bool ExperimentConfig::wants(const std::string& format) const {
    return std::find(output.formats.begin(), output.formats.end(), format) != output.formats.end();
}

std::uint64_t ExperimentConfig::stream_seed(std::string_view purpose) const {
    return derive_seed(sample.seed, purpose);
}

std::string ExperimentConfig::canonical_text() const {
    std::string out;
    std::string section;
    for (const auto& e : schema()) {
        if (e.section != section) {
            section = e.section;
            out += "[" + section + "]\n";
        }
        out += e.key + " = " + e.get(*this) + "\n";
    }
    return out;
}

std::string ExperimentConfig::hash() const {
    static const char* hex = "0123456789abcdef";
    std::uint64_t h = fnv1a(canonical_text());
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i) {
        s[static_cast<std::size_t>(i)] = hex[h & 0xf];
        h >>= 4;
    }
    return s;
}

ExperimentConfig parse_config(std::string_view text) {
    ExperimentConfig cfg;
    std::map<std::string, const Entry*> index;
    for (const auto& e : schema()) index[e.section + "." + e.key] = &e;

    std::string section;
    std::size_t line_no = 0;
    std::map<std::string, std::size_t> seen;
    std::stringstream ss{std::string(text)};
    std::string raw;
    while (std::getline(ss, raw)) {
        ++line_no;
        // Strip comments outside quotes.
        std::string line;
        char quote = 0;
        for (char ch : raw) {
            if (quote) {
                if (ch == quote) quote = 0;
            } else if (ch == '"' || ch == '\'') {
                quote = ch;
            } else if (ch == '#' || ch == ';') {
                break;
            }
            line += ch;
        }
        line = trim(line);
        if (line.empty()) continue;
        const std::string where = "line " + std::to_string(line_no) + ": ";
        if (line.front() == '[') {
            if (line.back() != ']') fail(ErrorCode::config, where + "malformed section header");
            section = trim(std::string_view(line).substr(1, line.size() - 2));
            bool known = false;
            for (const auto& e : schema()) known = known || e.section == section;
            if (!known) fail(ErrorCode::config, where + "unknown section [" + section + "]");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) fail(ErrorCode::config, where + "expected key = value");
        const std::string key = trim(std::string_view(line).substr(0, eq));
        const std::string value = unquote(trim(std::string_view(line).substr(eq + 1)));
        const std::string full = section + "." + key;
        const auto it = index.find(full);
        if (section.empty() || it == index.end())
            fail(ErrorCode::config, where + "unknown key '" + (section.empty() ? key : full) + "'");
        if (seen.count(full))
            fail(ErrorCode::config, where + "duplicate key '" + full + "' (first on line " +
                                        std::to_string(seen[full]) + ")");
        seen[full] = line_no;
        try {
            it->second->set(cfg, value);
        } catch (const Error& e) {
            fail(ErrorCode::config, where + e.what());
        }
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& file) {
    std::string text;
    try {
        text = read_text_file(file);
    } catch (const Error& e) {
        fail(ErrorCode::config, std::string("cannot read config: ") + e.what());
    }
    return parse_config(text);
}

std::string config_schema() {
    const ExperimentConfig defaults;
    std::ostringstream out;
    out << "# Config schema: sectioned key = value, '#' starts a comment.\n"
        << "# Lists are comma separated, optionally in brackets. Unknown keys are errors.\n"
        << "# Random streams: derive_seed(sample.seed, purpose) with purposes\n"
        << "#   sample, optimizer, splitting, init.\n";
    std::string section;
    for (const auto& e : schema()) {
        if (e.section != section) {
            section = e.section;
            out << "\n[" << section << "]\n";
        }
        out << e.key << " = " << e.get(defaults) << "    # " << e.type << ": " << e.help << '\n';
    }
    return out.str();
}

}  // namespace fq
