#include "fq/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include "fq/error.hpp"
#include "fq/io.hpp"
#include "fq/oracles.hpp"
#include "fq/rng.hpp"

namespace fq {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

class Writer {
public:
    Writer(fs::path dir, std::string hash) : dir_(std::move(dir)), hash_(std::move(hash)) {
        if (!dir_.empty()) {
            std::error_code ec;
            fs::create_directories(dir_, ec);
            if (ec) fail(ErrorCode::io, "cannot create output directory " + dir_.string());
        }
    }
    bool active() const { return !dir_.empty(); }

    void json_file(const std::string& name, json body) {
        if (!active()) return;
        body["config_hash"] = hash_;
        write_text_file(dir_ / name, body.dump(2) + "\n");
        files_.push_back(name);
    }
    template <class F>
    void csv_file(const std::string& name, F&& fill) {
        if (!active()) return;
        std::ostringstream out;
        out << "# config_hash=" << hash_ << '\n';
        fill(out);
        write_text_file(dir_ / name, out.str());
        files_.push_back(name);
    }
    void codebook_file(const std::string& name, const Codebook& cb) {
        if (!active()) return;
        save_codebook(cb, dir_ / name);
        files_.push_back(name);
    }
    const std::vector<std::string>& files() const { return files_; }

private:
    fs::path dir_;
    std::string hash_;
    std::vector<std::string> files_;
};

bool holder_applicable(const DiscretePathSpace& space, std::string& why) {
    if (space.m() < 64) {
        why = "grid has fewer than 64 nodes";
        return false;
    }
    const auto g = space.grid();
    const double dt = (g.back() - g.front()) / static_cast<double>(space.m() - 1);
    for (std::size_t k = 1; k < g.size(); ++k)
        if (std::abs((g[k] - g[k - 1]) - dt) > 1e-9 * dt) {
            why = "grid is not uniform";
            return false;
        }
    return true;
}

OptimizerConfig optimizer_for(const ExperimentConfig& cfg) {
    OptimizerConfig o = cfg.optimizer;
    o.seed = cfg.stream_seed("optimizer");
    return o;
}

// Random distinct sample paths as the initial codebook.
Codebook sample_init(const PathSample& sample, const DiscretePathSpace& space, std::size_t n,
                     std::uint64_t seed) {
    Rng rng = make_rng(seed);
    std::vector<std::size_t> order(sample.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<Path> atoms;
    for (std::size_t idx : order) {
        if (atoms.size() == n) break;
        const Path cand(sample[idx]);
        if (std::find(atoms.begin(), atoms.end(), cand) == atoms.end()) atoms.push_back(cand);
    }
    if (atoms.size() < n)
        fail(ErrorCode::optimization, "sample has fewer than n distinct paths");
    return Codebook(space, std::move(atoms));
}

struct Built {
    Codebook codebook;
    OptimizeTrace trace;
    std::vector<Codebook> ladder;  // sizes 1..n, when splitting was used
};

Built build_codebook(const ExperimentConfig& cfg, const PathSample& sample,
                     const DiscretePathSpace& space) {
    const auto opt = optimizer_for(cfg);
    if (cfg.quantizer.init == "splitting") {
        std::vector<OptimizeTrace> traces;
        auto ladder = splitting_ladder(sample, space, cfg.quantizer.n, cfg.quantizer.r,
                                       cfg.stream_seed("splitting"), opt, &traces);
        Codebook cb = ladder.back();
        return {std::move(cb), std::move(traces.back()), std::move(ladder)};
    }
    auto init = sample_init(sample, space, cfg.quantizer.n, cfg.stream_seed("init"));
    auto res = optimize(opt, init, sample, cfg.quantizer.r);
    return {std::move(res.codebook), std::move(res.trace), {}};
}

json moment_json(const MomentReport& m) {
    return {{"value", json_number(m.value)},
            {"first_half", json_number(m.first_half)},
            {"second_half", json_number(m.second_half)},
            {"stable", m.stable},
            {"heavy_tail", m.heavy_tail},
            {"note", m.note}};
}

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

Codebook dedupe(const DiscretePathSpace& space, std::vector<Path> atoms) {
    std::vector<Path> unique;
    for (auto& a : atoms)
        if (std::find(unique.begin(), unique.end(), a) == unique.end()) unique.push_back(std::move(a));
    return Codebook(space, std::move(unique));
}

}  // namespace

void write_manifest(const fs::path& out_dir, const std::string& command,
                    const std::string& config_hash, const std::vector<std::string>& files) {
    if (out_dir.empty()) return;
    json m = {{"timestamp", utc_timestamp()},
              {"tool", "fq"},
              {"version", kToolVersion},
              {"command", command},
              {"config_hash", config_hash},
              {"files", files}};
    write_text_file(out_dir / "manifest.json", m.dump(2) + "\n");
}

QuantizeOutcome run_quantize(const ExperimentConfig& cfg, const fs::path& out_dir) {
    cfg.validate();
    const auto space = cfg.make_space();
    const auto spec = cfg.make_process();
    const double r = cfg.quantizer.r;
    const auto sample = sample_paths(spec, space, cfg.sample.n_paths, cfg.stream_seed("sample"));
    const auto moments = moment_check(sample, space, r);

    auto built = build_codebook(cfg, sample, space);
    const auto asg = assign(built.codebook, sample);
    QuantizeOutcome out{built.codebook, distortion(built.codebook, asg, r),
                        stationarity_residual(built.codebook, sample, asg, r), built.trace,
                        std::nullopt, std::nullopt, {}};

    std::string holder_note;
    if (holder_applicable(space, holder_note))
        out.holder = holder_fit(out.codebook, {cfg.diagnostics.lag_min, cfg.diagnostics.lag_max});
    const auto pins = cfg.pin_indices();
    if (!pins.empty()) out.pinning = boundary_pinning(out.codebook, pins, cfg.diagnostics.pin_value);

    Writer w(out_dir, cfg.hash());
    if (w.active()) {
        if (cfg.wants("binary")) w.codebook_file("codebook.bin", out.codebook);
        if (cfg.wants("csv")) {
            w.csv_file("codebook.csv", [&](std::ostream& o) { write_codebook_csv(out.codebook, o); });
            w.csv_file("trace.csv", [&](std::ostream& o) { write_trace_csv(out.trace, o); });
            if (out.holder)
                w.csv_file("holder.csv", [&](std::ostream& o) { write_holder_csv(*out.holder, o); });
        }
        if (cfg.wants("json")) {
            json d = to_json(out.distortion);
            d["process"] = sample.process_tag();
            d["space"] = to_json(space);
            d["n"] = out.codebook.size();
            d["moments"] = moment_json(moments);
            d["optimizer"] = to_json(out.trace);
            w.json_file("distortion.json", d);
            w.json_file("stationarity.json", to_json(out.stationarity));
            json h = out.holder ? to_json(*out.holder) : json{{"skipped", holder_note}};
            if (out.pinning) h["pinning"] = {{"nodes", pins}, {"value", cfg.diagnostics.pin_value},
                                             {"max_deviation", *out.pinning}};
            w.json_file("holder.json", h);
        }
        out.files = w.files();
        write_manifest(out_dir, "quantize", cfg.hash(), out.files);
    }
    return out;
}

const std::vector<std::string>& oracle_names() {
    static const std::vector<std::string> names{"c0", "l1", "sharp2", "supnorm", "closed_form"};
    return names;
}

json run_oracles(const std::vector<std::string>& selection, const OracleOptions& opt,
                 const fs::path& out_dir) {
    for (const auto& s : selection)
        if (std::find(oracle_names().begin(), oracle_names().end(), s) == oracle_names().end())
            fail(ErrorCode::config, "unknown oracle '" + s + "' (choose from c0, l1, sharp2, supnorm, closed_form)");
    require(!selection.empty(), ErrorCode::config, "no oracle selected");

    json entries = json::array();
    auto add = [&](const std::string& oracle, const std::string& quantity, double expected,
                   double computed, double tol) {
        const bool pass = std::abs(computed - expected) <= tol;
        entries.push_back({{"oracle", oracle},
                           {"quantity", quantity},
                           {"expected", json_number(expected)},
                           {"computed", json_number(computed)},
                           {"tolerance", tol},
                           {"pass", pass}});
    };
    auto add_check = [&](const std::string& oracle, const std::string& quantity, bool ok) {
        entries.push_back({{"oracle", oracle}, {"quantity", quantity}, {"expected", true},
                           {"computed", ok}, {"tolerance", 0}, {"pass", ok}});
    };

    // Headline value per oracle.
    std::map<std::string, double> headline;
    auto wants = [&](const char* n) {
        return std::find(selection.begin(), selection.end(), n) != selection.end();
    };

    if (wants("c0")) {
        const auto ex = c0_example(opt.c0_M);
        headline["c0"] = ex.value_at_half;
        add("c0", "E||X-a||_inf at a=(1/2,...)", 0.5, ex.value_at_half, 1e-12);
        add("c0", "truncated minimum (simplex)", 0.5, ex.best_value, 1e-9);
        add("c0", "truncated minimum (pdhg)", 0.5, ex.best_value_pdhg, 1e-6);
        double dev = 0.0;
        for (double v : ex.best_point) dev = std::max(dev, std::abs(v - 0.5));
        add("c0", "minimizer distance to (1/2,...) (sup)", 0.0, dev, 1e-6);
        bool decreasing = true;
        for (std::size_t k = 1; k < ex.sequence_values.size(); ++k)
            decreasing = decreasing && ex.sequence_values[k] < ex.sequence_values[k - 1];
        add_check("c0", "a^(m) values strictly decreasing", decreasing);
        add("c0", "a^(M) value", 0.5, ex.sequence_values.back(), 1e-12);
        double worst = 0.0;
        for (std::size_t k = 0; k < ex.sequence_values.size(); ++k)
            worst = std::max(worst, std::abs(ex.sequence_values[k] - ex.sequence_closed_form[k]));
        add("c0", "a^(m) values vs closed form (max abs diff)", 0.0, worst, 1e-12);
    }
    if (wants("l1")) {
        const auto ex = l1_hyperplane_example(opt.l1_M);
        headline["l1"] = ex.e_F;
        add("l1", "e_F (two-variable minimum)", 4.0 / 3.0, ex.e_F, 1e-9);
        add("l1", "e_l1 (simplex)", 1.0, ex.e_l1, 1e-6);
        add("l1", "e_l1 (pdhg)", 1.0, ex.e_l1_pdhg, 1e-6);
        double dev = 0.0;
        for (std::size_t k = 0; k < ex.minimizer_l1.size(); ++k)
            dev = std::max(dev, std::abs(ex.minimizer_l1[k] - (k == 0 ? 1.0 : 0.0)));
        add("l1", "minimizer distance to u^(1) (sup)", 0.0, dev, 1e-6);
        double worst = 0.0;
        for (std::size_t k = 0; k < ex.candidate_values.size(); ++k)
            worst = std::max(worst, std::abs(ex.candidate_values[k] - ex.candidate_closed_form[k]));
        add("l1", "a^(k) values vs 1 + 1/c_k (max abs diff)", 0.0, worst, 1e-12);
        add_check("l1", "min_k (1 + 1/c_k) < 4/3", ex.e_E_upper < 4.0 / 3.0);
    }
    if (wants("sharp2")) {
        std::vector<std::size_t> ms;
        if (opt.sharp_m == 0)
            for (std::size_t m = 2; m <= 10; ++m) ms.push_back(m);
        else
            ms.push_back(opt.sharp_m);
        for (std::size_t m : ms) {
            const auto ex = sharp_constant_example(m);
            const std::string tag = "m=" + std::to_string(m);
            headline["sharp2"] = ex.ratio;
            add("sharp2", "e_E " + tag, 1.0, ex.e_E, 1e-9);
            add("sharp2", "e_F " + tag, ex.ratio_closed_form, ex.e_F, 1e-9);
            add("sharp2", "e_F pdhg " + tag, ex.ratio_closed_form, ex.e_F_pdhg, 1e-6);
            add("sharp2", "ratio " + tag, ex.ratio_closed_form, ex.ratio, 1e-9);
            add_check("sharp2", "ratio <= 2 " + tag, ex.ratio <= 2.0);
        }
    }
    if (wants("supnorm")) {
        const auto ex = sup_counterexample(opt.sup_n_funcs, 0, 32, opt.seed);
        headline["supnorm"] = ex.value_at_h.front();
        double worst = 0.0;
        for (double v : ex.dist_to_h) worst = std::max(worst, std::abs(v - 0.5));
        add("supnorm", "max_n | ||f_n - h||_sup - 1/2 |", 0.0, worst, 0.0);
        for (std::size_t k = 0; k < ex.r_values.size(); ++k)
            add("supnorm", "(E||X-h||^r)^(1/r) r=" + format_double(ex.r_values[k]), 0.5,
                ex.value_at_h[k], 1e-12);
        add_check("supnorm", "every polynomial probe exceeds 1/2", ex.min_probe_margin > 1e-6);
    }
    if (wants("closed_form")) {
        headline["closed_form"] = closed_form_error({ProcessKind::brownian, 1, 2.0, 2.0, 0.0, 1.0, 0.0});
        add("closed_form", "brownian n=1 p=r=2", std::sqrt(0.5),
            closed_form_error({ProcessKind::brownian, 1, 2.0, 2.0, 0.0, 1.0, 0.0}), 1e-15);
        add("closed_form", "bridge n=1 p=r=2", std::sqrt(1.0 / 6.0),
            closed_form_error({ProcessKind::bridge, 1, 2.0, 2.0, 0.0, 1.0, 0.0}), 1e-15);
        add("closed_form", "ou b=1 t0=4 n=1 p=r=2", std::sqrt(1.0 - std::exp(-4.0)),
            closed_form_error({ProcessKind::ou, 1, 2.0, 2.0, 0.0, 4.0, 1.0}), 1e-15);
        bool miss = false;
        try {
            closed_form_error({ProcessKind::fbm, 3, 2.0, 2.0, 0.0, 1.0, 0.0});
        } catch (const Error& e) {
            miss = e.code() == ErrorCode::no_oracle;
        }
        add_check("closed_form", "unregistered (fbm, n=3) reports no oracle", miss);
    }

    bool all = true;
    for (const auto& e : entries) all = all && e["pass"].get<bool>();
    json summary = json::array();
    for (const auto& name : selection) {
        bool ok = true;
        for (const auto& e : entries) ok = ok && (e["oracle"] != name || e["pass"].get<bool>());
        summary.push_back({{"oracle", name}, {"value", json_number(headline[name])}, {"pass", ok}});
    }
    json manifest = {{"summary", summary}, {"entries", entries}, {"all_pass", all},
                     {"selection", selection}};
    if (!out_dir.empty()) {
        std::ostringstream sel;
        for (const auto& s : selection) sel << s << ';';
        const std::string hash = [&] {
            std::ostringstream h;
            h << std::hex << fnv1a(sel.str() + std::to_string(opt.c0_M) + "," +
                                   std::to_string(opt.l1_M) + "," + std::to_string(opt.sharp_m) +
                                   "," + std::to_string(opt.sup_n_funcs) + "," +
                                   std::to_string(opt.seed));
            return h.str();
        }();
        Writer w(out_dir, hash);
        w.json_file("oracles.json", manifest);
        write_manifest(out_dir, "oracle", hash, w.files());
    }
    return manifest;
}

json run_bounds(const ExperimentConfig& cfg, const fs::path& out_dir) {
    cfg.validate();
    const std::size_t d = cfg.space.d;
    if (d < 2) fail(ErrorCode::config, "bounds requires d ≥ 2 (got d = 1)");
    const bool sup = cfg.bounds.mode == "sup";
    const double p = cfg.quantizer.p;
    if (!sup && cfg.quantizer.r != p)
        fail(ErrorCode::config, "lp bounds compare e_{n,p} with r = p; set quantizer.r = quantizer.p");
    const double r = sup ? cfg.quantizer.r : p;
    const NormKind norm = sup ? NormKind::sup : NormKind::lp;
    const std::size_t n = cfg.quantizer.n;

    std::vector<std::size_t> sizes = cfg.bounds.sizes;
    if (sizes.empty())
        sizes.assign(d, static_cast<std::size_t>(std::floor(std::pow(static_cast<double>(n), 1.0 / static_cast<double>(d)) + 1e-9)));
    if (sizes.size() != d) fail(ErrorCode::config, "bounds.sizes needs one entry per coordinate");
    std::size_t prod = 1;
    for (auto s : sizes) prod *= s;
    if (prod > n) fail(ErrorCode::config, "product of bounds.sizes exceeds quantizer.n");

    const auto space = cfg.make_space();
    const auto space1 = space.with_d(1);
    const auto sample = sample_paths(cfg.make_process(), space, cfg.sample.n_paths,
                                     cfg.stream_seed("sample"));
    // Codebooks are designed in L^p (Lloyd when p = 2) and measured in the
    // sandwich's norm; the design exponent is p in both modes.
    const double r_design = p;
    const auto opt = optimizer_for(cfg);

    auto measure = [&](const Codebook& cb, const PathSample& s) {
        return distortion(cb, assign(cb, s, norm), r);
    };

    // Joint estimate: best of the optimized n-codebook and the product codebook.
    const auto joint_ladder = splitting_ladder(sample, space, n, r_design,
                                               derive_seed(cfg.stream_seed("splitting"), "joint"), opt);
    const Codebook& joint_cb = joint_ladder.back();
    const auto joint_opt = measure(joint_cb, sample);

    std::vector<Codebook> marginal_small;
    std::vector<DistortionReport> upper_terms, lower_terms;
    json coords = json::array();
    std::vector<PathSample> marginals;
    for (std::size_t i = 0; i < d; ++i) marginals.push_back(sample.marginal(i));
    for (std::size_t i = 0; i < d; ++i) {
        const auto ladder = splitting_ladder(marginals[i], space1, std::max(n, sizes[i]), r_design,
                                             derive_seed(cfg.stream_seed("splitting"), i), opt);
        marginal_small.push_back(ladder[sizes[i] - 1]);
        upper_terms.push_back(measure(ladder[sizes[i] - 1], marginals[i]));
        lower_terms.push_back(measure(ladder[n - 1], marginals[i]));
    }
    const Codebook product = product_quantizer(marginal_small);
    const auto joint_prod = measure(product, sample);
    const bool use_prod = joint_prod.value < joint_opt.value;
    const DistortionReport& joint = use_prod ? joint_prod : joint_opt;
    const Codebook& best_joint = use_prod ? product : joint_cb;

    // Coordinate projections of the joint codebook are n-codebooks for X_i.
    for (std::size_t i = 0; i < d; ++i) {
        std::vector<Path> proj;
        for (const auto& a : best_joint.atoms()) {
            Path b(1, space.m());
            const auto row = a.view().row(i);
            std::copy(row.begin(), row.end(), b.values().begin());
            proj.push_back(std::move(b));
        }
        const auto rep = measure(dedupe(space1, std::move(proj)), marginals[i]);
        const bool projected = rep.value < lower_terms[i].value;
        if (projected) lower_terms[i] = rep;
        coords.push_back({{"coord", i},
                          {"n_i", sizes[i]},
                          {"e_ni_pow", json_number(upper_terms[i].value)},
                          {"e_ni_pow_std_error", json_number(upper_terms[i].std_error)},
                          {"e_n_pow", json_number(lower_terms[i].value)},
                          {"e_n_pow_std_error", json_number(lower_terms[i].std_error)},
                          {"e_n_from_projection", projected}});
    }

    double sum_upper = 0.0, var_upper = joint.std_error * joint.std_error;
    double lower = 0.0, var_lower = joint.std_error * joint.std_error;
    for (std::size_t i = 0; i < d; ++i) {
        sum_upper += upper_terms[i].value;
        var_upper += upper_terms[i].std_error * upper_terms[i].std_error;
    }
    if (sup) {
        std::size_t arg = 0;
        for (std::size_t i = 1; i < d; ++i)
            if (lower_terms[i].value > lower_terms[arg].value) arg = i;
        lower = lower_terms[arg].value;
        var_lower += lower_terms[arg].std_error * lower_terms[arg].std_error;
    } else {
        for (std::size_t i = 0; i < d; ++i) {
            lower += lower_terms[i].value;
            var_lower += lower_terms[i].std_error * lower_terms[i].std_error;
        }
    }
    const double c = 1.0;  // |.|_inf <= c |.|_r on R^d with the max norm
    const double upper = std::pow(c, r) * sum_upper;
    const double sigma_upper = std::sqrt(var_upper);
    const double sigma_lower = std::sqrt(var_lower);
    const bool upper_ok = joint.value <= upper + 3.0 * sigma_upper;
    const bool lower_ok = lower <= joint.value + 3.0 * sigma_lower;

    json report = {{"mode", cfg.bounds.mode},
                   {"d", d},
                   {"n", n},
                   {"sizes", sizes},
                   {"r", r},
                   {"p", p},
                   {"n_paths", sample.size()},
                   {"joint_pow", json_number(joint.value)},
                   {"joint_pow_std_error", json_number(joint.std_error)},
                   {"joint_optimized_pow", json_number(joint_opt.value)},
                   {"joint_product_pow", json_number(joint_prod.value)},
                   {"joint_from_product", use_prod},
                   {"lower", json_number(lower)},
                   {"lower_sigma", json_number(sigma_lower)},
                   {"upper", json_number(upper)},
                   {"upper_sigma", json_number(sigma_upper)},
                   {"c", c},
                   {"lower_holds", lower_ok},
                   {"upper_holds", upper_ok},
                   {"pass", lower_ok && upper_ok},
                   {"coords", coords}};
    Writer w(out_dir, cfg.hash());
    if (w.active()) {
        w.json_file("bounds.json", report);
        if (cfg.wants("binary")) w.codebook_file("product_codebook.bin", product);
        write_manifest(out_dir, "bounds", cfg.hash(), w.files());
    }
    return report;
}

json run_diagnose(const ExperimentConfig& cfg, const fs::path& out_dir) {
    cfg.validate();
    const auto space = cfg.make_space();
    const double r = cfg.quantizer.r;
    const auto sample = sample_paths(cfg.make_process(), space, cfg.sample.n_paths,
                                     cfg.stream_seed("sample"));
    std::vector<Codebook> ladder;
    std::optional<Codebook> cb;
    if (!cfg.diagnostics.codebook.empty()) {
        cb = load_codebook(cfg.diagnostics.codebook, space);
    } else {
        auto built = build_codebook(cfg, sample, space);
        cb = std::move(built.codebook);
        ladder = std::move(built.ladder);
    }
    const auto asg = assign(*cb, sample);
    const auto st = stationarity_residual(*cb, sample, asg, r);
    json report = {{"n", cb->size()},
                   {"process", sample.process_tag()},
                   {"space", to_json(space)},
                   {"distortion", to_json(distortion(*cb, asg, r))},
                   {"stationarity", to_json(st)},
                   {"moments", moment_json(moment_check(sample, space, r))}};
    report["cross_exponent_bounds"] = to_json(cross_exponent_bounds(sample, space, *cb, r));

    std::string why;
    std::optional<HolderFit> hf;
    if (holder_applicable(space, why)) {
        hf = holder_fit(*cb, {cfg.diagnostics.lag_min, cfg.diagnostics.lag_max});
        json h = to_json(*hf);
        // Regularity assertions only cover atoms outside I_r(alpha).
        for (auto& s : h["series"]) s["eligible"] = st.regularity_eligible[s["atom"].get<std::size_t>()] != 0;
        report["holder"] = h;
    } else {
        report["holder"] = {{"skipped", why}};
    }
    const auto pins = cfg.pin_indices();
    if (!pins.empty())
        report["pinning"] = {{"nodes", pins},
                             {"value", cfg.diagnostics.pin_value},
                             {"max_deviation", boundary_pinning(*cb, pins, cfg.diagnostics.pin_value)}};
    if (cfg.diagnostics.ladder && ladder.size() > 1)
        report["monotonicity"] = to_json(monotonicity_check(ladder, sample, r));

    Writer w(out_dir, cfg.hash());
    if (w.active()) {
        w.json_file("diagnostics.json", report);
        if (hf && cfg.wants("csv"))
            w.csv_file("holder.csv", [&](std::ostream& o) { write_holder_csv(*hf, o); });
        write_manifest(out_dir, "diagnose", cfg.hash(), w.files());
    }
    return report;
}

}  // namespace fq
