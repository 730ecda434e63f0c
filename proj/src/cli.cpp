#include "shapeci/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "shapeci/bands.hpp"
#include "shapeci/errors.hpp"
#include "shapeci/format.hpp"
#include "shapeci/lp.hpp"

namespace shapeci::cli {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

double parse_double_text(std::string_view text, bool& ok) {
    double v = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    if (first != last && *first == '+') {
        ++first;
    }
    const auto res = std::from_chars(first, last, v);
    ok = res.ec == std::errc() && res.ptr == last && first != last && std::isfinite(v);
    return v;
}

double config_double(const std::string& key, const std::string& value) {
    bool ok = false;
    const double v = parse_double_text(value, ok);
    if (!ok) {
        throw ConfigError("config key '" + key + "': expected a real number, got '" + value + "'");
    }
    return v;
}

std::uint64_t config_u64(const std::string& key, const std::string& value) {
    std::uint64_t v = 0;
    const auto res = std::from_chars(value.data(), value.data() + value.size(), v);
    if (res.ec != std::errc() || res.ptr != value.data() + value.size() || value.empty()) {
        throw ConfigError("config key '" + key + "': expected a non-negative integer, got '" + value + "'");
    }
    return v;
}

std::size_t config_count(const std::string& key, const std::string& value) {
    return static_cast<std::size_t>(config_u64(key, value));
}

std::vector<ShapeMode> config_modes(const std::string& value) {
    if (value == "both") {
        return {ShapeMode::None, ShapeMode::Rkd};
    }
    if (auto m = parse_shape_mode(value)) {
        return {*m};
    }
    throw ConfigError("config key 'shape': expected none, rkd or both, got '" + value + "'");
}

std::string modes_text(const std::vector<ShapeMode>& modes) {
    if (modes.size() == 2) {
        return "both";
    }
    return std::string(to_string(modes.front()));
}

// Reads the RkdConfig keys shared by both commands; consumed keys are erased.
void take_rkd_keys(std::map<std::string, std::string>& kv, RkdConfig& rkd) {
    auto take = [&](const char* key, auto&& apply) {
        if (auto it = kv.find(key); it != kv.end()) {
            apply(it->first, it->second);
            kv.erase(it);
        }
    };
    take("half_width", [&](auto& k, auto& v) { rkd.half_width = config_double(k, v); });
    take("alpha", [&](auto& k, auto& v) { rkd.alpha = config_double(k, v); });
    take("m_draws", [&](auto& k, auto& v) { rkd.m_draws = config_count(k, v); });
    take("seed", [&](auto& k, auto& v) { rkd.seed = config_u64(k, v); });
    take("delta0", [&](auto& k, auto& v) { rkd.delta0 = config_double(k, v); });
    take("delta1", [&](auto& k, auto& v) { rkd.delta1 = config_double(k, v); });
    take("n_grid", [&](auto& k, auto& v) { rkd.n_grid = config_count(k, v); });
    take("shape", [&](auto&, auto& v) { rkd.modes = config_modes(v); });
}

void reject_leftovers(const std::map<std::string, std::string>& kv) {
    if (!kv.empty()) {
        std::string keys;
        for (const auto& [k, v] : kv) {
            keys += (keys.empty() ? "" : ", ") + k;
        }
        throw ConfigError("unknown config key(s): " + keys);
    }
}

void validate_rkd(const RkdConfig& rkd) {
    try {
        rkd.validate();
    } catch (const DomainError& e) {
        throw ConfigError(std::string("invalid config: ") + e.what());
    }
}

std::vector<std::pair<std::string, std::string>> rkd_effective(const RkdConfig& rkd) {
    return {
        {"k", std::to_string(rkd.k)},
        {"half_width", format_double(rkd.half_width)},
        {"alpha", format_double(rkd.alpha)},
        {"m_draws", std::to_string(rkd.m_draws)},
        {"seed", std::to_string(rkd.seed)},
        {"delta0", format_double(rkd.delta0)},
        {"delta1", format_double(rkd.delta1)},
        {"n_grid", std::to_string(rkd.n_grid)},
        {"shape", modes_text(rkd.modes)},
    };
}

std::ifstream open_input(const std::string& path, const char* what) {
    std::ifstream in(path);
    if (!in) {
        throw InputError(std::string("cannot open ") + what + " '" + path + "'");
    }
    return in;
}

std::ifstream open_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file '" + path + "'");
    }
    return in;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out || !(out << text)) {
        throw InputError("cannot write '" + path + "'");
    }
}

// "band.csv" + "rkd" -> "band_rkd.csv".
std::string band_path(const std::string& base, ShapeMode mode) {
    const auto slash = base.find_last_of('/');
    const auto dot = base.find_last_of('.');
    const std::string suffix = "_" + std::string(to_string(mode));
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) {
        return base + suffix;
    }
    return base.substr(0, dot) + suffix + base.substr(dot);
}

nlohmann::ordered_json json_number(double v) {
    if (!std::isfinite(v)) {
        return nullptr;
    }
    return v;
}

} // namespace

std::map<std::string, std::string> parse_key_values(std::istream& in) {
    std::map<std::string, std::string> kv;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t.front() == '#') {
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config line " + std::to_string(line_no) + ": expected 'key = value'");
        }
        std::string key = trim(std::string_view(t).substr(0, eq));
        std::string value = trim(std::string_view(t).substr(eq + 1));
        if (key.empty() || value.empty()) {
            throw ConfigError("config line " + std::to_string(line_no) + ": empty key or value");
        }
        if (!kv.emplace(key, value).second) {
            throw ConfigError("config line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
        }
    }
    return kv;
}

KinkSchedule AnalyzeConfig::schedule() const {
    if (schedule_kind == "ceiling") {
        return KinkSchedule::proportional_with_ceiling(slope, ceiling);
    }
    return KinkSchedule::piecewise(slope_left, slope_right, kink);
}

std::vector<std::pair<std::string, std::string>> AnalyzeConfig::effective() const {
    auto out = rkd_effective(rkd);
    out.emplace_back("schedule", schedule_kind);
    if (schedule_kind == "ceiling") {
        out.emplace_back("slope", format_double(slope));
        out.emplace_back("ceiling", format_double(ceiling));
    } else {
        out.emplace_back("slope_left", format_double(slope_left));
        out.emplace_back("slope_right", format_double(slope_right));
        out.emplace_back("kink", format_double(kink));
    }
    out.emplace_back("format", format);
    out.emplace_back("band_points", std::to_string(band_points));
    if (band_points > 0) {
        out.emplace_back("band_output", band_output);
    }
    if (!input.empty()) {
        out.emplace_back("input", input);
    }
    return out;
}

AnalyzeConfig parse_analyze_config(std::istream& in) {
    auto kv = parse_key_values(in);
    AnalyzeConfig cfg;
    if (auto it = kv.find("k"); it != kv.end()) {
        cfg.rkd.k = config_count("k", it->second);
        kv.erase(it);
    }
    take_rkd_keys(kv, cfg.rkd);

    auto take_string = [&](const char* key, std::string& dst) {
        if (auto it = kv.find(key); it != kv.end()) {
            dst = it->second;
            kv.erase(it);
            return true;
        }
        return false;
    };
    auto take_required_double = [&](const char* key, double& dst) {
        auto it = kv.find(key);
        if (it == kv.end()) {
            throw ConfigError(std::string("config key '") + key + "' is required for schedule = " + cfg.schedule_kind);
        }
        dst = config_double(key, it->second);
        kv.erase(it);
    };

    take_string("schedule", cfg.schedule_kind);
    if (cfg.schedule_kind == "ceiling") {
        take_required_double("slope", cfg.slope);
        take_required_double("ceiling", cfg.ceiling);
    } else if (cfg.schedule_kind == "piecewise") {
        take_required_double("slope_left", cfg.slope_left);
        take_required_double("slope_right", cfg.slope_right);
        take_required_double("kink", cfg.kink);
    } else {
        throw ConfigError("config key 'schedule': expected piecewise or ceiling, got '" + cfg.schedule_kind + "'");
    }
    take_string("format", cfg.format);
    if (cfg.format != "json" && cfg.format != "csv") {
        throw ConfigError("config key 'format': expected json or csv, got '" + cfg.format + "'");
    }
    std::string band_points;
    if (take_string("band_points", band_points)) {
        cfg.band_points = config_count("band_points", band_points);
    }
    take_string("band_output", cfg.band_output);
    if (cfg.band_points > 0 && cfg.band_output.empty()) {
        throw ConfigError("band_points > 0 requires band_output");
    }
    if (cfg.band_points == 1) {
        throw ConfigError("band_points must be 0 or at least 2");
    }
    take_string("input", cfg.input);
    take_string("output", cfg.output);
    reject_leftovers(kv);

    validate_rkd(cfg.rkd);
    try {
        kink_denominator(cfg.schedule());
    } catch (const DomainError& e) {
        throw ConfigError(std::string("invalid schedule: ") + e.what());
    }
    return cfg;
}

std::vector<std::pair<std::string, std::string>> SimulateConfig::effective() const {
    std::string ks;
    for (std::size_t k : k_values) {
        ks += (ks.empty() ? "" : ",") + std::to_string(k);
    }
    auto out = rkd_effective(design.rkd);
    out.front() = {"k", ks};
    out.emplace(out.begin(), "reps", std::to_string(design.reps));
    out.emplace(out.begin(), "n", std::to_string(design.n));
    return out;
}

SimulateConfig parse_simulate_config(std::istream& in) {
    auto kv = parse_key_values(in);
    SimulateConfig cfg;
    if (auto it = kv.find("n"); it != kv.end()) {
        cfg.design.n = config_count("n", it->second);
        kv.erase(it);
    }
    if (auto it = kv.find("reps"); it != kv.end()) {
        cfg.design.reps = config_count("reps", it->second);
        kv.erase(it);
    }
    if (auto it = kv.find("k"); it != kv.end()) {
        cfg.k_values.clear();
        std::stringstream ss(it->second);
        std::string item;
        while (std::getline(ss, item, ',')) {
            cfg.k_values.push_back(config_count("k", trim(item)));
        }
        kv.erase(it);
    }
    take_rkd_keys(kv, cfg.design.rkd);
    if (auto it = kv.find("output"); it != kv.end()) {
        cfg.output = it->second;
        kv.erase(it);
    }
    reject_leftovers(kv);

    if (cfg.k_values.empty()) {
        throw ConfigError("config key 'k': need at least one value");
    }
    if (cfg.design.n < 1 || cfg.design.reps < 1) {
        throw ConfigError("n and reps must be at least 1");
    }
    for (std::size_t k : cfg.k_values) {
        RkdConfig probe = cfg.design.rkd;
        probe.k = k;
        validate_rkd(probe);
    }
    cfg.design.rkd.k = cfg.k_values.front();
    return cfg;
}

Dataset read_xy_csv(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line)) {
        throw InputError("empty data file", 1);
    }
    ++line_no;
    {
        std::string header = trim(line);
        if (header.size() >= 3 && header.compare(0, 3, "\xEF\xBB\xBF") == 0) {
            header.erase(0, 3);
        }
        if (header != "x,y") {
            throw InputError("expected header 'x,y'", line_no);
        }
    }
    Dataset d;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty()) {
            continue;
        }
        const auto comma = t.find(',');
        if (comma == std::string::npos || t.find(',', comma + 1) != std::string::npos) {
            throw InputError("expected two comma-separated values", line_no);
        }
        const std::string xs = trim(std::string_view(t).substr(0, comma));
        const std::string ys = trim(std::string_view(t).substr(comma + 1));
        bool okx = false;
        bool oky = false;
        const double x = parse_double_text(xs, okx);
        const double y = parse_double_text(ys, oky);
        if (!okx || !oky) {
            throw InputError("non-numeric or non-finite value '" + (okx ? ys : xs) + "'", line_no);
        }
        d.x.push_back(x);
        d.y.push_back(y);
    }
    if (d.empty()) {
        throw InputError("data file has no observations", line_no);
    }
    return d;
}

std::string render_analyze_report(const AnalyzeConfig& cfg, const std::vector<RkdReport>& reports) {
    std::ostringstream os;
    if (cfg.format == "csv") {
        for (const auto& [k, v] : cfg.effective()) {
            os << "# " << k << " = " << v << '\n';
        }
        os << "shape_mode,status,lower,upper,length,cv,plug_in,n_used,k,alpha,seed\n";
        for (const RkdReport& r : reports) {
            os << to_string(r.mode) << ',' << to_string(r.ci.status) << ',' << format_double(r.ci.lower) << ','
               << format_double(r.ci.upper) << ',' << format_double(r.length) << ',' << format_double(r.cv) << ','
               << format_double(r.plug_in) << ',' << r.n_used << ',' << r.k << ',' << format_double(cfg.rkd.alpha)
               << ',' << cfg.rkd.seed << '\n';
        }
        return os.str();
    }

    nlohmann::ordered_json doc;
    nlohmann::ordered_json config = nlohmann::ordered_json::object();
    for (const auto& [k, v] : cfg.effective()) {
        config[k] = v;
    }
    doc["config"] = config;
    doc["reports"] = nlohmann::ordered_json::array();
    for (const RkdReport& r : reports) {
        nlohmann::ordered_json j;
        j["shape_mode"] = std::string(to_string(r.mode));
        j["status"] = std::string(to_string(r.ci.status));
        j["ci"] = {{"lower", json_number(r.ci.lower)}, {"upper", json_number(r.ci.upper)}};
        j["length"] = json_number(r.length);
        j["cv"] = r.cv;
        j["plug_in"] = r.plug_in;
        j["n_used"] = r.n_used;
        j["k"] = r.k;
        j["alpha"] = cfg.rkd.alpha;
        j["seed"] = cfg.rkd.seed;
        std::vector<std::size_t> binding;
        for (std::size_t i = 0; i < r.ci.binding.size(); ++i) {
            if (r.ci.binding[i]) {
                binding.push_back(i);
            }
        }
        j["binding_rows"] = binding;
        if (r.ci.status == LpStatus::Infeasible) {
            j["infeasibility"] = r.ci.infeasibility;
        }
        doc["reports"].push_back(std::move(j));
    }
    return doc.dump(2) + "\n";
}

namespace {

template <class F>
int guarded(std::ostream& err, F&& body) {
    try {
        return body();
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const InputError& e) {
        err << "input error: " << e.what() << '\n';
        return kInputError;
    } catch (const DomainError& e) {
        err << "input error: " << e.what() << '\n';
        return kInputError;
    } catch (const NearSingular& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kNumericalFailure;
    } catch (const IterationLimit& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kNumericalFailure;
    }
}

std::string render_band(const ConfidenceBand& band) {
    std::ostringstream os;
    os << "w0,lower,upper\n";
    for (std::size_t i = 0; i < band.grid.size(); ++i) {
        os << format_double(band.grid[i]) << ',' << format_double(band.lower[i]) << ','
           << format_double(band.upper[i]) << '\n';
    }
    return os.str();
}

} // namespace

int cmd_analyze(const std::string& config_path, const std::optional<std::string>& data_path,
                const std::optional<std::string>& out_path, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        std::ifstream cfg_in = open_config(config_path);
        AnalyzeConfig cfg = parse_analyze_config(cfg_in);
        if (data_path) {
            cfg.input = *data_path;
        }
        if (out_path) {
            cfg.output = *out_path;
        }
        if (cfg.input.empty()) {
            throw ConfigError("no data file: pass --data or set 'input'");
        }
        std::ifstream data_in = open_input(cfg.input, "data file");
        const Dataset data = read_xy_csv(data_in);

        const auto reports = run_rkd(data, cfg.schedule(), cfg.rkd);
        const std::string text = render_analyze_report(cfg, reports);
        if (cfg.output.empty()) {
            out << text;
        } else {
            write_text(cfg.output, text);
        }

        if (cfg.band_points > 0) {
            const SieveBasis basis(cfg.schedule().kink, cfg.rkd.half_width, cfg.rkd.k);
            const SieveFit fitted = fit(window(data, basis.lower(), basis.upper()), basis);
            const BootstrapConfig boot{cfg.rkd.m_draws, cfg.rkd.alpha, cfg.rkd.seed};
            const double cv = cv_general(fitted, boot).cv;
            std::vector<double> grid(cfg.band_points);
            for (std::size_t i = 0; i < grid.size(); ++i) {
                grid[i] = basis.lower() + 2.0 * basis.half_width() * static_cast<double>(i) /
                                              static_cast<double>(grid.size() - 1);
            }
            for (ShapeMode mode : cfg.rkd.modes) {
                const ShapeConstraints shape = mode == ShapeMode::Rkd
                                                   ? rkd_shape_constraints(basis, cfg.rkd.n_grid, cfg.rkd.delta1)
                                                   : ShapeConstraints::none(basis.dim());
                write_text(band_path(cfg.band_output, mode),
                           render_band(band_general(fitted, grid, cfg.rkd.delta0, shape, cv)));
            }
        }

        for (const RkdReport& r : reports) {
            if (r.ci.status == LpStatus::Infeasible) {
                err << "shape restrictions are infeasible at level alpha for mode " << to_string(r.mode) << '\n';
                return static_cast<int>(kInfeasible);
            }
        }
        return static_cast<int>(kOk);
    });
}

int cmd_simulate(const std::string& config_path, const std::optional<std::string>& out_path, std::ostream& out,
                 std::ostream& err) {
    return guarded(err, [&] {
        std::ifstream cfg_in = open_config(config_path);
        SimulateConfig cfg = parse_simulate_config(cfg_in);
        if (out_path) {
            cfg.output = *out_path;
        }
        std::vector<SimResult> results;
        for (std::size_t k : cfg.k_values) {
            SimDesign design = cfg.design;
            design.rkd.k = k;
            const auto r = run_study(design);
            results.insert(results.end(), r.begin(), r.end());
        }
        std::ostringstream csv;
        write_sim_csv(csv, results);

        std::ostream& summary = cfg.output.empty() ? err : out;
        if (cfg.output.empty()) {
            out << csv.str();
        } else {
            write_text(cfg.output, csv.str());
        }
        summary << "simulation summary (true effect " << format_double(kDgpTheta) << ")\n";
        for (const auto& [k, v] : cfg.effective()) {
            summary << "  " << k << " = " << v << '\n';
        }
        for (const SimResult& r : results) {
            summary << "  k=" << r.k << " n=" << r.n << " shape=" << to_string(r.mode)
                    << " avg_length=" << format_double(r.avg_length) << " coverage=" << format_double(r.coverage)
                    << " reps=" << r.reps << " infeasible=" << r.infeasible_count << " failed=" << r.failed_count
                    << '\n';
        }
        return static_cast<int>(kOk);
    });
}

int cmd_lp_solve(const std::string& problem_path, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        std::ifstream in = open_input(problem_path, "LP problem");
        const LpProblem problem = parse_lp_problem(in);
        const LpSolution solution = solve(problem);
        write_lp_solution(out, solution);
        return static_cast<int>(kOk);
    });
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Shape-constrained confidence intervals for regression kink designs"};
    app.require_subcommand(1);

    std::string analyze_config;
    std::string analyze_data;
    std::string analyze_out;
    auto* analyze = app.add_subcommand("analyze", "Confidence intervals for a kink effect from x,y CSV data");
    analyze->add_option("--config", analyze_config, "Configuration file (key = value)")->required();
    auto* data_opt = analyze->add_option("--data", analyze_data, "CSV data with header x,y");
    auto* analyze_out_opt = analyze->add_option("--out", analyze_out, "Report path (default: standard output)");

    std::string simulate_config;
    std::string simulate_out;
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo coverage study on the built-in design");
    simulate->add_option("--config", simulate_config, "Configuration file (key = value)")->required();
    auto* simulate_out_opt = simulate->add_option("--out", simulate_out, "Results CSV path (default: standard output)");

    std::string lp_path;
    auto* lp = app.add_subcommand("lp", "Linear-program utilities");
    lp->require_subcommand(1);
    auto* lp_solve = lp->add_subcommand("solve", "Solve an LP in the text problem format");
    lp_solve->add_option("problem", lp_path, "Problem file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << e.what() << '\n' << app.help();
        return kConfigError;
    }

    auto optional_of = [](CLI::Option* opt, const std::string& value) -> std::optional<std::string> {
        return opt->count() > 0 ? std::optional<std::string>(value) : std::nullopt;
    };
    if (analyze->parsed()) {
        return cmd_analyze(analyze_config, optional_of(data_opt, analyze_data),
                           optional_of(analyze_out_opt, analyze_out), out, err);
    }
    if (simulate->parsed()) {
        return cmd_simulate(simulate_config, optional_of(simulate_out_opt, simulate_out), out, err);
    }
    return cmd_lp_solve(lp_path, out, err);
}

} // namespace shapeci::cli
