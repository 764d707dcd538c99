#pragma once

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "continuation.hpp"
#include "observables.hpp"
#include "verify.hpp"

namespace bethe3::cli {

enum class Command { Trace, Spectrum, Critical, Density, Verify };
enum class Format { JsonLines, Csv };

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int solver = 2;
inline constexpr int verification = 3;
inline constexpr int usage = 64;
} // namespace exit_code

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    Command command = Command::Trace;
    std::vector<QuantumLabel> labels;
    std::optional<double> c;
    std::optional<std::pair<double, double>> c_range;
    double step = 0.05;
    std::pair<int, int> n2_range{1, 6};
    int resolution = 32;
    std::string out; // empty: standard output
    Format format = Format::JsonLines;
    std::string suite = "all";
    double residual_tol = tol::residual;
};

inline QuantumLabel parse_label(const std::string& s)
{
    std::istringstream is(s);
    QuantumLabel l;
    char comma = 0;
    if (!(is >> l.n1 >> comma >> l.n2) || comma != ',' || !(is >> std::ws).eof())
        throw UsageError("label must look like n1,n2: '" + s + "'");
    return l;
}

namespace detail {

inline std::pair<std::string, std::string> split_range(const std::string& s)
{
    const auto pos = s.find("..");
    if (pos == std::string::npos) return {s, s};
    return {s.substr(0, pos), s.substr(pos + 2)};
}

inline double to_double(const std::string& s)
{
    std::size_t used = 0;
    double v = 0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != s.size() || !std::isfinite(v)) throw UsageError("not a number: '" + s + "'");
    return v;
}

inline int to_int(const std::string& s)
{
    std::size_t used = 0;
    int v = 0;
    try {
        v = std::stoi(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != s.size()) throw UsageError("not an integer: '" + s + "'");
    return v;
}

} // namespace detail

/** @brief "a..b" or a single value "a". */
inline std::pair<double, double> parse_range(const std::string& s)
{
    const auto [a, b] = detail::split_range(s);
    return {detail::to_double(a), detail::to_double(b)};
}

inline std::pair<int, int> parse_int_range(const std::string& s)
{
    const auto [a, b] = detail::split_range(s);
    return {detail::to_int(a), detail::to_int(b)};
}

inline Command parse_command(const std::string& s)
{
    if (s == "trace") return Command::Trace;
    if (s == "spectrum") return Command::Spectrum;
    if (s == "critical") return Command::Critical;
    if (s == "density") return Command::Density;
    if (s == "verify") return Command::Verify;
    throw UsageError("unknown command '" + s + "'");
}

inline void validate(const RunConfig& cfg)
{
    if (!(cfg.step > 0)) throw UsageError("--step must be positive");
    if (!(cfg.residual_tol > 0)) throw UsageError("residual tolerance must be positive");
    for (const auto& l : cfg.labels) {
        try {
            canonicalize(l);
        } catch (const SolverError& e) {
            throw UsageError(e.what());
        }
    }
    switch (cfg.command) {
    case Command::Trace:
        if (cfg.labels.empty()) throw UsageError("trace needs --label or --labels");
        if (!cfg.c_range && !cfg.c) throw UsageError("trace needs --c-range or --c");
        if (cfg.c_range && cfg.c_range->first > cfg.c_range->second) throw UsageError("--c-range must be ascending");
        break;
    case Command::Spectrum:
        if (cfg.labels.empty()) throw UsageError("spectrum needs --labels");
        if (!cfg.c) throw UsageError("spectrum needs --c");
        break;
    case Command::Critical:
        if (cfg.n2_range.first < 1 || cfg.n2_range.first > cfg.n2_range.second)
            throw UsageError("--n2 must be a nonempty range of integers >= 1");
        break;
    case Command::Density:
        if (cfg.labels.size() != 1) throw UsageError("density needs exactly one --label");
        if (!cfg.c) throw UsageError("density needs --c");
        if (cfg.resolution < 8) throw UsageError("--resolution must be at least 8");
        break;
    case Command::Verify: {
        const auto& names = verify::suite_names();
        if (cfg.suite != "all" && std::find(names.begin(), names.end(), cfg.suite) == names.end())
            throw UsageError("unknown suite '" + cfg.suite + "'");
        break;
    }
    }
}

/**
 * @brief Build a RunConfig from argv. Range values may start with '-', so "--c-range -10..2" is
 * rewritten to "--c-range=-10..2" before CLI11 sees it.
 */
inline RunConfig parse_args(int argc, const char* const* argv)
{
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) {
        std::string a = argv[i];
        const bool takes_value = a == "--c" || a == "--c-range" || a == "--step" || a == "--label";
        if (takes_value && i + 1 < argc) {
            a += '=';
            a += argv[++i];
        }
        args.push_back(a);
    }
    std::reverse(args.begin(), args.end()); // CLI11 consumes the vector from the back

    CLI::App app{"Three bosons on a ring with attractive or repulsive contact interactions"};
    app.require_subcommand(1, 1);
    std::string label, c_str, range_str, n2_str = "1..6", format = "json-lines";
    std::vector<std::string> labels;
    RunConfig cfg;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--out", cfg.out, "output file (default: standard output)");
        sub->add_option("--format", format, "json-lines or csv")->check(CLI::IsMember({"json-lines", "csv"}));
    };
    auto* trace = app.add_subcommand("trace", "follow one or more labels over a coupling range");
    trace->add_option("--label", label, "n1,n2");
    trace->add_option("--labels", labels, "n1,n2 ...");
    trace->add_option("--c-range", range_str, "cmin..cmax");
    trace->add_option("--c", c_str, "single coupling");
    trace->add_option("--step", cfg.step, "grid spacing in c");
    add_common(trace);
    auto* spec = app.add_subcommand("spectrum", "energy-ordered levels at one coupling");
    spec->add_option("--labels", labels, "n1,n2 ...");
    spec->add_option("--label", label, "n1,n2");
    spec->add_option("--c", c_str, "coupling")->required();
    spec->add_option("--step", cfg.step, "continuation step from c = 0");
    add_common(spec);
    auto* crit = app.add_subcommand("critical", "critical couplings C(1,n2)");
    crit->add_option("--n2", n2_str, "n2 or a..b");
    add_common(crit);
    auto* dens = app.add_subcommand("density", "ternary density grid");
    dens->add_option("--label", label, "n1,n2")->required();
    dens->add_option("--c", c_str, "coupling")->required();
    dens->add_option("--resolution", cfg.resolution, "sub-triangles per side");
    dens->add_option("--step", cfg.step, "continuation step from c = 0");
    add_common(dens);
    auto* ver = app.add_subcommand("verify", "run invariant suites");
    ver->add_option("--suite", cfg.suite, "core, transcendental, continuation, asymptotics, wavefunction, observables or all");
    add_common(ver);

    try {
        app.parse(args);
    } catch (const CLI::CallForHelp&) {
        throw UsageError(app.help());
    } catch (const CLI::CallForAllHelp&) {
        throw UsageError(app.help());
    } catch (const CLI::ParseError& e) {
        throw UsageError(e.what());
    }

    cfg.command = parse_command(app.get_subcommands().front()->get_name());
    if (!label.empty()) cfg.labels.push_back(parse_label(label));
    for (const auto& l : labels) cfg.labels.push_back(parse_label(l));
    if (!c_str.empty()) cfg.c = detail::to_double(c_str);
    if (!range_str.empty()) cfg.c_range = parse_range(range_str);
    if (cfg.command == Command::Critical) cfg.n2_range = parse_int_range(n2_str);
    cfg.format = format == "csv" ? Format::Csv : Format::JsonLines;
    if (const char* env = std::getenv("BETHE3_TOL")) {
        try {
            cfg.residual_tol = detail::to_double(env);
        } catch (const UsageError&) {
            throw UsageError(std::string("BETHE3_TOL is not a number: '") + env + "'");
        }
    }
    validate(cfg);
    return cfg;
}

namespace detail {

using nlohmann::json;

/** @brief Writes records as JSON lines or CSV with a fixed column order per table. */
class RecordWriter {
public:
    RecordWriter(std::ostream& os, Format f) : os_(os), fmt_(f) { os_.precision(17); }

    bool csv() const { return fmt_ == Format::Csv; }

    void header(const std::vector<std::string>& cols)
    {
        if (fmt_ != Format::Csv) return;
        cols_ = cols;
        for (std::size_t i = 0; i < cols.size(); ++i) os_ << (i ? "," : "") << cols[i];
        os_ << '\n';
    }

    void record(const json& j)
    {
        if (fmt_ == Format::JsonLines) {
            os_ << j.dump() << '\n';
        } else {
            for (std::size_t i = 0; i < cols_.size(); ++i) {
                if (i) os_ << ',';
                if (!j.contains(cols_[i]) || j[cols_[i]].is_null()) continue;
                const json& v = j[cols_[i]];
                if (v.is_number_float()) os_ << v.get<double>();
                else if (v.is_string()) os_ << csv_field(v.get<std::string>());
                else os_ << v.dump();
            }
            os_ << '\n';
        }
        os_.flush();
    }

    void error(const std::string& kind, const std::string& message)
    {
        if (fmt_ == Format::JsonLines) {
            os_ << json{{"record", "error"}, {"kind", kind}, {"message", message}}.dump() << '\n';
        } else {
            std::string m = message;
            std::replace(m.begin(), m.end(), '\n', ' ');
            os_ << "# error," << kind << ',' << m << '\n';
        }
        os_.flush();
    }

private:
    static std::string csv_field(const std::string& s)
    {
        if (s.find_first_of(",\"\n") == std::string::npos) return s;
        std::string q = "\"";
        for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch == '\n' ? ' ' : ch);
        return q + '"';
    }

    std::ostream& os_;
    Format fmt_;
    std::vector<std::string> cols_;
};

inline json coords_json(const BranchCoords& b)
{
    if (auto r = std::get_if<RealCoords>(&b)) return {{"delta1", r->delta1}, {"delta2", r->delta2}, {"p", r->p}};
    const auto& q = std::get<ComplexCoords>(b);
    return {{"alpha", q.alpha}, {"gamma", q.gamma}, {"p", q.p}};
}

inline std::pair<double, double> coord_pair(const BranchCoords& b)
{
    if (auto r = std::get_if<RealCoords>(&b)) return {r->delta1, r->delta2};
    const auto& q = std::get<ComplexCoords>(b);
    return {q.alpha, q.gamma};
}

// One state; `flat` spells coordinates and momenta out as scalar columns for csv.
inline json state_json(const StateSolution& s, bool flat, bool observables = true)
{
    json j{{"record", "state"}, {"np", s.label.np()}, {"c", s.c}, {"branch", to_string(s.branch())}, {"E", s.energy}};
    if (flat) {
        const auto [x1, x2] = coord_pair(s.coords);
        j["n1"] = s.label.n1;
        j["n2"] = s.label.n2;
        j["x1"] = x1;
        j["x2"] = x2;
        j["p"] = std::visit([](const auto& b) { return b.p; }, s.coords);
        for (int i = 0; i < 3; ++i) {
            j["k" + std::to_string(i + 1) + "_re"] = s.momenta[i].real();
            j["k" + std::to_string(i + 1) + "_im"] = s.momenta[i].imag();
        }
    } else {
        j["label"] = {s.label.n1, s.label.n2};
        j["coords"] = coords_json(s.coords);
        json k = json::array();
        for (const auto& m : s.momenta) k.push_back({m.real(), m.imag()});
        j["k"] = k;
    }
    if (observables) {
        // observables are optional: coinciding momenta (c = 0 with equal labels) or unresolvable poles skip them
        try {
            const double n = norm_squared(s);
            j["norm"] = n;
            j["V"] = potential_expectation(s, n);
        } catch (const SolverError&) {
        }
    }
    return j;
}

inline const std::vector<std::string>& state_columns()
{
    static const std::vector<std::string> cols{"n1", "n2", "np", "c", "branch", "x1", "x2", "p", "k1_re", "k1_im",
                                               "k2_re", "k2_im", "k3_re", "k3_im", "E", "norm", "V"};
    return cols;
}

inline TraceOptions trace_options(const RunConfig& cfg)
{
    TraceOptions o;
    o.residual_tol = cfg.residual_tol;
    return o;
}

inline int run_trace(const RunConfig& cfg, RecordWriter& w)
{
    w.header(state_columns());
    const auto [lo, hi] = cfg.c_range ? *cfg.c_range : std::pair{*cfg.c, *cfg.c};
    std::vector<QuantumLabel> labels = cfg.labels;
    std::stable_sort(labels.begin(), labels.end());
    for (const auto& l : labels) {
        const Trajectory tr = trace_root(l, lo, hi, cfg.step, trace_options(cfg));
        for (const auto& s : tr.samples) w.record(state_json(s.state, w.csv()));
    }
    return exit_code::ok;
}

inline int run_spectrum(const RunConfig& cfg, RecordWriter& w)
{
    std::vector<std::string> cols{"rank"};
    for (const auto& c : state_columns()) cols.push_back(c);
    w.header(cols);
    const SpectrumResult res = spectrum(cfg.labels, *cfg.c, false, cfg.step, trace_options(cfg));
    int rank = 0;
    for (const auto& s : res.states) {
        json j = state_json(s, w.csv());
        j["record"] = "level";
        j["rank"] = rank++;
        w.record(j);
    }
    if (!res.failures.empty()) {
        std::string msg;
        for (const auto& f : res.failures) msg += f.label.str() + ": " + f.message + "; ";
        w.error("solver", msg);
        return exit_code::solver;
    }
    return exit_code::ok;
}

inline int run_critical(const RunConfig& cfg, RecordWriter& w)
{
    w.header({"n1", "n2", "C", "u0"});
    for (int n2 = cfg.n2_range.first; n2 <= cfg.n2_range.second; ++n2) {
        const CriticalPoint cp = find_critical({1, n2});
        w.record({{"record", "critical"}, {"n1", 1}, {"n2", n2}, {"C", cp.C}, {"u0", cp.u0.value_or(0.0)}});
    }
    return exit_code::ok;
}

inline int run_density(const RunConfig& cfg, RecordWriter& w)
{
    const StateSolution s = solve_at(cfg.labels.front(), *cfg.c, cfg.step, trace_options(cfg));
    const TernaryGrid g = density_grid(s, cfg.resolution);
    w.header({"r12", "r23", "r31", "density"});
    for (const auto& cell : g.cells)
        w.record({{"record", "cell"}, {"r12", cell.r12}, {"r23", cell.r23}, {"r31", cell.r31}, {"density", cell.density},
                  {"kind", to_string(cell.kind)}, {"row", cell.row}, {"col", cell.col}, {"up", cell.upward}});
    return exit_code::ok;
}

inline int run_verify(const RunConfig& cfg, RecordWriter& w)
{
    w.header({"suite", "name", "pass", "detail"});
    bool all = true;
    for (const auto& r : verify::run_suite(cfg.suite)) {
        all = all && r.pass;
        w.record({{"record", "check"}, {"suite", r.suite}, {"name", r.name}, {"pass", r.pass}, {"detail", r.detail}});
    }
    return all ? exit_code::ok : exit_code::verification;
}

} // namespace detail

/** @brief Execute a validated configuration, writing records to `os`. Solver errors end in a trailer record. */
inline int run(const RunConfig& cfg, std::ostream& os)
{
    detail::RecordWriter w(os, cfg.format);
    try {
        switch (cfg.command) {
        case Command::Trace: return detail::run_trace(cfg, w);
        case Command::Spectrum: return detail::run_spectrum(cfg, w);
        case Command::Critical: return detail::run_critical(cfg, w);
        case Command::Density: return detail::run_density(cfg, w);
        case Command::Verify: return detail::run_verify(cfg, w);
        }
    } catch (const SolverError& e) {
        w.error(to_string(e.kind()), e.what());
        return exit_code::solver;
    }
    return exit_code::usage;
}

/** @brief Like run(), opening cfg.out when set. */
inline int run(const RunConfig& cfg)
{
    if (cfg.out.empty()) return run(cfg, std::cout);
    std::ofstream f(cfg.out);
    if (!f) {
        std::cerr << "cannot open " << cfg.out << '\n';
        return exit_code::usage;
    }
    return run(cfg, f);
}

/** @brief Full command-line entry point; usage problems go to `err` with exit code 64. */
inline int main(int argc, const char* const* argv, std::ostream& err = std::cerr)
{
    RunConfig cfg;
    try {
        cfg = parse_args(argc, argv);
    } catch (const UsageError& e) {
        err << e.what() << '\n';
        return exit_code::usage;
    }
    return run(cfg);
}

} // namespace bethe3::cli
