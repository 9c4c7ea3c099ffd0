// experiments.hpp
// Experiment runners behind the command-line tool and their file formats.

#pragma once

#include "phasematch/asymptotic.hpp"
#include "phasematch/fullsim.hpp"
#include "phasematch/optimizer.hpp"

#include <json.hpp>

#include <charconv>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace phasematch {

inline constexpr const char* kVersion = "1.0.0";

enum class Command { trace, sweep, cutoff, critical_points, equivalence };
enum class TraceMode { classical, optimized };
enum class OutputFormat { csv, json, table };

enum ExitCode : int { exit_ok = 0, exit_usage = 1, exit_property = 2, exit_io = 3 };

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline std::string to_string(Command c) {
    switch (c) {
        case Command::trace: return "trace";
        case Command::sweep: return "sweep";
        case Command::cutoff: return "cutoff";
        case Command::critical_points: return "critical-points";
        case Command::equivalence: return "equivalence";
    }
    return "?";
}

inline std::string to_string(TraceMode m) { return m == TraceMode::classical ? "classical" : "optimized"; }

inline std::string to_string(OutputFormat f) {
    switch (f) {
        case OutputFormat::csv: return "csv";
        case OutputFormat::json: return "json";
        case OutputFormat::table: return "table";
    }
    return "?";
}

inline Command parse_command(const std::string& s) {
    if (s == "trace") return Command::trace;
    if (s == "sweep") return Command::sweep;
    if (s == "cutoff") return Command::cutoff;
    if (s == "critical-points") return Command::critical_points;
    if (s == "equivalence") return Command::equivalence;
    throw UsageError("unknown command '" + s + "'");
}

inline TraceMode parse_mode(const std::string& s) {
    if (s == "classical") return TraceMode::classical;
    if (s == "optimized") return TraceMode::optimized;
    throw UsageError("unknown mode '" + s + "' (expected classical|optimized)");
}

inline OutputFormat parse_format(const std::string& s) {
    if (s == "csv") return OutputFormat::csv;
    if (s == "json") return OutputFormat::json;
    if (s == "table") return OutputFormat::table;
    throw UsageError("unknown format '" + s + "' (expected csv|json|table)");
}

struct ExperimentSpec {
    Command command = Command::trace;
    std::optional<unsigned> n;
    std::optional<int> steps;
    std::optional<TraceMode> mode;
    int num_points = 1000;
    std::string output_path;  // empty: stdout
    OutputFormat format = OutputFormat::csv;
    std::uint64_t seed = OptimizerConfig{}.rng_seed;
    int grid = OptimizerConfig{}.coarse_grid;
    int restarts = OptimizerConfig{}.restarts;
    int cases = 20;

    OptimizerConfig optimizer() const {
        OptimizerConfig cfg;
        cfg.coarse_grid = grid;
        cfg.restarts = restarts;
        cfg.rng_seed = seed;
        return cfg;
    }

    void validate() const {
        auto need_n = [&] {
            if (!n) throw UsageError(to_string(command) + " requires --n");
            if (*n < 1 || *n > SearchSpace::kMaxQubits) throw UsageError("--n must be in [1, 62]");
        };
        switch (command) {
            case Command::trace:
                need_n();
                if (!steps) throw UsageError("trace requires --steps");
                if (*steps < 0) throw UsageError("--steps must be >= 0");
                if (!mode) throw UsageError("trace requires --mode classical|optimized");
                break;
            case Command::sweep:
            case Command::cutoff:
                need_n();
                if (num_points < 2) throw UsageError("--points must be >= 2");
                break;
            case Command::equivalence:
                need_n();
                if (*n > 20) throw UsageError("equivalence supports --n up to 20");
                if (steps && *steps < 0) throw UsageError("--steps must be >= 0");
                if (cases < 1) throw UsageError("--cases must be >= 1");
                break;
            case Command::critical_points: break;
        }
        if (grid < 3) throw UsageError("--grid must be >= 3");
        if (restarts < 1) throw UsageError("--restarts must be >= 1");
    }
};

// ---------------------------------------------------------------------------
// Trace

struct TraceRow {
    int step = 0;
    cplx amplitude_target;
    double probability = 0.0;
    std::optional<PhasePair> phases;  // absent on the initial row

    friend bool operator==(const TraceRow&, const TraceRow&) = default;
};

/// Iterates from the Hadamard start. Optimized mode maximizes the objective
/// for phi* = phi + theta at each step and applies the realized phi = phi* - theta.
inline std::vector<TraceRow> run_trace(const SearchSpace& space, int steps, TraceMode mode,
                                       const OptimizerConfig& cfg = {}) {
    std::vector<TraceRow> rows;
    ReducedState state = hadamard_init(space);
    auto record = [&](int step, std::optional<PhasePair> p) {
        rows.push_back({step, state.to_pair().a_target, target_probability(state), p});
    };
    record(0, std::nullopt);
    for (int k = 1; k <= steps; ++k) {
        PhasePair p = PhasePair::classical();
        if (mode == TraceMode::optimized) {
            const OptimizationResult r = optimize_phases(ObjectiveContext(state, space), cfg);
            p = PhasePair(r.best.psi, r.best.phi - state.theta());
        }
        state = apply_iterate(state, p, space);
        record(k, p);
    }
    return rows;
}

// ---------------------------------------------------------------------------
// Formatting

/// Shortest representation that round-trips to the same double.
inline std::string format_number(double x) {
    if (std::isnan(x)) return "nan";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

inline std::string fixed4(double x) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(4) << x;
    return os.str();
}

inline nlohmann::json spec_meta(const ExperimentSpec& spec) {
    nlohmann::json m;
    m["command"] = to_string(spec.command);
    if (spec.n) m["n"] = *spec.n;
    if (spec.steps) m["steps"] = *spec.steps;
    if (spec.mode) m["mode"] = to_string(*spec.mode);
    m["points"] = spec.num_points;
    m["format"] = to_string(spec.format);
    m["seed"] = spec.seed;
    m["grid"] = spec.grid;
    m["restarts"] = spec.restarts;
    m["cases"] = spec.cases;
    m["version"] = kVersion;
    return m;
}

inline nlohmann::json document(const ExperimentSpec& spec, nlohmann::json rows) {
    nlohmann::json doc;
    doc["meta"] = spec_meta(spec);
    doc["rows"] = std::move(rows);
    return doc;
}

inline void to_json(nlohmann::json& j, const TraceRow& r) {
    j = nlohmann::json{{"step", r.step},
                       {"amplitude_target_real", r.amplitude_target.real()},
                       {"amplitude_target_imag", r.amplitude_target.imag()},
                       {"probability", r.probability}};
    j["phi"] = r.phases ? nlohmann::json(r.phases->phi) : nlohmann::json(nullptr);
    j["psi"] = r.phases ? nlohmann::json(r.phases->psi) : nlohmann::json(nullptr);
}

inline void from_json(const nlohmann::json& j, TraceRow& r) {
    r.step = j.at("step").get<int>();
    r.amplitude_target = {j.at("amplitude_target_real").get<double>(), j.at("amplitude_target_imag").get<double>()};
    r.probability = j.at("probability").get<double>();
    if (j.at("phi").is_null())
        r.phases.reset();
    else {
        PhasePair p;
        p.psi = j.at("psi").get<double>();
        p.phi = j.at("phi").get<double>();
        r.phases = p;
    }
}

inline void to_json(nlohmann::json& j, const SweepRow& r) {
    j = nlohmann::json{{"alpha", r.alpha},
                       {"phi_opt", r.phi_opt},
                       {"psi_opt", r.psi_opt},
                       {"prob_before", r.probability_before},
                       {"prob_after", r.probability_after},
                       {"rounded_phase_matched", r.phase_matched() ? 1 : 0}};
}

inline void from_json(const nlohmann::json& j, SweepRow& r) {
    r.alpha = j.at("alpha").get<double>();
    r.phi_opt = j.at("phi_opt").get<double>();
    r.psi_opt = j.at("psi_opt").get<double>();
    r.probability_before = j.at("prob_before").get<double>();
    r.probability_after = j.at("prob_after").get<double>();
}

inline void write_trace(std::ostream& os, const ExperimentSpec& spec, const std::vector<TraceRow>& rows) {
    switch (spec.format) {
        case OutputFormat::json: os << document(spec, rows).dump(2) << '\n'; return;
        case OutputFormat::csv:
            os << "step,amplitude_target_real,amplitude_target_imag,probability,phi,psi\n";
            for (const auto& r : rows)
                os << r.step << ',' << format_number(r.amplitude_target.real()) << ','
                   << format_number(r.amplitude_target.imag()) << ',' << format_number(r.probability) << ','
                   << (r.phases ? format_number(r.phases->phi) : "") << ','
                   << (r.phases ? format_number(r.phases->psi) : "") << '\n';
            return;
        case OutputFormat::table:
            os << "step  amplitude            probability  phi      psi\n";
            for (const auto& r : rows) {
                std::ostringstream amp;
                amp << fixed4(r.amplitude_target.real());
                if (std::abs(r.amplitude_target.imag()) >= 5e-5)
                    amp << (r.amplitude_target.imag() < 0 ? " - " : " + ") << fixed4(std::abs(r.amplitude_target.imag()))
                        << 'i';
                os << std::left << std::setw(6) << r.step << std::setw(21) << amp.str() << std::setw(13)
                   << fixed4(r.probability) << std::setw(9) << (r.phases ? fixed4(r.phases->phi) : "-")
                   << (r.phases ? fixed4(r.phases->psi) : "-") << '\n';
            }
            return;
    }
}

inline void write_sweep(std::ostream& os, const ExperimentSpec& spec, const SweepResult& sweep) {
    if (spec.format == OutputFormat::json) {
        nlohmann::json doc = document(spec, sweep.rows);
        doc["meta"]["N"] = sweep.set_size;
        os << doc.dump(2) << '\n';
        return;
    }
    const bool table = spec.format == OutputFormat::table;
    auto num = [&](double x) { return table ? fixed4(x) : format_number(x); };
    os << "# sweep N=" << sweep.set_size << " rows=" << sweep.rows.size()
       << "; alpha in radians, phases in (-pi, pi], prob = target probability before/after the optimal step\n";
    os << "alpha,phi_opt,psi_opt,prob_before,prob_after,rounded_phase_matched\n";
    for (const auto& r : sweep.rows)
        os << num(r.alpha) << ',' << num(r.phi_opt) << ',' << num(r.psi_opt) << ',' << num(r.probability_before)
           << ',' << num(r.probability_after) << ',' << (r.phase_matched() ? 1 : 0) << '\n';
}

inline nlohmann::json cutoff_json(const CutoffReport& c) {
    return {{"N", c.set_size},
            {"alpha_cutoff", c.alpha_cutoff},
            {"probability_at_cutoff", c.probability_at_cutoff},
            {"last_matched_alpha", c.last_matched_alpha},
            {"last_matched_probability", c.last_matched_probability},
            {"matched_rows", c.matched_rows},
            {"total_rows", c.total_rows}};
}

inline void write_cutoff(std::ostream& os, const ExperimentSpec& spec, const CutoffReport& c) {
    if (spec.format == OutputFormat::json) {
        nlohmann::json doc = document(spec, nlohmann::json::array({cutoff_json(c)}));
        doc.update(cutoff_json(c));
        os << doc.dump(2) << '\n';
        return;
    }
    const bool table = spec.format == OutputFormat::table;
    auto num = [&](double x) { return table ? fixed4(x) : format_number(x); };
    os << "N,alpha_cutoff,probability_at_cutoff,last_matched_alpha,last_matched_probability,matched_rows,total_rows\n";
    os << c.set_size << ',' << num(c.alpha_cutoff) << ',' << num(c.probability_at_cutoff) << ','
       << num(c.last_matched_alpha) << ',' << num(c.last_matched_probability) << ',' << c.matched_rows << ','
       << c.total_rows << '\n';
}

inline nlohmann::json critical_point_json(const CriticalPoint& cp) {
    return {{"function", std::string(to_string(cp.term))},
            {"phi", cp.phi},
            {"psi", cp.psi},
            {"phi_over_pi_thirds", cp.phi_thirds},
            {"psi_over_pi_thirds", cp.psi_thirds},
            {"h11", cp.hessian[0][0]},
            {"h12", cp.hessian[0][1]},
            {"h21", cp.hessian[1][0]},
            {"h22", cp.hessian[1][1]},
            {"kind", std::string(to_string(cp.kind))}};
}

inline void write_critical_points(std::ostream& os, const ExperimentSpec& spec, const std::vector<CriticalPoint>& pts) {
    if (spec.format == OutputFormat::json) {
        nlohmann::json rows = nlohmann::json::array();
        for (const auto& p : pts) rows.push_back(critical_point_json(p));
        os << document(spec, rows).dump(2) << '\n';
        return;
    }
    const bool table = spec.format == OutputFormat::table;
    auto num = [&](double x) { return table ? fixed4(x) : format_number(x); };
    os << "function,phi,psi,h11,h12,h21,h22,kind\n";
    for (const auto& p : pts)
        os << to_string(p.term) << ',' << num(p.phi) << ',' << num(p.psi) << ',' << num(p.hessian[0][0]) << ','
           << num(p.hessian[0][1]) << ',' << num(p.hessian[1][0]) << ',' << num(p.hessian[1][1]) << ','
           << to_string(p.kind) << '\n';
}

inline nlohmann::json equivalence_json(const EquivalenceReport& r, double tolerance) {
    nlohmann::json worst_phases = nlohmann::json::array();
    for (const auto& p : r.worst.phases) worst_phases.push_back({{"psi", p.psi}, {"phi", p.phi}});
    return {{"n", r.qubits},
            {"cases", r.cases},
            {"steps", r.steps},
            {"max_deviation", r.max_deviation},
            {"max_probability_deviation", r.max_probability_deviation},
            {"tolerance", tolerance},
            {"passed", r.max_deviation < tolerance},
            {"worst_case", {{"target", r.worst.target}, {"deviation", r.worst.deviation}, {"phases", worst_phases}}}};
}

inline void write_equivalence(std::ostream& os, const ExperimentSpec& spec, const EquivalenceReport& r,
                              double tolerance) {
    const bool passed = r.max_deviation < tolerance;
    if (spec.format == OutputFormat::json) {
        os << document(spec, nlohmann::json::array({equivalence_json(r, tolerance)})).dump(2) << '\n';
        return;
    }
    os << "n,cases,steps,max_deviation,max_probability_deviation,passed\n";
    os << r.qubits << ',' << r.cases << ',' << r.steps << ',' << format_number(r.max_deviation) << ','
       << format_number(r.max_probability_deviation) << ',' << (passed ? 1 : 0) << '\n';
    os << "# max deviation " << (passed ? "< " : ">= ") << format_number(tolerance) << '\n';
    if (!passed) {
        os << "# worst case: target=" << r.worst.target << " phases(psi,phi)=";
        for (const auto& p : r.worst.phases) os << '(' << format_number(p.psi) << ',' << format_number(p.phi) << ')';
        os << '\n';
    }
}

// ---------------------------------------------------------------------------
// Dispatch

inline constexpr double kEquivalenceTolerance = 1e-10;

/// Property checks on the critical-point catalogue; returns a description of
/// the first failure, or an empty string.
inline std::string check_critical_points(const std::vector<CriticalPoint>& pts) {
    for (const auto& p : pts) {
        const auto grad = p.term == LeadingTerm::h ? gradient_h(p.phi, p.psi) : gradient_g(p.phi, p.psi);
        if (std::abs(grad[0]) >= 1e-12 || std::abs(grad[1]) >= 1e-12)
            return critical_point_json(p).dump() + ": gradient does not vanish";
        const auto ev = symmetric_eigenvalues(p.hessian);
        const CriticalKind from_ev = ev[1] < 0 ? CriticalKind::local_max
                                     : ev[0] > 0 ? CriticalKind::local_min
                                                 : CriticalKind::saddle;
        if (from_ev != p.kind) return critical_point_json(p).dump() + ": kind disagrees with Hessian eigenvalues";
    }
    return {};
}

/// Runs one experiment, writing its report to `out` and diagnostics to
/// `err`. Returns the process exit code.
inline int run_experiment(const ExperimentSpec& spec, std::ostream& out, std::ostream& err) {
    try {
        spec.validate();
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return exit_usage;
    }

    std::ofstream file;
    std::ostringstream buffer;
    std::ostream* sink = &out;
    if (!spec.output_path.empty()) {
        file.open(spec.output_path, std::ios::binary | std::ios::trunc);
        if (!file) {
            err << "I/O error: cannot open '" << spec.output_path << "' for writing\n";
            return exit_io;
        }
        sink = &buffer;
    }

    int code = exit_ok;
    try {
        switch (spec.command) {
            case Command::trace: {
                const SearchSpace space(*spec.n);
                write_trace(*sink, spec, run_trace(space, *spec.steps, *spec.mode, spec.optimizer()));
                break;
            }
            case Command::sweep: {
                const SearchSpace space(*spec.n);
                write_sweep(*sink, spec, sweep_alpha(space.size(), spec.num_points, spec.optimizer()));
                break;
            }
            case Command::cutoff: {
                const SearchSpace space(*spec.n);
                const SweepResult sweep = sweep_alpha(space.size(), spec.num_points, spec.optimizer());
                try {
                    write_cutoff(*sink, spec, detect_cutoff(sweep));
                } catch (const NoPhaseMatchedPrefix& e) {
                    err << "property failure: " << e.what() << '\n';
                    code = exit_property;
                }
                break;
            }
            case Command::critical_points: {
                std::vector<CriticalPoint> pts = critical_points_h();
                for (auto& p : critical_points_g()) pts.push_back(p);
                write_critical_points(*sink, spec, pts);
                if (const std::string failure = check_critical_points(pts); !failure.empty()) {
                    err << "property failure: " << failure << '\n';
                    code = exit_property;
                }
                break;
            }
            case Command::equivalence: {
                const EquivalenceReport r =
                    check_equivalence(*spec.n, spec.cases, spec.steps.value_or(8), spec.seed);
                write_equivalence(*sink, spec, r, kEquivalenceTolerance);
                if (!(r.max_deviation < kEquivalenceTolerance)) {
                    err << "property failure: " << equivalence_json(r, kEquivalenceTolerance).dump() << '\n';
                    code = exit_property;
                }
                break;
            }
        }
    } catch (const SymmetryError& e) {
        err << "property failure: " << e.what() << '\n';
        return exit_property;
    } catch (const std::invalid_argument& e) {
        err << "usage error: " << e.what() << '\n';
        return exit_usage;
    }

    if (sink == &buffer) {
        file << buffer.str();
        file.flush();
        if (!file) {
            err << "I/O error: failed writing '" << spec.output_path << "'\n";
            return exit_io;
        }
    }
    return code;
}

} // namespace phasematch
