// lzctl: command-line front end for the Landau-Zener control toolkit.
// Every subcommand writes machine-readable output (CSV for sweeps,
// JSON for single runs) prefixed with a run manifest; `replay`
// re-executes a manifest and reproduces the original bytes.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <ctime>
#include <functional>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lz/dynamics.hpp"
#include "lz/linalg2.hpp"
#include "lz/noise.hpp"
#include "lz/objectives.hpp"
#include "lz/optimizer.hpp"
#include "lz/pulse_io.hpp"
#include "lz/rng.hpp"

namespace {

constexpr const char* kToolVersion = "1.0.0";

// Exit code contract (stable for scripting).
constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitIo = 4;
constexpr int kExitLineSearch = 5;
constexpr int kExitIterationCap = 6;

using lz::format_double;

std::string json_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size() + 2);
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            default: out += c;
        }
    }
    return out;
}

std::string jstr(const std::string& s) { return "\"" + json_escape(s) + "\""; }

std::string jarray(const std::vector<double>& v) {
    std::string out = "[";
    for (std::size_t k = 0; k < v.size(); ++k) {
        if (k > 0) out += ",";
        out += format_double(v[k]);
    }
    return out + "]";
}

std::string iso_timestamp() {
    std::time_t t = 0;
    if (const char* sde = std::getenv("SOURCE_DATE_EPOCH")) {
        t = static_cast<std::time_t>(std::strtoll(sde, nullptr, 10));
    } else {
        t = std::time(nullptr);
    }
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

struct Manifest {
    std::string subcommand;
    std::vector<std::pair<std::string, std::string>> params;  // key -> JSON fragment
    std::uint64_t seed = 0;
    std::string timestamp;
    std::vector<std::string> argv;  // original tokens, for replay
};

std::string manifest_json(const Manifest& m) {
    std::string out = "{\"subcommand\":" + jstr(m.subcommand);
    out += ",\"version\":" + jstr(kToolVersion);
    out += ",\"seed\":" + std::to_string(m.seed);
    out += ",\"timestamp\":" + jstr(m.timestamp);
    out += ",\"params\":{";
    for (std::size_t k = 0; k < m.params.size(); ++k) {
        if (k > 0) out += ",";
        out += jstr(m.params[k].first) + ":" + m.params[k].second;
    }
    out += "},\"argv\":[";
    for (std::size_t k = 0; k < m.argv.size(); ++k) {
        if (k > 0) out += ",";
        out += jstr(m.argv[k]);
    }
    out += "]}";
    return out;
}

void emit(const std::string& out_path, const std::string& content) {
    if (out_path.empty()) {
        std::cout << content;
    } else {
        lz::write_text_file(out_path, content);
    }
}

// ---------------------------------------------------------------- parsing

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    parts.push_back(cur);
    return parts;
}

double parse_number(const std::string& s) {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) {
        throw std::invalid_argument("not a number: '" + s + "'");
    }
    return v;
}

std::vector<double> parse_number_list(const std::string& s) {
    std::vector<double> out;
    for (const auto& tok : split(s, ',')) out.push_back(parse_number(tok));
    return out;
}

std::pair<double, double> parse_range(const std::string& s) {
    const auto parts = split(s, ':');
    if (parts.size() != 2) {
        throw std::invalid_argument("range must look like lo:hi, got '" + s + "'");
    }
    const double lo = parse_number(parts[0]);
    const double hi = parse_number(parts[1]);
    if (!(lo <= hi)) {
        throw std::invalid_argument("range lo must be <= hi");
    }
    return {lo, hi};
}

lz::State2 parse_state(const std::string& spec) {
    std::string s;
    for (char c : spec) s += static_cast<char>(std::tolower(c));
    const lz::complexd i1(0.0, 1.0);
    if (s == "0") return lz::State2::basis0();
    if (s == "1") return lz::State2::basis1();
    if (s == "+") return lz::State2::normalized(1.0, 1.0);
    if (s == "-") return lz::State2::normalized(1.0, -1.0);
    if (s == "+i" || s == "i") return lz::State2::normalized(1.0, i1);
    if (s == "-i") return lz::State2::normalized(1.0, -i1);
    const auto nums = parse_number_list(spec);
    if (nums.size() != 4) {
        throw std::invalid_argument(
            "state must be 0, 1, +, -, +i, -i or re0,im0,re1,im1: '" + spec + "'");
    }
    const lz::complexd a0(nums[0], nums[1]);
    const lz::complexd a1(nums[2], nums[3]);
    const double norm = std::sqrt(std::norm(a0) + std::norm(a1));
    if (std::abs(norm - 1.0) > 1e-6) {
        throw std::invalid_argument("state '" + spec +
                                    "' is not normalized (norm = " +
                                    format_double(norm) + ")");
    }
    return lz::State2::normalized(a0, a1);
}

lz::Unitary2 parse_gate(const std::string& spec) {
    std::string s;
    for (char c : spec) s += static_cast<char>(std::tolower(c));
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    if (s == "hadamard" || s == "h") {
        return lz::Unitary2(lz::Complex2x2(inv_sqrt2, inv_sqrt2,
                                           inv_sqrt2, -inv_sqrt2));
    }
    if (s == "x") return lz::Unitary2(lz::pauli(lz::PauliAxis::X));
    if (s == "y") return lz::Unitary2(lz::pauli(lz::PauliAxis::Y));
    if (s == "z") return lz::Unitary2(lz::pauli(lz::PauliAxis::Z));
    if (s == "identity" || s == "id") return lz::Unitary2::identity();
    const auto nums = parse_number_list(spec);
    if (nums.size() != 8) {
        throw std::invalid_argument(
            "gate must be hadamard, x, y, z, identity or 8 numbers "
            "re00,im00,re01,im01,re10,im10,re11,im11");
    }
    return lz::Unitary2(lz::Complex2x2({nums[0], nums[1]}, {nums[2], nums[3]},
                                       {nums[4], nums[5]}, {nums[6], nums[7]}));
}

lz::Complex2x2 parse_observable(const std::string& spec) {
    std::string s;
    for (char c : spec) s += static_cast<char>(std::tolower(c));
    if (s == "x") return lz::pauli(lz::PauliAxis::X);
    if (s == "y") return lz::pauli(lz::PauliAxis::Y);
    if (s == "z") return lz::pauli(lz::PauliAxis::Z);
    const auto nums = parse_number_list(spec);
    if (nums.size() != 8) {
        throw std::invalid_argument(
            "observable must be x, y, z or 8 numbers (row-major re,im pairs)");
    }
    return {{nums[0], nums[1]}, {nums[2], nums[3]},
            {nums[4], nums[5]}, {nums[6], nums[7]}};
}

struct ObjectiveFlags {
    std::string kind = "transition";
    std::string initial = "0";
    std::string target = "1";
    std::string gate = "hadamard";
    std::string rho0 = "0";
    std::string observable = "z";
};

void add_objective_flags(CLI::App* cmd, ObjectiveFlags& flags) {
    cmd->add_option("--objective", flags.kind,
                    "Objective kind: transition, observable or gate")
        ->check(CLI::IsMember({"transition", "observable", "gate"}));
    cmd->add_option("--i", flags.initial, "Initial state (transition)");
    cmd->add_option("--f", flags.target, "Target state (transition)");
    cmd->add_option("--gate", flags.gate,
                    "Target gate: hadamard, x, y, z, identity or 8 numbers");
    cmd->add_option("--rho0", flags.rho0,
                    "Initial pure state for the observable objective");
    cmd->add_option("--obs", flags.observable,
                    "Observable: x, y, z or 8 numbers (row-major re,im pairs)");
}

lz::ObjectiveSpec make_objective(const ObjectiveFlags& flags) {
    if (flags.kind == "transition") {
        return lz::TransitionObjective(parse_state(flags.initial),
                                       parse_state(flags.target));
    }
    if (flags.kind == "gate") {
        return lz::GateObjective(parse_gate(flags.gate));
    }
    const lz::State2 rho_state = parse_state(flags.rho0);
    return lz::ObservableObjective(rho_state.outer(rho_state),
                                   parse_observable(flags.observable));
}

std::string objective_params_json(const ObjectiveFlags& flags) {
    std::string out = "{\"kind\":" + jstr(flags.kind);
    if (flags.kind == "transition") {
        out += ",\"i\":" + jstr(flags.initial) + ",\"f\":" + jstr(flags.target);
    } else if (flags.kind == "gate") {
        out += ",\"gate\":" + jstr(flags.gate);
    } else {
        out += ",\"rho0\":" + jstr(flags.rho0) +
               ",\"obs\":" + jstr(flags.observable);
    }
    return out + "}";
}

int default_workers() {
    if (const char* env = std::getenv("LZCTL_WORKERS")) {
        const int w = std::atoi(env);
        if (w >= 1) return w;
    }
    return 1;
}

// ---------------------------------------------------------- subcommands

struct ScanArgs {
    int n = 2;
    double T = 10.0;
    double delta = 1.0;
    std::string range = "-2:2";
    std::string range2;  // defaults to range
    int res = 401;
    int res2 = 0;  // defaults to res
    std::string out;
};

int cmd_scan(const ScanArgs& args, Manifest manifest) {
    if (args.n != 1 && args.n != 2) {
        throw std::invalid_argument("scan: --N must be 1 or 2");
    }
    const auto [lo1, hi1] = parse_range(args.range);
    const auto [lo2, hi2] =
        parse_range(args.range2.empty() ? args.range : args.range2);
    const int res2 = args.res2 > 0 ? args.res2 : args.res;

    manifest.subcommand = "scan";
    manifest.params = {
        {"N", std::to_string(args.n)},
        {"T", format_double(args.T)},
        {"delta", format_double(args.delta)},
        {"range", jstr(args.range)},
        {"range2", jstr(args.range2.empty() ? args.range : args.range2)},
        {"res", std::to_string(args.res)},
        {"res2", std::to_string(res2)},
    };

    const lz::ObjectiveSpec spec =
        lz::TransitionObjective(lz::State2::basis0(), lz::State2::basis1());
    std::vector<lz::AxisSpec> axes = {{lo1, hi1, args.res}};
    if (args.n == 2) axes.push_back({lo2, hi2, res2});
    const lz::ScanResult scan = lz::landscape_scan(spec, args.T, args.delta, axes);

    std::string out = "# manifest " + manifest_json(manifest) + "\n";
    if (args.n == 1) {
        const bool with_ref = !scan.closed_form.empty();
        out += with_ref ? "a1,J,closed_form\n" : "a1,J\n";
        for (std::size_t k = 0; k < scan.a1.size(); ++k) {
            out += format_double(scan.a1[k]) + "," +
                   format_double(scan.objective[k]);
            if (with_ref) out += "," + format_double(scan.closed_form[k]);
            out += "\n";
        }
        if (with_ref) {
            out += "# max_closed_form_discrepancy=" +
                   format_double(scan.max_closed_form_discrepancy) + "\n";
        }
    } else {
        out += "a1,a2,J\n";
        for (std::size_t i = 0; i < scan.a1.size(); ++i) {
            for (std::size_t j = 0; j < scan.a2.size(); ++j) {
                out += format_double(scan.a1[i]) + "," +
                       format_double(scan.a2[j]) + "," +
                       format_double(scan.objective[i * scan.a2.size() + j]) +
                       "\n";
            }
        }
    }
    emit(args.out, out);
    return kExitOk;
}

struct OptimizeArgs {
    ObjectiveFlags objective;
    int n = 40;
    double T = 10.0;
    double delta = 1.0;
    std::uint64_t seed = 1;
    double A = 10.0;
    std::string init;  // explicit amplitudes, overrides seed draw
    int max_iterations = 10000;
    double grad_tolerance = 1e-8;
    int nodes = 16;
    std::string out;
    std::string pulse_out;  // optional: final pulse in the pulse-file schema
};

int cmd_optimize(const OptimizeArgs& args, Manifest manifest) {
    const lz::ObjectiveSpec spec = make_objective(args.objective);

    std::vector<double> init;
    if (!args.init.empty()) {
        init = parse_number_list(args.init);
    } else {
        lz::SplitMix64 rng(lz::SplitMix64::derive_seed(args.seed, 0));
        init.resize(args.n);
        for (double& a : init) a = rng.uniform(-args.A, args.A);
    }
    const int n = static_cast<int>(init.size());

    manifest.subcommand = "optimize";
    manifest.seed = args.seed;
    manifest.params = {
        {"objective", objective_params_json(args.objective)},
        {"N", std::to_string(n)},
        {"T", format_double(args.T)},
        {"delta", format_double(args.delta)},
        {"A", format_double(args.A)},
        {"init", args.init.empty() ? std::string("null") : jarray(init)},
        {"max_iterations", std::to_string(args.max_iterations)},
        {"grad_tolerance", format_double(args.grad_tolerance)},
        {"nodes", std::to_string(args.nodes)},
    };

    lz::OptimizerConfig config;
    config.max_iterations = args.max_iterations;
    config.grad_tolerance = args.grad_tolerance;
    config.nodes_per_segment = args.nodes;

    const lz::ControlPulse pulse = lz::ControlPulse::uniform(args.T, init);
    const lz::MaximizeResult res = lz::maximize(spec, pulse, args.delta, config);

    const lz::PropagationTrace final_trace =
        lz::propagate(res.pulse, args.delta, args.nodes);
    const lz::CriticalityVerdict verdict = lz::classify_critical(spec, final_trace);

    std::string out = "{\n\"manifest\": " + manifest_json(manifest) + ",\n";
    out += "\"record\": {\n";
    out += "\"seed\": " + std::to_string(args.seed) + ",\n";
    out += "\"n\": " + std::to_string(n) + ",\n";
    out += "\"T\": " + format_double(args.T) + ",\n";
    out += "\"delta\": " + format_double(args.delta) + ",\n";
    out += "\"A\": " + format_double(args.A) + ",\n";
    out += "\"initial_amplitudes\": " + jarray(init) + ",\n";
    out += "\"final_amplitudes\": " + jarray(res.pulse.amplitudes) + ",\n";
    out += "\"trajectory\": " + jarray(res.trajectory) + ",\n";
    out += "\"final_objective\": " + format_double(res.final_objective) + ",\n";
    out += "\"iterations\": " + std::to_string(res.iterations) + ",\n";
    out += "\"gradient_sup\": " + format_double(res.gradient_sup) + ",\n";
    out += "\"kernel_sup\": " + format_double(res.kernel_sup) + ",\n";
    out += "\"termination\": " + jstr(lz::to_string(res.reason)) + ",\n";
    out += "\"classification\": " + jstr(lz::to_string(verdict.kind)) + "\n";
    out += "}\n}\n";
    emit(args.out, out);
    if (!args.pulse_out.empty()) {
        lz::write_text_file(args.pulse_out, lz::pulse_to_json(res.pulse));
    }

    switch (res.reason) {
        case lz::Termination::Converged: return kExitOk;
        case lz::Termination::LineSearchFailure: return kExitLineSearch;
        case lz::Termination::IterationCap: return kExitIterationCap;
        case lz::Termination::Abort:
            std::cerr << "optimize: numerical abort: " << res.diagnostic << "\n";
            return kExitNumerical;
    }
    return kExitNumerical;
}

struct TrapProbArgs {
    std::string n_list = "1,2,4,6,8,10,15";
    double T = 10.0;
    double delta = 1.0;
    double A = 10.0;
    int runs = 1000;
    std::uint64_t seed = 1;
    int workers = 0;  // 0 -> default_workers()
    double threshold = 0.99;
    std::string out;
    std::string dump_records;
};

std::string record_json(const lz::TrapRunRecord& rec) {
    std::string out = "{\"seed\":" + std::to_string(rec.seed);
    out += ",\"n\":" + std::to_string(rec.n);
    out += ",\"T\":" + format_double(rec.T);
    out += ",\"delta\":" + format_double(rec.delta);
    out += ",\"A\":" + format_double(rec.A);
    out += ",\"initial_amplitudes\":" + jarray(rec.initial_amplitudes);
    out += ",\"final_amplitudes\":" + jarray(rec.final_amplitudes);
    out += ",\"final_objective\":" + format_double(rec.final_objective);
    out += ",\"iterations\":" + std::to_string(rec.iterations);
    out += ",\"gradient_sup\":" + format_double(rec.gradient_sup);
    out += ",\"termination\":" + jstr(lz::to_string(rec.reason));
    out += ",\"trapped\":" + std::string(rec.trapped ? "true" : "false");
    out += ",\"aborted\":" + std::string(rec.aborted ? "true" : "false");
    return out + "}";
}

int cmd_trap_prob(const TrapProbArgs& args, Manifest manifest) {
    std::vector<int> ns;
    for (const auto& tok : split(args.n_list, ',')) {
        const int n = static_cast<int>(parse_number(tok));
        if (n < 1) throw std::invalid_argument("trap-prob: N entries must be >= 1");
        ns.push_back(n);
    }
    const int workers = args.workers > 0 ? args.workers : default_workers();

    manifest.subcommand = "trap-prob";
    manifest.seed = args.seed;
    manifest.params = {
        {"N", jstr(args.n_list)},
        {"T", format_double(args.T)},
        {"delta", format_double(args.delta)},
        {"A", format_double(args.A)},
        {"runs", std::to_string(args.runs)},
        {"threshold", format_double(args.threshold)},
        {"workers", std::to_string(workers)},
    };

    const lz::ObjectiveSpec spec =
        lz::TransitionObjective(lz::State2::basis0(), lz::State2::basis1());

    std::string out = "# manifest " + manifest_json(manifest) + "\n";
    out += "N,runs,trapped,aborted,probability,standard_error\n";
    std::string records_out;
    bool first_record = true;

    for (std::size_t idx = 0; idx < ns.size(); ++idx) {
        // Distinct seed stream per N so adding an N to the list never
        // reshuffles another N's runs.
        const std::uint64_t n_seed =
            lz::SplitMix64::derive_seed(args.seed, 1000003ULL * ns[idx]);
        const lz::TrapExperiment exp = lz::trap_probability(
            spec, ns[idx], args.T, args.delta, args.A, args.runs, n_seed,
            workers, lz::OptimizerConfig{}, args.threshold);
        out += std::to_string(exp.stats.n) + "," +
               std::to_string(exp.stats.runs) + "," +
               std::to_string(exp.stats.trapped) + "," +
               std::to_string(exp.stats.aborted) + "," +
               format_double(exp.stats.probability) + "," +
               format_double(exp.stats.standard_error) + "\n";
        if (!args.dump_records.empty()) {
            for (const auto& rec : exp.records) {
                records_out += first_record ? "\n" : ",\n";
                records_out += record_json(rec);
                first_record = false;
            }
        }
    }
    emit(args.out, out);
    if (!args.dump_records.empty()) {
        lz::write_text_file(args.dump_records,
                            "{\n\"manifest\": " + manifest_json(manifest) +
                                ",\n\"records\": [" + records_out + "\n]\n}\n");
    }
    return kExitOk;
}

struct NoiseArgs {
    ObjectiveFlags objective;
    std::string pulse_path;
    double delta = 1.0;
    std::string kind = "additive";
    std::string sigma_list = "0.01,0.02,0.05";
    int samples = 10000;
    double dt = 0.0;  // 0 -> smallest segment duration / 16
    std::uint64_t seed = 1;
    int workers = 0;
    int nodes = 16;
    std::string out;
};

int cmd_noise(const NoiseArgs& args, Manifest manifest) {
    const lz::ControlPulse pulse =
        lz::pulse_from_json(lz::read_text_file(args.pulse_path));
    const lz::ObjectiveSpec spec = make_objective(args.objective);

    lz::NoiseSpec::Kind kind;
    if (args.kind == "additive" || args.kind == "awn") {
        kind = lz::NoiseSpec::Kind::Additive;
    } else if (args.kind == "multiplicative" || args.kind == "mwn") {
        kind = lz::NoiseSpec::Kind::Multiplicative;
    } else {
        throw std::invalid_argument(
            "noise: --kind must be additive|awn|multiplicative|mwn");
    }

    double dt = args.dt;
    if (dt <= 0.0) {
        double min_tau = pulse.duration(0);
        for (int k = 1; k < pulse.segments(); ++k) {
            min_tau = std::min(min_tau, pulse.duration(k));
        }
        dt = min_tau / 16.0;
    }
    const auto sigmas = parse_number_list(args.sigma_list);
    const int workers = args.workers > 0 ? args.workers : default_workers();

    manifest.subcommand = "noise";
    manifest.seed = args.seed;
    manifest.params = {
        {"pulse", jstr(args.pulse_path)},
        {"objective", objective_params_json(args.objective)},
        {"delta", format_double(args.delta)},
        {"kind", jstr(args.kind)},
        {"sigma", jstr(args.sigma_list)},
        {"samples", std::to_string(args.samples)},
        {"dt", format_double(dt)},
        {"workers", std::to_string(workers)},
        {"nodes", std::to_string(args.nodes)},
    };

    const lz::PropagationTrace trace =
        lz::propagate(pulse, args.delta, args.nodes);
    const double baseline = lz::evaluate(spec, trace);

    std::string out = "# manifest " + manifest_json(manifest) + "\n";
    out +=
        "sigma,kind,predicted_decrease,bound,energy,baseline,mc_mean,"
        "mc_stderr,samples\n";
    for (double sigma : sigmas) {
        const lz::NoiseSpec noise(kind, sigma);
        const lz::DecreasePrediction pred =
            lz::predicted_decrease(spec, trace, noise);
        const lz::MonteCarloResult mc = lz::monte_carlo_noisy_objective(
            spec, pulse, args.delta, noise, args.samples, dt, args.seed, workers);
        out += format_double(sigma) + "," + args.kind + "," +
               format_double(pred.value) + "," + format_double(pred.bound) +
               "," + format_double(pred.energy) + "," +
               format_double(baseline) + "," + format_double(mc.mean) + "," +
               format_double(mc.standard_error) + "," +
               std::to_string(mc.samples) + "\n";
    }
    emit(args.out, out);
    return kExitOk;
}

struct AppendixArgs {
    double T = M_PI;
    std::string initial = "0";
    std::string target;  // empty -> built-in alpha witness
    std::string scales = "0.01,0.005";
    int segments = 2000;
    int nodes = 64;
    std::string out;
};

/// J(s * variation) by exact propagation of a midpoint staircase of the
/// variation (M segments over its support, free evolution after).
double nonlinear_objective(const lz::TransitionObjective& spec,
                           const lz::Variation& variation, double T, double s,
                           int segments) {
    const double support = variation.support_end();
    lz::Unitary2 u = lz::Unitary2::identity();
    if (support > 0.0) {
        const double h = support / segments;
        for (int k = 0; k < segments; ++k) {
            const double mid = (k + 0.5) * h;
            u = lz::expm_su2(1.0, s * variation(mid), h) * u;
        }
    }
    if (T > support) u = lz::expm_su2(1.0, 0.0, T - support) * u;
    return lz::evaluate(lz::ObjectiveSpec(spec), u);
}

/// Richardson-extrapolated second variation from two scales s1 > s2:
/// the even combination (J(s)+J(-s)-2J(0))/(2s^2) has an s^2 error
/// term, eliminated by the weighted difference below.
double richardson_dj2(const lz::TransitionObjective& spec,
                      const lz::Variation& variation, double T, double s1,
                      double s2, int segments) {
    const double j0 = nonlinear_objective(spec, variation, T, 0.0, segments);
    auto estimate = [&](double s) {
        return (nonlinear_objective(spec, variation, T, s, segments) +
                nonlinear_objective(spec, variation, T, -s, segments) -
                2.0 * j0) /
               (2.0 * s * s);
    };
    const double e1 = estimate(s1);
    const double e2 = estimate(s2);
    return (s1 * s1 * e2 - s2 * s2 * e1) / (s1 * s1 - s2 * s2);
}

int cmd_appendix(const AppendixArgs& args, Manifest manifest) {
    if (args.T < M_PI - 1e-12) {
        throw std::invalid_argument("appendix: --T must be at least pi");
    }
    const lz::State2 i_state = parse_state(args.initial);
    const lz::State2 f_state =
        args.target.empty()
            ? lz::State2::normalized(1.0, std::polar(1.0, M_PI / 4.0))
            : parse_state(args.target);
    const lz::TransitionObjective spec(i_state, f_state);

    auto scales = parse_number_list(args.scales);
    if (scales.size() < 2) {
        throw std::invalid_argument("appendix: need at least two scales");
    }
    std::sort(scales.begin(), scales.end(), std::greater<>());

    manifest.subcommand = "appendix";
    manifest.params = {
        {"T", format_double(args.T)},
        {"i", jstr(args.initial)},
        {"f", jstr(args.target)},
        {"scales", jstr(args.scales)},
        {"segments", std::to_string(args.segments)},
        {"nodes", std::to_string(args.nodes)},
    };

    struct Case {
        std::string name;
        lz::Variation variation;
        double reference_of_alpha;  // reference value divided by alpha
    };
    std::vector<Case> cases;
    cases.push_back({"indicator_0_pi", lz::Variation::indicator(0.0, M_PI),
                     -M_PI});
    lz::Variation cos4;
    cos4.pieces.push_back({0.0, M_PI, [](double t) { return std::cos(4.0 * t); }});
    cases.push_back({"cos4t_0_pi", cos4, M_PI / 6.0});

    const lz::SecondOrderExpansion probe = lz::second_order_expansion(
        spec, cases[0].variation, args.T, args.nodes);
    const double alpha = probe.alpha;
    if (std::abs(alpha) < 1e-9) {
        std::cerr << "appendix: alpha vanishes for these states; pick others\n";
        return kExitNumerical;
    }

    const double s1 = scales[scales.size() - 2];
    const double s2 = scales.back();

    std::string body;
    for (const auto& c : cases) {
        const lz::SecondOrderExpansion exp =
            lz::second_order_expansion(spec, c.variation, args.T, args.nodes);
        const double reference = c.reference_of_alpha * alpha;
        const double rich =
            richardson_dj2(spec, c.variation, args.T, s1, s2, args.segments);
        const double rel_quad =
            std::abs(exp.dJ2 - reference) / std::abs(reference);
        const double rel_rich = std::abs(rich - reference) / std::abs(reference);
        body += "{\"name\":" + jstr(c.name);
        body += ",\"dJ1_quadrature\":" + format_double(exp.dJ1);
        body += ",\"dJ2_quadrature\":" + format_double(exp.dJ2);
        body += ",\"dJ2_nonlinear\":" + format_double(rich);
        body += ",\"reference\":" + format_double(reference);
        body += ",\"quadrature_vs_reference_rel\":" + format_double(rel_quad);
        body += ",\"nonlinear_vs_reference_rel\":" + format_double(rel_rich);
        body += ",\"pass_quadrature\":" +
                std::string(rel_quad <= 1e-3 ? "true" : "false");
        body += ",\"pass_richardson\":" +
                std::string(rel_rich <= 1e-3 ? "true" : "false");
        body += "}";
        if (&c != &cases.back()) body += ",";
        body += "\n";
    }

    // Homogeneity check: dJ1 scales linearly, dJ2 quadratically.
    std::string scaling = "{\"scales\":" + jarray(scales);
    std::vector<double> dj1_over_s, dj2_over_s2;
    for (double s : scales) {
        const lz::SecondOrderExpansion exp = lz::second_order_expansion(
            spec, cases[0].variation.scaled(s), args.T, args.nodes);
        dj1_over_s.push_back(exp.dJ1 / s);
        dj2_over_s2.push_back(exp.dJ2 / (s * s));
    }
    scaling += ",\"dJ1_over_s\":" + jarray(dj1_over_s);
    scaling += ",\"dJ2_over_s2\":" + jarray(dj2_over_s2) + "}";

    std::string out = "{\n\"manifest\": " + manifest_json(manifest) + ",\n";
    out += "\"alpha\": " + format_double(alpha) + ",\n";
    out += "\"variations\": [\n" + body + "],\n";
    out += "\"scaling\": " + scaling + "\n}\n";
    emit(args.out, out);
    return kExitOk;
}

struct QslArgs {
    std::string initial = "0";
    std::string target = "1";
    double delta = 1.0;
    std::string out;
};

int cmd_qsl(const QslArgs& args, Manifest manifest) {
    const double t_qsl =
        lz::qsl_time(parse_state(args.initial), parse_state(args.target),
                     args.delta);
    manifest.subcommand = "qsl";
    manifest.params = {
        {"i", jstr(args.initial)},
        {"f", jstr(args.target)},
        {"delta", format_double(args.delta)},
    };
    std::string out = "{\n\"manifest\": " + manifest_json(manifest) + ",\n";
    out += "\"T_qsl\": " + format_double(t_qsl) + "\n}\n";
    emit(args.out, out);
    return kExitOk;
}

int dispatch(const std::vector<std::string>& args,
             const std::string* timestamp_override,
             const std::vector<std::string>* manifest_argv_override);

struct ReplayArgs {
    std::string manifest_path;
    std::string out;  // overrides the replayed --out when non-empty
};

int cmd_replay(const ReplayArgs& args) {
    const std::string content = lz::read_text_file(args.manifest_path);
    std::string manifest_text;
    const std::string prefix = "# manifest ";
    if (content.rfind(prefix, 0) == 0) {
        manifest_text = content.substr(prefix.size(),
                                       content.find('\n') - prefix.size());
    } else {
        const auto doc = nlohmann::json::parse(content);
        if (!doc.contains("manifest")) {
            throw std::runtime_error("replay: no manifest found in file");
        }
        manifest_text = doc["manifest"].dump();
    }
    const auto manifest = nlohmann::json::parse(manifest_text);
    const std::vector<std::string> original_argv =
        manifest.at("argv").get<std::vector<std::string>>();
    const std::string timestamp = manifest.at("timestamp").get<std::string>();
    if (!original_argv.empty() && original_argv[0] == "replay") {
        throw std::runtime_error("replay: refusing to replay a replay");
    }

    std::vector<std::string> argv = original_argv;
    if (!args.out.empty()) {
        // Redirect where the bytes land without touching the manifest:
        // strip any --out/--out=... pair, then append the new target.
        // The emitted file still records the original argv, so the
        // replayed bytes match the original file exactly.
        std::vector<std::string> filtered;
        for (std::size_t k = 0; k < argv.size(); ++k) {
            if (argv[k] == "--out") {
                ++k;  // skip value
                continue;
            }
            if (argv[k].rfind("--out=", 0) == 0) continue;
            filtered.push_back(argv[k]);
        }
        filtered.push_back("--out");
        filtered.push_back(args.out);
        argv = std::move(filtered);
    }
    return dispatch(argv, &timestamp, &original_argv);
}

int dispatch(const std::vector<std::string>& args,
             const std::string* timestamp_override,
             const std::vector<std::string>* manifest_argv_override) {
    CLI::App app{"Landau-Zener two-level control toolkit"};
    app.require_subcommand(1);

    Manifest manifest;
    manifest.argv = manifest_argv_override != nullptr ? *manifest_argv_override
                                                      : args;
    manifest.timestamp =
        timestamp_override != nullptr ? *timestamp_override : iso_timestamp();

    ScanArgs scan_args;
    auto* scan = app.add_subcommand("scan", "Objective landscape grid (N=1,2)");
    scan->add_option("--N", scan_args.n, "Segment count (1 or 2)");
    scan->add_option("--T", scan_args.T, "Total time");
    scan->add_option("--delta", scan_args.delta, "Coupling strength");
    scan->add_option("--range", scan_args.range, "First axis range lo:hi");
    scan->add_option("--range2", scan_args.range2,
                     "Second axis range lo:hi (defaults to --range)");
    scan->add_option("--res", scan_args.res, "First axis point count")
        ->check(CLI::PositiveNumber);
    scan->add_option("--res2", scan_args.res2,
                     "Second axis point count (defaults to --res)");
    scan->add_option("--out", scan_args.out, "Output CSV path (default stdout)");

    OptimizeArgs opt_args;
    auto* optimize =
        app.add_subcommand("optimize", "Quasi-Newton ascent of one objective");
    add_objective_flags(optimize, opt_args.objective);
    optimize->add_option("--N", opt_args.n, "Segment count")
        ->check(CLI::PositiveNumber);
    optimize->add_option("--T", opt_args.T, "Total time");
    optimize->add_option("--delta", opt_args.delta, "Coupling strength");
    optimize->add_option("--seed", opt_args.seed, "Seed for the initial draw");
    optimize->add_option("--A", opt_args.A,
                         "Initial amplitudes drawn uniformly from [-A, A]");
    optimize->add_option("--init", opt_args.init,
                         "Explicit initial amplitudes (comma list)");
    optimize->add_option("--max-iter", opt_args.max_iterations, "Iteration cap");
    optimize->add_option("--grad-tol", opt_args.grad_tolerance,
                         "Gradient sup-norm tolerance");
    optimize->add_option("--nodes", opt_args.nodes, "Quadrature nodes per segment");
    optimize->add_option("--out", opt_args.out, "Output JSON path (default stdout)");
    optimize->add_option("--pulse-out", opt_args.pulse_out,
                         "Also write the final pulse in the pulse-file schema");

    TrapProbArgs trap_args;
    auto* trap =
        app.add_subcommand("trap-prob", "Trapping probability experiment");
    trap->add_option("--N", trap_args.n_list, "Comma list of segment counts");
    trap->add_option("--T", trap_args.T, "Total time");
    trap->add_option("--delta", trap_args.delta, "Coupling strength");
    trap->add_option("--A", trap_args.A, "Initial amplitude half-range");
    trap->add_option("--runs", trap_args.runs, "Runs per segment count")
        ->check(CLI::PositiveNumber);
    trap->add_option("--seed", trap_args.seed, "Master seed");
    trap->add_option("--workers", trap_args.workers,
                     "Worker threads (default LZCTL_WORKERS or 1)");
    trap->add_option("--threshold", trap_args.threshold, "Trap threshold on J");
    trap->add_option("--out", trap_args.out, "Output CSV path (default stdout)");
    trap->add_option("--dump-records", trap_args.dump_records,
                     "Also dump every run record to this JSON path");

    NoiseArgs noise_args;
    auto* noise =
        app.add_subcommand("noise", "Noise sensitivity of an optimized pulse");
    add_objective_flags(noise, noise_args.objective);
    noise->add_option("--pulse", noise_args.pulse_path, "Pulse JSON file")
        ->required();
    noise->add_option("--delta", noise_args.delta, "Coupling strength");
    noise->add_option("--kind", noise_args.kind,
                      "additive|awn or multiplicative|mwn");
    noise->add_option("--sigma", noise_args.sigma_list, "Comma list of sigmas");
    noise->add_option("--samples", noise_args.samples, "Monte Carlo samples")
        ->check(CLI::PositiveNumber);
    noise->add_option("--dt", noise_args.dt,
                      "Noise step (default: min segment / 16)");
    noise->add_option("--seed", noise_args.seed, "Master seed");
    noise->add_option("--workers", noise_args.workers,
                      "Worker threads (default LZCTL_WORKERS or 1)");
    noise->add_option("--nodes", noise_args.nodes, "Quadrature nodes per segment");
    noise->add_option("--out", noise_args.out, "Output CSV path (default stdout)");

    AppendixArgs app_args;
    auto* appendix = app.add_subcommand(
        "appendix", "Second-order expansion around the zero control");
    appendix->add_option("--T", app_args.T, "Total time (>= pi)");
    appendix->add_option("--i", app_args.initial, "Initial state");
    appendix->add_option("--f", app_args.target,
                         "Target state (default: built-in alpha witness)");
    appendix->add_option("--scales", app_args.scales,
                         "Comma list of variation scales");
    appendix->add_option("--segments", app_args.segments,
                         "Staircase segments for nonlinear propagation");
    appendix->add_option("--nodes", app_args.nodes, "Quadrature nodes per axis");
    appendix->add_option("--out", app_args.out, "Output JSON path (default stdout)");

    QslArgs qsl_args;
    auto* qsl = app.add_subcommand("qsl", "Quantum speed limit estimate");
    qsl->add_option("--i", qsl_args.initial, "Initial state");
    qsl->add_option("--f", qsl_args.target, "Target state");
    qsl->add_option("--delta", qsl_args.delta, "Coupling strength");
    qsl->add_option("--out", qsl_args.out, "Output JSON path (default stdout)");

    ReplayArgs replay_args;
    auto* replay = app.add_subcommand(
        "replay", "Re-run a manifest from a previous output file");
    replay->add_option("--manifest", replay_args.manifest_path,
                       "Previous output file (CSV or JSON)")
        ->required();
    replay->add_option("--out", replay_args.out,
                       "Redirect the replayed output to this path");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::Success& e) {
        return app.exit(e);  // --help and friends; exit code 0
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (scan->parsed()) return cmd_scan(scan_args, manifest);
        if (optimize->parsed()) return cmd_optimize(opt_args, manifest);
        if (trap->parsed()) return cmd_trap_prob(trap_args, manifest);
        if (noise->parsed()) return cmd_noise(noise_args, manifest);
        if (appendix->parsed()) return cmd_appendix(app_args, manifest);
        if (qsl->parsed()) return cmd_qsl(qsl_args, manifest);
        if (replay->parsed()) return cmd_replay(replay_args);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::runtime_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    }
    return kExitUsage;
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return dispatch(args, nullptr, nullptr);
}
