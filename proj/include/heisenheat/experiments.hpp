#pragma once

// Command dispatch: each command reads a resolved RunConfig, writes its CSV
// files and a JSON manifest into the output directory, and returns an exit code.
//
// CSV headers:
//   verify.csv    check,value,tolerance,pass,detail
//   outcome.csv   run_id,p,Q,epsilon,status,t_lower,t_upper,peak_norm
//   series.csv    t,sup,boundary_sup,dt
//   sweep.csv     index,run_id,p,Q,epsilon,status,t_lower,t_upper,peak_norm,reason
//   capacity.csv  T,sigma,omega,pairing,bound
//   critical.csv  R,T,term1,term2,total,term2_ratio
//   lifespan.csv  epsilon,status,t_lower,t_upper,t_eps,peak_norm,used

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "heisenheat/capacity.hpp"
#include "heisenheat/config.hpp"
#include "heisenheat/dynamics.hpp"
#include "heisenheat/field_io.hpp"
#include "heisenheat/lifespan.hpp"
#include "heisenheat/parallel.hpp"
#include "heisenheat/verify.hpp"
#include "json.hpp"

namespace heisenheat {

inline constexpr int kExitPass = 0;
inline constexpr int kExitCheckFailure = 1;
inline constexpr int kExitConfigError = 2;

struct ExperimentResult {
    int exit_code = kExitPass;
    std::vector<std::string> outputs;  ///< file names relative to the output directory
    std::string summary;
};

namespace detail {

inline std::string g17(double v) { return fmt_double(v); }

inline std::string hex64(std::uint64_t h) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

inline void write_text(const std::filesystem::path& path, const std::string& body) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + path.string());
    os << body;
}

inline ForcingSpec forcing_from(const RunConfig& c) {
    const auto kind = c.get_choice("forcing", {"zero", "gaussian", "singular_power", "regular_power"});
    const double a = c.get_double("forcing_amplitude");
    if (kind == "zero") return ForcingSpec::zero();
    if (kind == "gaussian") return ForcingSpec::gaussian_bump(a, c.get_double("forcing_width"));
    if (kind == "singular_power") return ForcingSpec::singular_power(a, c.get_double("lambda_f"), c.get_double("inner_cap"));
    return ForcingSpec::regular_power(a, c.get_double("decay"));
}

inline InitialData init_from(const RunConfig& c) {
    const auto kind = c.get_choice("init", {"zero", "gaussian", "constant"});
    const double a = c.get_double("init_amplitude");
    if (kind == "zero") return InitialData::zero();
    if (kind == "constant") return InitialData::constant(a);
    return InitialData::gaussian(a, c.get_double("init_width"));
}

inline ProblemSpec problem_from(const RunConfig& c) {
    ProblemSpec s;
    s.dims = GroupDims(c.get_int("n"));
    s.p = c.get_double("p");
    s.forcing = forcing_from(c);
    s.init = init_from(c);
    if (c.get_choice("grid", {"cyl", "box"}) == "cyl") {
        s.grid = CylGrid(s.dims.n, c.get_double("r_max"), c.get_double("tau_half"), c.get_int("nr"), c.get_int("ntau"));
    } else {
        const double hx = c.get_double("box_half_x");
        const int m = c.get_int("box_points");
        s.grid = BoxGrid3(hx, hx, c.get_double("box_half_tau"), m, m, m);
    }
    s.scheme = c.get_choice("scheme", {"imex", "explicit_euler"}) == "imex" ? Scheme::imex : Scheme::explicit_euler;
    if (s.scheme == Scheme::explicit_euler) s.cyl_form = OperatorForm::cylindrical;
    s.diffusion = c.get_bool("diffusion");
    s.nonlinearity = c.get_bool("nonlinearity");
    s.validate();
    return s;
}

inline SolveConfig solve_config_from(const RunConfig& c) {
    SolveConfig s;
    s.t_end = c.get_double("t_end");
    s.dt0 = c.get_double("dt0");
    s.blowup_threshold = c.get_double("blowup_threshold");
    s.growth_cap = c.get_double("growth_cap");
    s.boundary_tol = c.get_double("boundary_tol");
    if (!(s.t_end > 0.0) || !(s.dt0 > 0.0) || !(s.growth_cap > 1.0) || !(s.blowup_threshold > 0.0))
        throw std::invalid_argument("t_end, dt0 and blowup_threshold must be positive and growth_cap above 1");
    return s;
}

inline std::string outcome_header() { return "run_id,p,Q,epsilon,status,t_lower,t_upper,peak_norm"; }

inline std::string outcome_fields(const std::string& run_id, const ProblemSpec& s, const SolveOutcome& o) {
    return run_id + "," + g17(s.p) + "," + std::to_string(s.dims.q) + "," + g17(s.forcing.amplitude()) + "," +
           to_string(o.status) + "," + g17(o.t_lower) + "," + g17(o.t_upper) + "," + g17(o.peak_norm);
}

inline nlohmann::ordered_json fit_json(const ScalingFit& f) {
    return {{"slope", f.slope}, {"intercept", f.intercept}, {"residual_r2", f.residual_r2},
            {"theoretical_slope", f.theoretical_slope}, {"deviation", f.deviation}};
}

inline ExperimentResult cmd_verify(const RunConfig& c, const std::filesystem::path& out) {
    VerifyConfig v;
    v.seed = static_cast<unsigned>(c.get_int("seed"));
    v.pairs = c.get_int("pairs");
    v.operator_points = c.get_int("operator_points");
    v.fault_mixed_sign = c.get_bool("fault_mixed_sign") ? -1.0 : 1.0;
    if (v.pairs < 1 || v.operator_points < 8) throw std::invalid_argument("pairs >= 1 and operator_points >= 8 required");
    const VerifyReport rep = run_verify_suite(v);
    std::string csv = "check,value,tolerance,pass,detail\n";
    int failed = 0;
    for (const auto& ch : rep.checks) {
        csv += ch.name + "," + g17(ch.value) + "," + g17(ch.tolerance) + "," + (ch.passed ? "1" : "0") + ",\"" +
               ch.detail + "\"\n";
        if (!ch.passed) ++failed;
    }
    write_text(out / "verify.csv", csv);
    ExperimentResult r;
    r.outputs = {"verify.csv"};
    r.exit_code = failed ? kExitCheckFailure : kExitPass;
    r.summary = std::to_string(rep.checks.size() - failed) + "/" + std::to_string(rep.checks.size()) + " checks passed";
    return r;
}

inline ExperimentResult cmd_solve(const RunConfig& c, const std::filesystem::path& out) {
    const ProblemSpec spec = problem_from(c);
    const SolveConfig sc = solve_config_from(c);
    const int stride = c.get_int("series_stride");
    if (stride < 1) throw std::invalid_argument("series_stride must be >= 1");
    const SolveOutcome o = solve_until(spec, sc);
    const std::string run_id = hex64(c.input_hash());
    write_text(out / "outcome.csv", outcome_header() + "\n" + outcome_fields(run_id, spec, o) + "\n");
    std::string series = "t,sup,boundary_sup,dt\n";
    for (std::size_t i = 0; i < o.series.size(); ++i)
        if (i % stride == 0 || i + 1 == o.series.size()) {
            const auto& s = o.series[i];
            series += g17(s.t) + "," + g17(s.sup) + "," + g17(s.boundary_sup) + "," + g17(s.dt) + "\n";
        }
    write_text(out / "series.csv", series);
    ExperimentResult r;
    r.outputs = {"outcome.csv", "series.csv"};
    r.summary = std::string(to_string(o.status)) + ": " + o.reason;
    return r;
}

inline ExperimentResult cmd_sweep(const RunConfig& c, const std::filesystem::path& out, int workers) {
    const auto p_list = c.get_list("p_list");
    const auto a_list = c.get_list("amplitude_list");
    const SolveConfig sc = solve_config_from(c);
    problem_from(c);  // reject a bad base configuration before launching the pool
    struct Point { double p, a; };
    std::vector<Point> pts;
    for (double p : p_list)
        for (double a : a_list) pts.push_back({p, a});
    auto rows = parallel_map_indexed<std::string>(pts.size(), workers, [&](std::size_t i) {
        auto given = c.values();
        given["p"] = g17(pts[i].p);
        given["forcing_amplitude"] = g17(pts[i].a);
        const RunConfig rc = RunConfig::resolve("sweep", given);
        const std::string run_id = hex64(rc.input_hash());
        try {
            const ProblemSpec spec = problem_from(rc);
            const SolveOutcome o = solve_until(spec, sc);
            return std::to_string(i) + "," + outcome_fields(run_id, spec, o) + ",\"" + o.reason + "\"";
        } catch (const std::exception& e) {
            return std::to_string(i) + "," + run_id + "," + g17(pts[i].p) + "," + std::to_string(2 * rc.get_int("n") + 2) +
                   "," + g17(pts[i].a) + ",failed,nan,nan,nan,\"" + e.what() + "\"";
        }
    });
    std::string csv = "index," + outcome_header() + ",reason\n";
    int failed = 0;
    for (const auto& row : rows) {
        csv += row + "\n";
        if (row.find(",failed,") != std::string::npos) ++failed;
    }
    write_text(out / "sweep.csv", csv);
    ExperimentResult r;
    r.outputs = {"sweep.csv"};
    r.exit_code = failed ? kExitCheckFailure : kExitPass;
    r.summary = std::to_string(rows.size() - failed) + "/" + std::to_string(rows.size()) + " sweep points completed";
    return r;
}

inline ExperimentResult cmd_capacity(const RunConfig& c, const std::filesystem::path& out) {
    const GroupDims dims(c.get_int("n"));
    const double p = c.get_double("p");
    auto cut = CapacityCutoffs::for_exponent(p);
    if (const int k = c.get_int("kappa"); k > 0) cut.mu = TemporalCutoff{k};
    if (const int k = c.get_int("kappa_prime"); k > 0) cut.phi = SpatialCutoff{k};
    cut.validate_for(p);
    const CapacityResolution res{c.get_int("res_t"), c.get_int("res_r"), c.get_int("res_tau")};
    const auto rep = subcritical_verdict(c.get_list("t_list"), p, dims, forcing_from(c), cut, res, c.get_bool("check_gate"));
    std::string csv = "T,sigma,omega,pairing,bound\n";
    for (const auto& row : rep.rows)
        csv += g17(row.big_t) + "," + g17(row.sigma) + "," + g17(row.omega) + "," + g17(row.pairing) + "," +
               g17(row.bound) + "\n";
    write_text(out / "capacity.csv", csv);
    ExperimentResult r;
    r.outputs = {"capacity.csv"};
    if (rep.fitted) {
        nlohmann::ordered_json j = {{"theoretical_lambda", rep.theoretical_lambda},
                                    {"bound", fit_json(rep.bound_fit)},
                                    {"sigma", fit_json(rep.sigma_fit)},
                                    {"omega", fit_json(rep.omega_fit)},
                                    {"inconclusive", rep.inconclusive},
                                    {"falls_below", rep.falls_below},
                                    {"gate_checked", rep.gate_checked},
                                    {"gate_passed", rep.gate_passed},
                                    {"gate_max_change", rep.gate_max_change}};
        write_text(out / "fit.json", j.dump(2) + "\n");
        r.outputs.push_back("fit.json");
        r.summary = "bound slope " + g17(rep.bound_fit.slope) + " (theory " + g17(rep.theoretical_lambda) + ")";
    } else {
        r.summary = rep.note;
    }
    if (rep.gate_checked && !rep.gate_passed) r.exit_code = kExitCheckFailure;
    return r;
}

inline ExperimentResult cmd_critical(const RunConfig& c, const std::filesystem::path& out) {
    const GroupDims dims(c.get_int("n"));
    const GaugePolarRule rule{c.get_int("n_rho"), c.get_int("n_angle"), true};
    const auto rep = critical_capacity(c.get_list("r_list"), c.get_double("j"), dims.second_exponent(), dims,
                                       c.get_int("kappa_prime"), rule);
    std::string csv = "R,T,term1,term2,total,term2_ratio\n";
    for (const auto& row : rep.rows)
        csv += g17(row.radius) + "," + g17(row.big_t) + "," + g17(row.term1) + "," + g17(row.term2) + "," +
               g17(row.total) + "," + g17(row.term2_ratio) + "\n";
    write_text(out / "critical.csv", csv);
    nlohmann::ordered_json j = {{"term1", fit_json(rep.term1_fit)},
                                {"term2_ratio_spread", rep.term2_ratio_spread},
                                {"total_decreasing", rep.total_decreasing}};
    write_text(out / "fit.json", j.dump(2) + "\n");
    ExperimentResult r;
    r.outputs = {"critical.csv", "fit.json"};
    r.summary = "term1 slope " + g17(rep.term1_fit.slope) + " (theory " + g17(rep.theoretical_term1_slope) + ")";
    return r;
}

inline ExperimentResult cmd_lifespan(const RunConfig& c, const std::filesystem::path& out, int workers) {
    const GroupDims dims(c.get_int("n"));
    LifespanConfig lc;
    lc.eps_ref = c.get_double("eps_ref");
    lc.scale_exponent = c.get_double("scale_exponent");
    lc.inner_cap = c.get_double("inner_cap");
    lc.base_grid = CylGrid(dims.n, c.get_double("r_max"), c.get_double("tau_half"), c.get_int("nr"), c.get_int("ntau"));
    lc.solve.t_end = c.get_double("t_end");
    lc.solve.dt0 = c.get_double("dt0");
    lc.solve.growth_cap = c.get_double("growth_cap");
    lc.solve.blowup_threshold = c.get_double("blowup_threshold");
    lc.solve.boundary_tol = c.get_double("boundary_tol");
    lc.workers = workers;
    const auto rep = measure_lifespan(c.get_list("eps_list"), c.get_double("lambda_f"), c.get_double("p"), dims, lc);
    std::string csv = "epsilon,status,t_lower,t_upper,t_eps,peak_norm,used\n";
    for (const auto& row : rep.rows)
        csv += g17(row.epsilon) + "," + to_string(row.status) + "," + g17(row.t_lower) + "," + g17(row.t_upper) + "," +
               g17(row.t_eps) + "," + g17(row.peak_norm) + "," + (row.used ? "1" : "0") + "\n";
    write_text(out / "lifespan.csv", csv);
    nlohmann::ordered_json j = {{"lifespan_mu", rep.lifespan_mu},
                                {"theoretical_slope", rep.theoretical_slope},
                                {"fitted", rep.fitted},
                                {"bound_ratio", rep.bound_ratio},
                                {"bound_constant", rep.bound_constant},
                                {"note", rep.note}};
    if (rep.fitted) j["fit"] = fit_json(rep.fit);
    write_text(out / "fit.json", j.dump(2) + "\n");
    ExperimentResult r;
    r.outputs = {"lifespan.csv", "fit.json"};
    r.summary = rep.fitted ? "fitted slope " + g17(rep.fit.slope) + " (theory " + g17(rep.theoretical_slope) + ")"
                           : "no fit: " + rep.note;
    return r;
}

inline nlohmann::ordered_json manifest_json(const RunConfig& c, int workers, const ExperimentResult& r) {
    nlohmann::ordered_json cfg = nlohmann::ordered_json::object();
    for (const auto& [k, v] : c.values()) cfg[k] = v;
    return {{"command", c.command()}, {"config", cfg},         {"input_hash", hex64(c.input_hash())},
            {"workers", workers},     {"outputs", r.outputs},  {"exit_code", r.exit_code},
            {"summary", r.summary}};
}

}  // namespace detail

/// Run a resolved command into `out`, writing manifest.json last.
/// Library precondition failures surface as ConfigError.
inline ExperimentResult run_experiment(const RunConfig& c, const std::filesystem::path& out, int workers = 1) {
    if (workers < 1) throw ConfigError("workers must be >= 1");
    std::filesystem::create_directories(out);
    ExperimentResult r;
    try {
        const auto& cmd = c.command();
        if (cmd == "verify") r = detail::cmd_verify(c, out);
        else if (cmd == "solve") r = detail::cmd_solve(c, out);
        else if (cmd == "sweep") r = detail::cmd_sweep(c, out, workers);
        else if (cmd == "capacity") r = detail::cmd_capacity(c, out);
        else if (cmd == "critical") r = detail::cmd_critical(c, out);
        else if (cmd == "lifespan") r = detail::cmd_lifespan(c, out, workers);
        else throw ConfigError("unknown command '" + cmd + "'");
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    r.outputs.push_back("manifest.json");
    detail::write_text(out / "manifest.json", detail::manifest_json(c, workers, r).dump(2) + "\n");
    return r;
}

/// Verify is run_experiment restricted to the verify command.
inline ExperimentResult run_verify(const RunConfig& c, const std::filesystem::path& out) {
    if (c.command() != "verify") throw ConfigError("run_verify needs the verify command");
    return run_experiment(c, out, 1);
}

/// Rebuild the resolved config of a manifest written by run_experiment.
inline RunConfig config_from_manifest(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("manifest: ") + e.what());
    }
    if (!j.contains("command") || !j.contains("config") || !j["config"].is_object())
        throw ConfigError("manifest: missing command or config");
    std::map<std::string, std::string> given;
    for (const auto& [k, v] : j["config"].items()) {
        if (!v.is_string()) throw ConfigError("manifest: config values must be strings");
        given[k] = v.get<std::string>();
    }
    return RunConfig::resolve(j["command"].get<std::string>(), given);
}

/// Load a config file: a manifest if it parses as a JSON object, else flat key=value text.
inline RunConfig load_config(const std::string& command, const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ConfigError("cannot read config " + path.string());
    std::stringstream ss;
    ss << is.rdbuf();
    const std::string text = ss.str();
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') {
        RunConfig c = config_from_manifest(text);
        if (c.command() != command)
            throw ConfigError("manifest is for command '" + c.command() + "', not '" + command + "'");
        return c;
    }
    return RunConfig::resolve(command, RunConfig::parse_text(text));
}

}  // namespace heisenheat
