#pragma once

// Flat key=value run configuration. One pair per line, '#' starts a comment.
// Every command has a fixed key table; unknown keys and malformed values are errors.

#include <algorithm>
#include <cstdint>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace heisenheat {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct KeySpec {
    std::string key;
    std::string default_value;
    std::string doc;
};

namespace detail {

inline std::vector<KeySpec> problem_keys() {
    return {
        {"n", "1", "Heisenberg parameter N"},
        {"p", "1.5", "nonlinearity exponent"},
        {"forcing", "gaussian", "zero | gaussian | singular_power | regular_power"},
        {"forcing_amplitude", "1e-3", "Gaussian amplitude, or eps for the power forcings"},
        {"forcing_width", "12", "Gaussian width w"},
        {"lambda_f", "2.5", "singular_power decay exponent"},
        {"inner_cap", "1", "singular_power value on the unit gauge ball, in units of eps"},
        {"decay", "6", "regular_power decay exponent"},
        {"init", "zero", "zero | gaussian | constant"},
        {"init_amplitude", "0", "initial amplitude"},
        {"init_width", "1", "initial Gaussian width"},
        {"grid", "cyl", "cyl | box"},
        {"r_max", "64", "cylinder radius"},
        {"tau_half", "2400", "cylinder half height"},
        {"nr", "128", "cylinder radial cells"},
        {"ntau", "800", "cylinder tau cells"},
        {"box_half_x", "4", "box half extent in x and y"},
        {"box_half_tau", "16", "box half extent in tau"},
        {"box_points", "32", "box points per axis"},
        {"scheme", "imex", "imex | explicit_euler"},
        {"diffusion", "1", "0 disables the operator"},
        {"nonlinearity", "1", "0 disables |u|^p"},
        {"t_end", "50", "horizon"},
        {"dt0", "0.25", "initial and maximal time step"},
        {"blowup_threshold", "1e8", "sup norm declaring blow-up"},
        {"growth_cap", "1.2", "per-step sup growth that triggers step halving"},
        {"boundary_tol", "1e-6", "boundary band sup relative to the sup norm"},
    };
}

}  // namespace detail

/// Documented keys for a command.
inline std::vector<KeySpec> keys_for(const std::string& command) {
    if (command == "verify")
        return {{"seed", "12345", "random seed"},
                {"pairs", "100", "random field pairs for the symmetry check"},
                {"operator_points", "16", "points per axis of the symmetry grid"},
                {"fault_mixed_sign", "0", "test hook: 1 flips the sign of the mixed-derivative terms"}};
    if (command == "solve") {
        auto k = detail::problem_keys();
        k.push_back({"series_stride", "1", "write every k-th accepted step to series.csv"});
        return k;
    }
    if (command == "sweep") {
        auto k = detail::problem_keys();
        k.push_back({"p_list", "1.5", "comma-separated exponents"});
        k.push_back({"amplitude_list", "1e-3,1e-2,1e-1,1", "comma-separated forcing amplitudes"});
        return k;
    }
    if (command == "capacity")
        return {{"n", "1", "Heisenberg parameter N"},
                {"p", "1.5", "nonlinearity exponent"},
                {"t_list", "10,31.6227766016838,100,316.227766016838,1000", "comma-separated T values"},
                {"kappa", "0", "temporal cutoff exponent, 0 for the minimal admissible one"},
                {"kappa_prime", "0", "spatial cutoff exponent, 0 for the minimal admissible one"},
                {"res_t", "64", "time cells"},
                {"res_r", "160", "radial cells"},
                {"res_tau", "320", "tau cells"},
                {"check_gate", "1", "also evaluate at doubled resolution"},
                {"forcing", "gaussian", "forcing paired with psi: zero | gaussian | singular_power | regular_power"},
                {"forcing_amplitude", "1", "Gaussian amplitude or eps"},
                {"forcing_width", "1", "Gaussian width"},
                {"lambda_f", "2.5", "singular_power decay exponent"},
                {"inner_cap", "1", "singular_power cap"},
                {"decay", "6", "regular_power decay exponent"}};
    if (command == "critical")
        return {{"n", "1", "Heisenberg parameter N (p is Q/(Q-2))"},
                {"j", "4", "T = R^j"},
                {"r_list", "100,1000,10000", "comma-separated R values"},
                {"kappa_prime", "0", "log cutoff exponent, 0 for the minimal admissible one"},
                {"n_rho", "800", "radial quadrature cells in ln rho"},
                {"n_angle", "128", "angular quadrature cells"}};
    if (command == "lifespan")
        return {{"n", "1", "Heisenberg parameter N"},
                {"p", "1.5", "nonlinearity exponent"},
                {"lambda_f", "2.5", "forcing decay exponent"},
                {"inner_cap", "1", "forcing value on the unit ball, in units of eps"},
                {"eps_list", "1e-1,3e-2,1e-2,3e-3,1e-3", "comma-separated amplitudes"},
                {"eps_ref", "0.1", "amplitude at which the base grid applies"},
                {"scale_exponent", "0.8", "grid and step scale s = (eps_ref/eps)^k"},
                {"r_max", "64", "base cylinder radius (grows like sqrt(s))"},
                {"tau_half", "2400", "base cylinder half height (grows like s)"},
                {"nr", "128", "radial cells"},
                {"ntau", "800", "tau cells"},
                {"t_end", "1e5", "horizon"},
                {"dt0", "0.5", "base step (grows like sqrt(s))"},
                {"growth_cap", "1.2", "per-step growth cap"},
                {"blowup_threshold", "1e8", "sup norm declaring blow-up"},
                {"boundary_tol", "1e-6", "boundary monitor tolerance"}};
    throw ConfigError("unknown command '" + command + "'");
}

inline const std::vector<std::string>& known_commands() {
    static const std::vector<std::string> c = {"verify", "solve", "capacity", "critical", "lifespan", "sweep"};
    return c;
}

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

class RunConfig {
public:
    RunConfig() = default;

    /// Resolve `given` against the key table of `command`, filling defaults.
    static RunConfig resolve(const std::string& command, const std::map<std::string, std::string>& given) {
        RunConfig c;
        c.command_ = command;
        for (const auto& k : keys_for(command)) c.values_[k.key] = k.default_value;
        for (const auto& [k, v] : given) {
            if (!c.values_.count(k)) throw ConfigError("unknown key '" + k + "' for command '" + command + "'");
            c.values_[k] = v;
        }
        return c;
    }

    /// Parse flat key=value text.
    static std::map<std::string, std::string> parse_text(const std::string& text) {
        std::map<std::string, std::string> out;
        std::istringstream is(text);
        std::string line;
        int lineno = 0;
        while (std::getline(is, line)) {
            ++lineno;
            if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
            const auto s = trim(line);
            if (s.empty()) continue;
            const auto eq = s.find('=');
            if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key=value");
            const auto key = trim(s.substr(0, eq)), val = trim(s.substr(eq + 1));
            if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
            if (out.count(key)) throw ConfigError("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
            out[key] = val;
        }
        return out;
    }

    const std::string& command() const { return command_; }
    const std::map<std::string, std::string>& values() const { return values_; }

    std::string get(const std::string& key) const {
        const auto it = values_.find(key);
        if (it == values_.end()) throw ConfigError("undocumented key '" + key + "' requested");
        return it->second;
    }

    double get_double(const std::string& key) const { return to_double(key, get(key)); }

    int get_int(const std::string& key) const {
        const double v = get_double(key);
        if (v != static_cast<double>(static_cast<long long>(v)))
            throw ConfigError("key '" + key + "': expected an integer, got '" + get(key) + "'");
        return static_cast<int>(v);
    }

    bool get_bool(const std::string& key) const {
        const auto v = get(key);
        if (v == "1" || v == "true") return true;
        if (v == "0" || v == "false") return false;
        throw ConfigError("key '" + key + "': expected 0/1, got '" + v + "'");
    }

    std::vector<double> get_list(const std::string& key) const {
        std::vector<double> out;
        std::istringstream is(get(key));
        std::string item;
        while (std::getline(is, item, ',')) {
            const auto t = trim(item);
            if (!t.empty()) out.push_back(to_double(key, t));
        }
        if (out.empty()) throw ConfigError("key '" + key + "': empty list");
        return out;
    }

    std::string get_choice(const std::string& key, const std::vector<std::string>& choices) const {
        const auto v = get(key);
        if (std::find(choices.begin(), choices.end(), v) == choices.end())
            throw ConfigError("key '" + key + "': invalid value '" + v + "'");
        return v;
    }

    /// Sorted key=value lines; the basis of the input hash.
    std::string canonical_text() const {
        std::string s = "command=" + command_ + "\n";
        for (const auto& [k, v] : values_) s += k + "=" + v + "\n";
        return s;
    }

    std::uint64_t input_hash() const { return fnv1a64(canonical_text()); }

private:
    static std::string trim(const std::string& s) {
        const auto b = s.find_first_not_of(" \t\r");
        if (b == std::string::npos) return "";
        const auto e = s.find_last_not_of(" \t\r");
        return s.substr(b, e - b + 1);
    }

    static double to_double(const std::string& key, const std::string& v) {
        try {
            std::size_t pos = 0;
            const double d = std::stod(v, &pos);
            if (pos != v.size()) throw std::invalid_argument("trailing");
            return d;
        } catch (const std::exception&) {
            throw ConfigError("key '" + key + "': expected a number, got '" + v + "'");
        }
    }

    std::string command_;
    std::map<std::string, std::string> values_;
};

}  // namespace heisenheat
