// Experiment configuration: a single strict JSON document. Unknown keys are
// rejected so a typo in a parameter grid can never silently change a scaling
// fit.
#pragma once

#include "entropy.hpp"
#include "io.hpp"

#include <json.hpp>

#include <set>
#include <string>
#include <vector>

namespace ikklab {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

inline void require_known_keys(const nlohmann::json& obj, const std::set<std::string>& allowed,
                               const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (!allowed.count(it.key()))
            throw ConfigError("config: unknown key '" + it.key() + "' in " + where);
    }
}

template <typename T>
T get_or(const nlohmann::json& obj, const std::string& key, T fallback) {
    if (!obj.contains(key)) return fallback;
    try {
        return obj.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config: bad value for '" + key + "': " + e.what());
    }
}

} // namespace detail

struct ExperimentConfig {
    std::string experiment = "simulate";
    std::string model = "ikk"; // simulate only: ikk | ch

    std::vector<double> gamma_list{0.5, 0.25, 0.125};
    std::vector<double> delta_list{0.2, 0.1, 0.05};
    std::vector<int> n_family{4, 16, 64};
    int ensemble = 8;
    uint64_t seed = 1;
    int workers = 1;

    int grid_n = 256; // experiment default; unit tests run at 64
    int truncation = 0; // 0 -> N/3
    bool dealias = true;

    double dt = 0.0; // 0 -> stability rule
    double horizon = 0.25;
    int stride = 64;

    double a = -1.0;
    double gamma = 0.1;
    double delta = 0.1;
    double epsilon = 1.0;
    std::string sigma_kind = "smooth"; // smooth | family | square_root
    int sigma_n = 64;
    double kernel_radius = 0.25;
    double mollifier_radius = 0.25;

    std::string initial_kind = "zero"; // zero | smooth | spike
    double initial_amplitude = 0.2;

    std::string output_dir = ".";

    // experiment-specific knobs
    std::string measure = "both"; // converge_two_step: gamma | delta | both
    double remainder_beta = 2.0;  // remainder_scaling norm weight
    int schedule_length = 4;      // ldp_regime
    double control_amplitude = 2.0;
    int control_mode = 1;
    std::vector<int> m_values{1, 4, 16};

    DiffusionCoefficient coefficient() const {
        if (sigma_kind == "smooth") return DiffusionCoefficient::smooth();
        if (sigma_kind == "family") return DiffusionCoefficient::family(sigma_n);
        if (sigma_kind == "square_root") return DiffusionCoefficient::square_root();
        throw ConfigError("config: sigma kind must be smooth | family | square_root");
    }

    nlohmann::json to_json() const {
        return nlohmann::json{
            {"experiment", experiment},
            {"model", model},
            {"gamma_list", gamma_list},
            {"delta_list", delta_list},
            {"n_family", n_family},
            {"ensemble", ensemble},
            {"seed", seed},
            {"workers", workers},
            {"grid", {{"n", grid_n}, {"truncation", truncation}, {"dealias", dealias}}},
            {"time", {{"dt", dt}, {"horizon", horizon}, {"stride", stride}}},
            {"params",
             {{"a", a},
              {"gamma", gamma},
              {"delta", delta},
              {"epsilon", epsilon},
              {"sigma_kind", sigma_kind},
              {"sigma_n", sigma_n},
              {"kernel_radius", kernel_radius},
              {"mollifier_radius", mollifier_radius}}},
            {"initial", {{"kind", initial_kind}, {"amplitude", initial_amplitude}}},
            {"output_dir", output_dir},
            {"measure", measure},
            {"remainder_beta", remainder_beta},
            {"schedule_length", schedule_length},
            {"control", {{"amplitude", control_amplitude}, {"mode", control_mode}}},
            {"m_values", m_values}};
    }

    std::string serialize() const { return to_json().dump(2); }

    std::string hash() const {
        nlohmann::json j = to_json();
        j.erase("workers"); // execution detail, not part of the experiment identity
        char buf[20];
        std::snprintf(buf, sizeof buf, "%016llx",
                      static_cast<unsigned long long>(fnv1a64(j.dump())));
        return buf;
    }

    static ExperimentConfig parse(const nlohmann::json& j) {
        if (!j.is_object()) throw ConfigError("config: document must be a JSON object");
        detail::require_known_keys(
            j,
            {"experiment", "model", "gamma_list", "delta_list", "n_family", "ensemble", "seed",
             "workers", "grid", "time", "params", "initial", "output_dir", "measure",
             "remainder_beta", "schedule_length", "control", "m_values"},
            "top level");
        ExperimentConfig c;
        c.experiment = detail::get_or<std::string>(j, "experiment", c.experiment);
        static const std::set<std::string> kinds{"simulate",       "converge_two_step",
                                                 "entropy_report", "remainder_scaling",
                                                 "ldp_regime",     "gamma_converge",
                                                 "noise_checks"};
        if (!kinds.count(c.experiment))
            throw ConfigError("config: unknown experiment '" + c.experiment + "'");
        c.model = detail::get_or<std::string>(j, "model", c.model);
        if (c.model != "ikk" && c.model != "ch") throw ConfigError("config: model must be ikk | ch");
        c.gamma_list = detail::get_or(j, "gamma_list", c.gamma_list);
        c.delta_list = detail::get_or(j, "delta_list", c.delta_list);
        c.n_family = detail::get_or(j, "n_family", c.n_family);
        if (c.gamma_list.empty() || c.delta_list.empty() || c.n_family.empty())
            throw ConfigError("config: parameter lists must be non-empty");
        c.ensemble = detail::get_or(j, "ensemble", c.ensemble);
        c.seed = detail::get_or(j, "seed", c.seed);
        c.workers = detail::get_or(j, "workers", c.workers);
        if (j.contains("grid")) {
            const auto& g = j.at("grid");
            detail::require_known_keys(g, {"n", "truncation", "dealias"}, "grid");
            c.grid_n = detail::get_or(g, "n", c.grid_n);
            c.truncation = detail::get_or(g, "truncation", c.truncation);
            c.dealias = detail::get_or(g, "dealias", c.dealias);
        }
        if (!is_power_of_two(c.grid_n) || c.grid_n < 8)
            throw ConfigError("config: grid.n must be a power of two >= 8");
        if (j.contains("time")) {
            const auto& t = j.at("time");
            detail::require_known_keys(t, {"dt", "horizon", "stride"}, "time");
            c.dt = detail::get_or(t, "dt", c.dt);
            c.horizon = detail::get_or(t, "horizon", c.horizon);
            c.stride = detail::get_or(t, "stride", c.stride);
        }
        if (j.contains("params")) {
            const auto& p = j.at("params");
            detail::require_known_keys(p,
                                       {"a", "gamma", "delta", "epsilon", "sigma_kind", "sigma_n",
                                        "kernel_radius", "mollifier_radius"},
                                       "params");
            c.a = detail::get_or(p, "a", c.a);
            c.gamma = detail::get_or(p, "gamma", c.gamma);
            c.delta = detail::get_or(p, "delta", c.delta);
            c.epsilon = detail::get_or(p, "epsilon", c.epsilon);
            c.sigma_kind = detail::get_or(p, "sigma_kind", c.sigma_kind);
            c.sigma_n = detail::get_or(p, "sigma_n", c.sigma_n);
            c.kernel_radius = detail::get_or(p, "kernel_radius", c.kernel_radius);
            c.mollifier_radius = detail::get_or(p, "mollifier_radius", c.mollifier_radius);
        }
        if (j.contains("initial")) {
            const auto& ini = j.at("initial");
            detail::require_known_keys(ini, {"kind", "amplitude"}, "initial");
            c.initial_kind = detail::get_or(ini, "kind", c.initial_kind);
            c.initial_amplitude = detail::get_or(ini, "amplitude", c.initial_amplitude);
        }
        if (c.initial_kind != "zero" && c.initial_kind != "smooth" && c.initial_kind != "spike")
            throw ConfigError("config: initial.kind must be zero | smooth | spike");
        c.output_dir = detail::get_or(j, "output_dir", c.output_dir);
        c.measure = detail::get_or(j, "measure", c.measure);
        if (c.measure != "gamma" && c.measure != "delta" && c.measure != "both")
            throw ConfigError("config: measure must be gamma | delta | both");
        c.remainder_beta = detail::get_or(j, "remainder_beta", c.remainder_beta);
        c.schedule_length = detail::get_or(j, "schedule_length", c.schedule_length);
        if (j.contains("control")) {
            const auto& g = j.at("control");
            detail::require_known_keys(g, {"amplitude", "mode"}, "control");
            c.control_amplitude = detail::get_or(g, "amplitude", c.control_amplitude);
            c.control_mode = detail::get_or(g, "mode", c.control_mode);
        }
        c.m_values = detail::get_or(j, "m_values", c.m_values);
        c.coefficient(); // validates sigma settings
        // kernel resolvability guard for every (gamma, N) pair in scope
        for (double g : c.gamma_list) {
            if (std::cbrt(g) * c.kernel_radius < 4.0 / double(c.grid_n))
                throw ConfigError("config: gamma " + std::to_string(g) +
                                  " under-resolves the kernel at grid.n = " +
                                  std::to_string(c.grid_n));
        }
        return c;
    }

    static ExperimentConfig parse_string(const std::string& text) {
        try {
            return parse(nlohmann::json::parse(text));
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError(std::string("config: JSON parse failure: ") + e.what());
        }
    }

    static ExperimentConfig load(const std::string& path) {
        std::ifstream is(path);
        if (!is) throw ConfigError("config: cannot open " + path);
        std::stringstream ss;
        ss << is.rdbuf();
        return parse_string(ss.str());
    }

    Field initial_field() const {
        EntropyParams ep(std::min(gamma, 1.0));
        if (initial_kind == "zero") return Field(grid_n, 0.0);
        if (initial_kind == "smooth") return initial_data_smooth(grid_n, initial_amplitude, ep).field;
        return initial_data_spike(grid_n, ep, kernel_radius).field;
    }
};

inline bool operator==(const ExperimentConfig& a, const ExperimentConfig& b) {
    return a.to_json() == b.to_json();
}

} // namespace ikklab
