#include "racbf/config.hpp"

#include <fstream>
#include <set>

namespace racbf {

namespace {

using nlohmann::json;

void reject_unknown_keys(const json& j, const std::set<std::string>& known,
                         const std::string& scope) {
    for (const auto& [key, value] : j.items())
        if (!known.contains(key))
            throw ContractViolation("config: unknown key \"" + key + "\" in " + scope);
}

Eigen::VectorXd vector_from(const json& j, const std::string& name) {
    if (!j.is_array()) throw ContractViolation("config: " + name + " must be an array");
    Eigen::VectorXd v(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
    return v;
}

json vector_to(const Eigen::VectorXd& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
    return out;
}

std::vector<double> list_from(const json& j, const std::string& name) {
    if (!j.is_array()) throw ContractViolation("config: " + name + " must be an array");
    return j.get<std::vector<double>>();
}

void parse_solver(const json& j, SolverOptions& s) {
    reject_unknown_keys(j, {"max_outer_iterations", "max_inner_iterations",
                            "constraint_tolerance", "stationarity_tolerance",
                            "finite_difference_step", "initial_penalty", "penalty_growth"},
                        "controller.solver");
    if (j.contains("max_outer_iterations")) s.max_outer_iterations = j["max_outer_iterations"].get<int>();
    if (j.contains("max_inner_iterations")) s.max_inner_iterations = j["max_inner_iterations"].get<int>();
    if (j.contains("constraint_tolerance")) s.constraint_tolerance = j["constraint_tolerance"].get<double>();
    if (j.contains("stationarity_tolerance")) s.stationarity_tolerance = j["stationarity_tolerance"].get<double>();
    if (j.contains("finite_difference_step")) s.finite_difference_step = j["finite_difference_step"].get<double>();
    if (j.contains("initial_penalty")) s.initial_penalty = j["initial_penalty"].get<double>();
    if (j.contains("penalty_growth")) s.penalty_growth = j["penalty_growth"].get<double>();
}

void parse_controller(const json& j, ControllerSettings& c) {
    reject_unknown_keys(j, {"variant", "beta", "lambdas", "ells", "epsilon", "nu_reference",
                            "control_weights", "state_weights", "aux_weight", "risk_weight",
                            "control_lower", "control_upper", "bound_scale", "solver"},
                        "controller");
    if (j.contains("variant")) c.variant = variant_from_string(j["variant"].get<std::string>());
    if (j.contains("beta")) c.beta = j["beta"].get<double>();
    if (j.contains("lambdas")) c.lambdas = list_from(j["lambdas"], "controller.lambdas");
    if (j.contains("ells")) c.ells = list_from(j["ells"], "controller.ells");
    if (j.contains("epsilon")) c.epsilon = j["epsilon"].get<double>();
    if (j.contains("nu_reference")) c.nu_reference = j["nu_reference"].get<double>();
    if (j.contains("control_weights")) c.control_weights = vector_from(j["control_weights"], "controller.control_weights");
    if (j.contains("state_weights")) c.state_weights = vector_from(j["state_weights"], "controller.state_weights");
    if (j.contains("aux_weight")) c.aux_weight = j["aux_weight"].get<double>();
    if (j.contains("risk_weight")) c.risk_weight = j["risk_weight"].get<double>();
    if (j.contains("control_lower")) c.control_lower = vector_from(j["control_lower"], "controller.control_lower");
    if (j.contains("control_upper")) c.control_upper = vector_from(j["control_upper"], "controller.control_upper");
    if (j.contains("bound_scale")) c.bound_scale = j["bound_scale"].get<double>();
    if (j.contains("solver")) parse_solver(j["solver"], c.solver);
}

}  // namespace

const char* to_string(ScenarioMode mode) {
    switch (mode) {
        case ScenarioMode::first_step: return "first_step";
        case ScenarioMode::per_step: return "per_step";
        case ScenarioMode::repeated: return "repeated";
    }
    return "unknown";
}

ScenarioMode scenario_mode_from_string(const std::string& name) {
    if (name == "first_step") return ScenarioMode::first_step;
    if (name == "per_step") return ScenarioMode::per_step;
    if (name == "repeated") return ScenarioMode::repeated;
    throw ContractViolation("unknown scenario mode: " + name);
}

RunConfig config_from_json(const nlohmann::json& j) {
    RunConfig cfg = RunConfig::paper_defaults();
    if (!j.is_object()) throw ContractViolation("config: top level must be a JSON object");
    reject_unknown_keys(j, {"total_steps", "scenario_seed", "noise_seed", "initial_state",
                            "target_state", "initial_chain", "obstacle", "model", "noise_std",
                            "scenario_count", "scenario_mode", "target_radius", "controller"},
                        "the top level");

    if (j.contains("total_steps")) cfg.total_steps = j["total_steps"].get<int>();
    if (j.contains("scenario_seed")) cfg.scenario_seed = j["scenario_seed"].get<std::uint64_t>();
    if (j.contains("noise_seed")) cfg.noise_seed = j["noise_seed"].get<std::uint64_t>();
    if (j.contains("initial_state")) cfg.initial_state = vector_from(j["initial_state"], "initial_state");
    if (j.contains("target_state")) cfg.target_state = vector_from(j["target_state"], "target_state");
    if (j.contains("initial_chain")) cfg.initial_chain = vector_from(j["initial_chain"], "initial_chain");
    if (j.contains("obstacle")) {
        const auto& o = j["obstacle"];
        reject_unknown_keys(o, {"x", "y", "radius"}, "obstacle");
        if (o.contains("x")) cfg.obstacle.x = o["x"].get<double>();
        if (o.contains("y")) cfg.obstacle.y = o["y"].get<double>();
        if (o.contains("radius")) cfg.obstacle.radius = o["radius"].get<double>();
    }
    if (j.contains("model")) {
        const auto& m = j["model"];
        reject_unknown_keys(m, {"mass", "dt"}, "model");
        if (m.contains("mass")) cfg.params.mass = m["mass"].get<double>();
        if (m.contains("dt")) cfg.params.dt = m["dt"].get<double>();
    }
    if (j.contains("noise_std")) cfg.noise_std = vector_from(j["noise_std"], "noise_std");
    if (j.contains("scenario_count")) cfg.scenario_count = j["scenario_count"].get<int>();
    if (j.contains("scenario_mode"))
        cfg.scenario_mode = scenario_mode_from_string(j["scenario_mode"].get<std::string>());
    if (j.contains("target_radius")) cfg.target_radius = j["target_radius"].get<double>();
    if (j.contains("controller")) parse_controller(j["controller"], cfg.controller);

    cfg.validate();
    return cfg;
}

nlohmann::json config_to_json(const RunConfig& cfg) {
    const auto& c = cfg.controller;
    return nlohmann::json{
        {"total_steps", cfg.total_steps},
        {"scenario_seed", cfg.scenario_seed},
        {"noise_seed", cfg.noise_seed},
        {"initial_state", vector_to(cfg.initial_state)},
        {"target_state", vector_to(cfg.target_state)},
        {"initial_chain", vector_to(cfg.initial_chain)},
        {"obstacle", {{"x", cfg.obstacle.x}, {"y", cfg.obstacle.y}, {"radius", cfg.obstacle.radius}}},
        {"model", {{"mass", cfg.params.mass}, {"dt", cfg.params.dt}}},
        {"noise_std", vector_to(cfg.noise_std)},
        {"scenario_count", cfg.scenario_count},
        {"scenario_mode", to_string(cfg.scenario_mode)},
        {"target_radius", cfg.target_radius},
        {"controller",
         {{"variant", to_string(c.variant)},
          {"beta", c.beta},
          {"lambdas", c.lambdas},
          {"ells", c.ells},
          {"epsilon", c.epsilon},
          {"nu_reference", c.nu_reference},
          {"control_weights", vector_to(c.control_weights)},
          {"state_weights", vector_to(c.state_weights)},
          {"aux_weight", c.aux_weight},
          {"risk_weight", c.risk_weight},
          {"control_lower", vector_to(c.control_lower)},
          {"control_upper", vector_to(c.control_upper)},
          {"bound_scale", c.bound_scale},
          {"solver",
           {{"max_outer_iterations", c.solver.max_outer_iterations},
            {"max_inner_iterations", c.solver.max_inner_iterations},
            {"constraint_tolerance", c.solver.constraint_tolerance},
            {"stationarity_tolerance", c.solver.stationarity_tolerance},
            {"finite_difference_step", c.solver.finite_difference_step},
            {"initial_penalty", c.solver.initial_penalty},
            {"penalty_growth", c.solver.penalty_growth}}}}}};
}

RunConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ContractViolation("config: cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& err) {
        throw ContractViolation("config: parse error in " + path + ": " + err.what());
    }
    return config_from_json(j);
}

}  // namespace racbf
