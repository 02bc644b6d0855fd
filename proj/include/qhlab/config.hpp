#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qhlab/gp_models.hpp"
#include "qhlab/replicate.hpp"
#include "qhlab/sampler.hpp"
#include "qhlab/smallball.hpp"

namespace qhlab {

enum class Command { simulate, check_conditions, smallball, frac_check, replicate, lemma_divergence };
const char* command_name(Command c);
std::optional<Command> parse_command(const std::string& s);

struct ConfigError {
    int line = 0;  // 0 when not tied to a line
    std::string key;
    std::string message;
    std::string str() const;
};

struct ModelSpec {
    std::string variant = "fbm";
    double H = 0.75;
    double K = 1.0;
    double a = 1.0;
    std::string kernel = "fbm-type";
    double kernel_H = 0.7;
    double kernel_a = 1.0;
};

enum class TargetKind { zero, constant, scaled_path };

struct ExperimentConfig {
    ModelSpec model;
    TimeGrid grid{0.0, 1.0, 1024};
    std::size_t m_paths = 1000;
    std::uint64_t seed = 1;
    // simulate
    bool dump = false;
    Route route = Route::automatic;
    // check-conditions
    int cond_grid = 32;
    std::optional<double> cond_H1, cond_H2;
    Sign cond_sign = Sign::positive;
    double cond_t0 = 0.0;
    // smallball
    std::vector<double> eps_list{0.3, 0.4, 0.5, 0.6, 0.7, 0.8};
    std::vector<double> delta_list{1.0};
    HelixInput helix{};
    bool helix_given = false;
    Estimator estimator = Estimator::grid;
    int certify_grid = 24;
    // frac-check
    double alpha = 0.3;
    double frac_hint = 0.7;
    // replicate
    double rho = 0.1;
    int N_blocks = 10;
    ScheduleKind schedule = ScheduleKind::dyadic;
    TargetKind target = TargetKind::scaled_path;
    double target_value = 0.5;
    Trigger trigger = Trigger::adapted;
    // lemma-divergence
    double level_M = 3.0;
    int lemma_blocks = 60;
    std::optional<double> lemma_beta, lemma_gamma, lemma_theta;

    // Every key with the value in force after defaults, in key order.
    std::map<std::string, std::string> resolved;
    std::map<std::string, std::string> given;
};

struct ParseResult {
    std::optional<ExperimentConfig> config;
    std::vector<ConfigError> errors;
    bool ok() const { return errors.empty(); }
};

// Flat "section.key = value" lines, '#' comments. All errors are collected.
ParseResult parse_config(const std::string& text);

// Key table for --help: key, default, description.
std::string config_help();

ProcessModel build_model(const ModelSpec& s);

}  // namespace qhlab
