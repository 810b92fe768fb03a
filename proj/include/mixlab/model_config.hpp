#pragma once

#include <map>
#include <string>
#include <vector>

namespace mixlab {

// Plain key=value description of a built-in model.
struct ModelConfig {
    std::string family = "doubling"; // doubling | fullshift | markov3
    int branches = 2;                // fullshift only
    std::string transitions = "111,111,110"; // markov3 only, rows of the 0/1 matrix

    double roof_const = 1.0;
    double roof_linear = 0.0;
    double roof_sin = 0.0;
    double roof_cos = 0.0;
    std::vector<double> roof_step; // added on the first-level cylinder of each symbol

    double pot_const = 0.0;
    double pot_sin = 0.0;
    double pot_cos = 0.0;
    double pot_fiber = 0.0; // coefficient of sin(pi t / tau) along the fiber

    double mu_const = 0.5;
    double mu_sin = 0.0;

    int grid_size = 4096;
    double theta = 0.5;

    static ModelConfig parse(const std::string& text);
    static ModelConfig load(const std::string& path);
    std::string serialize() const;
    void set(const std::string& key, const std::string& value);
    std::string hash() const;
};

std::vector<std::string> model_config_keys();

} // namespace mixlab
