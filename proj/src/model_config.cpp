#include "mixlab/model_config.hpp"
#include "mixlab/errors.hpp"

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace mixlab {

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
    std::size_t used = 0;
    double out = 0;
    try {
        out = std::stod(v, &used);
    } catch (const std::exception&) {
        throw ConfigError("bad number for " + key + ": '" + v + "'");
    }
    if (used != v.size()) throw ConfigError("bad number for " + key + ": '" + v + "'");
    return out;
}

int to_int(const std::string& key, const std::string& v) {
    double d = to_double(key, v);
    if (d != static_cast<int>(d)) throw ConfigError("expected integer for " + key);
    return static_cast<int>(d);
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

std::vector<std::string> model_config_keys() {
    return {"family", "branches", "transitions", "roof_const", "roof_linear", "roof_sin", "roof_cos",
            "roof_step", "pot_const", "pot_sin", "pot_cos", "pot_fiber", "mu_const", "mu_sin",
            "grid_size", "theta"};
}

void ModelConfig::set(const std::string& key, const std::string& raw) {
    const std::string v = trim(raw);
    if (key == "family") family = v;
    else if (key == "branches") branches = to_int(key, v);
    else if (key == "transitions") transitions = v;
    else if (key == "roof_const") roof_const = to_double(key, v);
    else if (key == "roof_linear") roof_linear = to_double(key, v);
    else if (key == "roof_sin") roof_sin = to_double(key, v);
    else if (key == "roof_cos") roof_cos = to_double(key, v);
    else if (key == "roof_step") {
        roof_step.clear();
        std::stringstream ss(v);
        std::string item;
        while (std::getline(ss, item, ','))
            if (!trim(item).empty()) roof_step.push_back(to_double(key, trim(item)));
    } else if (key == "pot_const") pot_const = to_double(key, v);
    else if (key == "pot_sin") pot_sin = to_double(key, v);
    else if (key == "pot_cos") pot_cos = to_double(key, v);
    else if (key == "pot_fiber") pot_fiber = to_double(key, v);
    else if (key == "mu_const") mu_const = to_double(key, v);
    else if (key == "mu_sin") mu_sin = to_double(key, v);
    else if (key == "grid_size") grid_size = to_int(key, v);
    else if (key == "theta") theta = to_double(key, v);
    else throw ConfigError("unknown model key: " + key);
}

ModelConfig ModelConfig::parse(const std::string& text) {
    ModelConfig c;
    std::stringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected key=value");
        c.set(trim(line.substr(0, eq)), line.substr(eq + 1));
    }
    return c;
}

ModelConfig ModelConfig::load(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open model file " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse(ss.str());
}

std::string ModelConfig::serialize() const {
    std::ostringstream o;
    o << "family=" << family << "\n";
    o << "branches=" << branches << "\n";
    o << "transitions=" << transitions << "\n";
    o << "roof_const=" << fmt(roof_const) << "\n";
    o << "roof_linear=" << fmt(roof_linear) << "\n";
    o << "roof_sin=" << fmt(roof_sin) << "\n";
    o << "roof_cos=" << fmt(roof_cos) << "\n";
    o << "roof_step=";
    for (std::size_t i = 0; i < roof_step.size(); ++i) o << (i ? "," : "") << fmt(roof_step[i]);
    o << "\n";
    o << "pot_const=" << fmt(pot_const) << "\n";
    o << "pot_sin=" << fmt(pot_sin) << "\n";
    o << "pot_cos=" << fmt(pot_cos) << "\n";
    o << "pot_fiber=" << fmt(pot_fiber) << "\n";
    o << "mu_const=" << fmt(mu_const) << "\n";
    o << "mu_sin=" << fmt(mu_sin) << "\n";
    o << "grid_size=" << grid_size << "\n";
    o << "theta=" << fmt(theta) << "\n";
    return o.str();
}

std::string ModelConfig::hash() const {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char ch : serialize()) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

} // namespace mixlab
