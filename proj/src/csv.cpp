#include "mixlab/csv.hpp"
#include "mixlab/errors.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace mixlab {

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::string csv_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string Artifact::render() const {
    std::string out;
    for (const auto& [k, v] : meta) {
        std::string line = v;
        for (char& c : line)
            if (c == '\n' || c == '\r') c = ' ';
        out += "# " + k + "=" + line + "\n";
    }
    return out + body;
}

void write_text(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot write " + path);
    f << content;
    if (!f) throw ConfigError("write failed: " + path);
}

std::string read_text(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot read " + path);
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

} // namespace mixlab
