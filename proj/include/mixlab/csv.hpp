#pragma once

#include <string>
#include <utility>
#include <vector>

namespace mixlab {

// RFC 4180 quoting: fields holding a comma, quote or line break are quoted.
std::string csv_field(const std::string& s);
std::string csv_number(double v); // %.17g

// A CSV body preceded by `# key=value` metadata lines.
struct Artifact {
    std::vector<std::pair<std::string, std::string>> meta;
    std::string body;
    std::string render() const;
};

void write_text(const std::string& path, const std::string& content);
std::string read_text(const std::string& path);

} // namespace mixlab
