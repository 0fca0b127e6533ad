#pragma once

#include <map>
#include <string>

#include "gcme/thermo.hpp"

namespace gcme {

// Run settings parsed from the sectioned key-value config file.
struct RunConfig {
    ModelSpec model = ModelSpec::harmonic(1.0, 0.0);
    TruncationPolicy trunc;

    double tol_algebraic = 1e-12;
    double tol_spectral = 1e-10;
    double tol_root = 1e-13;

    std::string out_format = "csv";  // csv | json
    std::string out_path;            // empty: stdout
    int precision = 12;

    void validate() const;
};

// Flat "section.key" -> value view of an INI-style document:
//   [section]
//   key = value        # comment
std::map<std::string, std::string> parse_ini(const std::string& text);

RunConfig config_from_text(const std::string& text);
RunConfig load_config(const std::string& path);

}  // namespace gcme
