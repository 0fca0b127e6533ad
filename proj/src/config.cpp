#include "gcme/config.hpp"

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <vector>

namespace gcme {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return "";
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double parse_number(const std::string& key, const std::string& value) {
    char* end = nullptr;
    const double x = std::strtod(value.c_str(), &end);
    if (end == value.c_str() || *end != '\0')
        throw ConfigError("config: key '" + key + "' has non-numeric value '" +
                          value + "'");
    return x;
}

int parse_int(const std::string& key, const std::string& value) {
    const double x = parse_number(key, value);
    const int i = static_cast<int>(x);
    if (static_cast<double>(i) != x)
        throw ConfigError("config: key '" + key + "' must be an integer");
    return i;
}

std::vector<double> parse_list(const std::string& key,
                               const std::string& value) {
    std::vector<double> out;
    std::istringstream in(value);
    std::string tok;
    while (in >> tok) out.push_back(parse_number(key, tok));
    if (out.empty())
        throw ConfigError("config: key '" + key + "' holds an empty list");
    return out;
}

}  // namespace

void RunConfig::validate() const {
    for (double tol : {tol_algebraic, tol_spectral, tol_root})
        if (!(tol > 0.0 && tol <= 1e-2))
            throw ConfigError("config: tolerances must lie in (0, 1e-2]");
    if (precision < 6 || precision > 17)
        throw ConfigError("config: output.precision must lie in [6, 17]");
    if (out_format != "csv" && out_format != "json")
        throw ConfigError("config: output.format must be csv or json");
}

std::map<std::string, std::string> parse_ini(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find_first_of("#;");
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("config: malformed section header at line " +
                                  std::to_string(lineno));
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty())
                throw ConfigError("config: empty section name at line " +
                                  std::to_string(lineno));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config: expected 'key = value' at line " +
                              std::to_string(lineno));
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ConfigError("config: empty key or value at line " +
                              std::to_string(lineno));
        const std::string full = section.empty() ? key : section + "." + key;
        if (kv.count(full))
            throw ConfigError("config: duplicate key '" + full + "'");
        kv[full] = value;
    }
    return kv;
}

RunConfig config_from_text(const std::string& text) {
    auto kv = parse_ini(text);
    std::set<std::string> seen;
    auto take = [&](const std::string& key) -> const std::string* {
        auto it = kv.find(key);
        if (it == kv.end()) return nullptr;
        seen.insert(key);
        return &it->second;
    };

    RunConfig cfg;

    double beta = 1.0, mu = 0.0;
    if (auto* v = take("thermo.beta")) beta = parse_number("thermo.beta", *v);
    if (auto* v = take("thermo.mu")) mu = parse_number("thermo.mu", *v);

    std::string kind = "harmonic";
    if (auto* v = take("model.kind")) kind = *v;
    if (kind == "harmonic") {
        cfg.model = ModelSpec::harmonic(beta, mu);
    } else if (kind == "affine") {
        double a = 1.0, b = 0.0, c = 1.0, d = 0.0;
        if (auto* v = take("model.a")) a = parse_number("model.a", *v);
        if (auto* v = take("model.b")) b = parse_number("model.b", *v);
        if (auto* v = take("model.c")) c = parse_number("model.c", *v);
        if (auto* v = take("model.d")) d = parse_number("model.d", *v);
        cfg.model = ModelSpec::affine(a, b, c, d, beta, mu);
    } else if (kind == "table") {
        auto* lam = take("model.lambda");
        auto* np = take("model.nparticles");
        if (!lam)
            throw ConfigError("config: table model needs model.lambda");
        auto lambda = parse_list("model.lambda", *lam);
        std::vector<double> nparticles(lambda.size(), 0.0);
        if (np) nparticles = parse_list("model.nparticles", *np);
        cfg.model = ModelSpec::table(std::move(lambda), std::move(nparticles),
                                     beta, mu);
    } else {
        throw ConfigError("config: unknown model.kind '" + kind + "'");
    }

    if (auto* v = take("witness.m0"))
        cfg.model.witness.m0 = parse_int("witness.m0", *v);
    if (auto* v = take("witness.growth"))
        cfg.model.witness.growth = parse_number("witness.growth", *v);

    if (auto* v = take("trunc.max_index"))
        cfg.trunc.max_index = parse_int("trunc.max_index", *v);
    if (auto* v = take("trunc.tail_tol"))
        cfg.trunc.tail_tol = parse_number("trunc.tail_tol", *v);

    if (auto* v = take("tol.algebraic"))
        cfg.tol_algebraic = parse_number("tol.algebraic", *v);
    if (auto* v = take("tol.spectral"))
        cfg.tol_spectral = parse_number("tol.spectral", *v);
    if (auto* v = take("tol.root")) cfg.tol_root = parse_number("tol.root", *v);

    if (auto* v = take("output.format")) cfg.out_format = *v;
    if (auto* v = take("output.path")) cfg.out_path = *v;
    if (auto* v = take("output.precision"))
        cfg.precision = parse_int("output.precision", *v);

    for (const auto& [key, value] : kv)
        if (!seen.count(key))
            throw ConfigError("config: unknown key '" + key + "'");

    cfg.validate();
    try {
        cfg.model.validate(cfg.trunc);
    } catch (const Error& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return config_from_text(buf.str());
}

}  // namespace gcme
