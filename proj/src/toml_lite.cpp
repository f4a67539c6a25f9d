#include "eulerctl/toml_lite.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace eulerctl {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

// strip a trailing comment not inside a string
std::string strip_comment(const std::string& line) {
    bool in_str = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"') in_str = !in_str;
        if (line[i] == '#' && !in_str) return line.substr(0, i);
    }
    return line;
}

TomlValue parse_scalar(const std::string& raw, const std::string& where) {
    const std::string v = trim(raw);
    if (v.empty()) throw ConfigError(where + ": empty value");
    if (v == "true") return true;
    if (v == "false") return false;
    if (v.front() == '"') {
        if (v.size() < 2 || v.back() != '"')
            throw ConfigError(where + ": unterminated string");
        return v.substr(1, v.size() - 2);
    }
    // integer when it parses exactly as one, float otherwise
    try {
        std::size_t pos = 0;
        const long long i = std::stoll(v, &pos);
        if (pos == v.size()) return i;
    } catch (...) {
    }
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos == v.size()) return d;
    } catch (...) {
    }
    throw ConfigError(where + ": cannot parse value '" + v + "'");
}

TomlValue parse_value(const std::string& raw, const std::string& where) {
    const std::string v = trim(raw);
    if (!v.empty() && v.front() == '[') {
        if (v.back() != ']') throw ConfigError(where + ": unterminated array");
        std::vector<double> nums;
        std::vector<std::string> strs;
        bool has_str = false, has_num = false;
        std::string body = v.substr(1, v.size() - 2);
        std::stringstream ss(body);
        std::string item;
        while (std::getline(ss, item, ',')) {
            if (trim(item).empty()) continue;
            TomlValue sv = parse_scalar(item, where);
            if (std::holds_alternative<std::string>(sv)) {
                strs.push_back(std::get<std::string>(sv));
                has_str = true;
            } else if (std::holds_alternative<long long>(sv)) {
                nums.push_back(static_cast<double>(std::get<long long>(sv)));
                has_num = true;
            } else if (std::holds_alternative<double>(sv)) {
                nums.push_back(std::get<double>(sv));
                has_num = true;
            } else {
                throw ConfigError(where + ": unsupported array element");
            }
        }
        if (has_str && has_num) throw ConfigError(where + ": mixed array types");
        if (has_str) return strs;
        return nums;
    }
    return parse_scalar(v, where);
}

} // namespace

TomlTable parse_toml(const std::string& text) {
    TomlTable table;
    std::string section;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        line = trim(strip_comment(line));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("line " + std::to_string(lineno) + ": bad table header");
            section = trim(line.substr(1, line.size() - 2));
            table[section];
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        if (key.empty())
            throw ConfigError("line " + std::to_string(lineno) + ": empty key");
        const std::string where = section.empty() ? key : section + "." + key;
        table[section][key] = parse_value(line.substr(eq + 1), where);
    }
    return table;
}

TomlTable parse_toml_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config file: " + path);
    std::ostringstream ss;
    ss << is.rdbuf();
    return parse_toml(ss.str());
}

void apply_override(TomlTable& table, const std::string& spec) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos)
        throw ConfigError("override must look like section.key=value: " + spec);
    std::string path = trim(spec.substr(0, eq));
    const auto dot = path.find('.');
    std::string section = dot == std::string::npos ? "" : path.substr(0, dot);
    std::string key = dot == std::string::npos ? path : path.substr(dot + 1);
    if (key.empty()) throw ConfigError("override key missing: " + spec);
    table[section][key] = parse_value(spec.substr(eq + 1), path);
}

const TomlValue* TomlReader::find(const std::string& section, const std::string& key) const {
    auto s = table_.find(section);
    if (s == table_.end()) return nullptr;
    auto k = s->second.find(key);
    if (k == s->second.end()) return nullptr;
    return &k->second;
}

bool TomlReader::has(const std::string& section, const std::string& key) const {
    return find(section, key) != nullptr;
}

void TomlReader::mark_known(const std::string& section, const std::string& key) const {
    known_[section + "." + key] = true;
}

void TomlReader::reject_unknown_keys() const {
    for (const auto& [section, kv] : table_)
        for (const auto& [key, value] : kv) {
            if (!known_.count(section + "." + key))
                throw ConfigError("unknown config key: " +
                                  (section.empty() ? key : section + "." + key));
        }
}

double TomlReader::number(const std::string& section, const std::string& key,
                          double fallback) const {
    mark_known(section, key);
    const TomlValue* v = find(section, key);
    if (!v) return fallback;
    if (std::holds_alternative<double>(*v)) return std::get<double>(*v);
    if (std::holds_alternative<long long>(*v))
        return static_cast<double>(std::get<long long>(*v));
    throw ConfigError(section + "." + key + ": expected a number");
}

long long TomlReader::integer(const std::string& section, const std::string& key,
                              long long fallback) const {
    mark_known(section, key);
    const TomlValue* v = find(section, key);
    if (!v) return fallback;
    if (std::holds_alternative<long long>(*v)) return std::get<long long>(*v);
    throw ConfigError(section + "." + key + ": expected an integer");
}

bool TomlReader::boolean(const std::string& section, const std::string& key,
                         bool fallback) const {
    mark_known(section, key);
    const TomlValue* v = find(section, key);
    if (!v) return fallback;
    if (std::holds_alternative<bool>(*v)) return std::get<bool>(*v);
    throw ConfigError(section + "." + key + ": expected true/false");
}

std::string TomlReader::text(const std::string& section, const std::string& key,
                             const std::string& fallback) const {
    mark_known(section, key);
    const TomlValue* v = find(section, key);
    if (!v) return fallback;
    if (std::holds_alternative<std::string>(*v)) return std::get<std::string>(*v);
    throw ConfigError(section + "." + key + ": expected a string");
}

std::vector<double> TomlReader::numbers(const std::string& section, const std::string& key,
                                        std::vector<double> fallback) const {
    mark_known(section, key);
    const TomlValue* v = find(section, key);
    if (!v) return fallback;
    if (std::holds_alternative<std::vector<double>>(*v))
        return std::get<std::vector<double>>(*v);
    if (std::holds_alternative<long long>(*v))
        return {static_cast<double>(std::get<long long>(*v))};
    if (std::holds_alternative<double>(*v)) return {std::get<double>(*v)};
    throw ConfigError(section + "." + key + ": expected an array of numbers");
}

} // namespace eulerctl
