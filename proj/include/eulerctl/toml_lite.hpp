//==============================================================================
// toml_lite.hpp
// A small TOML-compatible subset for experiment configs: [tables], key =
// value with strings, integers, floats, booleans and flat arrays, plus #
// comments.  One experiment per file; diffable, seedable, no hidden state.
//==============================================================================
#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace eulerctl {

class ConfigError : public std::runtime_error {
  public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

using TomlValue =
    std::variant<bool, long long, double, std::string, std::vector<double>,
                 std::vector<std::string>>;

// section -> key -> value; top-level keys live in section ""
using TomlTable = std::map<std::string, std::map<std::string, TomlValue>>;

TomlTable parse_toml(const std::string& text);
TomlTable parse_toml_file(const std::string& path);

// "section.key=value" (or "key=value" for the top level)
void apply_override(TomlTable& table, const std::string& spec);

// typed lookups; errors carry the full "section.key" path
class TomlReader {
  public:
    explicit TomlReader(const TomlTable& t) : table_(t) {}

    bool has(const std::string& section, const std::string& key) const;

    double number(const std::string& section, const std::string& key, double fallback) const;
    long long integer(const std::string& section, const std::string& key,
                      long long fallback) const;
    bool boolean(const std::string& section, const std::string& key, bool fallback) const;
    std::string text(const std::string& section, const std::string& key,
                     const std::string& fallback) const;
    std::vector<double> numbers(const std::string& section, const std::string& key,
                                std::vector<double> fallback) const;

    // every key consumed is recorded; unknown keys are config errors
    void mark_known(const std::string& section, const std::string& key) const;
    void reject_unknown_keys() const;

  private:
    const TomlTable& table_;
    mutable std::map<std::string, bool> known_;

    const TomlValue* find(const std::string& section, const std::string& key) const;
};

} // namespace eulerctl
