#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace tsnet {

// Flat sectioned key-value text: `[section]` headers, `key = value` lines,
// `#` comments. One nesting level only; hand-editable and diff-friendly.
// Parsing normalizes whitespace, so serialize(parse(text)) is idempotent.
class Config {
public:
    struct Section {
        std::string name;
        std::vector<std::pair<std::string, std::string>> entries;
    };

    Config() = default;

    static Config parse(std::istream& in);
    static Config parse_string(const std::string& text);
    static Config parse_file(const std::string& path);

    std::string serialize() const;
    void save_file(const std::string& path) const;

    bool has_section(std::string_view section) const;
    bool has(std::string_view section, std::string_view key) const;

    // Missing key -> ConfigError naming section and key.
    const std::string& get(std::string_view section, std::string_view key) const;
    std::string get_or(std::string_view section, std::string_view key,
                       std::string_view fallback) const;

    double get_double(std::string_view section, std::string_view key) const;
    double get_double_or(std::string_view section, std::string_view key,
                         double fallback) const;
    std::size_t get_count(std::string_view section, std::string_view key) const;
    std::size_t get_count_or(std::string_view section, std::string_view key,
                             std::size_t fallback) const;
    std::uint64_t get_seed_or(std::string_view section, std::string_view key,
                              std::uint64_t fallback) const;
    bool get_bool_or(std::string_view section, std::string_view key,
                     bool fallback) const;

    // Last-wins set; creates the section when absent.
    void set(std::string_view section, std::string_view key, std::string_view value);

    const std::vector<Section>& sections() const { return sections_; }
    const Section* find_section(std::string_view name) const;

    // FNV-1a of the normalized text, as fixed-width hex.
    std::string hash() const;

private:
    std::vector<Section> sections_;
};

// Shared number formatting: %.17g so doubles survive a round-trip.
std::string format_double(double v);

// Comma-separated list helper used for factor lists and column lists.
std::vector<std::string> split_list(std::string_view text, char sep = ',');

}  // namespace tsnet
