#include "tsnet/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "tsnet/error.hpp"

namespace tsnet {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

}  // namespace

Config Config::parse(std::istream& in) {
    Config cfg;
    std::string line;
    std::size_t line_no = 0;
    std::string current;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string_view text = trim(line);
        if (text.empty() || text.front() == '#') continue;
        if (text.front() == '[') {
            if (text.back() != ']')
                throw ParseError("config line " + std::to_string(line_no) +
                                 ": unterminated section header");
            current = std::string(trim(text.substr(1, text.size() - 2)));
            if (current.empty())
                throw ParseError("config line " + std::to_string(line_no) +
                                 ": empty section name");
            if (!cfg.has_section(current)) cfg.sections_.push_back({current, {}});
            continue;
        }
        const auto eq = text.find('=');
        if (eq == std::string_view::npos)
            throw ParseError("config line " + std::to_string(line_no) +
                             ": expected 'key = value'");
        const auto key = trim(text.substr(0, eq));
        const auto value = trim(text.substr(eq + 1));
        if (key.empty())
            throw ParseError("config line " + std::to_string(line_no) + ": empty key");
        if (current.empty())
            throw ParseError("config line " + std::to_string(line_no) +
                             ": key outside any [section]");
        cfg.set(current, key, value);
    }
    return cfg;
}

Config Config::parse_string(const std::string& text) {
    std::istringstream in(text);
    return parse(in);
}

Config Config::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open config file '" + path + "'");
    return parse(in);
}

std::string Config::serialize() const {
    std::string out;
    for (std::size_t s = 0; s < sections_.size(); ++s) {
        if (s > 0) out += '\n';
        out += '[' + sections_[s].name + "]\n";
        for (const auto& [k, v] : sections_[s].entries) out += k + " = " + v + '\n';
    }
    return out;
}

void Config::save_file(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw Error("cannot open '" + path + "' for writing");
    out << serialize();
    if (!out) throw Error("failed writing config to '" + path + "'");
}

const Config::Section* Config::find_section(std::string_view name) const {
    for (const Section& s : sections_)
        if (s.name == name) return &s;
    return nullptr;
}

bool Config::has_section(std::string_view section) const {
    return find_section(section) != nullptr;
}

bool Config::has(std::string_view section, std::string_view key) const {
    const Section* s = find_section(section);
    if (!s) return false;
    for (const auto& [k, v] : s->entries)
        if (k == key) return true;
    return false;
}

const std::string& Config::get(std::string_view section, std::string_view key) const {
    const Section* s = find_section(section);
    if (s)
        for (const auto& [k, v] : s->entries)
            if (k == key) return v;
    throw ConfigError("config: missing key '" + std::string(key) + "' in section [" +
                      std::string(section) + "]");
}

std::string Config::get_or(std::string_view section, std::string_view key,
                           std::string_view fallback) const {
    return has(section, key) ? get(section, key) : std::string(fallback);
}

double Config::get_double(std::string_view section, std::string_view key) const {
    const std::string& text = get(section, key);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size())
        throw ParseError("config: [" + std::string(section) + "] " + std::string(key) +
                         " = '" + text + "' is not a number");
    return value;
}

double Config::get_double_or(std::string_view section, std::string_view key,
                             double fallback) const {
    return has(section, key) ? get_double(section, key) : fallback;
}

std::size_t Config::get_count(std::string_view section, std::string_view key) const {
    const std::string& text = get(section, key);
    std::size_t value = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size())
        throw ParseError("config: [" + std::string(section) + "] " + std::string(key) +
                         " = '" + text + "' is not a count");
    return value;
}

std::size_t Config::get_count_or(std::string_view section, std::string_view key,
                                 std::size_t fallback) const {
    return has(section, key) ? get_count(section, key) : fallback;
}

std::uint64_t Config::get_seed_or(std::string_view section, std::string_view key,
                                  std::uint64_t fallback) const {
    if (!has(section, key)) return fallback;
    const std::string& text = get(section, key);
    std::uint64_t value = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size())
        throw ParseError("config: [" + std::string(section) + "] " + std::string(key) +
                         " = '" + text + "' is not a seed");
    return value;
}

bool Config::get_bool_or(std::string_view section, std::string_view key,
                         bool fallback) const {
    if (!has(section, key)) return fallback;
    const std::string& text = get(section, key);
    if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
    if (text == "false" || text == "0" || text == "no" || text == "off") return false;
    throw ParseError("config: [" + std::string(section) + "] " + std::string(key) +
                     " = '" + text + "' is not a boolean");
}

void Config::set(std::string_view section, std::string_view key, std::string_view value) {
    for (Section& s : sections_) {
        if (s.name != section) continue;
        for (auto& [k, v] : s.entries) {
            if (k == key) {
                v = std::string(value);
                return;
            }
        }
        s.entries.emplace_back(std::string(key), std::string(value));
        return;
    }
    sections_.push_back({std::string(section), {{std::string(key), std::string(value)}}});
}

std::string Config::hash() const {
    const std::string text = serialize();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::vector<std::string> split_list(std::string_view text, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto end = text.find(sep, start);
        if (end == std::string_view::npos) end = text.size();
        const auto item = trim(text.substr(start, end - start));
        if (!item.empty()) out.emplace_back(item);
        start = end + 1;
    }
    return out;
}

}  // namespace tsnet
