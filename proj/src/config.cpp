#include "aggtreat/config.hpp"

#include "aggtreat/errors.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

namespace aggtreat {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

std::string unquote(const std::string& s, const std::string& where) {
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') return s.substr(1, s.size() - 2);
    if (!s.empty() && (s.front() == '"' || s.back() == '"'))
        throw ValidationError(where + ": unbalanced quotes in '" + s + "'");
    return s;
}

std::vector<std::string> split_items(const std::string& body, const std::string& where) {
    std::vector<std::string> items;
    std::string current;
    bool in_quotes = false;
    for (char c : body) {
        if (c == '"') in_quotes = !in_quotes;
        if (c == ',' && !in_quotes) {
            items.push_back(unquote(trim(current), where));
            current.clear();
        } else {
            current += c;
        }
    }
    if (in_quotes) throw ValidationError(where + ": unbalanced quotes");
    std::string last = trim(current);
    if (!last.empty()) items.push_back(unquote(last, where));
    return items;
}

double parse_double(const std::string& token, const std::string& where) {
    try {
        std::size_t pos = 0;
        double v = std::stod(token, &pos);
        if (pos != token.size()) throw std::invalid_argument(token);
        return v;
    } catch (const std::exception&) {
        throw ValidationError(where + ": expected a number, got '" + token + "'");
    }
}

}  // namespace

KeyValueFile KeyValueFile::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open config file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_text(buffer.str(), path);
}

KeyValueFile KeyValueFile::parse_text(const std::string& text, const std::string& origin) {
    KeyValueFile kv;
    kv.origin_ = origin;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string where = origin + ":" + std::to_string(lineno);
        // strip comments outside quotes
        bool in_quotes = false;
        std::string stripped;
        for (char c : line) {
            if (c == '"') in_quotes = !in_quotes;
            if (c == '#' && !in_quotes) break;
            stripped += c;
        }
        stripped = trim(stripped);
        if (stripped.empty()) continue;
        std::size_t eq = stripped.find('=');
        if (eq == std::string::npos) throw ValidationError(where + ": expected 'key = value'");
        std::string key = trim(stripped.substr(0, eq));
        std::string value = trim(stripped.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ValidationError(where + ": expected 'key = value'");
        Entry entry;
        if (value.front() == '[') {
            if (value.back() != ']') throw ValidationError(where + ": array must close on the same line");
            entry.is_array = true;
            entry.items = split_items(value.substr(1, value.size() - 2), where);
        } else {
            entry.items.push_back(unquote(value, where));
        }
        kv.values_[key] = std::move(entry);
    }
    return kv;
}

const KeyValueFile::Entry& KeyValueFile::require(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) throw ValidationError(origin_ + ": missing key '" + key + "'");
    return it->second;
}

std::string KeyValueFile::get_string(const std::string& key) const {
    const Entry& e = require(key);
    if (e.is_array) throw ValidationError(origin_ + ": key '" + key + "' is an array");
    return e.items.front();
}

std::string KeyValueFile::get_string_or(const std::string& key, const std::string& fallback) const {
    return has(key) ? get_string(key) : fallback;
}

double KeyValueFile::get_double(const std::string& key) const {
    return parse_double(get_string(key), origin_ + " key '" + key + "'");
}

double KeyValueFile::get_double_or(const std::string& key, double fallback) const {
    return has(key) ? get_double(key) : fallback;
}

bool KeyValueFile::get_bool_or(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    std::string v = get_string(key);
    if (v == "true") return true;
    if (v == "false") return false;
    throw ValidationError(origin_ + ": key '" + key + "' must be true or false");
}

std::vector<std::string> KeyValueFile::get_string_array(const std::string& key) const {
    const Entry& e = require(key);
    if (!e.is_array) throw ValidationError(origin_ + ": key '" + key + "' must be an array");
    return e.items;
}

std::vector<double> KeyValueFile::get_double_array(const std::string& key) const {
    std::vector<double> out;
    for (const std::string& item : get_string_array(key))
        out.push_back(parse_double(item, origin_ + " key '" + key + "'"));
    return out;
}

DataConfig DataConfig::from_file(const std::string& path) {
    return from_kv(KeyValueFile::parse_file(path));
}

DataConfig DataConfig::from_kv(const KeyValueFile& kv) {
    DataConfig config;
    config.grid.resolution = kv.get_double("resolution");
    config.grid.names = kv.get_string_array("subtreatments");
    config.grid.k = static_cast<int>(config.grid.names.size());
    config.outcome_column = kv.get_string_or("outcome", "y");
    config.aggregation = aggregation_from_string(kv.get_string_or("aggregation", "sum"));
    config.grid.validate();
    return config;
}

}  // namespace aggtreat
