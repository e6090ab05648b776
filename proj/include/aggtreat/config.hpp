#pragma once

#include "aggtreat/grid.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace aggtreat {

/// Flat key/value config file: `key = value` lines, `#` comments,
/// quoted strings, bare numbers/booleans, and single-line arrays `[a, b]`.
class KeyValueFile {
public:
    static KeyValueFile parse_file(const std::string& path);
    static KeyValueFile parse_text(const std::string& text, const std::string& origin = "<config>");

    bool has(const std::string& key) const { return values_.count(key) > 0; }

    std::string get_string(const std::string& key) const;
    std::string get_string_or(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key) const;
    double get_double_or(const std::string& key, double fallback) const;
    bool get_bool_or(const std::string& key, bool fallback) const;
    std::vector<std::string> get_string_array(const std::string& key) const;
    std::vector<double> get_double_array(const std::string& key) const;

private:
    struct Entry {
        bool is_array = false;
        std::vector<std::string> items;  // single item when !is_array
    };
    const Entry& require(const std::string& key) const;

    std::string origin_;
    std::map<std::string, Entry> values_;
};

/// Ingestion settings for a CSV dataset.
struct DataConfig {
    GridSpec grid;
    Aggregation aggregation = Aggregation::sum;
    std::string outcome_column = "y";

    static DataConfig from_file(const std::string& path);
    static DataConfig from_kv(const KeyValueFile& kv);
};

}  // namespace aggtreat
