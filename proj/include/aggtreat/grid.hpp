#pragma once

#include <compare>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

namespace aggtreat {

/// Measurement grid for the sub-treatments. Amounts are stored as integer
/// multiples of `resolution` so that unit-increment comparisons are exact.
struct GridSpec {
    double resolution = 1.0;         // original units per grid unit
    int k = 1;                       // number of sub-treatments
    std::vector<std::string> names;  // one label per sub-treatment

    void validate() const;
    double level_value(int level) const { return level * resolution; }
};

/// How the scalar treatment is formed from the sub-treatment vector.
/// Only the coordinate sum is supported; the tag leaves room for others.
enum class Aggregation { sum };

Aggregation aggregation_from_string(const std::string& name);
std::string to_string(Aggregation a);

/// A point of the nonnegative integer lattice, in grid units.
struct SubVector {
    std::vector<int> units;

    SubVector() = default;
    explicit SubVector(std::vector<int> u) : units(std::move(u)) {}

    int k() const { return static_cast<int>(units.size()); }
    int level() const { return std::accumulate(units.begin(), units.end(), 0); }
    int operator[](int i) const { return units[static_cast<std::size_t>(i)]; }

    bool operator==(const SubVector&) const = default;
    auto operator<=>(const SubVector& other) const {
        return units <=> other.units;  // lexicographic
    }

    /// "1,0,2"
    std::string str() const;
    static SubVector parse(const std::string& text);
};

int l1_distance(const SubVector& a, const SubVector& b);

/// Nearest grid multiple, ties away from zero. Input must be nonnegative.
int quantize(double raw, double resolution);

}  // namespace aggtreat
