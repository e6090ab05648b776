#include "aggtreat/grid.hpp"

#include "aggtreat/errors.hpp"

#include <cmath>
#include <cstdlib>
#include <set>
#include <sstream>

namespace aggtreat {

void GridSpec::validate() const {
    if (!(resolution > 0)) throw ValidationError("grid resolution must be positive");
    if (k < 1) throw ValidationError("grid must have at least one sub-treatment");
    if (!names.empty()) {
        if (static_cast<int>(names.size()) != k)
            throw ValidationError("grid has " + std::to_string(k) + " sub-treatments but " +
                                  std::to_string(names.size()) + " labels");
        std::set<std::string> seen(names.begin(), names.end());
        if (static_cast<int>(seen.size()) != k)
            throw ValidationError("sub-treatment labels must be unique");
    }
}

Aggregation aggregation_from_string(const std::string& name) {
    if (name == "sum") return Aggregation::sum;
    throw ValidationError("unknown aggregation rule: " + name);
}

std::string to_string(Aggregation) { return "sum"; }

std::string SubVector::str() const {
    std::ostringstream out;
    for (std::size_t i = 0; i < units.size(); ++i) {
        if (i) out << ',';
        out << units[i];
    }
    return out.str();
}

SubVector SubVector::parse(const std::string& text) {
    SubVector v;
    std::istringstream in(text);
    std::string token;
    while (std::getline(in, token, ',')) {
        std::size_t pos = 0;
        int value = 0;
        try {
            value = std::stoi(token, &pos);
        } catch (const std::exception&) {
            throw ValidationError("bad sub-treatment vector: " + text);
        }
        while (pos < token.size() && std::isspace(static_cast<unsigned char>(token[pos]))) ++pos;
        if (pos != token.size() || value < 0)
            throw ValidationError("bad sub-treatment vector: " + text);
        v.units.push_back(value);
    }
    if (v.units.empty()) throw ValidationError("empty sub-treatment vector");
    return v;
}

int l1_distance(const SubVector& a, const SubVector& b) {
    if (a.k() != b.k()) throw ValidationError("sub-treatment vectors differ in length");
    int d = 0;
    for (int i = 0; i < a.k(); ++i) d += std::abs(a[i] - b[i]);
    return d;
}

int quantize(double raw, double resolution) {
    if (!(resolution > 0)) throw ValidationError("grid resolution must be positive");
    if (!std::isfinite(raw)) throw ValidationError("non-finite sub-treatment value");
    if (raw < 0) throw ValidationError("negative sub-treatment value");
    return static_cast<int>(std::llround(raw / resolution));
}

}  // namespace aggtreat
