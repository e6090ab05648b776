#include "aggtreat/support.hpp"

#include "aggtreat/errors.hpp"

#include <map>

namespace aggtreat {

const std::vector<SupportIndex::Cell>& SupportIndex::at(int level) const {
    auto it = levels.find(level);
    if (it == levels.end())
        throw ValidationError("no observations at aggregate level " + std::to_string(level));
    return it->second;
}

std::vector<SubVector> SupportIndex::vectors_at(int level) const {
    std::vector<SubVector> out;
    for (const Cell& c : at(level)) out.push_back(c.s);
    return out;
}

std::vector<int> SupportIndex::observed_levels() const {
    std::vector<int> out;
    for (const auto& [level, cells] : levels) out.push_back(level);
    return out;
}

SupportIndex build_support(const Dataset& data) {
    if (data.records.empty()) throw ValidationError("cannot build support of an empty dataset");
    std::map<SubVector, std::int64_t> counts;
    for (const Record& r : data.records) ++counts[r.s];

    SupportIndex index;
    index.grid = data.grid;
    index.n = data.n();
    for (const auto& [s, count] : counts)
        index.levels[s.level()].push_back({s, count});  // map order is lexicographic
    return index;
}

}  // namespace aggtreat
