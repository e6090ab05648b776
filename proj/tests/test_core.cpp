#include <doctest.h>

#include "aggtreat/config.hpp"
#include "aggtreat/dataset.hpp"
#include "aggtreat/errors.hpp"
#include "aggtreat/grid.hpp"
#include "aggtreat/rational.hpp"
#include "aggtreat/stats.hpp"
#include "aggtreat/support.hpp"

#include <cmath>
#include <map>
#include <sstream>

using namespace aggtreat;

namespace {

const char* kConfigText = R"(
resolution = 0.5
subtreatments = ["a", "b", "c"]
outcome = "score"
aggregation = "sum"
)";

Dataset tiny_dataset() {
    DataConfig config = DataConfig::from_kv(KeyValueFile::parse_text(kConfigText));
    std::istringstream csv(
        "unit_id,score,a,b,c\n"
        "u1,1.0,0.5,0,0\n"
        "u2,3.0,0.5,0,0\n"
        "u3,2.0,0,0.5,0.5\n"
        "u4,-1.0,0,0,0\n");
    return ingest_stream(csv, config, "<test>");
}

}  // namespace

TEST_CASE("quantization rounds to the nearest grid unit, ties away from zero") {
    CHECK(quantize(0.74, 0.5) == 1);
    CHECK(quantize(0.75, 0.5) == 2);
    CHECK(quantize(0.0, 0.5) == 0);
    CHECK(quantize(1.0, 0.5) == 2);
    CHECK(quantize(1.24, 0.5) == 2);
    CHECK_THROWS_AS(quantize(-0.1, 0.5), ValidationError);
}

TEST_CASE("quantizing an already-quantized dataset is the identity") {
    Dataset data = tiny_dataset();
    for (const Record& r : data.records)
        for (int u : r.s.units)
            CHECK(quantize(u * data.grid.resolution, data.grid.resolution) == u);
}

TEST_CASE("ingest computes the aggregate as the sum of grid units") {
    Dataset data = tiny_dataset();
    REQUIRE(data.n() == 4);
    CHECK(data.records[0].s == SubVector({1, 0, 0}));
    CHECK(data.records[2].s == SubVector({0, 1, 1}));
    CHECK(data.records[2].s.level() == 2);
    CHECK(data.records[3].s.level() == 0);
}

TEST_CASE("ingest errors carry the offending row and column") {
    DataConfig config = DataConfig::from_kv(KeyValueFile::parse_text(kConfigText));
    SUBCASE("missing column") {
        std::istringstream csv("unit_id,score,a,b\nu1,1,0,0\n");
        CHECK_THROWS_WITH_AS(ingest_stream(csv, config, "<test>"),
                             doctest::Contains("missing sub-treatment column 'c'"),
                             ValidationError);
    }
    SUBCASE("negative sub-treatment names the row") {
        std::istringstream csv("unit_id,score,a,b,c\nu1,1,0,0,0\nu2,1,-0.5,0,0\n");
        CHECK_THROWS_WITH_AS(ingest_stream(csv, config, "<test>"), doctest::Contains("row 3"),
                             ValidationError);
    }
    SUBCASE("non-numeric outcome") {
        std::istringstream csv("unit_id,score,a,b,c\nu1,abc,0,0,0\n");
        CHECK_THROWS_WITH_AS(ingest_stream(csv, config, "<test>"),
                             doctest::Contains("not numeric"), ValidationError);
    }
}

TEST_CASE("four-activity header aggregates in grid units") {
    KeyValueFile kv = KeyValueFile::parse_text(
        "resolution = 0.5\nsubtreatments = [\"s1\", \"s2\", \"s3\", \"s4\"]\noutcome = \"y\"\n");
    DataConfig config = DataConfig::from_kv(kv);
    std::istringstream csv("y,s1,s2,s3,s4\n0.1,1.0,0.5,0,0.5\n");
    Dataset data = ingest_stream(csv, config, "<test>");
    CHECK(data.records[0].s == SubVector({2, 1, 0, 1}));
    CHECK(data.records[0].s.level() == 4);  // D = 2.0 in original units
}

TEST_CASE("support groups vectors by level with lexicographic order") {
    Dataset data = tiny_dataset();
    SupportIndex index = build_support(data);
    CHECK(index.n == 4);
    CHECK(index.levels.size() == 3);
    CHECK(index.at(1).size() == 1);
    CHECK(index.at(1)[0].count == 2);
    CHECK(index.at(2)[0].s == SubVector({0, 1, 1}));

    // partition: counts add up to n and every vector sits at its own level
    std::int64_t total = 0;
    for (const auto& [level, cells] : index.levels) {
        for (const auto& cell : cells) {
            CHECK(cell.s.level() == level);
            total += cell.count;
        }
    }
    CHECK(total == index.n);
}

TEST_CASE("single-unit support has exactly one cell") {
    GridSpec grid{1.0, 2, {"x", "y"}};
    Dataset data = make_dataset({{"u1", 0.5, SubVector({2, 0})}}, grid);
    SupportIndex index = build_support(data);
    CHECK(index.levels.size() == 1);
    CHECK(index.at(2).size() == 1);
    CHECK(index.at(2)[0].s == SubVector({2, 0}));
}

TEST_CASE("cell statistics: sample means and exact frequencies") {
    Dataset data = tiny_dataset();
    CellStats stats = build_cell_stats(data);
    CHECK(*stats.cell_mean(SubVector({1, 0, 0})) == doctest::Approx(2.0));
    CHECK(stats.find_cell(SubVector({1, 0, 0}))->prob == Rational(1));
    CHECK(stats.at(0).prob == Rational(1, 4));
    CHECK(stats.find_cell(SubVector({1, 1, 0})) == nullptr);  // absent, not zero-filled
}

TEST_CASE("level means recompute exactly from the cells") {
    GridSpec grid{1.0, 2, {"x", "y"}};
    std::vector<Record> records;
    // three cells at level 1 with distinct means and uneven counts
    for (int i = 0; i < 3; ++i) records.push_back({"", 0.1 * i, SubVector({1, 0})});
    for (int i = 0; i < 5; ++i) records.push_back({"", 0.7 - 0.3 * i, SubVector({0, 1})});
    records.push_back({"", 1.25, SubVector({2, 0})});
    Dataset data = make_dataset(std::move(records), grid);
    CellStats stats = build_cell_stats(data);

    std::map<int, std::pair<double, int>> direct;  // level -> (sum, n)
    for (const Record& r : data.records) {
        direct[r.s.level()].first += r.y;
        direct[r.s.level()].second += 1;
    }
    for (const auto& level : stats.levels) {
        double group_mean = direct[level.level].first / direct[level.level].second;
        CHECK(std::abs(level.mean_outcome - group_mean) <= 1e-12);
        CHECK(std::abs(stats.level_mean_from_cells(level.level) - level.mean_outcome) <= 1e-12);
    }
}

TEST_CASE("uniform masses give equal conditional frequencies") {
    GridSpec grid{1.0, 3, {"h", "m", "s"}};
    std::vector<Record> records;
    records.push_back({"", 1.0, SubVector({1, 0, 0})});
    records.push_back({"", 2.0, SubVector({0, 1, 0})});
    records.push_back({"", 3.0, SubVector({0, 0, 1})});
    Dataset data = make_dataset(std::move(records), grid);
    CellStats stats = build_cell_stats(data);
    for (const auto& cell : stats.at(1).cells) CHECK(cell.prob == Rational(1, 3));
}

TEST_CASE("decimal parsing is exact") {
    CHECK(rational_from_decimal("0.375") == Rational(3, 8));
    CHECK(rational_from_decimal("-2") == Rational(-2));
    CHECK(rational_from_decimal("10.50") == Rational(21, 2));
    CHECK_THROWS(rational_from_decimal("1e-3"));
    CHECK(snap_to_rational(0.1) == Rational(1, 10));
    CHECK(fraction_string(Rational(3, 8)) == "3/8");
    CHECK(fraction_string(Rational(4)) == "4");
}

TEST_CASE("config rejects duplicate labels and bad keys") {
    CHECK_THROWS_AS(
        DataConfig::from_kv(KeyValueFile::parse_text(
            "resolution = 0.5\nsubtreatments = [\"a\", \"a\"]\n")),
        ValidationError);
    CHECK_THROWS_AS(
        DataConfig::from_kv(KeyValueFile::parse_text("subtreatments = [\"a\"]\n")),
        ValidationError);
    CHECK_THROWS_AS(KeyValueFile::parse_text("resolution 0.5\n"), ValidationError);
}
