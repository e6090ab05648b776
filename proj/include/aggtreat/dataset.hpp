#pragma once

#include "aggtreat/config.hpp"
#include "aggtreat/grid.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace aggtreat {

struct Record {
    std::string unit_id;
    double y = 0.0;
    SubVector s;  // grid units
};

/// Unit records with quantized sub-treatments. Immutable after construction.
struct Dataset {
    std::vector<Record> records;
    GridSpec grid;
    Aggregation aggregation = Aggregation::sum;

    int n() const { return static_cast<int>(records.size()); }
    int aggregate_level(const Record& r) const { return r.s.level(); }
};

/// Read a CSV file with a header row: optional `unit_id`, the outcome column,
/// and one column per configured sub-treatment. Raw amounts are quantized to
/// the nearest grid unit (ties away from zero).
Dataset ingest(const std::string& csv_path, const DataConfig& config);
Dataset ingest_stream(std::istream& in, const DataConfig& config, const std::string& origin);

/// Assemble a dataset from already-quantized rows (used by the simulator and tests).
Dataset make_dataset(std::vector<Record> records, GridSpec grid,
                     Aggregation aggregation = Aggregation::sum);

void write_csv(std::ostream& out, const Dataset& data, const std::string& outcome_column = "y");

}  // namespace aggtreat
