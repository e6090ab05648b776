#include "aggtreat/dataset.hpp"

#include "aggtreat/errors.hpp"

#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

namespace aggtreat {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string current;
    bool in_quotes = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    current += '"';
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                current += c;
            }
        } else if (c == '"') {
            in_quotes = true;
        } else if (c == ',') {
            fields.push_back(current);
            current.clear();
        } else if (c != '\r') {
            current += c;
        }
    }
    fields.push_back(current);
    return fields;
}

double parse_number(const std::string& token, const std::string& what, int row) {
    try {
        std::size_t pos = 0;
        double v = std::stod(token, &pos);
        while (pos < token.size() && std::isspace(static_cast<unsigned char>(token[pos]))) ++pos;
        if (pos != token.size() || !std::isfinite(v)) throw std::invalid_argument(token);
        return v;
    } catch (const std::exception&) {
        throw ValidationError("row " + std::to_string(row) + ": " + what +
                              " is not numeric: '" + token + "'");
    }
}

}  // namespace

Dataset ingest(const std::string& csv_path, const DataConfig& config) {
    std::ifstream in(csv_path);
    if (!in) throw ValidationError("cannot open data file: " + csv_path);
    return ingest_stream(in, config, csv_path);
}

Dataset ingest_stream(std::istream& in, const DataConfig& config, const std::string& origin) {
    config.grid.validate();
    std::string line;
    if (!std::getline(in, line)) throw ValidationError(origin + ": empty file");
    std::vector<std::string> header = split_csv_line(line);

    auto column = [&](const std::string& name) -> int {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return static_cast<int>(i);
        return -1;
    };

    int id_col = column("unit_id");
    int y_col = column(config.outcome_column);
    if (y_col < 0)
        throw ValidationError(origin + ": missing outcome column '" + config.outcome_column + "'");
    std::vector<int> sub_cols;
    for (const std::string& name : config.grid.names) {
        int c = column(name);
        if (c < 0) throw ValidationError(origin + ": missing sub-treatment column '" + name + "'");
        sub_cols.push_back(c);
    }

    Dataset data;
    data.grid = config.grid;
    data.aggregation = config.aggregation;
    int row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty() || line == "\r") continue;
        std::vector<std::string> fields = split_csv_line(line);
        if (fields.size() < header.size())
            throw ValidationError(origin + ": row " + std::to_string(row) + " has " +
                                  std::to_string(fields.size()) + " fields, expected " +
                                  std::to_string(header.size()));
        Record r;
        if (id_col >= 0) r.unit_id = fields[static_cast<std::size_t>(id_col)];
        r.y = parse_number(fields[static_cast<std::size_t>(y_col)], "outcome", row);
        r.s.units.reserve(sub_cols.size());
        for (std::size_t k = 0; k < sub_cols.size(); ++k) {
            double raw = parse_number(fields[static_cast<std::size_t>(sub_cols[k])],
                                      "sub-treatment '" + config.grid.names[k] + "'", row);
            if (raw < 0)
                throw ValidationError(origin + ": row " + std::to_string(row) +
                                      ": negative sub-treatment '" + config.grid.names[k] + "'");
            r.s.units.push_back(quantize(raw, config.grid.resolution));
        }
        data.records.push_back(std::move(r));
    }
    return data;
}

Dataset make_dataset(std::vector<Record> records, GridSpec grid, Aggregation aggregation) {
    grid.validate();
    for (const Record& r : records) {
        if (r.s.k() != grid.k) throw ValidationError("record vector length does not match grid");
        for (int u : r.s.units)
            if (u < 0) throw ValidationError("negative sub-treatment amount");
        if (!std::isfinite(r.y)) throw ValidationError("non-finite outcome");
    }
    Dataset data;
    data.records = std::move(records);
    data.grid = std::move(grid);
    data.aggregation = aggregation;
    return data;
}

void write_csv(std::ostream& out, const Dataset& data, const std::string& outcome_column) {
    out << "unit_id," << outcome_column;
    for (const std::string& name : data.grid.names) out << ',' << name;
    out << '\n';
    for (const Record& r : data.records) {
        out << r.unit_id << ',' << r.y;
        for (int u : r.s.units) out << ',' << u * data.grid.resolution;
        out << '\n';
    }
}

}  // namespace aggtreat
