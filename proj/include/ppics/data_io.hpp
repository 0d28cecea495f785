#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ppics/harness.hpp"

namespace ppics {

// Input schema: CSV with header `label,prediction`; an empty label field
// marks an unlabelled record. UTF-8, '.' decimal separator, LF or CRLF.
struct DataRow {
    std::optional<double> label;
    double prediction = 0.0;
    long long line = 0;
};

// Streaming reader; throws DataError with the offending line number.
class CsvReader {
public:
    explicit CsvReader(std::istream& in, std::string source_name = "<input>");

    std::optional<DataRow> next();

private:
    std::istream& in_;
    std::string source_;
    long long line_ = 0;
    bool header_done_ = false;

    void read_header();
};

std::vector<DataRow> read_data_file(const std::string& path);

ReplayData to_replay_data(const std::vector<DataRow>& rows);

// Round-trip exact serialization (17 significant digits).
std::string format_double(double x);

// Fixed significant-digit serialization for human-facing output.
std::string format_double(double x, int significant);

void write_metric_csv(std::ostream& out, const std::vector<MetricRow>& rows);

// key=value manifest accompanying every output file.
void write_manifest(std::ostream& out,
                    const std::vector<std::pair<std::string, std::string>>& entries);

}  // namespace ppics
