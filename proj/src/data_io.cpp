#include "ppics/data_io.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>

#include "ppics/errors.hpp"

namespace ppics {

namespace {

std::string strip(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

std::string lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

double parse_number(const std::string& field, const std::string& source, long long line,
                    const char* what) {
    const std::string t = strip(field);
    if (t.empty())
        throw DataError(source + ":" + std::to_string(line) + ": empty " + what, line);
    std::size_t pos = 0;
    double v;
    try {
        v = std::stod(t, &pos);
    } catch (const std::exception&) {
        throw DataError(source + ":" + std::to_string(line) + ": malformed " + what + " '" +
                            t + "'",
                        line);
    }
    if (pos != t.size())
        throw DataError(source + ":" + std::to_string(line) + ": malformed " + what + " '" +
                            t + "'",
                        line);
    if (!std::isfinite(v))
        throw DataError(source + ":" + std::to_string(line) + ": non-finite " + what, line);
    return v;
}

// Splits one CSV line into exactly two fields; quoting is not needed for
// numeric columns, so a plain comma split suffices.
std::pair<std::string, std::string> split_two(const std::string& raw,
                                              const std::string& source, long long line) {
    const std::size_t comma = raw.find(',');
    if (comma == std::string::npos)
        throw DataError(source + ":" + std::to_string(line) + ": expected 2 columns", line);
    if (raw.find(',', comma + 1) != std::string::npos)
        throw DataError(source + ":" + std::to_string(line) + ": expected 2 columns", line);
    return {raw.substr(0, comma), raw.substr(comma + 1)};
}

std::string chomp(std::string s) {
    if (!s.empty() && s.back() == '\r') s.pop_back();
    return s;
}

}  // namespace

CsvReader::CsvReader(std::istream& in, std::string source_name)
    : in_(in), source_(std::move(source_name)) {}

void CsvReader::read_header() {
    std::string raw;
    if (!std::getline(in_, raw))
        throw DataError(source_ + ": empty input, expected header 'label,prediction'", 1);
    ++line_;
    raw = chomp(raw);
    if (!raw.empty() && raw.size() >= 3 && static_cast<unsigned char>(raw[0]) == 0xEF &&
        static_cast<unsigned char>(raw[1]) == 0xBB && static_cast<unsigned char>(raw[2]) == 0xBF)
        raw = raw.substr(3);  // UTF-8 BOM
    const auto [c1, c2] = split_two(raw, source_, line_);
    if (lower(strip(c1)) != "label" || lower(strip(c2)) != "prediction")
        throw DataError(source_ + ":1: expected header 'label,prediction'", 1);
    header_done_ = true;
}

std::optional<DataRow> CsvReader::next() {
    if (!header_done_) read_header();
    std::string raw;
    for (;;) {
        if (!std::getline(in_, raw)) return std::nullopt;
        ++line_;
        raw = chomp(raw);
        if (!strip(raw).empty()) break;
    }
    const auto [label_field, pred_field] = split_two(raw, source_, line_);
    DataRow row;
    row.line = line_;
    if (!strip(label_field).empty())
        row.label = parse_number(label_field, source_, line_, "label");
    row.prediction = parse_number(pred_field, source_, line_, "prediction");
    return row;
}

std::vector<DataRow> read_data_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open data file: " + path);
    CsvReader reader(in, path);
    std::vector<DataRow> rows;
    while (auto row = reader.next()) rows.push_back(*row);
    return rows;
}

ReplayData to_replay_data(const std::vector<DataRow>& rows) {
    ReplayData data;
    for (const DataRow& row : rows) {
        if (row.label)
            data.labelled.emplace_back(*row.label, row.prediction);
        else
            data.pool_predictions.push_back(row.prediction);
    }
    return data;
}

std::string format_double(double x) { return format_double(x, 17); }

std::string format_double(double x, int significant) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*g", significant, x);
    return buf;
}

void write_metric_csv(std::ostream& out, const std::vector<MetricRow>& rows) {
    out << "scenario,method,n,avg_volume,cum_miscoverage\n";
    for (const MetricRow& row : rows) {
        out << row.scenario << ',' << row.method << ',' << row.n << ','
            << format_double(row.avg_volume) << ',' << format_double(row.cum_miscoverage)
            << '\n';
    }
}

void write_manifest(std::ostream& out,
                    const std::vector<std::pair<std::string, std::string>>& entries) {
    for (const auto& [key, value] : entries) out << key << '=' << value << '\n';
}

}  // namespace ppics
