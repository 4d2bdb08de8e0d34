#include "peakwidths/io.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <stdexcept>

namespace peakwidths {

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

namespace {

std::string quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + '"';
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << text;
    if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

} // namespace

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

CsvTable& CsvTable::cell(const std::string& s) {
    current_.push_back(quote(s));
    return *this;
}

CsvTable& CsvTable::cell(double x) {
    current_.push_back(format_double(x));
    return *this;
}

CsvTable& CsvTable::cell(long long x) {
    current_.push_back(std::to_string(x));
    return *this;
}

CsvTable& CsvTable::empty() {
    current_.emplace_back();
    return *this;
}

void CsvTable::end_row() {
    if (current_.size() != header_.size())
        throw std::logic_error("csv row has " + std::to_string(current_.size()) + " fields, header has " +
                               std::to_string(header_.size()));
    rows_.push_back(std::move(current_));
    current_.clear();
}

std::string CsvTable::str() const {
    std::string out;
    auto line = [&out](const std::vector<std::string>& fields) {
        for (size_t i = 0; i < fields.size(); ++i) {
            if (i) out += ',';
            out += fields[i];
        }
        out += '\n';
    };
    std::vector<std::string> head;
    for (const auto& h : header_) head.push_back(quote(h));
    line(head);
    for (const auto& r : rows_) line(r);
    return out;
}

void CsvTable::write(const std::string& path) const { write_text(path, str()); }

void write_json(const std::string& path, const nlohmann::json& doc) { write_text(path, doc.dump(2) + "\n"); }

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

} // namespace peakwidths
