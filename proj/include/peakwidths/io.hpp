#pragma once

#include <json.hpp>

#include <string>
#include <vector>

namespace peakwidths {

/// Shortest round-trip decimal form via std::to_chars; "nan", "inf", "-inf" for non-finite values.
[[nodiscard]] std::string format_double(double x);

/// CSV table with a header row, dot decimals and '\n' line endings.
class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header);

    CsvTable& cell(const std::string& s);
    CsvTable& cell(const char* s) { return cell(std::string(s)); }
    CsvTable& cell(double x);
    CsvTable& cell(long long x);
    CsvTable& cell(int x) { return cell(static_cast<long long>(x)); }
    CsvTable& empty();
    /// Closes the current row; throws when its width differs from the header.
    void end_row();

    [[nodiscard]] std::size_t rows() const { return rows_.size(); }
    [[nodiscard]] std::string str() const;
    void write(const std::string& path) const;

private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
    std::vector<std::string> current_;
};

/// Writes pretty-printed JSON with a trailing newline. Doubles keep full precision.
void write_json(const std::string& path, const nlohmann::json& doc);

/// UTC timestamp in ISO 8601 form.
[[nodiscard]] std::string utc_timestamp();

} // namespace peakwidths
