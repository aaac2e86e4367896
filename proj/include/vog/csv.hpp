#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace vog::csv {

/// Shortest representation that reads back to the same double.
std::string num(double v);
/// Fixed decimals ("%.*f").
std::string fixed(double v, int decimals);
/// Empty cell for an absent value.
std::string opt(const std::optional<double>& v);

std::vector<std::string_view> split(std::string_view line, char sep = ',');
std::vector<std::string_view> lines(std::string_view text);

double to_double(std::string_view cell);
long long to_int(std::string_view cell);
std::optional<double> to_opt_double(std::string_view cell);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

/// Header-indexed view over a CSV document.
class Table {
public:
    explicit Table(std::string text);

    std::size_t rows() const { return rows_.size(); }
    std::size_t column(std::string_view name) const;
    std::string_view cell(std::size_t row, std::size_t col) const { return rows_[row][col]; }
    const std::vector<std::string_view>& header() const { return header_; }

private:
    std::string text_;
    std::vector<std::string_view> header_;
    std::vector<std::vector<std::string_view>> rows_;
};

} // namespace vog::csv
