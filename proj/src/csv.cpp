#include "vog/csv.hpp"

#include "vog/error.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace vog::csv {

std::string num(double v)
{
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

std::string fixed(double v, int decimals)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    return buf;
}

std::string opt(const std::optional<double>& v) { return v ? num(*v) : std::string(); }

std::vector<std::string_view> split(std::string_view line, char sep)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(sep, start);
        if (pos == std::string_view::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

std::vector<std::string_view> lines(std::string_view text)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (start < text.size()) {
        auto pos = text.find('\n', start);
        if (pos == std::string_view::npos)
            pos = text.size();
        auto l = text.substr(start, pos - start);
        if (!l.empty() && l.back() == '\r')
            l.remove_suffix(1);
        out.push_back(l);
        start = pos + 1;
    }
    return out;
}

double to_double(std::string_view cell)
{
    double v = 0.0;
    const auto* end = cell.data() + cell.size();
    auto [ptr, ec] = std::from_chars(cell.data(), end, v);
    if (ec != std::errc() || ptr != end) {
        // from_chars rejects a leading '+', and "nan"/"inf" spellings vary
        if (cell == "nan" || cell == "-nan")
            return std::numeric_limits<double>::quiet_NaN();
        throw Error(ErrorCode::ParseError, "not a number: '" + std::string(cell) + "'");
    }
    return v;
}

long long to_int(std::string_view cell)
{
    long long v = 0;
    const auto* end = cell.data() + cell.size();
    auto [ptr, ec] = std::from_chars(cell.data(), end, v);
    if (ec != std::errc() || ptr != end)
        throw Error(ErrorCode::ParseError, "not an integer: '" + std::string(cell) + "'");
    return v;
}

std::optional<double> to_opt_double(std::string_view cell)
{
    if (cell.empty())
        return std::nullopt;
    return to_double(cell);
}

std::string read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorCode::IoError, "cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view content)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw Error(ErrorCode::IoError, "cannot create " + path.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out)
        throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

Table::Table(std::string text) : text_(std::move(text))
{
    auto ls = lines(text_);
    if (ls.empty())
        throw Error(ErrorCode::ParseError, "empty CSV document");
    header_ = split(ls.front());
    for (std::size_t i = 1; i < ls.size(); ++i) {
        if (ls[i].empty())
            continue;
        auto cells = split(ls[i]);
        if (cells.size() != header_.size())
            throw Error(ErrorCode::ParseError, "CSV row " + std::to_string(i + 1) + " has " +
                                                   std::to_string(cells.size()) + " cells, expected " +
                                                   std::to_string(header_.size()));
        rows_.push_back(std::move(cells));
    }
}

std::size_t Table::column(std::string_view name) const
{
    for (std::size_t i = 0; i < header_.size(); ++i)
        if (header_[i] == name)
            return i;
    throw Error(ErrorCode::ParseError, "missing CSV column '" + std::string(name) + "'");
}

} // namespace vog::csv
