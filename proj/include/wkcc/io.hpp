#ifndef WKCC_IO_HPP
#define WKCC_IO_HPP

// Sample ingestion, empirical quantiles and the CSV / JSON file formats.
//
//   samples    id,value            long format, one measurement per row
//   quantiles  id,q1,...,qm        one distribution per row
//   labels     id,label            labels are 1-based
//   gauss      id,x1,...,xd        raw d-dimensional samples

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "wkcc/error.hpp"
#include "wkcc/geometry.hpp"

namespace wkcc {

struct SampleSet {
    std::string id;
    std::vector<double> values;
};

struct EmpiricalQuantiles {
    GridDistribution dist;
    /// Samples that fell outside the grid domain and were clamped.
    std::size_t clamped = 0;
};

/// q_k = F^-1(u_k) with the left-continuous inverse of the empirical cdf,
/// i.e. the ceil(N u_k)-th order statistic.
inline EmpiricalQuantiles empirical_quantile_distribution(const SampleSet& s, const Grid& grid)
{
    if (s.values.empty())
        fail(ErrorCode::EmptySamples, "sample set '" + s.id + "' is empty");
    std::vector<double> y = s.values;
    std::size_t clamped = 0;
    for (double& v : y) {
        if (!std::isfinite(v))
            fail(ErrorCode::InvalidArgument, "sample set '" + s.id + "' has a non-finite value");
        if (v < grid.lo() || v > grid.hi()) {
            ++clamped;
            v = std::clamp(v, grid.lo(), grid.hi());
        }
    }
    std::sort(y.begin(), y.end());
    const std::size_t N = y.size();
    const std::size_t m = grid.size();
    Vector q(static_cast<Eigen::Index>(m));
    for (std::size_t k = 0; k < m; ++k) {
        // ceil(N (2k + 1) / (2m)) in exact integer arithmetic.
        const std::size_t rank = (N * (2 * k + 1) + 2 * m - 1) / (2 * m);
        q[static_cast<Eigen::Index>(k)] = y[std::max<std::size_t>(rank, 1) - 1];
    }
    return {GridDistribution(GridDistribution::Trusted{}, grid, std::move(q)), clamped};
}

namespace detail {

inline std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r' || s.back() == '\n'))
        s.remove_suffix(1);
    return s;
}

inline std::vector<std::string_view> split_csv(std::string_view line)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            out.push_back(trim(line.substr(start)));
            return out;
        }
        out.push_back(trim(line.substr(start, comma - start)));
        start = comma + 1;
    }
}

inline double parse_double(std::string_view s, std::size_t line, std::string_view what)
{
    double v = 0.0;
    if (!s.empty() && s.front() == '+')
        s.remove_prefix(1);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty() || !std::isfinite(v))
        throw ParseError(line, "invalid " + std::string(what) + " '" + std::string(s) + "'");
    return v;
}

/// Reads all lines; `header` receives the first non-empty line.
inline std::vector<std::string> read_lines(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        fail(ErrorCode::IoError, "cannot open '" + path + "'");
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line))
        lines.push_back(std::move(line));
    if (in.bad())
        fail(ErrorCode::IoError, "read error on '" + path + "'");
    return lines;
}

inline void require_header(const std::vector<std::string>& lines, const std::string& path,
                           std::string_view first, std::string_view expected)
{
    if (lines.empty())
        fail(ErrorCode::MissingHeader, "'" + path + "' is empty; expected header " + std::string(expected));
    const auto cols = split_csv(lines.front());
    if (cols.empty() || cols.front() != first)
        fail(ErrorCode::MissingHeader, "'" + path + "' lacks the header " + std::string(expected));
}

inline std::string format_double(double v)
{
    char buf[32];
    const int len = std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf, static_cast<std::size_t>(len));
}

inline void write_file(const std::string& path, const std::string& content)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        fail(ErrorCode::IoError, "cannot write '" + path + "'");
    out << content;
    out.flush();
    if (!out)
        fail(ErrorCode::IoError, "write error on '" + path + "'");
}

}  // namespace detail

/// Long-format samples `id,value`, grouped by id in order of first appearance.
inline std::vector<SampleSet> read_samples_csv(const std::string& path)
{
    const auto lines = detail::read_lines(path);
    detail::require_header(lines, path, "id", "id,value");
    if (detail::split_csv(lines.front()).size() != 2)
        fail(ErrorCode::MissingHeader, "'" + path + "' header must be id,value");
    std::vector<SampleSet> out;
    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t ln = 1; ln < lines.size(); ++ln) {
        if (detail::trim(lines[ln]).empty())
            continue;
        const auto cols = detail::split_csv(lines[ln]);
        if (cols.size() != 2)
            throw ParseError(ln + 1, "expected 2 fields, found " + std::to_string(cols.size()));
        const double v = detail::parse_double(cols[1], ln + 1, "value");
        std::string id(cols[0]);
        auto [it, inserted] = index.try_emplace(id, out.size());
        if (inserted)
            out.push_back(SampleSet{id, {}});
        out[it->second].values.push_back(v);
    }
    return out;
}

struct NamedDistributions {
    std::vector<std::string> ids;
    std::vector<GridDistribution> dists;
};

/// Wide-format quantiles `id,q1..qm`; every row is validated.
inline NamedDistributions read_quantiles_csv(const std::string& path, const Grid& grid)
{
    const auto lines = detail::read_lines(path);
    detail::require_header(lines, path, "id", "id,q1,...,qm");
    const std::size_t cols_expected = grid.size() + 1;
    const std::size_t header_cols = detail::split_csv(lines.front()).size();
    if (header_cols != cols_expected)
        fail(ErrorCode::ColumnCountMismatch, "'" + path + "' has " + std::to_string(header_cols - 1) +
                                                 " quantile columns, grid has " + std::to_string(grid.size()));
    NamedDistributions out;
    for (std::size_t ln = 1; ln < lines.size(); ++ln) {
        if (detail::trim(lines[ln]).empty())
            continue;
        const auto cols = detail::split_csv(lines[ln]);
        if (cols.size() != cols_expected)
            fail(ErrorCode::ColumnCountMismatch, "line " + std::to_string(ln + 1) + " has " +
                                                     std::to_string(cols.size()) + " fields, expected " +
                                                     std::to_string(cols_expected));
        Vector q(static_cast<Eigen::Index>(grid.size()));
        for (std::size_t k = 0; k < grid.size(); ++k)
            q[static_cast<Eigen::Index>(k)] = detail::parse_double(cols[k + 1], ln + 1, "quantile");
        std::string id(cols[0]);
        try {
            out.dists.push_back(make_distribution(grid, std::move(q)));
        } catch (const Error& e) {
            fail(e.code(), "distribution '" + id + "': " + e.what());
        }
        out.ids.push_back(std::move(id));
    }
    return out;
}

/// Number of quantile columns in a quantile CSV header.
inline std::size_t quantile_csv_columns(const std::string& path)
{
    const auto lines = detail::read_lines(path);
    detail::require_header(lines, path, "id", "id,q1,...,qm");
    return detail::split_csv(lines.front()).size() - 1;
}

/// True if the file's header is `id,value`.
inline bool is_samples_csv(const std::string& path)
{
    const auto lines = detail::read_lines(path);
    if (lines.empty())
        return false;
    const auto cols = detail::split_csv(lines.front());
    return cols.size() == 2 && cols[0] == "id" && cols[1] == "value";
}

inline std::string quantiles_csv(const std::vector<std::string>& ids, std::span<const Vector> rows)
{
    if (ids.size() != rows.size())
        fail(ErrorCode::LengthMismatch, "ids and rows differ in length");
    std::string s = "id";
    const Eigen::Index m = rows.empty() ? 0 : rows.front().size();
    for (Eigen::Index k = 0; k < m; ++k)
        s += ",q" + std::to_string(k + 1);
    s += '\n';
    for (std::size_t i = 0; i < rows.size(); ++i) {
        s += ids[i];
        for (Eigen::Index k = 0; k < rows[i].size(); ++k) {
            s += ',';
            s += detail::format_double(rows[i][k]);
        }
        s += '\n';
    }
    return s;
}

/// Writes `id,q1..qm` with 17 significant digits (exact round trip).
inline void write_quantiles_csv(const std::string& path, const std::vector<std::string>& ids,
                                std::span<const GridDistribution> ds)
{
    std::vector<Vector> rows;
    rows.reserve(ds.size());
    for (const GridDistribution& d : ds)
        rows.push_back(d.quantiles());
    detail::write_file(path, quantiles_csv(ids, rows));
}

inline void write_quantiles_csv(const std::string& path, const std::vector<std::string>& ids,
                                const std::vector<GridDistribution>& ds)
{
    write_quantiles_csv(path, ids, std::span<const GridDistribution>(ds));
}

/// `id,label` with 1-based labels; `labels` are 0-based.
inline void write_labels_csv(const std::string& path, const std::vector<std::string>& ids,
                             const std::vector<int>& labels)
{
    if (ids.size() != labels.size())
        fail(ErrorCode::LengthMismatch, "ids and labels differ in length");
    std::string s = "id,label\n";
    for (std::size_t i = 0; i < ids.size(); ++i)
        s += ids[i] + "," + std::to_string(labels[i] + 1) + "\n";
    detail::write_file(path, s);
}

struct NamedLabels {
    std::vector<std::string> ids;
    std::vector<int> labels;  ///< as written in the file
};

inline NamedLabels read_labels_csv(const std::string& path)
{
    const auto lines = detail::read_lines(path);
    detail::require_header(lines, path, "id", "id,label");
    NamedLabels out;
    for (std::size_t ln = 1; ln < lines.size(); ++ln) {
        if (detail::trim(lines[ln]).empty())
            continue;
        const auto cols = detail::split_csv(lines[ln]);
        if (cols.size() != 2)
            throw ParseError(ln + 1, "expected 2 fields, found " + std::to_string(cols.size()));
        int v = 0;
        const auto [ptr, ec] = std::from_chars(cols[1].data(), cols[1].data() + cols[1].size(), v);
        if (ec != std::errc() || ptr != cols[1].data() + cols[1].size() || cols[1].empty())
            throw ParseError(ln + 1, "invalid label '" + std::string(cols[1]) + "'");
        out.ids.emplace_back(cols[0]);
        out.labels.push_back(v);
    }
    return out;
}

/// Raw d-dimensional samples `id,x1..xd`, grouped by id.
struct VectorSampleSet {
    std::string id;
    Matrix values;  ///< N x d
};

inline std::vector<VectorSampleSet> read_vector_samples_csv(const std::string& path)
{
    const auto lines = detail::read_lines(path);
    detail::require_header(lines, path, "id", "id,x1,...,xd");
    const std::size_t cols_expected = detail::split_csv(lines.front()).size();
    if (cols_expected < 2)
        fail(ErrorCode::MissingHeader, "'" + path + "' header needs at least one coordinate column");
    const std::size_t d = cols_expected - 1;
    std::vector<std::string> order;
    std::map<std::string, std::vector<std::vector<double>>> rows;
    for (std::size_t ln = 1; ln < lines.size(); ++ln) {
        if (detail::trim(lines[ln]).empty())
            continue;
        const auto cols = detail::split_csv(lines[ln]);
        if (cols.size() != cols_expected)
            fail(ErrorCode::ColumnCountMismatch, "line " + std::to_string(ln + 1) + " has " +
                                                     std::to_string(cols.size()) + " fields, expected " +
                                                     std::to_string(cols_expected));
        std::vector<double> x(d);
        for (std::size_t j = 0; j < d; ++j)
            x[j] = detail::parse_double(cols[j + 1], ln + 1, "coordinate");
        std::string id(cols[0]);
        auto& bucket = rows[id];
        if (bucket.empty())
            order.push_back(id);
        bucket.push_back(std::move(x));
    }
    std::vector<VectorSampleSet> out;
    for (const std::string& id : order) {
        const auto& r = rows[id];
        Matrix X(static_cast<Eigen::Index>(r.size()), static_cast<Eigen::Index>(d));
        for (std::size_t i = 0; i < r.size(); ++i)
            for (std::size_t j = 0; j < d; ++j)
                X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = r[i][j];
        out.push_back({id, std::move(X)});
    }
    return out;
}

/// Writes `doc` as pretty-printed UTF-8 JSON.
inline void write_json(const std::string& path, const nlohmann::json& doc)
{
    detail::write_file(path, doc.dump(2) + "\n");
}

inline nlohmann::json read_json(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        fail(ErrorCode::IoError, "cannot open '" + path + "'");
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        fail(ErrorCode::ParseError, "'" + path + "': " + e.what());
    }
}

inline nlohmann::json vector_json(const Vector& v)
{
    return nlohmann::json(std::vector<double>(v.data(), v.data() + v.size()));
}

inline nlohmann::json matrix_json(const Matrix& M)
{
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index r = 0; r < M.rows(); ++r)
        rows.push_back(vector_json(M.row(r).transpose()));
    return rows;
}

}  // namespace wkcc

#endif  // WKCC_IO_HPP
