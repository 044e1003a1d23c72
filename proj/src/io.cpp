#include "mrecon/io.hpp"

#include "mrecon/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

namespace mrecon {

namespace {

std::string num(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<std::vector<double>> parse_rows(const std::string& text, bool header,
                                            const std::string& source, std::size_t* width)
{
    std::istringstream in(text);
    std::string line;
    std::vector<std::vector<double>> rows;
    int lineno = 0;
    bool seen_header = !header;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        if (!seen_header) {
            seen_header = true;
            *width = static_cast<std::size_t>(std::count(line.begin(), line.end(), ',')) + 1;
            continue;
        }
        std::vector<double> row;
        std::size_t pos = 0;
        while (true) {
            const std::size_t end = std::min(line.find(',', pos), line.size());
            std::string cell = line.substr(pos, end - pos);
            const auto first = cell.find_first_not_of(" \t");
            const auto last = cell.find_last_not_of(" \t");
            cell = first == std::string::npos ? "" : cell.substr(first, last - first + 1);
            double v = 0.0;
            const auto r = std::from_chars(cell.data(), cell.data() + cell.size(), v);
            if (cell.empty() || r.ec != std::errc() || r.ptr != cell.data() + cell.size())
                throw InvalidArgument(source + ":" + std::to_string(lineno) + ": bad number '" +
                                      cell + "'");
            row.push_back(v);
            if (end == line.size())
                break;
            pos = end + 1;
        }
        rows.push_back(std::move(row));
    }
    if (!seen_header || rows.empty())
        throw InvalidArgument(source + ": empty CSV");
    for (const auto& r : rows)
        if (r.size() != rows.front().size())
            throw InvalidArgument(source + ": rows have different lengths");
    return rows;
}

} // namespace

std::string points_to_csv(const PointCloud& cloud)
{
    std::string out;
    for (Index c = 0; c < cloud.dim(); ++c)
        out += (c ? ",x" : "x") + std::to_string(c);
    out += '\n';
    for (Index i = 0; i < cloud.count(); ++i) {
        for (Index c = 0; c < cloud.dim(); ++c)
            out += (c ? "," : "") + num(cloud.coords(i, c));
        out += '\n';
    }
    return out;
}

std::string distances_to_csv(const DistanceMatrix& d)
{
    std::string out;
    for (Index i = 0; i < d.size(); ++i) {
        for (Index j = 0; j < d.size(); ++j)
            out += (j ? "," : "") + num(d(i, j));
        out += '\n';
    }
    return out;
}

PointCloud points_from_csv(const std::string& text, const std::string& source)
{
    std::size_t width = 0;
    const auto rows = parse_rows(text, true, source, &width);
    if (rows.front().size() != width)
        throw InvalidArgument(source + ": header and rows disagree on column count");
    Eigen::MatrixXd m(rows.size(), width);
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t c = 0; c < width; ++c)
            m(i, c) = rows[i][c];
    return PointCloud(m);
}

DistanceMatrix distances_from_csv(const std::string& text, const std::string& source)
{
    std::size_t width = 0;
    const auto rows = parse_rows(text, false, source, &width);
    if (rows.size() != rows.front().size())
        throw InvalidArgument(source + ": distance matrix is not square");
    const std::size_t k = rows.size();
    Eigen::MatrixXd m(k, k);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j)
            m(i, j) = rows[i][j];
    DistanceMatrix d(m);
    validate(d);
    return d;
}

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw InvalidArgument("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw InvalidArgument("cannot write " + path);
    out << content;
}

PointCloud read_points_csv(const std::string& path)
{
    return points_from_csv(read_file(path), path);
}

DistanceMatrix read_distances_csv(const std::string& path)
{
    return distances_from_csv(read_file(path), path);
}

void write_points_csv(const std::string& path, const PointCloud& cloud)
{
    write_file(path, points_to_csv(cloud));
}

void write_distances_csv(const std::string& path, const DistanceMatrix& d)
{
    write_file(path, distances_to_csv(d));
}

} // namespace mrecon
