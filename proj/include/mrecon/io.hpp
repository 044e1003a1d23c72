#pragma once

#include "mrecon/geometry.hpp"

#include <string>

namespace mrecon {

// Points: header x0,...,x{n-1}, one row per point. Distances: k rows of k
// values, no header. Values are printed with 17 significant digits.
std::string points_to_csv(const PointCloud& cloud);
std::string distances_to_csv(const DistanceMatrix& d);
PointCloud points_from_csv(const std::string& text, const std::string& source = "<string>");
DistanceMatrix distances_from_csv(const std::string& text, const std::string& source = "<string>");

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

PointCloud read_points_csv(const std::string& path);
DistanceMatrix read_distances_csv(const std::string& path);
void write_points_csv(const std::string& path, const PointCloud& cloud);
void write_distances_csv(const std::string& path, const DistanceMatrix& d);

} // namespace mrecon
