#pragma once

#include <string>
#include <string_view>

#include "fairmdp/instances.hpp"
#include "fairmdp/mdp.hpp"

namespace fairmdp {

/// Instance file: JSON object with S, A, H, n, rho[S], P[S][A][S],
/// rewards[n][S][A] and optional reward_upper_bound (default 1).
/// Invalid files raise InvalidInput with a "line N:" prefix.
Instance parse_instance(std::string_view text);
Instance load_instance(const std::string& path);

/// Stable formatting: one kernel or reward row per line, shortest
/// round-trip decimal numbers.
std::string serialize_instance(const Instance& instance);
void save_instance(const std::string& path, const Instance& instance);

/// JSON object {"S", "A", "H", "q": [H][S][A]}, one step per line.
std::string serialize_occupancy(const OccupancyMeasure& q);

/// Shortest round-trip decimal; "nan", "inf", "-inf" for non-finite values.
std::string format_double(double x);

/// Whole file as a string; InvalidInput if it cannot be read.
std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view contents);

}  // namespace fairmdp
