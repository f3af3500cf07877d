#pragma once

#include <charconv>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

namespace otgrid {

using Rng = std::mt19937_64;

/// Shortest decimal string that parses back to exactly the same double.
std::string format_double(double x);

/// Parse a double accepting "NaN"/"nan" and rejecting trailing junk.
/// Returns false on malformed input.
bool parse_double(const std::string& s, double& out);

std::vector<std::string> split_csv_line(const std::string& line);

std::string lowercase(std::string s);

/// Runs fn(i) for i in [0, n). Work is split across at most `jobs` threads
/// (0 = hardware concurrency). Results must be written to disjoint slots so
/// the outcome is independent of the thread count.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn);

int default_jobs();

}  // namespace otgrid
