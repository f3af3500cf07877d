#pragma once

#include <string>

namespace otgrid {

/// Days since 1970-01-01 for a proleptic Gregorian date.
long days_from_civil(int year, int month, int day);

/// Parse "YYYY-MM-DD". Throws ValidationError on malformed input.
long parse_iso_date(const std::string& s);

/// Month index year*12 + (month-1) parsed from a "YYYY-MM" label. Labels may
/// carry a prefix ending in '-' (e.g. "darwin-1998-04"); the trailing
/// YYYY-MM is used. Throws ValidationError if no year-month is found.
int parse_year_month(const std::string& label);

/// Circular calendar-month distance in {0..6} between two month indices.
int calendar_month_distance(int ym_a, int ym_b);

}  // namespace otgrid
