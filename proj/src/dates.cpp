#include "otgrid/dates.hpp"

#include <cctype>
#include <cstdlib>

#include "otgrid/errors.hpp"

namespace otgrid {

namespace {

bool all_digits(const std::string& s, std::size_t begin, std::size_t len) {
  if (begin + len > s.size()) return false;
  for (std::size_t i = begin; i < begin + len; ++i) {
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  }
  return true;
}

int days_in_month(int year, int month) {
  static const int kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  bool leap = (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
  return month == 2 && leap ? 29 : kDays[month - 1];
}

}  // namespace

long days_from_civil(int y, int m, int d) {
  y -= m <= 2;
  long era = (y >= 0 ? y : y - 399) / 400;
  unsigned yoe = static_cast<unsigned>(y - era * 400);
  unsigned doy = static_cast<unsigned>((153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1);
  unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<long>(doe) - 719468;
}

long parse_iso_date(const std::string& s) {
  if (s.size() != 10 || s[4] != '-' || s[7] != '-' || !all_digits(s, 0, 4) ||
      !all_digits(s, 5, 2) || !all_digits(s, 8, 2)) {
    throw ValidationError("malformed date '" + s + "' (expected YYYY-MM-DD)");
  }
  int y = std::atoi(s.substr(0, 4).c_str());
  int m = std::atoi(s.substr(5, 2).c_str());
  int d = std::atoi(s.substr(8, 2).c_str());
  if (m < 1 || m > 12 || d < 1 || d > days_in_month(y, m)) {
    throw ValidationError("invalid calendar date '" + s + "'");
  }
  return days_from_civil(y, m, d);
}

int parse_year_month(const std::string& label) {
  // Accept "YYYY-MM" either as the whole label or as its suffix.
  if (label.size() >= 7) {
    std::size_t pos = label.size() - 7;
    if ((pos == 0 || label[pos - 1] == '-') && all_digits(label, pos, 4) &&
        label[pos + 4] == '-' && all_digits(label, pos + 5, 2)) {
      int y = std::atoi(label.substr(pos, 4).c_str());
      int m = std::atoi(label.substr(pos + 5, 2).c_str());
      if (m >= 1 && m <= 12) return y * 12 + (m - 1);
    }
  }
  throw ValidationError("label '" + label + "' does not end in a YYYY-MM year-month");
}

int calendar_month_distance(int ym_a, int ym_b) {
  int ma = ((ym_a % 12) + 12) % 12;
  int mb = ((ym_b % 12) + 12) % 12;
  int d = ma > mb ? ma - mb : mb - ma;
  return d > 6 ? 12 - d : d;
}

}  // namespace otgrid
