#include "cpaudit/model.hpp"

#include <cstdio>
#include <ctime>

namespace cpaudit {

UtcSeconds parse_iso8601_utc(const std::string& text) {
  int year = 0, month = 0, day = 0, hour = 0, minute = 0, second = 0;
  int consumed = 0;
  if (std::sscanf(text.c_str(), "%4d-%2d-%2dT%2d:%2d:%2d%n", &year, &month,
                  &day, &hour, &minute, &second, &consumed) != 6) {
    throw IngestError("timestamp not ISO-8601 UTC: " + text);
  }
  std::size_t pos = static_cast<std::size_t>(consumed);
  // fractional seconds are accepted and truncated
  if (pos < text.size() && text[pos] == '.') {
    ++pos;
    std::size_t digits = 0;
    while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') {
      ++pos;
      ++digits;
    }
    if (digits == 0) throw IngestError("timestamp not ISO-8601 UTC: " + text);
  }
  const std::string rest = text.substr(pos);
  if (rest != "Z" && rest != "+00:00") {
    throw IngestError("timestamp not ISO-8601 UTC: " + text);
  }
  if (year < 1970 || year > 9999 || month < 1 || month > 12 || day < 1 ||
      day > 31 || hour > 23 || minute > 59 || second > 60 || hour < 0 ||
      minute < 0 || second < 0) {
    throw IngestError("timestamp out of range: " + text);
  }
  std::tm tm{};
  tm.tm_year = year - 1900;
  tm.tm_mon = month - 1;
  tm.tm_mday = day;
  tm.tm_hour = hour;
  tm.tm_min = minute;
  tm.tm_sec = second;
  return static_cast<UtcSeconds>(timegm(&tm));
}

std::string format_iso8601_utc(UtcSeconds t) {
  std::time_t tt = static_cast<std::time_t>(t);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[80];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02dZ",
                tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday, tm.tm_hour,
                tm.tm_min, tm.tm_sec);
  return buf;
}

std::string to_string(Classification c) {
  switch (c) {
    case Classification::CriticalNegative:
      return "CRITICAL_NEGATIVE";
    case Classification::Within:
      return "WITHIN";
    case Classification::CriticalPositive:
      return "CRITICAL_POSITIVE";
  }
  return "UNKNOWN";
}

std::optional<Classification> classification_from_string(const std::string& s) {
  if (s == "CRITICAL_NEGATIVE") return Classification::CriticalNegative;
  if (s == "WITHIN") return Classification::Within;
  if (s == "CRITICAL_POSITIVE") return Classification::CriticalPositive;
  return std::nullopt;
}

}  // namespace cpaudit
