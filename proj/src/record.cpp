#include "qso/record.hpp"

#include <array>
#include <charconv>
#include <cstdio>
#include <system_error>

namespace qso {

std::string format_double(double v) {
  std::array<char, 64> buf{};
  auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (res.ec != std::errc()) return "nan";
  return std::string(buf.data(), res.ptr);
}

std::string csv_row(const RunRecord& r) {
  std::string out;
  out.reserve(128);
  out += r.algorithm;
  out += ',';
  out += r.fixture;
  out += ',';
  out += std::to_string(r.d);
  out += ',';
  out += format_double(r.epsilon);
  out += ',';
  out += std::to_string(r.seed);
  out += ',';
  out += std::to_string(r.queries);
  out += ',';
  out += std::to_string(r.classical_samples);
  out += ',';
  out += format_double(r.metric);
  out += ',';
  // Fixed precision: wall time is the one intentionally jittery column.
  char wall[32];
  std::snprintf(wall, sizeof(wall), "%.3f", r.wall_ms);
  out += wall;
  out += ',';
  out += r.degraded ? '1' : '0';
  return out;
}

std::string csv_document(const std::vector<RunRecord>& records) {
  std::string out(kCsvHeader);
  out += '\n';
  for (const auto& r : records) {
    out += csv_row(r);
    out += '\n';
  }
  return out;
}

}  // namespace qso
