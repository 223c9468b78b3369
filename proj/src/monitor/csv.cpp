#include "nsreg/monitor.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace nsreg {

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

CsvError::CsvError(std::size_t row, std::size_t column, const std::string& what)
    : std::runtime_error("monitor CSV row " + std::to_string(row) + ", column " + std::to_string(column) + ": " +
                         what),
      row_(row),
      column_(column) {}

void write_monitor_csv(std::ostream& os, std::span<const MonitorRecord> records) {
  os << kMonitorCsvHeader << '\n';
  for (const auto& m : records) {
    const int verdict = m.diff_ineq_ok ? (*m.diff_ineq_ok ? 1 : 0) : -1;
    os << format_double(m.t) << ',' << format_double(m.energy) << ',' << format_double(m.enstrophy) << ','
       << format_double(m.palinstrophy) << ',' << format_double(m.trilinear) << ',' << format_double(m.r_of_t) << ','
       << format_double(m.loc_norm) << ',' << format_double(m.epsilon) << ',' << format_double(m.bound_normalized)
       << ',' << format_double(m.bound_stated) << ',' << verdict << ',' << format_double(m.smallness) << '\n';
  }
}

void write_monitor_csv(const std::filesystem::path& path, std::span<const MonitorRecord> records) {
  const auto tmp = std::filesystem::path(path.string() + ".tmp");
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open " + tmp.string());
    write_monitor_csv(os, records);
    if (!os) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::vector<MonitorRecord> read_monitor_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw CsvError(1, 1, "empty file");
  if (!line.empty() && line.back() == '\r') throw CsvError(1, line.size(), "CRLF line ending (LF expected)");
  if (line != kMonitorCsvHeader) throw CsvError(1, 1, "header mismatch, expected '" + std::string(kMonitorCsvHeader) + "'");

  std::vector<MonitorRecord> out;
  std::size_t row = 1;
  while (std::getline(is, line)) {
    ++row;
    if (line.empty()) continue;
    std::array<double, 12> v{};
    std::size_t col = 0, pos = 0;
    while (true) {
      const std::size_t end = std::min(line.find(',', pos), line.size());
      if (col >= v.size()) throw CsvError(row, col + 1, "too many fields");
      const char* first = line.data() + pos;
      const char* last = line.data() + end;
      auto [ptr, ec] = std::from_chars(first, last, v[col]);
      if (ec != std::errc() || ptr != last)
        throw CsvError(row, col + 1, "cannot parse '" + std::string(first, last) + "' as a number");
      ++col;
      if (end == line.size()) break;
      pos = end + 1;
    }
    if (col != v.size()) throw CsvError(row, col, "expected 12 fields, found " + std::to_string(col));
    MonitorRecord m;
    m.t = v[0];
    m.energy = v[1];
    m.enstrophy = v[2];
    m.palinstrophy = v[3];
    m.trilinear = v[4];
    m.r_of_t = v[5];
    m.loc_norm = v[6];
    m.epsilon = v[7];
    m.bound_normalized = v[8];
    m.bound_stated = v[9];
    if (v[10] == 1.0)
      m.diff_ineq_ok = true;
    else if (v[10] == 0.0)
      m.diff_ineq_ok = false;
    else if (v[10] != -1.0)
      throw CsvError(row, 11, "diffineq must be 1, 0 or -1");
    m.smallness = v[11];
    if (!out.empty() && !(m.t > out.back().t)) throw CsvError(row, 1, "times must increase strictly");
    out.push_back(m);
  }
  return out;
}

std::vector<MonitorRecord> read_monitor_csv(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path.string());
  return read_monitor_csv(is);
}

}  // namespace nsreg
