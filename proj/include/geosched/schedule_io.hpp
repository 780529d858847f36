#pragma once

// ScheduleFileV1 ("geo-sched/1") JSON and CSV serialization.
//
// Floats are written as shortest round-trip decimals, so write -> read ->
// write is byte-identical and the reloaded schedule equals the original bit
// for bit.

#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <istream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "geosched/noise_process.hpp"
#include "geosched/path_geometry.hpp"

namespace geosched {

inline constexpr std::string_view kScheduleFormatVersion = "geo-sched/1";

struct ScheduleFile {
  NoiseProcess process = NoiseProcess::linear_alpha();
  Schedule schedule;
};

// Shortest decimal that parses back to exactly x.
inline std::string format_double(double x) {
  if (!std::isfinite(x)) throw std::invalid_argument("cannot serialize a non-finite value");
  if (x == 0.0) x = 0.0;  // drop the sign of -0
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  if (res.ec != std::errc{}) throw std::runtime_error("double formatting failed");
  return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view text) {
  // from_chars does not accept a leading '+'.
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
    throw std::invalid_argument("not a number: '" + std::string(text) + "'");
  }
  return value;
}

namespace detail {

inline void write_array(std::ostream& out, const std::vector<double>& values) {
  out << '[';
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) out << ", ";
    out << format_double(values[i]);
  }
  out << ']';
}

inline std::vector<double> read_array(const nlohmann::json& node, const char* field) {
  if (!node.is_array()) {
    throw std::invalid_argument(std::string("schedule file: '") + field + "' must be an array");
  }
  std::vector<double> out;
  out.reserve(node.size());
  for (const auto& v : node) {
    if (!v.is_number()) {
      throw std::invalid_argument(std::string("schedule file: '") + field +
                                  "' must hold numbers");
    }
    out.push_back(v.get<double>());
  }
  return out;
}

}  // namespace detail

inline void write_schedule_json(std::ostream& out, const ScheduleFile& file) {
  const Schedule& s = file.schedule;
  out << "{\n";
  out << "  \"format_version\": \"" << kScheduleFormatVersion << "\",\n";
  out << "  \"process\": {\"kind\": \"" << to_string(file.process.kind()) << "\", \"params\": ";
  detail::write_array(out, file.process.params());
  out << "},\n";
  out << "  \"steps\": " << s.steps() << ",\n";
  out << "  \"times\": ";
  detail::write_array(out, s.times);
  out << ",\n";
  out << "  \"alphas\": ";
  detail::write_array(out, s.alphas);
  out << ",\n";
  out << "  \"total_arc_length_per_sqrtN\": " << format_double(s.length_per_sqrt_n) << ",\n";
  out << "  \"generator\": \"" << to_string(s.generator) << "\"\n";
  out << "}\n";
}

inline std::string schedule_to_json(const ScheduleFile& file) {
  std::ostringstream out;
  write_schedule_json(out, file);
  return out.str();
}

// Parses and validates a ScheduleFileV1 document. Throws
// std::invalid_argument on malformed or inconsistent content.
inline ScheduleFile read_schedule_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("schedule file: invalid JSON: ") + e.what());
  }
  try {
    if (doc.at("format_version").get<std::string>() != kScheduleFormatVersion) {
      throw std::invalid_argument("schedule file: unsupported format_version");
    }
    const auto& proc = doc.at("process");
    const auto kind = parse_process_kind(proc.at("kind").get<std::string>());
    if (!kind) throw std::invalid_argument("schedule file: unknown process kind");
    const std::vector<double> params = detail::read_array(proc.at("params"), "params");
    const auto generator = parse_schedule_generator(doc.at("generator").get<std::string>());
    if (!generator) throw std::invalid_argument("schedule file: unknown generator");

    ScheduleFile file{make_process(*kind, params), {}};
    file.schedule.times = detail::read_array(doc.at("times"), "times");
    file.schedule.alphas = detail::read_array(doc.at("alphas"), "alphas");
    file.schedule.length_per_sqrt_n = doc.at("total_arc_length_per_sqrtN").get<double>();
    file.schedule.generator = *generator;
    validate_schedule(file.schedule);
    if (doc.at("steps").get<std::size_t>() != file.schedule.steps()) {
      throw std::invalid_argument("schedule file: 'steps' does not match the grid");
    }
    return file;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("schedule file: ") + e.what());
  }
}

// Two-column (t, alpha) CSV with '#' metadata lines.
inline void write_schedule_csv(std::ostream& out, const ScheduleFile& file) {
  const Schedule& s = file.schedule;
  out << "# format_version: " << kScheduleFormatVersion << '\n';
  out << "# process: " << to_string(file.process.kind()) << '\n';
  out << "# params:";
  for (double p : file.process.params()) out << ' ' << format_double(p);
  out << '\n';
  out << "# generator: " << to_string(s.generator) << '\n';
  out << "# steps: " << s.steps() << '\n';
  out << "# total_arc_length_per_sqrtN: " << format_double(s.length_per_sqrt_n) << '\n';
  out << "t,alpha\n";
  for (std::size_t i = 0; i < s.times.size(); ++i) {
    out << format_double(s.times[i]) << ',' << format_double(s.alphas[i]) << '\n';
  }
}

// Reads a (t, beta) table: one "t,beta" pair per line; '#' lines, blank
// lines and a non-numeric header row are skipped. Returns the flat
// [t0, b0, t1, b1, ...] list accepted by make_process.
inline std::vector<double> read_rate_table(std::istream& in) {
  std::vector<double> flat;
  std::string line;
  bool first_row = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto start = line.find_first_not_of(" \t");
    if (start == std::string::npos || line[start] == '#') continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw std::invalid_argument("rate table: expected 't,beta' on every row");
    }
    auto trim = [](std::string_view v) {
      const auto b = v.find_first_not_of(" \t");
      const auto e = v.find_last_not_of(" \t");
      return b == std::string_view::npos ? std::string_view{} : v.substr(b, e - b + 1);
    };
    const std::string_view row(line);
    try {
      const double t = parse_double(trim(row.substr(0, comma)));
      const double b = parse_double(trim(row.substr(comma + 1)));
      flat.push_back(t);
      flat.push_back(b);
    } catch (const std::invalid_argument&) {
      if (!first_row) throw;
    }
    first_row = false;
  }
  return flat;
}

inline std::vector<double> read_rate_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open rate table '" + path + "'");
  return read_rate_table(in);
}

}  // namespace geosched
