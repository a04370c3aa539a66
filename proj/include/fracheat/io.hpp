#pragma once

// CSV and JSON artifacts. Doubles are written in shortest round-trip form,
// so equal values always give equal bytes.

#include <nlohmann/json.hpp>

#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include "fracheat/check_report.hpp"
#include "fracheat/errors.hpp"
#include "fracheat/holder_estimator.hpp"
#include "fracheat/moment_table.hpp"

namespace fracheat::io {

using json = nlohmann::json;

inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return {buf, res.ptr};
}

class Csv {
public:
  explicit Csv(std::vector<std::string> header) : cols_(header.size()) { row_strings(header); }

  Csv& cell(double v) { return put(format_double(v)); }
  Csv& cell(std::size_t v) { return put(std::to_string(v)); }
  Csv& cell(long v) { return put(std::to_string(v)); }
  Csv& cell(int v) { return put(std::to_string(v)); }
  Csv& cell(std::string_view s) { return put(std::string(s)); }
  Csv& cell(const char* s) { return put(s); }

  const std::string& text() const { return out_; }

private:
  Csv& put(const std::string& s) {
    if (at_ > 0) out_ += ',';
    out_ += s;
    if (++at_ == cols_) {
      out_ += '\n';
      at_ = 0;
    }
    return *this;
  }
  void row_strings(const std::vector<std::string>& r) {
    for (const auto& s : r) put(s);
  }

  std::size_t cols_;
  std::size_t at_ = 0;
  std::string out_;
};

inline void write_file(const std::filesystem::path& path, std::string_view text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw InputError("cannot write " + path.string());
  f.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!f) throw InputError("write failed: " + path.string());
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw InputError("cannot read " + path.string());
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

inline void write_json(const std::filesystem::path& path, const json& j) { write_file(path, j.dump(2) + "\n"); }

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  const auto res = std::to_chars(buf, buf + 16, v, 16);
  std::string s(buf, res.ptr);
  return std::string(16 - s.size(), '0') + s;
}

/// axis,k,lag,moment,stderr rows for several tables.
inline std::string moment_tables_csv(const std::vector<MomentTable>& tables) {
  Csv csv({"axis", "k", "lag", "moment", "stderr"});
  for (const auto& t : tables)
    for (std::size_t i = 0; i < t.lags.size(); ++i)
      csv.cell(axis_name(t.axis)).cell(t.k).cell(t.lags[i]).cell(t.moments[i]).cell(t.stderrs[i]);
  return csv.text();
}

/// Non-finite numbers become strings so the JSON stays valid and lossless.
inline json number(double v) {
  if (std::isfinite(v)) return v;
  return format_double(v);
}

inline double number_from(const json& j) {
  if (j.is_number()) return j.get<double>();
  const auto s = j.get<std::string>();
  if (s == "nan") return std::nan("");
  if (s == "inf") return INFINITY;
  if (s == "-inf") return -INFINITY;
  throw InputError("not a number: " + s);
}

inline json to_json(const CheckReport& r) {
  json d = json::object();
  for (const auto& [k, v] : r.details) d[k] = number(v);
  return {{"check_name", r.check_name},
          {"parameter_grid", r.parameter_grid},
          {"fitted_constant", number(r.fitted_constant)},
          {"stability_ratio", number(r.stability_ratio)},
          {"stability_cap", number(r.stability_cap)},
          {"violations", r.violations},
          {"pass", r.pass},
          {"tolerance", number(r.tolerance)},
          {"details", d},
          {"note", r.note}};
}

inline json to_json(const MomentTable& t) {
  json lags = json::array(), moments = json::array(), stderrs = json::array();
  for (std::size_t i = 0; i < t.lags.size(); ++i) {
    lags.push_back(number(t.lags[i]));
    moments.push_back(number(t.moments[i]));
    stderrs.push_back(number(t.stderrs[i]));
  }
  return {{"axis", axis_name(t.axis)}, {"k", t.k},         {"time", t.time},        {"paths", t.paths},
          {"lags", lags},              {"moments", moments}, {"stderrs", stderrs}};
}

inline MomentTable moment_table_from(const json& j) {
  MomentTable t;
  t.axis = j.at("axis").get<std::string>() == "time" ? Axis::time : Axis::space;
  t.k = j.at("k").get<double>();
  t.time = j.at("time").get<double>();
  t.paths = j.at("paths").get<std::size_t>();
  for (const auto& v : j.at("lags")) t.lags.push_back(number_from(v));
  for (const auto& v : j.at("moments")) t.moments.push_back(number_from(v));
  for (const auto& v : j.at("stderrs")) t.stderrs.push_back(number_from(v));
  return t;
}

inline json to_json(const estimator::ExponentFit& f) {
  return {{"axis", axis_name(f.axis)},
          {"k", f.k},
          {"slope", number(f.slope)},
          {"intercept", number(f.intercept)},
          {"slope_stderr", number(f.slope_stderr)},
          {"window", {number(f.window.lo), number(f.window.hi)}},
          {"lags_used", f.lags_used}};
}

inline json to_json(const estimator::TheoremBounds& b) {
  return {{"alpha", b.alpha}, {"beta", b.beta},   {"rho", b.rho},   {"k", b.k},
          {"b_sup", b.b_sup}, {"c_sup", b.c_sup}, {"d_sup", b.d_sup}, {"temporal_applicable", b.temporal_applicable}};
}

}  // namespace fracheat::io
