// Copyright 2026 The bosondist Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Sweep driver behind the command-line tool: grid expansion from a JSON
// document, dispatch of one grid point to the library, ordered CSV/JSON
// emission with resume-by-row-count, and the built-in presets.

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <condition_variable>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <istream>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include <json.hpp>

#include "bosondist/analytics.hpp"
#include "bosondist/errors.hpp"
#include "bosondist/interferometer.hpp"
#include "bosondist/matrix_io.hpp"
#include "bosondist/montecarlo.hpp"
#include "bosondist/nocount.hpp"

namespace bosondist {

enum class SweepMode {
  deltap_exact,
  deltap_avg_analytic,
  deltap_ensemble,
  w1,
  p1_exact,
  p1_approx,
  p1_ensemble,
  variance,
};

inline constexpr std::pair<SweepMode, std::string_view> kModeNames[] = {
    {SweepMode::deltap_exact, "deltap_exact"},
    {SweepMode::deltap_avg_analytic, "deltap_avg_analytic"},
    {SweepMode::deltap_ensemble, "deltap_ensemble"},
    {SweepMode::w1, "w1"},
    {SweepMode::p1_exact, "p1_exact"},
    {SweepMode::p1_approx, "p1_approx"},
    {SweepMode::p1_ensemble, "p1_ensemble"},
    {SweepMode::variance, "variance"},
};

inline std::string_view mode_name(SweepMode mode) {
  for (const auto& [m, name] : kModeNames) {
    if (m == mode) return name;
  }
  return "unknown";
}

inline SweepMode parse_mode(std::string_view name) {
  for (const auto& [m, n] : kModeNames) {
    if (n == name) return m;
  }
  throw std::invalid_argument("unknown mode '" + std::string(name) + "'");
}

/// L = -1 selects int(M/N) probe ports.
inline constexpr int kAutoPorts = -1;

struct GridPoint {
  SweepMode mode = SweepMode::w1;
  std::optional<int> n;
  std::optional<int> m;
  std::optional<double> rho;
  double eta = 1.0;
  double xi = 1.0;
  double nu = 0.0;
  int k = 0;
  int l = 1;
  std::uint64_t trials = 100;
  std::uint64_t seed = 1;
  std::string matrix;  // deltap_exact only; empty means haar:<seed>
};

struct ResultRow {
  std::optional<int> n;
  std::optional<int> m;
  std::optional<double> rho;
  double eta = 1.0;
  double xi = 1.0;
  double nu = 0.0;
  int k = 0;
  int l = 1;
  std::optional<std::uint64_t> trials;
  double value = 0.0;
  std::optional<double> std_error;
  std::optional<double> reference_w1;
};

inline constexpr std::string_view kCsvHeader = "N,M,rho,eta,xi,nu,K,L,trials,value,stderr,reference_w1";

/// Shortest round-trip decimal; scientific below 1e-4 (and from 1e16 up).
inline std::string format_number(double v) {
  if (!std::isfinite(v)) return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
  const double a = std::abs(v);
  const auto fmt = (a != 0.0 && (a < 1e-4 || a >= 1e16)) ? std::chars_format::scientific : std::chars_format::fixed;
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, fmt);
  return std::string(buf, res.ptr);
}

inline double parse_number(std::string_view s) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw std::invalid_argument("not a number: '" + std::string(s) + "'");
  }
  return v;
}

namespace detail {

template <typename T>
std::string csv_field(const std::optional<T>& v) {
  if (!v) return "";
  if constexpr (std::is_floating_point_v<T>) {
    return format_number(*v);
  } else {
    return std::to_string(*v);
  }
}

template <typename T>
nlohmann::json json_field(const std::optional<T>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace detail

inline std::string to_csv(const ResultRow& r) {
  std::ostringstream os;
  os << detail::csv_field(r.n) << ',' << detail::csv_field(r.m) << ',' << detail::csv_field(r.rho) << ','
     << format_number(r.eta) << ',' << format_number(r.xi) << ',' << format_number(r.nu) << ',' << r.k << ','
     << r.l << ',' << detail::csv_field(r.trials) << ',' << format_number(r.value) << ','
     << detail::csv_field(r.std_error) << ',' << detail::csv_field(r.reference_w1);
  return os.str();
}

inline nlohmann::json to_json(const ResultRow& r) {
  return {{"N", detail::json_field(r.n)},
          {"M", detail::json_field(r.m)},
          {"rho", detail::json_field(r.rho)},
          {"eta", r.eta},
          {"xi", r.xi},
          {"nu", r.nu},
          {"K", r.k},
          {"L", r.l},
          {"trials", detail::json_field(r.trials)},
          {"value", r.value},
          {"stderr", detail::json_field(r.std_error)},
          {"reference_w1", detail::json_field(r.reference_w1)}};
}

inline ResultRow parse_csv_row(const std::string& line) {
  const auto f = detail::split_csv_line(line);
  if (f.size() != 12) throw std::invalid_argument("csv row must have 12 fields: " + line);
  auto opt_int = [](const std::string& s) -> std::optional<int> {
    if (s.empty()) return std::nullopt;
    return static_cast<int>(parse_number(s));
  };
  auto opt_num = [](const std::string& s) -> std::optional<double> {
    if (s.empty()) return std::nullopt;
    return parse_number(s);
  };
  ResultRow r;
  r.n = opt_int(f[0]);
  r.m = opt_int(f[1]);
  r.rho = opt_num(f[2]);
  r.eta = parse_number(f[3]);
  r.xi = parse_number(f[4]);
  r.nu = parse_number(f[5]);
  r.k = static_cast<int>(parse_number(f[6]));
  r.l = static_cast<int>(parse_number(f[7]));
  if (!f[8].empty()) r.trials = static_cast<std::uint64_t>(parse_number(f[8]));
  r.value = parse_number(f[9]);
  r.std_error = opt_num(f[10]);
  r.reference_w1 = opt_num(f[11]);
  return r;
}

/// Data rows of a CSV document with the fixed header.
inline std::vector<ResultRow> read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) return {};
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kCsvHeader) throw std::invalid_argument("unexpected csv header: " + line);
  std::vector<ResultRow> rows;
  while (std::getline(in, line)) {
    if (!line.empty()) rows.push_back(parse_csv_row(line));
  }
  return rows;
}

/// "balanced2", "fourier" (size m), "fourier<k>", "haar:<seed>" or "file:<path>".
inline ComplexMatrix named_matrix(const std::string& spec, std::optional<int> m) {
  if (spec == "balanced2") {
    ComplexMatrix b(2, 2);
    b << 1, 1, 1, -1;
    return b / std::sqrt(2.0);
  }
  if (spec.rfind("file:", 0) == 0) return read_matrix_file(spec.substr(5));
  if (spec.rfind("haar:", 0) == 0) {
    detail::require(m.has_value(), "matrix " + spec + " needs M");
    const auto seed = static_cast<std::uint64_t>(std::stoull(spec.substr(5)));
    return haar_unitary(*m, {seed, 0});
  }
  if (spec.rfind("fourier", 0) == 0) {
    const std::string size = spec.substr(7);
    if (size.empty()) {
      detail::require(m.has_value(), "matrix fourier needs M");
      return fourier(*m);
    }
    int k = 0;
    const auto res = std::from_chars(size.data(), size.data() + size.size(), k);
    detail::require(res.ec == std::errc() && res.ptr == size.data() + size.size(), "bad matrix name " + spec);
    return fourier(k);
  }
  throw std::invalid_argument("unknown matrix '" + spec + "'");
}

namespace detail {

inline bool needs_sizes(SweepMode mode) { return mode != SweepMode::w1 && mode != SweepMode::p1_approx; }

// Fills M and rho from whichever of (N, M, rho) were given.
inline void resolve_sizes(GridPoint& p) {
  if (p.n) require(*p.n >= 1, "N must be >= 1");
  if (p.m) require(*p.m >= 1, "M must be >= 1");
  if (p.rho) require(*p.rho > 0.0 && *p.rho <= 1.0, "rho must lie in (0, 1]");
  if (p.n && p.m) {
    const double r = static_cast<double>(*p.n) / *p.m;
    if (p.rho) require(std::abs(*p.rho - r) <= 1e-12, "rho disagrees with N/M");
    p.rho = r;
  } else if (p.n && p.rho) {
    p.m = static_cast<int>(std::lround(*p.n / *p.rho));
    p.rho = static_cast<double>(*p.n) / *p.m;
  }
}

}  // namespace detail

/// Checks everything that can be checked without running the point.
inline GridPoint validate_point(GridPoint p) {
  detail::resolve_sizes(p);
  NoiseParams{p.eta, p.xi, p.nu}.validate();
  detail::require(p.k >= 0, "K must be >= 0");
  detail::require(p.l >= 1 || p.l == kAutoPorts, "L must be >= 1");
  if (p.mode == SweepMode::deltap_exact && !p.matrix.empty() && !p.m) {
    p.m = static_cast<int>(named_matrix(p.matrix, std::nullopt).rows());
    detail::resolve_sizes(p);
  }
  if (detail::needs_sizes(p.mode)) {
    detail::require(p.n && p.m, std::string(mode_name(p.mode)) + " needs N and M (or rho)");
    detail::require(*p.m >= *p.n, "M must be >= N");
  } else {
    detail::require(p.rho.has_value(), std::string(mode_name(p.mode)) + " needs rho (or N and M)");
  }
  if (p.l == kAutoPorts) {
    detail::require(p.n && p.m, "L = auto needs N and M");
    p.l = std::max(1, std::min(*p.m / *p.n, *p.m - 1));
  }
  const bool uses_ports = p.mode == SweepMode::deltap_exact || p.mode == SweepMode::deltap_ensemble ||
                          p.mode == SweepMode::p1_ensemble;
  if (uses_ports) detail::require(p.l < *p.m, "need L < M");
  const bool single_port = p.mode == SweepMode::deltap_avg_analytic || p.mode == SweepMode::p1_exact ||
                           p.mode == SweepMode::p1_approx || p.mode == SweepMode::variance ||
                           p.mode == SweepMode::w1;
  if (single_port) detail::require(p.l == 1, std::string(mode_name(p.mode)) + " is defined for L = 1");
  const bool analytic_k = p.mode == SweepMode::deltap_avg_analytic || p.mode == SweepMode::variance;
  if (analytic_k) detail::require(p.k <= *p.n, "K must be <= N for closed forms");
  if (p.mode == SweepMode::deltap_ensemble || p.mode == SweepMode::p1_ensemble) {
    detail::require(p.trials >= 1, "trials must be >= 1");
  }
  return p;
}

struct RunOptions {
  int workers = 1;  // inner ensemble workers
  KernelOptions kernel{};
};

/// Evaluates one grid point.
inline ResultRow run_point(const GridPoint& raw, const RunOptions& opts = {}) {
  const GridPoint p = validate_point(raw);
  const NoiseParams noise{p.eta, p.xi, p.nu};
  ResultRow row;
  row.n = p.n;
  row.m = p.m;
  row.rho = p.rho;
  row.eta = p.eta;
  row.xi = p.xi;
  row.nu = p.nu;
  row.k = p.k;
  row.l = p.l;
  if (p.rho) row.reference_w1 = w1({*p.rho, noise, p.k});

  EnsembleOptions ens;
  ens.workers = opts.workers;
  ens.kernel_options = opts.kernel;
  auto with_stats = [&](const EnsembleStats& st) {
    row.value = st.mean;
    row.std_error = st.std_error;
    row.trials = st.trials;
  };

  switch (p.mode) {
    case SweepMode::deltap_exact: {
      const std::string spec = p.matrix.empty() ? "haar:" + std::to_string(p.seed) : p.matrix;
      const ComplexMatrix u = named_matrix(spec, p.m);
      detail::require(u.rows() == *p.m, "matrix " + spec + " has " + std::to_string(u.rows()) + " modes, M is " +
                                            std::to_string(*p.m));
      const auto li = uniform_lossy(u, p.eta);
      row.value = delta_p_exact(li, Setup::with_first_ports(*p.n, *p.m, p.k, p.l), noise, opts.kernel);
      break;
    }
    case SweepMode::deltap_avg_analytic:
      row.value = avg_delta_p1(*p.n, *p.m, noise, p.k);
      break;
    case SweepMode::deltap_ensemble:
      with_stats(ensemble_delta_p(Setup::with_first_ports(*p.n, *p.m, p.k, p.l), noise, p.trials, p.seed, ens));
      break;
    case SweepMode::w1:
      row.value = w1({*p.rho, noise, p.k});
      break;
    case SweepMode::p1_exact:
      row.value = avg_p1_exact(*p.n, *p.m, noise);
      break;
    case SweepMode::p1_approx:
      row.value = avg_p1_approx({*p.rho, noise, p.k});
      break;
    case SweepMode::p1_ensemble:
      with_stats(ensemble_p1(Setup::with_first_ports(*p.n, *p.m, p.k, p.l), noise, p.trials, p.seed, ens));
      break;
    case SweepMode::variance:
      row.value = var_delta_p1_exact(*p.n, *p.m, noise, p.k);
      break;
  }
  return row;
}

// ---- sweep specification -------------------------------------------------

enum class OutputFormat { csv, json };

struct SweepSpec {
  std::vector<GridPoint> grid;
  std::string output_path;  // empty: standard output
  OutputFormat format = OutputFormat::csv;
};

namespace detail {

inline const std::vector<std::string>& grid_keys() {
  static const std::vector<std::string> keys{"mode", "N",  "M",      "rho",  "eta",   "xi",
                                             "nu",   "K",  "L",      "trials", "seed", "matrix"};
  return keys;
}

inline void set_field(GridPoint& p, const std::string& key, const nlohmann::json& v) {
  if (key == "mode") {
    p.mode = parse_mode(v.get<std::string>());
  } else if (key == "N") {
    p.n = v.get<int>();
  } else if (key == "M") {
    p.m = v.get<int>();
  } else if (key == "rho") {
    p.rho = v.get<double>();
  } else if (key == "eta") {
    p.eta = v.get<double>();
  } else if (key == "xi") {
    p.xi = v.get<double>();
  } else if (key == "nu") {
    p.nu = v.get<double>();
  } else if (key == "K") {
    p.k = v.get<int>();
  } else if (key == "L") {
    p.l = (v.is_string() && v.get<std::string>() == "auto") ? kAutoPorts : v.get<int>();
  } else if (key == "trials") {
    p.trials = v.get<std::uint64_t>();
  } else if (key == "seed") {
    p.seed = v.get<std::uint64_t>();
  } else if (key == "matrix") {
    p.matrix = v.get<std::string>();
  }
}

// Cartesian product over list-valued keys, first key slowest.
inline void expand_entry(const nlohmann::json& entry, std::size_t key_index, GridPoint current,
                         std::vector<GridPoint>& out) {
  const auto& keys = grid_keys();
  if (key_index == keys.size()) {
    out.push_back(current);
    return;
  }
  const auto& key = keys[key_index];
  if (!entry.contains(key)) {
    expand_entry(entry, key_index + 1, current, out);
    return;
  }
  const auto& v = entry.at(key);
  if (v.is_array()) {
    for (const auto& item : v) {
      GridPoint next = current;
      set_field(next, key, item);
      expand_entry(entry, key_index + 1, next, out);
    }
  } else {
    set_field(current, key, v);
    expand_entry(entry, key_index + 1, current, out);
  }
}

}  // namespace detail

/// {"mode": ..., "grid": [entry, ...], "output": {"path": ..., "format": "csv"|"json"}}.
/// Entry fields may be scalars or lists; lists expand as a product. An entry
/// may override the top-level mode and noise defaults.
inline SweepSpec parse_sweep_spec(const nlohmann::json& doc) {
  try {
    detail::require(doc.is_object(), "sweep spec must be a JSON object");
    for (const auto& [key, value] : doc.items()) {
      static_cast<void>(value);
      detail::require(key == "mode" || key == "grid" || key == "output" || key == "defaults" || key == "preset",
                      "unknown sweep spec key '" + key + "'");
    }
    GridPoint base;
    if (doc.contains("mode")) base.mode = parse_mode(doc.at("mode").get<std::string>());
    if (doc.contains("defaults")) {
      for (const auto& [key, value] : doc.at("defaults").items()) {
        const auto& keys = detail::grid_keys();
        detail::require(std::find(keys.begin(), keys.end(), key) != keys.end(), "unknown grid key '" + key + "'");
        detail::set_field(base, key, value);
      }
    }
    SweepSpec spec;
    if (doc.contains("grid")) {
      const auto& grid = doc.at("grid");
      detail::require(grid.is_array(), "grid must be an array");
      for (const auto& entry : grid) {
        detail::require(entry.is_object(), "grid entries must be objects");
        for (const auto& [key, value] : entry.items()) {
          static_cast<void>(value);
          const auto& keys = detail::grid_keys();
          detail::require(std::find(keys.begin(), keys.end(), key) != keys.end(), "unknown grid key '" + key + "'");
        }
        detail::expand_entry(entry, 0, base, spec.grid);
      }
    }
    if (doc.contains("output")) {
      const auto& out = doc.at("output");
      if (out.contains("path")) spec.output_path = out.at("path").get<std::string>();
      if (out.contains("format")) {
        const auto f = out.at("format").get<std::string>();
        detail::require(f == "csv" || f == "json", "output format must be csv or json");
        spec.format = f == "csv" ? OutputFormat::csv : OutputFormat::json;
      }
    }
    return spec;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("sweep spec: ") + e.what());
  }
}

// ---- presets ----------------------------------------------------------------

inline nlohmann::json rho_grid() {
  nlohmann::json r = nlohmann::json::array();
  for (int i = 1; i <= 20; ++i) r.push_back(i / 20.0);
  return r;
}

/// Built-in sweep documents. fig2a: K = 1 ensembles (one probe port and
/// int(M/N) ports) and the closed form for N = 12 and 24. fig2b: closed form
/// for K = 3 at N = 12, 24, 48, 84.
inline nlohmann::json preset_spec(const std::string& name) {
  const nlohmann::json noise{{"eta", 0.8}, {"xi", 1.0}, {"nu", 0.0}};
  if (name == "fig2a") {
    nlohmann::json defaults = noise;
    defaults["K"] = 1;
    defaults["seed"] = 2026;
    return {{"preset", "fig2a"},
            {"mode", "deltap_ensemble"},
            {"defaults", defaults},
            {"grid",
             {{{"mode", "deltap_avg_analytic"}, {"N", {12, 24}}, {"rho", rho_grid()}},
              {{"mode", "deltap_ensemble"}, {"N", 12}, {"rho", rho_grid()}, {"L", {1, "auto"}}, {"trials", 500}},
              {{"mode", "deltap_ensemble"}, {"N", 24}, {"rho", rho_grid()}, {"L", {1, "auto"}}, {"trials", 100}}}},
            {"output", {{"format", "csv"}}}};
  }
  if (name == "fig2b") {
    nlohmann::json defaults = noise;
    defaults["K"] = 3;
    return {{"preset", "fig2b"},
            {"mode", "deltap_avg_analytic"},
            {"defaults", defaults},
            {"grid", {{{"N", {12, 24, 48, 84}}, {"rho", rho_grid()}}}},
            {"output", {{"format", "csv"}}}};
  }
  throw std::invalid_argument("unknown preset '" + name + "' (known: fig2a, fig2b)");
}

// ---- driver -----------------------------------------------------------------

struct SweepOptions {
  int point_workers = 1;
  RunOptions run{};
  bool resume = false;
};

namespace detail {

inline std::size_t count_existing_rows(const std::string& path, OutputFormat format) {
  std::ifstream in(path);
  if (!in.good()) return 0;
  if (format == OutputFormat::csv) {
    const auto rows = read_csv(in);
    return rows.size();
  }
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error&) {
    throw std::invalid_argument("cannot resume: " + path + " is not a JSON array");
  }
  require(j.is_array(), "cannot resume: " + path + " is not a JSON array");
  return j.size();
}

class RowSink {
 public:
  RowSink(const SweepSpec& spec, std::ostream* stream, bool append, std::vector<nlohmann::json> existing)
      : spec_(spec), stream_(stream), json_rows_(std::move(existing)) {
    if (spec_.format == OutputFormat::csv) {
      if (!spec_.output_path.empty()) {
        file_.open(spec_.output_path, append ? std::ios::app : std::ios::trunc);
        require(file_.good(), "cannot write " + spec_.output_path);
        stream_ = &file_;
      }
      if (!append) *stream_ << kCsvHeader << '\n' << std::flush;
    } else if (!append) {
      flush_json();
    }
  }

  void write(const ResultRow& row) {
    if (spec_.format == OutputFormat::csv) {
      *stream_ << to_csv(row) << '\n' << std::flush;
    } else {
      json_rows_.push_back(to_json(row));
      flush_json();
    }
  }

  void finish() {
    if (spec_.format == OutputFormat::json && spec_.output_path.empty()) {
      *stream_ << nlohmann::json(json_rows_).dump(2) << '\n' << std::flush;
    }
  }

 private:
  // Rewritten after every row so the file is always a complete array.
  void flush_json() {
    if (spec_.output_path.empty()) return;
    const auto tmp = spec_.output_path + ".tmp";
    {
      std::ofstream out(tmp, std::ios::trunc);
      require(out.good(), "cannot write " + tmp);
      out << nlohmann::json(json_rows_).dump(2) << '\n';
    }
    std::filesystem::rename(tmp, spec_.output_path);
  }

  const SweepSpec& spec_;
  std::ostream* stream_;
  std::ofstream file_;
  std::vector<nlohmann::json> json_rows_;
};

}  // namespace detail

/// Runs every grid point and writes rows in grid order as they complete.
/// Points are validated before anything runs. On failure the rows already
/// written stay in place and the error propagates. Returns the rows computed
/// in this call.
inline std::vector<ResultRow> run_sweep(const SweepSpec& spec, std::ostream& out, const SweepOptions& opts = {}) {
  detail::require(opts.point_workers >= 1, "point workers must be >= 1");
  for (const auto& p : spec.grid) validate_point(p);

  std::size_t start = 0;
  std::vector<nlohmann::json> existing;
  if (opts.resume) {
    detail::require(!spec.output_path.empty(), "resume needs an output path");
    start = detail::count_existing_rows(spec.output_path, spec.format);
    detail::require(start <= spec.grid.size(), "cannot resume: output has more rows than the grid");
    if (spec.format == OutputFormat::json && start > 0) {
      std::ifstream in(spec.output_path);
      nlohmann::json j;
      in >> j;
      existing.assign(j.begin(), j.end());
    }
  }
  const bool append = opts.resume && std::filesystem::exists(spec.output_path);
  detail::RowSink sink(spec, &out, append, std::move(existing));

  const std::size_t total = spec.grid.size();
  std::vector<ResultRow> rows;
  if (opts.point_workers == 1 || total - start <= 1) {
    for (std::size_t i = start; i < total; ++i) {
      rows.push_back(run_point(spec.grid[i], opts.run));
      sink.write(rows.back());
    }
    sink.finish();
    return rows;
  }

  std::vector<std::optional<ResultRow>> slots(total);
  std::vector<std::exception_ptr> errors(total);
  std::mutex mu;
  std::condition_variable ready;
  std::atomic<std::size_t> next{start};
  std::atomic<bool> cancel{false};
  std::vector<std::thread> pool;
  const auto workers = std::min<std::size_t>(static_cast<std::size_t>(opts.point_workers), total - start);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      while (!cancel.load()) {
        const std::size_t i = next.fetch_add(1);
        if (i >= total) return;
        std::optional<ResultRow> row;
        std::exception_ptr err;
        try {
          row = run_point(spec.grid[i], opts.run);
        } catch (...) {
          err = std::current_exception();
        }
        {
          std::lock_guard lock(mu);
          slots[i] = std::move(row);
          errors[i] = err;
        }
        ready.notify_all();
      }
    });
  }

  std::exception_ptr failure;
  for (std::size_t i = start; i < total; ++i) {
    std::unique_lock lock(mu);
    ready.wait(lock, [&] { return slots[i].has_value() || errors[i]; });
    if (errors[i]) {
      failure = errors[i];
      cancel = true;
      break;
    }
    rows.push_back(*slots[i]);
    lock.unlock();
    sink.write(rows.back());
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  sink.finish();
  return rows;
}

}  // namespace bosondist
