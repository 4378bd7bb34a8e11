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


// Command-line driver: single-point evaluations, sweeps, presets, self-test.
//
// Exit codes: 0 success, 1 usage or invalid input, 2 numeric or resource
// failure (including a failed self-test).

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "bosondist/bosondist.hpp"

namespace bd = bosondist;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitFailure = 2;

struct PointFlags {
  std::optional<int> n;
  std::optional<int> m;
  std::optional<double> rho;
  double eta = 1.0;
  double xi = 1.0;
  double nu = 0.0;
  int k = 0;
  std::string l = "1";
  std::uint64_t trials = 100;
  std::uint64_t seed = 1;
  std::string matrix;
  std::string matrix_file;
  int workers = 1;
  double budget = bd::kDefaultBudget;
  std::string format = "csv";
};

void add_size_flags(CLI::App* cmd, PointFlags& f) {
  cmd->add_option("--N", f.n, "number of bosons");
  cmd->add_option("--M", f.m, "number of modes");
  cmd->add_option("--rho", f.rho, "boson density N/M");
}

void add_noise_flags(CLI::App* cmd, PointFlags& f) {
  cmd->add_option("--eta", f.eta, "transmission")->capture_default_str();
  cmd->add_option("--xi", f.xi, "indistinguishability")->capture_default_str();
  cmd->add_option("--nu", f.nu, "dark-count rate per port")->capture_default_str();
  cmd->add_option("--K", f.k, "interference order of the reduced model")->capture_default_str();
}

void add_output_flags(CLI::App* cmd, PointFlags& f) {
  cmd->add_option("--format", f.format, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
}

bd::GridPoint to_point(bd::SweepMode mode, const PointFlags& f) {
  bd::GridPoint p;
  p.mode = mode;
  p.n = f.n;
  p.m = f.m;
  p.rho = f.rho;
  p.eta = f.eta;
  p.xi = f.xi;
  p.nu = f.nu;
  p.k = f.k;
  p.l = f.l == "auto" ? bd::kAutoPorts : std::stoi(f.l);
  p.trials = f.trials;
  p.seed = f.seed;
  if (!f.matrix_file.empty()) {
    bd::detail::require(f.matrix.empty(), "give either --matrix or --matrix-file");
    p.matrix = "file:" + f.matrix_file;
  } else {
    p.matrix = f.matrix;
  }
  return p;
}

void print_row(const bd::ResultRow& row, const std::string& format) {
  if (format == "json") {
    std::cout << nlohmann::json::array({bd::to_json(row)}).dump(2) << '\n';
  } else {
    std::cout << bd::kCsvHeader << '\n' << bd::to_csv(row) << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distinguishability lower bounds for lossy, partially distinguishable boson sampling"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "bosondist 0.1.0");

  PointFlags f;
  struct PointCommand {
    CLI::App* cmd;
    bd::SweepMode mode;
  };
  std::vector<PointCommand> points;

  auto point_cmd = [&](const char* name, const char* help, bd::SweepMode mode) {
    CLI::App* cmd = app.add_subcommand(name, help);
    add_size_flags(cmd, f);
    add_noise_flags(cmd, f);
    add_output_flags(cmd, f);
    points.push_back({cmd, mode});
    return cmd;
  };

  auto* deltap = point_cmd("deltap", "Delta P_L for one interferometer by inclusion-exclusion", bd::SweepMode::deltap_exact);
  deltap->add_option("--L", f.l, "number of probed output ports (0-based ports 0..L-1), or auto")->capture_default_str();
  deltap->add_option("--matrix", f.matrix, "balanced2, fourier, fourier<M>, haar:<seed>");
  deltap->add_option("--matrix-file", f.matrix_file, "JSON matrix file")->check(CLI::ExistingFile);
  deltap->add_option("--seed", f.seed, "seed for the default haar:<seed> matrix")->capture_default_str();
  deltap->add_option("--budget", f.budget, "maximum number of permanent terms")->capture_default_str();

  point_cmd("deltap-avg", "closed-form Haar average of Delta P_1", bd::SweepMode::deltap_avg_analytic);
  point_cmd("w1", "asymptotic value W_1 of |<Delta P_1>|", bd::SweepMode::w1);
  point_cmd("p1-exact", "closed-form Haar average of P_1", bd::SweepMode::p1_exact);
  point_cmd("p1-approx", "asymptotic Haar average of P_1", bd::SweepMode::p1_approx);
  point_cmd("variance", "closed-form Haar variance of Delta P_1", bd::SweepMode::variance);
  for (auto* cmd : {point_cmd("deltap-ensemble", "Haar ensemble of Delta P_L", bd::SweepMode::deltap_ensemble),
                    point_cmd("p1-ensemble", "Haar ensemble of P_L", bd::SweepMode::p1_ensemble)}) {
    cmd->add_option("--L", f.l, "number of probed output ports, or auto")->capture_default_str();
    cmd->add_option("--trials", f.trials, "number of Haar draws")->capture_default_str();
    cmd->add_option("--seed", f.seed, "ensemble seed")->capture_default_str();
    cmd->add_option("--workers", f.workers, "worker threads")->capture_default_str();
    cmd->add_option("--budget", f.budget, "maximum number of permanent terms")->capture_default_str();
  }

  // pnocount: P_L, P_L^(K) and their difference for one interferometer.
  auto* pnocount = app.add_subcommand("pnocount", "no-count probabilities for one interferometer");
  pnocount->add_option("--N", f.n, "number of bosons")->required();
  pnocount->add_option("--M", f.m, "number of modes");
  add_noise_flags(pnocount, f);
  pnocount->add_option("--L", f.l, "number of probed output ports")->capture_default_str();
  pnocount->add_option("--matrix", f.matrix, "balanced2, fourier, fourier<M>, haar:<seed>");
  pnocount->add_option("--matrix-file", f.matrix_file, "JSON matrix file")->check(CLI::ExistingFile);
  pnocount->add_option("--seed", f.seed, "seed for the default haar:<seed> matrix")->capture_default_str();

  // samples: number of runs needed to tell the two models apart.
  auto* samples = app.add_subcommand("samples", "sample count for a distinguishing test");
  std::optional<double> p1_flag;
  std::optional<double> w1_flag;
  double alpha = 0.05;
  double epsilon = 0.1;
  samples->add_option("--p1", p1_flag, "no-count probability (default: asymptotic average)");
  samples->add_option("--w1", w1_flag, "bound on |Delta P_1| (default: W_1)");
  samples->add_option("--rho", f.rho, "boson density, used when --p1 or --w1 is absent");
  add_noise_flags(samples, f);
  samples->add_option("--alpha", alpha, "significance level")->capture_default_str();
  samples->add_option("--epsilon", epsilon, "relative precision")->capture_default_str();

  auto* sweep = app.add_subcommand("sweep", "run a sweep from a JSON document or a preset");
  std::string spec_path;
  std::string preset_name;
  std::string output_override;
  std::string format_override;
  bool resume = false;
  int point_workers = 1;
  auto* spec_opt = sweep->add_option("--spec", spec_path, "sweep JSON document")->check(CLI::ExistingFile);
  sweep->add_option("--preset", preset_name, "built-in preset (fig2a, fig2b)")->excludes(spec_opt);
  sweep->add_option("--output", output_override, "output path (default: value in the document, else stdout)");
  sweep->add_option("--format", format_override, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  sweep->add_flag("--resume", resume, "skip grid points already present in the output file");
  sweep->add_option("--workers", point_workers, "grid points evaluated concurrently")->capture_default_str();
  sweep->add_option("--inner-workers", f.workers, "ensemble worker threads per point")->capture_default_str();

  auto* preset = app.add_subcommand("preset", "print a built-in preset document");
  std::string preset_dump;
  preset->add_option("name", preset_dump, "fig2a or fig2b")->required();

  auto* selftest = app.add_subcommand("selftest", "run the built-in property suites");
  std::uint64_t selftest_seed = bd::SelftestOptions{}.seed;
  selftest->add_option("--seed", selftest_seed, "seed for the random cases")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    for (const auto& pc : points) {
      if (!pc.cmd->parsed()) continue;
      bd::RunOptions run;
      run.workers = f.workers;
      run.kernel.budget = f.budget;
      print_row(bd::run_point(to_point(pc.mode, f), run), f.format);
      return 0;
    }

    if (pnocount->parsed()) {
      bd::GridPoint p = to_point(bd::SweepMode::deltap_exact, f);
      if (p.matrix.empty()) p.matrix = "haar:" + std::to_string(f.seed);
      const bd::ComplexMatrix u = bd::named_matrix(p.matrix, p.m);
      const int m = static_cast<int>(u.rows());
      bd::detail::require(!p.m || *p.m == m, "--M disagrees with the matrix size");
      const bd::NoiseParams noise{f.eta, f.xi, f.nu};
      const auto li = bd::uniform_lossy(u, f.eta);
      const auto s = bd::Setup::with_first_ports(*f.n, m, f.k, p.l == bd::kAutoPorts ? std::max(1, m / *f.n) : p.l);
      const double full = bd::p_nocount(li, s, noise);
      const double reduced = bd::p_nocount_reduced(li, s, noise);
      std::cout << "p_nocount=" << bd::format_number(full) << '\n'
                << "p_nocount_reduced=" << bd::format_number(reduced) << '\n'
                << "delta_p=" << bd::format_number(bd::delta_p_exact(li, s, noise)) << '\n';
      return 0;
    }

    if (samples->parsed()) {
      const bd::NoiseParams noise{f.eta, f.xi, f.nu};
      auto asymptotic = [&] {
        bd::detail::require(f.rho.has_value(), "give --rho, or both --p1 and --w1");
        return bd::AsymptoticParams{*f.rho, noise, f.k};
      };
      const double p1 = p1_flag ? *p1_flag : bd::avg_p1_approx(asymptotic());
      const double w1 = w1_flag ? *w1_flag : bd::w1(asymptotic());
      std::cout << "p1=" << bd::format_number(p1) << '\n'
                << "w1=" << bd::format_number(w1) << '\n'
                << "samples=" << bd::sample_count(p1, w1, alpha, epsilon) << '\n';
      return 0;
    }

    if (sweep->parsed()) {
      nlohmann::json doc;
      if (!preset_name.empty()) {
        doc = bd::preset_spec(preset_name);
      } else {
        bd::detail::require(!spec_path.empty(), "give --spec or --preset");
        std::ifstream in(spec_path);
        try {
          in >> doc;
        } catch (const nlohmann::json::parse_error& e) {
          throw std::invalid_argument(spec_path + ": " + e.what());
        }
      }
      auto spec = bd::parse_sweep_spec(doc);
      if (!output_override.empty()) spec.output_path = output_override;
      if (!format_override.empty()) {
        spec.format = format_override == "json" ? bd::OutputFormat::json : bd::OutputFormat::csv;
      }
      bd::SweepOptions opts;
      opts.point_workers = point_workers;
      opts.run.workers = f.workers;
      opts.resume = resume;
      bd::run_sweep(spec, std::cout, opts);
      return 0;
    }

    if (preset->parsed()) {
      std::cout << bd::preset_spec(preset_dump).dump(2) << '\n';
      return 0;
    }

    if (selftest->parsed()) {
      bd::SelftestOptions opts;
      opts.seed = selftest_seed;
      const auto report = bd::run_selftest(opts);
      bd::print_report(report, std::cout);
      return report.passed() ? 0 : kExitFailure;
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::out_of_range& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}
