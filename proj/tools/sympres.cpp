// sympres: spline construction, operator verification, wave runs, reports.
//
// Exit codes: 0 success, 2 config error, 3 numerical failure (infeasible
// constraints, degenerate mapping, unstable run), 4 verification failure.

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "sympres/config.hpp"
#include "sympres/verify.hpp"
#include "sympres/wave.hpp"

namespace fs = std::filesystem;
using namespace sympres;

namespace {

struct SplineFlags {
  std::string preset = "medium";
  SplineParams custom;
  bool has_custom = false;

  void attach(CLI::App* cmd) {
    cmd->add_option("--preset", preset, "Spline preset: coarse, medium, fine");
    auto mark = [this](auto) { has_custom = true; };
    cmd->add_option("--nspan", custom.n_span, "Support half-width")->each(mark);
    cmd->add_option("--ncont", custom.n_cont, "Continuous derivatives")->each(mark);
    cmd->add_option("--order", custom.order, "Polynomial degree")->each(mark);
    cmd->add_option("--nconsist", custom.n_consist, "Reproduction order")->each(mark);
    cmd->add_option("--wmax", custom.w_max, "Accurate-wavenumber target (radians)")
        ->each(mark);
  }
  SplineParams params() const {
    return has_custom ? custom : SplineParams::preset(preset);
  }
};

Mapping make_mapping(const ExperimentConfig& c) {
  if (c.dimension == 1)
    return c.mesh == "uniform" ? Mapping::uniform_1d(c.n1)
                               : Mapping::sinusoidal_1d(c.n1, c.amplitude);
  return c.mesh == "uniform" ? Mapping::uniform_2d(c.n1, c.n2)
                             : Mapping::sinusoidal_2d(c.n1, c.n2, c.amplitude);
}

int max_threads() {
  if (const char* env = std::getenv("SYMPRES_THREADS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  return 1;
}

RunResult run_experiment(const ExperimentConfig& c) {
  auto spline = build_spline(c.spline_params(), LsqConfig{});
  CurvilinearGrid grid(make_mapping(c), c.quad_points);
  auto weights = assemble_weights(grid, spline);
  auto op = assemble_laplacian(grid, spline, weights);
  RunConfig rc;
  rc.end_time = c.end_time;
  rc.report_interval = c.report_interval;
  rc.dt = c.dt;
  rc.dt_max = c.dt_max;
  return {c.name, run(grid, op, rc)};
}

void write_diagnostics_csv(const RunResult& r, std::ostream& os) {
  os << "t,rms_error_pct,mass,mass_loss_pct,energy,energy_loss_pct\n";
  char buf[256];
  for (const auto& rec : r.records) {
    std::snprintf(buf, sizeof buf, "%.6g,%.10g,%.17g,%s,%.17g,%s\n", rec.t,
                  rec.rms_error_pct, rec.mass, format_loss(rec.mass_loss_pct).c_str(),
                  rec.energy, format_loss(rec.energy_loss_pct).c_str());
    os << buf;
  }
}

std::vector<ExperimentConfig> load_experiments(const std::string& config_path) {
  if (config_path.empty()) return {ExperimentConfig{}};
  return parse_config_file(config_path);
}

// Run experiments with at most SYMPRES_THREADS in flight; results land in
// config order regardless of completion order.
std::vector<RunResult> run_matrix(const std::vector<ExperimentConfig>& configs) {
  std::vector<RunResult> results(configs.size());
  std::vector<std::exception_ptr> errors(configs.size());
  const size_t width = std::min<size_t>(max_threads(), configs.size());
  if (width <= 1) {
    for (size_t i = 0; i < configs.size(); ++i) results[i] = run_experiment(configs[i]);
    return results;
  }
  std::atomic<size_t> next{0};
  std::vector<std::thread> pool;
  for (size_t w = 0; w < width; ++w)
    pool.emplace_back([&] {
      for (size_t i = next.fetch_add(1); i < configs.size(); i = next.fetch_add(1)) {
        try {
          results[i] = run_experiment(configs[i]);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return results;
}

int cmd_spline_build(const SplineFlags& flags, const std::string& out_path) {
  SplineBuildInfo info;
  auto spline = build_spline(flags.params(), LsqConfig{}, &info);
  if (!out_path.empty()) spline.save(out_path);
  std::printf("max constraint residual: %.3e\n", info.constraint_residual);
  if (info.rank_deficient)
    std::printf("note: reduced least-squares system is rank-deficient; "
                "minimum-norm solution taken\n");
  return 0;
}

int cmd_spline_spectrum(const SplineFlags& flags, int samples,
                        const std::string& out_path) {
  auto spline = build_spline(flags.params(), LsqConfig{});
  std::ofstream file;
  std::ostream* os = &std::cout;
  if (!out_path.empty()) {
    file.open(out_path);
    if (!file) throw ConfigError("cannot open output file: " + out_path);
    os = &file;
  }
  *os << "omega,dispersion_error\n";
  char buf[64];
  for (int i = 0; i < samples; ++i) {
    const double omega = M_PI * i / (samples - 1);
    std::snprintf(buf, sizeof buf, "%.10g,%.10g\n", omega,
                  spline.dispersion_error(omega));
    *os << buf;
  }
  return 0;
}

int cmd_verify(const std::string& config_path) {
  bool all = true;
  for (const auto& c : load_experiments(config_path)) {
    auto spline = build_spline(c.spline_params(), LsqConfig{});
    CurvilinearGrid grid(make_mapping(c), c.quad_points);
    auto rep = run_verification(grid, spline, c.seed);
    std::printf("[%s] %s %dx%d %s\n", c.name.c_str(), c.mesh.c_str(), c.n1,
                c.dimension == 2 ? c.n2 : 1, c.spline_preset.c_str());
    for (const auto& it : rep.items)
      std::printf("  %-22s %10.3e  (tol %.0e)  %s\n", it.name.c_str(), it.value,
                  it.tol, it.pass ? "pass" : "FAIL");
    all = all && rep.all_pass();
  }
  return all ? 0 : 4;
}

int cmd_wave_run(const std::string& config_path) {
  for (const auto& c : load_experiments(config_path)) {
    auto result = run_experiment(c);
    fs::create_directories(c.outdir);
    const fs::path out = fs::path(c.outdir) / (c.name + ".csv");
    std::ofstream file(out);
    if (!file) throw ConfigError("cannot open output file: " + out.string());
    write_diagnostics_csv(result, file);
    std::printf("[%s] wrote %s (final rms %.4g%%, energy loss %s%%)\n",
                c.name.c_str(), out.string().c_str(),
                result.records.back().rms_error_pct,
                format_loss(result.records.back().energy_loss_pct).c_str());
  }
  return 0;
}

int cmd_report(const std::string& config_path, const std::string& outdir_flag) {
  auto configs = load_experiments(config_path);
  if (config_path.empty()) configs.clear();  // report over zero runs is legal
  auto results = run_matrix(configs);
  const std::string outdir =
      !outdir_flag.empty() ? outdir_flag
                           : (configs.empty() ? "." : configs.front().outdir);
  fs::create_directories(outdir);
  {
    std::ofstream t2(fs::path(outdir) / "table2.csv");
    write_table2(results, t2);
  }
  {
    std::ofstream t3(fs::path(outdir) / "table3.csv");
    write_table3(results, t3);
  }
  std::printf("wrote %s/table2.csv and %s/table3.csv (%zu runs)\n",
              outdir.c_str(), outdir.c_str(), results.size());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Symmetry-preserving discretization toolkit"};
  app.require_subcommand(1);

  auto* spline_cmd = app.add_subcommand("spline", "Spline construction and analysis");
  spline_cmd->require_subcommand(1);

  SplineFlags build_flags;
  std::string build_out;
  auto* build_cmd = spline_cmd->add_subcommand("build", "Build a spline and save it");
  build_flags.attach(build_cmd);
  build_cmd->add_option("-o,--output", build_out, "Spline file to write");

  SplineFlags spec_flags;
  std::string spec_out;
  int spec_samples = 256;
  auto* spec_cmd =
      spline_cmd->add_subcommand("spectrum", "Dispersion error over omega in [0, pi]");
  spec_flags.attach(spec_cmd);
  spec_cmd->add_option("-o,--output", spec_out, "CSV file (default stdout)");
  spec_cmd->add_option("--samples", spec_samples, "Number of omega samples")
      ->check(CLI::Range(2, 1 << 20));

  std::string verify_config;
  auto* verify_cmd = app.add_subcommand("verify", "Run the operator invariant suite");
  verify_cmd->add_option("-c,--config", verify_config, "Experiment config file");

  auto* wave_cmd = app.add_subcommand("wave", "Wave-equation experiments");
  wave_cmd->require_subcommand(1);
  std::string wave_config;
  auto* wave_run_cmd = wave_cmd->add_subcommand("run", "Run experiments, write diagnostics CSV");
  wave_run_cmd->add_option("-c,--config", wave_config, "Experiment config file");

  std::string report_config, report_outdir;
  auto* report_cmd = app.add_subcommand("report", "Aggregate runs into table2/table3 CSVs");
  report_cmd->add_option("-c,--config", report_config, "Experiment config file");
  report_cmd->add_option("--outdir", report_outdir, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (build_cmd->parsed()) return cmd_spline_build(build_flags, build_out);
    if (spec_cmd->parsed()) return cmd_spline_spectrum(spec_flags, spec_samples, spec_out);
    if (verify_cmd->parsed()) return cmd_verify(verify_config);
    if (wave_run_cmd->parsed()) return cmd_wave_run(wave_config);
    if (report_cmd->parsed()) return cmd_report(report_config, report_outdir);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const InfeasibleConstraints& e) {
    std::fprintf(stderr, "infeasible constraints: %s\n", e.what());
    return 3;
  } catch (const DegenerateMapping& e) {
    std::fprintf(stderr, "degenerate mapping: %s\n", e.what());
    return 3;
  } catch (const UnstableRun& e) {
    std::fprintf(stderr, "unstable run: %s\n", e.what());
    return 3;
  } catch (const NonPositiveWeight& e) {
    std::fprintf(stderr, "non-positive integration weight: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
  return 0;
}
