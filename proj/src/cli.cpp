#include "dpathsim/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <future>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "dpathsim/reference_models.hpp"
#include "dpathsim/scenario.hpp"
#include "dpathsim/trace_io.hpp"

namespace dpathsim::cli {

namespace fs = std::filesystem;

namespace {

using OutputSet = std::vector<std::pair<fs::path, std::string>>;

// Writes every file or none: on failure the ones already written are removed.
void write_all(const OutputSet& files) {
  std::vector<fs::path> written;
  try {
    for (const auto& [path, content] : files) {
      if (path.has_parent_path()) fs::create_directories(path.parent_path());
      write_file(path, content);
      written.push_back(path);
    }
  } catch (...) {
    std::error_code ec;
    for (const auto& p : written) fs::remove(p, ec);
    throw;
  }
}

struct UsageError {
  std::string message;
};

std::string summary_text(const SimulationReport& r) {
  std::string s;
  s += "platform=" + std::string(to_string(r.config.platform)) + " model_source=" + r.config.model_source +
       " seed=" + std::to_string(r.config.seed) + "\n";
  s += "packets=" + std::to_string(r.records.size()) + " hits=" + std::to_string(r.hits) +
       " misses=" + std::to_string(r.misses) + "\n";
  for (Stage st : kStages) s += format_summary_line(stage_name(st), r.summary(st)) + "\n";
  s += format_summary_line("total", r.total_summary) + "\n";
  return s;
}

OutputSet run_outputs(const SimulationReport& r, const fs::path& dir) {
  OutputSet files;
  files.emplace_back(dir / "config.txt", format_config(r.config));
  files.emplace_back(dir / "records.csv", export_records_csv(r.records));
  for (Stage st : kStages) {
    files.emplace_back(dir / ("ecdf_" + std::string(stage_name(st)) + ".csv"), export_ecdf_csv(r.stage(st)));
  }
  files.emplace_back(dir / "ecdf_total.csv", export_ecdf_csv(r.total_dist));
  files.emplace_back(dir / "summary.txt", summary_text(r));
  return files;
}

std::optional<std::uint64_t> env_seed() {
  const char* raw = std::getenv(kSeedEnvVar);
  if (raw == nullptr || *raw == '\0') return std::nullopt;
  const std::string_view s(raw);
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw UsageError{std::string(kSeedEnvVar) + "='" + std::string(s) + "' is not an unsigned integer"};
  }
  return v;
}

struct PlannedRun {
  ScenarioConfig config;
  fs::path base_dir;
  fs::path out_dir;
};

}  // namespace

int cmd_ecdf(const fs::path& trace, const fs::path& out_csv, std::ostream& out, std::ostream& err) {
  try {
    const auto t = parse_trace(read_file(trace));
    const auto dist = build_ecdf(t.delays());
    write_all({{out_csv, export_ecdf_csv(dist)}});
    out << format_summary_line(t.stage.empty() ? "delay" : t.stage, summarize(dist)) << "\n";
    out << dist.size() << " support points written to " << out_csv.string() << "\n";
    return kOk;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kData;
  }
}

int cmd_models_synth(const fs::path& out_dir, std::ostream& out, std::ostream& err) {
  try {
    OutputSet files;
    for (const auto& m : reference_models()) {
      files.emplace_back(out_dir / (m.name + ".model"), save_model(m.model, m.name));
      auto cfg = m.scenario();
      cfg.model_source = m.name + ".model";
      files.emplace_back(out_dir / (m.name + ".conf"), "# " + m.description + " (synthetic)\n" + format_config(cfg));
    }
    write_all(files);
    out << reference_models().size() << " synthetic reference models written to " << out_dir.string() << "\n";
    return kOk;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kData;
  }
}

int cmd_simulate(const fs::path& config, const fs::path& out_dir, std::optional<std::uint64_t> seed_flag,
                 std::ostream& out, std::ostream& err) {
  std::vector<PlannedRun> plan;
  try {
    std::optional<std::uint64_t> seed = seed_flag;
    if (!seed) seed = env_seed();

    std::vector<fs::path> config_files;
    std::error_code ec;
    const bool batch = fs::is_directory(config, ec);
    if (batch) {
      for (const auto& entry : fs::directory_iterator(config)) {
        if (entry.is_regular_file() && entry.path().extension() == ".conf") config_files.push_back(entry.path());
      }
      std::sort(config_files.begin(), config_files.end());
      if (config_files.empty()) {
        err << "error: no .conf files in " << config.string() << "\n";
        return kData;
      }
    } else {
      config_files.push_back(config);
    }

    for (const auto& path : config_files) {
      std::string text;
      try {
        text = read_file(path);
      } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kData;
      }
      PlannedRun run;
      try {
        run.config = parse_config(text);
      } catch (const Error& e) {
        err << "error: " << path.string() << ": " << e.what() << "\n";
        return e.code() == ErrorCode::kInvalidConfig || e.code() == ErrorCode::kInvalidRate ? kUsage : kData;
      }
      if (seed) run.config.seed = *seed;
      run.base_dir = path.parent_path();
      run.out_dir = batch ? out_dir / path.stem() : out_dir;
      plan.push_back(std::move(run));
    }
  } catch (const UsageError& e) {
    err << "error: " << e.message << "\n";
    return kUsage;
  }

  try {
    // Runs are independent; each owns its model, cache and rng streams.
    std::vector<std::future<SimulationReport>> jobs;
    for (const auto& run : plan) {
      jobs.push_back(std::async(std::launch::async, [&run] {
        return run_simulation(run.config, [&run](std::string_view src) { return resolve_model(src, run.base_dir); });
      }));
    }
    std::vector<SimulationReport> reports;
    for (auto& j : jobs) reports.push_back(j.get());

    OutputSet files;
    for (std::size_t i = 0; i < plan.size(); ++i) {
      auto set = run_outputs(reports[i], plan[i].out_dir);
      files.insert(files.end(), set.begin(), set.end());
    }
    write_all(files);
    for (std::size_t i = 0; i < plan.size(); ++i) {
      if (plan.size() > 1) out << "== " << plan[i].out_dir.string() << "\n";
      out << summary_text(reports[i]);
    }
    return kOk;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kData;
  }
}

namespace {

SimulationReport load_run(const fs::path& dir) {
  auto config = parse_config(read_file(dir / "config.txt"));
  return make_report(std::move(config), parse_records_csv(read_file(dir / "records.csv")));
}

}  // namespace

int cmd_compare(const fs::path& run_a, const fs::path& run_b, const fs::path& out_csv, std::ostream& out,
                std::ostream& err) {
  try {
    const auto a = load_run(run_a);
    const auto b = load_run(run_b);
    const auto rows = compare_scenarios(a, b);
    const auto csv = export_comparison_csv(rows);
    write_all({{out_csv, csv}});
    out << csv;
    return kOk;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kData;
  }
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Trace-calibrated simulator of Open vSwitch kernel datapath processing delay", "dpathsim"};
  app.require_subcommand(1);

  std::string trace, out_path, config, dir_a, dir_b;
  std::optional<std::uint64_t> seed;

  auto* ecdf = app.add_subcommand("ecdf", "Build an ECDF from a two-column delay trace");
  ecdf->add_option("trace", trace, "Trace file (index, delay us)")->required();
  ecdf->add_option("-o,--output", out_path, "Output CSV")->required();

  auto* models = app.add_subcommand("models", "Reference model datasets");
  models->require_subcommand(1);
  auto* synth = models->add_subcommand("synth", "Write the synthetic reference models and matching configs");
  synth->add_option("-o,--output", out_path, "Output directory")->required();

  auto* simulate = app.add_subcommand("simulate", "Run a scenario (or every .conf in a directory)");
  simulate->add_option("config", config, "Scenario config file or directory")->required();
  simulate->add_option("-o,--output", out_path, "Output directory")->required();
  simulate->add_option("--seed", seed, "Override the seed (takes precedence over DPATHSIM_SEED)");

  auto* compare = app.add_subcommand("compare", "Compare two simulate output directories");
  compare->add_option("run_a", dir_a, "Baseline run directory")->required();
  compare->add_option("run_b", dir_b, "Compared run directory")->required();
  compare->add_option("-o,--output", out_path, "Output CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  if (*ecdf) return cmd_ecdf(trace, out_path, out, err);
  if (*synth) return cmd_models_synth(out_path, out, err);
  if (*simulate) return cmd_simulate(config, out_path, seed, out, err);
  if (*compare) return cmd_compare(dir_a, dir_b, out_path, out, err);
  return kUsage;
}

}  // namespace dpathsim::cli
