#include "mubcert/cli.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "mubcert/certify.hpp"
#include "mubcert/error.hpp"
#include "mubcert/io.hpp"
#include "mubcert/photonics.hpp"

namespace mubcert {

namespace {

using nlohmann::json;

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct Manifest {
  std::string command;
  std::vector<std::string> argv;
  json config = nullptr;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  std::string started_at = utc_now();

  void write(const std::string& primary_output) const {
    json j = {{"command", command},
              {"argv", argv},
              {"config", config},
              {"seed", seed ? json(*seed) : json(nullptr)},
              {"inputs", inputs},
              {"outputs", outputs},
              {"tool_version", kToolVersion},
              {"started_at", started_at},
              {"finished_at", utc_now()}};
    write_text_file(primary_output + ".manifest.json", j.dump(2) + "\n");
  }
};

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return kExitArgs;
    case ErrorKind::InvalidConfig: return kExitConfig;
    case ErrorKind::ParseError:
    case ErrorKind::EmptyCell:
    case ErrorKind::OutOfRange:
    case ErrorKind::DimensionMismatch:
    case ErrorKind::BelowThreshold:
    case ErrorKind::NotMub:
    case ErrorKind::NotProjective: return kExitData;
    default: return kExitInternal;
  }
}

void emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") out << text; else write_text_file(path, text);
}

// ---- mub -----------------------------------------------------------------

struct MubArgs {
  std::string construction = "paper-d4";
  int d = 4;
  std::string out;
};

int cmd_mub(const MubArgs& a, const std::vector<std::string>& argv, std::ostream& out) {
  Manifest manifest{"mub", argv};
  MubPair pair;
  if (a.construction == "paper-d4") {
    if (a.d != 4) throw Error(ErrorKind::InvalidArgument, "paper-d4 construction is only defined for d = 4");
    pair = paper_mub_pair_d4();
  } else if (a.construction == "fourier") {
    if (a.d < 2 || a.d > 64) throw Error(ErrorKind::InvalidArgument, "--d must lie in 2..64");
    pair = fourier_mub_pair(a.d);
  } else {
    throw Error(ErrorKind::InvalidArgument, "--construction must be paper-d4 or fourier");
  }
  json doc = to_json(pair);
  doc["metrics"] = mub_metrics(pair);
  emit(a.out, doc.dump(2) + "\n", out);
  if (!a.out.empty() && a.out != "-") {
    manifest.outputs = {a.out};
    manifest.write(a.out);
  }
  return kExitOk;
}

// ---- simulate ------------------------------------------------------------

struct SimulateArgs {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::uint64_t rounds = 60000;
  std::optional<std::uint64_t> pulses;
  bool ideal = false;
  std::optional<double> visibility_target;
  unsigned threads = 0;
  std::string out;
};

InterferometerConfig load_config(const std::string& path) {
  if (path.empty()) return {};
  std::string text;
  try {
    text = read_text_file(path);
  } catch (const Error& e) {
    throw Error(ErrorKind::InvalidConfig, e.what());
  }
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::InvalidConfig, std::string("config is not valid JSON: ") + e.what());
  }
  return config_from_json(j);
}

int cmd_simulate(SimulateArgs a, std::vector<std::string> argv, std::ostream& out, std::ostream& err) {
  auto config = load_config(a.config_path);
  if (!a.seed) {
    std::random_device rd;
    a.seed = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
    argv.push_back("--seed");
    argv.push_back(std::to_string(*a.seed));
  }
  Manifest manifest{"simulate", argv};
  manifest.seed = a.seed;
  if (!a.config_path.empty()) manifest.inputs.push_back(a.config_path);

  CountsTable counts;
  if (a.ideal) {
    counts = ideal_counts(a.rounds);
  } else {
    if (a.visibility_target) {
      const double sigma = calibrate_noise_sigma(config, *a.visibility_target, *a.seed);
      if (config.phase_noise.model == PhaseNoiseModel::None) config.phase_noise.model = PhaseNoiseModel::GaussianDrift;
      config.phase_noise.sigma = sigma;
      err << "calibrated " << to_string(config.phase_noise.model) << " sigma = " << fmt_double(sigma)
          << " rad (mean fringe visibility " << fmt_double(mean_fringe_visibility(config, *a.seed)) << ")\n";
    }
    const std::uint64_t rounds = a.pulses ? *a.pulses : rounds_for_detections(config, a.rounds);
    counts = simulate_rounds(config, rounds, *a.seed, a.threads);
  }
  manifest.config = to_json(config);
  emit(a.out, counts_to_csv(counts), out);
  if (!a.out.empty() && a.out != "-") {
    manifest.outputs = {a.out};
    manifest.write(a.out);
  }
  return kExitOk;
}

// ---- certify -------------------------------------------------------------

struct CertifyArgs {
  std::string counts_path;
  std::optional<double> asp;
  double sigma = 0.0;
  int d = 4;
  std::string out;
  std::string format = "table";
};

int cmd_certify(const CertifyArgs& a, const std::vector<std::string>& argv, std::ostream& out) {
  Manifest manifest{"certify", argv};
  if (a.d < 2) throw Error(ErrorKind::InvalidArgument, "--d must be >= 2");
  AspEstimate estimate;
  if (!a.counts_path.empty()) {
    if (a.asp) throw Error(ErrorKind::InvalidArgument, "use either --counts or --asp, not both");
    const auto counts = parse_counts_csv(read_text_file(a.counts_path));
    if (counts.dim() != a.d) {
      throw Error(ErrorKind::DimensionMismatch, "counts dimension " + std::to_string(counts.dim()) +
                                                    " does not match --d " + std::to_string(a.d));
    }
    estimate = estimate_asp(counts);
    manifest.inputs.push_back(a.counts_path);
  } else if (a.asp) {
    if (a.sigma < 0.0) throw Error(ErrorKind::InvalidArgument, "--sigma must be nonnegative");
    estimate.value = *a.asp;
    estimate.sigma = a.sigma;
    estimate.dim = a.d;
  } else {
    throw Error(ErrorKind::InvalidArgument, "certify needs --counts or --asp");
  }
  if (!(estimate.value > 0.5) || estimate.value > 1.0) {
    throw Error(ErrorKind::OutOfRange, "ASP " + fmt_double(estimate.value) + " outside (1/2, 1]");
  }
  const auto report = full_certificate(estimate, a.d);
  const std::string report_json = to_json(report).dump(2) + "\n";
  if (a.format == "json") out << report_json; else out << format_report_table(report);
  if (!a.out.empty()) {
    write_text_file(a.out, report_json);
    manifest.outputs = {a.out};
    manifest.write(a.out);
  }
  return kExitOk;
}

// ---- figure-data ---------------------------------------------------------

struct FigureArgs {
  std::string counts_path;
  std::string out_prefix = "figure";
};

int cmd_figure_data(const FigureArgs& a, const std::vector<std::string>& argv) {
  Manifest manifest{"figure-data", argv};
  manifest.inputs.push_back(a.counts_path);
  const auto counts = parse_counts_csv(read_text_file(a.counts_path));
  const int d = counts.dim();
  if (d < 2) throw Error(ErrorKind::ParseError, "counts dimension must be >= 2");
  const auto estimate = estimate_asp(counts);
  const double optimum = quantum_optimum(d);
  const double red_line = min_asp_for_nontrivial_eta(d);

  std::ostringstream outcomes;
  outcomes << "i,j,measurement";
  for (int b = 1; b <= d; ++b) outcomes << ",p" << b;
  outcomes << ",detections\n";
  std::ostringstream per_state;
  per_state << "i,j,asp_A,asp_B,optimal_asp,min_asp_nontrivial_eta\n";
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      for (int y = 0; y < 2; ++y) {
        const auto total = counts.setting_total(i, j, y);
        outcomes << i + 1 << ',' << j + 1 << ',' << (y == 0 ? 'A' : 'B');
        for (int b = 0; b < d; ++b) {
          outcomes << ',' << fmt_double(static_cast<double>(counts.at(i, j, y, b)) / static_cast<double>(total));
        }
        outcomes << ',' << total << '\n';
      }
      per_state << i + 1 << ',' << j + 1 << ',' << fmt_double(estimate.at(i, j, 0)) << ','
                << fmt_double(estimate.at(i, j, 1)) << ',' << fmt_double(optimum) << ',' << fmt_double(red_line)
                << '\n';
    }
  }
  const std::string outcomes_path = a.out_prefix + "_outcomes.csv";
  const std::string asp_path = a.out_prefix + "_asp.csv";
  write_text_file(outcomes_path, outcomes.str());
  write_text_file(asp_path, per_state.str());
  manifest.outputs = {outcomes_path, asp_path};
  manifest.write(outcomes_path);
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Simulate and certify the mutually-unbiased-bases QRAC experiment", "mubcert"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  MubArgs mub_args;
  auto* mub = app.add_subcommand("mub", "Build a MUB pair and report its figures of merit");
  mub->add_option("--construction", mub_args.construction, "paper-d4 or fourier")
      ->check(CLI::IsMember({"paper-d4", "fourier"}));
  mub->add_option("--d", mub_args.d, "dimension");
  mub->add_option("--out", mub_args.out, "output JSON path (default stdout)");

  SimulateArgs sim_args;
  auto* sim = app.add_subcommand("simulate", "Simulate the interferometer and write a counts CSV");
  sim->add_option("--config", sim_args.config_path, "InterferometerConfig JSON");
  sim->add_option("--seed", sim_args.seed, "64-bit master seed (default: drawn from OS entropy)");
  sim->add_option("--rounds", sim_args.rounds, "target number of detections");
  sim->add_option("--pulses", sim_args.pulses, "explicit number of protocol rounds (overrides --rounds)");
  sim->add_flag("--ideal", sim_args.ideal, "emit exact expected counts, no sampling");
  sim->add_option("--visibility-target", sim_args.visibility_target, "calibrate phase noise to this mean visibility")
      ->check(CLI::Range(0.0, 1.0));
  sim->add_option("--threads", sim_args.threads, "worker threads (0 = all cores)");
  sim->add_option("--out", sim_args.out, "output CSV path (default stdout)");

  CertifyArgs cert_args;
  auto* cert = app.add_subcommand("certify", "Certify MUB properties from an observed ASP");
  auto* counts_opt = cert->add_option("--counts", cert_args.counts_path, "counts CSV");
  auto* asp_opt = cert->add_option("--asp", cert_args.asp, "observed average success probability");
  cert->add_option("--sigma", cert_args.sigma, "one-sigma uncertainty of --asp")->needs(asp_opt);
  counts_opt->excludes(asp_opt);
  cert->add_option("--d", cert_args.d, "dimension");
  cert->add_option("--out", cert_args.out, "CertificateReport JSON path");
  cert->add_option("--format", cert_args.format, "stdout format: table or json")
      ->check(CLI::IsMember({"table", "json"}));

  FigureArgs fig_args;
  auto* fig = app.add_subcommand("figure-data", "Per-state outcome and ASP tables for plotting");
  fig->add_option("--counts", fig_args.counts_path, "counts CSV")->required();
  fig->add_option("--out-prefix", fig_args.out_prefix, "prefix for the two CSV outputs");

  std::string manifest_path;
  auto* replay = app.add_subcommand("replay", "Re-run the command recorded in a manifest");
  replay->add_option("--manifest", manifest_path, "manifest JSON")->required();

  std::vector<char*> argv;
  std::vector<std::string> storage = args;
  if (storage.empty()) storage.push_back("mubcert");
  for (auto& s : storage) argv.push_back(s.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::CallForVersion& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitArgs;
  }

  try {
    if (*mub) return cmd_mub(mub_args, storage, out);
    if (*sim) return cmd_simulate(sim_args, storage, out, err);
    if (*cert) return cmd_certify(cert_args, storage, out);
    if (*fig) return cmd_figure_data(fig_args, storage);
    if (*replay) {
      json m;
      try {
        m = json::parse(read_text_file(manifest_path));
      } catch (const json::exception& e) {
        throw Error(ErrorKind::ParseError, std::string("manifest: ") + e.what());
      }
      const auto recorded = m.at("argv").get<std::vector<std::string>>();
      if (recorded.size() > 1 && recorded[1] == "replay") {
        throw Error(ErrorKind::InvalidArgument, "manifest records a replay");
      }
      return run_cli(recorded, out, err);
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitArgs;
}

}  // namespace mubcert
