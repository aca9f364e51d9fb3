// Command-line front end: one subcommand per study plus a standalone decay fitter.
#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "chemoflux/config.hpp"
#include "chemoflux/diagnostics.hpp"
#include "chemoflux/studies.hpp"

namespace {

constexpr int kConfigErrorExit = 2;

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw chemoflux::ConfigError("--config", "cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

struct StudyArgs {
  std::string config;
  std::string out;
  int threads = 1;
  std::vector<double> snapshot_times;
};

int run_study_command(chemoflux::Study study, const StudyArgs& args) {
  std::string text;
  chemoflux::ExperimentConfig cfg;
  try {
    text = args.config.empty() ? std::string() : read_file(args.config);
    cfg = chemoflux::parse_config(text);
    cfg.study = study;
    if (!args.snapshot_times.empty()) cfg.snapshot_times = args.snapshot_times;
    if (!args.out.empty()) cfg.output_dir = args.out;
    chemoflux::validate_config(cfg);
  } catch (const chemoflux::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigErrorExit;
  }
  try {
    const int code = chemoflux::run_study(cfg, cfg.output_dir, text, args.threads);
    std::cout << chemoflux::to_string(study) << ": wrote " << cfg.output_dir.string() << " (exit " << code
              << ")\n";
    return code;
  } catch (const chemoflux::NegativeDensityError& e) {
    std::cerr << "invalid initial data: " << e.what() << '\n';
    return kConfigErrorExit;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

int fit_decay_command(const std::string& csv, const std::vector<std::string>& columns, double lo, double hi) {
  std::ifstream in(csv);
  if (!in) {
    std::cerr << "cannot open " << csv << '\n';
    return kConfigErrorExit;
  }
  try {
    const auto records = chemoflux::read_diagnostics_csv(in);
    std::vector<chemoflux::DecayFit> fits;
    for (const auto& c : columns) fits.push_back(chemoflux::fit_decay(records, c, lo, hi));
    chemoflux::write_decay_summary_csv(std::cout, fits);
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "fit-decay: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"chemoflux: Cole-Hopf transformed chemotaxis experiments"};
  app.require_subcommand(1);

  StudyArgs args;
  const std::pair<const char*, chemoflux::Study> studies[] = {
      {"run", chemoflux::Study::single_run},
      {"sweep-delta", chemoflux::Study::delta_sweep},
      {"refine", chemoflux::Study::refinement},
      {"xval", chemoflux::Study::cross_validate},
      {"scan-theta", chemoflux::Study::theta_scan},
  };
  int code = 0;
  for (const auto& [name, study] : studies) {
    auto* sub = app.add_subcommand(name, std::string("run the ") + chemoflux::to_string(study) + " study");
    sub->add_option("--config", args.config, "config file (defaults apply to absent keys)");
    sub->add_option("--out", args.out, "output directory (overrides output.dir)");
    sub->add_option("--threads", args.threads, "worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--snapshot-times", args.snapshot_times, "times at which to write CFX1 snapshots")
        ->delimiter(',');
    sub->callback([&, s = study] { code = run_study_command(s, args); });
  }

  std::string csv;
  std::vector<std::string> columns{"c_linf"};
  std::vector<double> window{2.0, 20.0};
  auto* fit = app.add_subcommand("fit-decay", "fit exponential decay rates to a diagnostics CSV");
  fit->add_option("csv", csv, "diagnostics.csv")->required();
  fit->add_option("--column", columns, "diagnostics column(s)")->delimiter(',');
  fit->add_option("--window", window, "t_lo,t_hi")->delimiter(',')->expected(2);
  fit->callback([&] { code = fit_decay_command(csv, columns, window[0], window[1]); });

  CLI11_PARSE(app, argc, argv);
  return code;
}
