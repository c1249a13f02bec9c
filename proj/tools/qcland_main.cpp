// Command-line front end for the control-landscape toolkit: validates and
// runs experiment configs, and re-emits figure CSVs from finished runs.
// Exit codes: 0 success, 1 total failure, 2 config error.

#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <filesystem>
#include <optional>
#include <string>

#include "qcland/config.hpp"
#include "qcland/experiment.hpp"
#include "qcland/io.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kTotalFailure = 1;
constexpr int kConfigError = 2;

struct Overrides {
  std::optional<std::string> output;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::optional<double> t;
  std::optional<int> nt;
  std::optional<int> k;
  std::optional<int> m;
};

void add_override_flags(CLI::App* cmd, Overrides& ov) {
  cmd->add_option("--output", ov.output, "Override output_dir");
  cmd->add_option("--seed", ov.seed, "Override the master seed");
  cmd->add_option("--threads", ov.threads, "Override the worker count");
  cmd->add_option("-T,--duration", ov.t, "Restrict the sweep to one T value");
  cmd->add_option("--NT", ov.nt, "Restrict the sweep to one N_T value");
  cmd->add_option("-k,--flips", ov.k, "Restrict the sweep to one flip order");
  cmd->add_option("-M,--samples", ov.m, "Override the per-cell sample count");
}

int load_config(const std::string& path, const Overrides& ov,
                qcland::ExperimentConfig& out) {
  std::string text;
  try {
    text = qcland::io::read_text(path);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kConfigError;
  }
  qcland::ParseResult parsed = qcland::parse_config(text);
  if (ov.output) parsed.config.output_dir = *ov.output;
  if (ov.seed) parsed.config.seed = *ov.seed;
  if (ov.threads) parsed.config.threads = *ov.threads;
  if (ov.t) parsed.config.sweep.t_values = {*ov.t};
  if (ov.nt) parsed.config.sweep.nt_values = {*ov.nt};
  if (ov.k) parsed.config.sweep.k_values = {*ov.k};
  if (ov.m) parsed.config.sweep.samples = *ov.m;
  // overrides can fix or break a config: validate the final form
  qcland::ParseResult final_form =
      qcland::parse_config(qcland::serialize_config(parsed.config));
  if (!final_form.ok()) {
    for (const auto& e : final_form.errors)
      std::fprintf(stderr, "config error: %s\n", e.c_str());
    return kConfigError;
  }
  out = final_form.config;
  return kOk;
}

int run_with_toggles(const std::string& config_path, const Overrides& ov,
                     const char* forced_toggle) {
  qcland::ExperimentConfig config;
  if (int rc = load_config(config_path, ov, config); rc != kOk) return rc;
  if (forced_toggle) {
    auto& an = config.analysis;
    an.order_parameters = an.dos = an.couplings = an.fits = an.embedding =
        an.complexity = false;
    const std::string toggle = forced_toggle;
    if (toggle == "sample") an.order_parameters = true;
    if (toggle == "couplings") an.couplings = true;
    if (toggle == "embed") an.embedding = true;
    if (toggle == "complexity") an.complexity = true;
    qcland::ParseResult check = qcland::parse_config(qcland::serialize_config(config));
    if (!check.ok()) {
      for (const auto& e : check.errors)
        std::fprintf(stderr, "config error: %s\n", e.c_str());
      return kConfigError;
    }
  }
  try {
    const qcland::ExperimentResult result = qcland::run_experiment(config);
    for (const auto& cell : result.cells) {
      if (cell.ok)
        std::printf("cell %s: ok (%.1fs)\n", cell.key.label().c_str(),
                    cell.wall_seconds);
      else
        std::printf("cell %s: FAILED: %s\n", cell.key.label().c_str(),
                    cell.error.c_str());
    }
    std::printf("artifacts: %s\n", result.dir.string().c_str());
    return result.total_failure ? kTotalFailure : kOk;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfigError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kTotalFailure;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bang-bang control landscape toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  Overrides ov;

  CLI::App* validate = app.add_subcommand("validate", "Parse and validate a config");
  validate->add_option("config", config_path, "Config file")->required();

  CLI::App* run = app.add_subcommand("run", "Run every analysis the config enables");
  run->add_option("config", config_path, "Config file")->required();
  add_override_flags(run, ov);

  CLI::App* sample_cmd =
      app.add_subcommand("sample", "Sample local minima and order parameters only");
  sample_cmd->add_option("config", config_path, "Config file")->required();
  add_override_flags(sample_cmd, ov);

  CLI::App* couplings_cmd =
      app.add_subcommand("couplings", "Extract the effective-model couplings only");
  couplings_cmd->add_option("config", config_path, "Config file")->required();
  add_override_flags(couplings_cmd, ov);

  CLI::App* embed_cmd =
      app.add_subcommand("embed", "Embed and cluster sampled minima only");
  embed_cmd->add_option("config", config_path, "Config file")->required();
  add_override_flags(embed_cmd, ov);

  CLI::App* complexity_cmd =
      app.add_subcommand("complexity", "Measure search complexity only");
  complexity_cmd->add_option("config", config_path, "Config file")->required();
  add_override_flags(complexity_cmd, ov);

  std::string run_dir, kind_name;
  CLI::App* emit = app.add_subcommand("emit", "Write figure CSVs from a finished run");
  emit->add_option("run_dir", run_dir, "Artifact directory of a finished run")
      ->required();
  emit->add_option("--kind", kind_name,
                   "phase_diagram | dos_excitations | hamming_hist | coupling_maps | "
                   "complexity_scaling | embedding_map")
      ->required();

  CLI11_PARSE(app, argc, argv);

  if (validate->parsed()) {
    std::string text;
    try {
      text = qcland::io::read_text(config_path);
    } catch (const std::exception& e) {
      std::fprintf(stderr, "error: %s\n", e.what());
      return kConfigError;
    }
    const qcland::ParseResult parsed = qcland::parse_config(text);
    if (parsed.ok()) {
      std::printf("ok\n");
      return kOk;
    }
    for (const auto& e : parsed.errors)
      std::fprintf(stderr, "config error: %s\n", e.c_str());
    return kConfigError;
  }
  if (run->parsed()) return run_with_toggles(config_path, ov, nullptr);
  if (sample_cmd->parsed()) return run_with_toggles(config_path, ov, "sample");
  if (couplings_cmd->parsed()) return run_with_toggles(config_path, ov, "couplings");
  if (embed_cmd->parsed()) return run_with_toggles(config_path, ov, "embed");
  if (complexity_cmd->parsed()) return run_with_toggles(config_path, ov, "complexity");
  if (emit->parsed()) {
    qcland::PlotKind kind;
    if (!qcland::plot_kind_from_string(kind_name, kind)) {
      std::fprintf(stderr, "config error: unknown plot kind '%s'\n", kind_name.c_str());
      return kConfigError;
    }
    try {
      const auto out = qcland::emit_plot_data(run_dir, kind);
      std::printf("%s\n", out.string().c_str());
      return kOk;
    } catch (const std::exception& e) {
      std::fprintf(stderr, "error: %s\n", e.what());
      return kTotalFailure;
    }
  }
  return kConfigError;
}
