#include "qcland/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <tuple>
#include <unordered_set>

#include <json.hpp>

#include "qcland/brute_force.hpp"
#include "qcland/complexity.hpp"
#include "qcland/density_clustering.hpp"
#include "qcland/effective_model.hpp"
#include "qcland/io.hpp"
#include "qcland/landscape_stats.hpp"
#include "qcland/parallel.hpp"
#include "qcland/quantum.hpp"
#include "qcland/regression.hpp"
#include "qcland/rng.hpp"
#include "qcland/stochastic_descent.hpp"
#include "qcland/tsne.hpp"

namespace qcland {

namespace fs = std::filesystem;
using nlohmann::json;

std::string CellKey::dir_name() const {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "T=%.4f_NT=%03d_k=%d", duration, n_bangs, flip_order);
  return buf;
}

std::string CellKey::label() const { return dir_name(); }

namespace {

constexpr const char* kVersion = "0.1.0";
constexpr int kHammingBins = 50;

std::string fd(double v) { return io::format_double(v); }

struct CellContext {
  const ExperimentConfig* config;
  CellKey key;
  fs::path dir;  // final cell directory
  std::vector<std::string> files;
};

void write_file(CellContext& ctx, const fs::path& staging, const std::string& name,
                const std::string& content) {
  io::write_text_atomic(staging / name, content);
  ctx.files.push_back((fs::path("cells") / ctx.key.dir_name() / name).string());
}

json histogram_json(const Histogram& h) {
  return json{{"edges", h.edges}, {"density", h.density}, {"counts", h.counts}};
}

std::string histogram_csv(const Histogram& h) {
  io::CsvWriter csv({"bin_lo", "bin_hi", "count", "density"});
  for (std::size_t b = 0; b < h.density.size(); ++b)
    csv.add_row({fd(h.edges[b]), fd(h.edges[b + 1]), std::to_string(h.counts[b]),
                 fd(h.density[b])});
  return csv.str();
}

void run_cell(CellContext& ctx, const fs::path& staging) {
  const ExperimentConfig& cfg = *ctx.config;
  const AnalysisToggles& an = cfg.analysis;
  ControlProblem problem = cfg.problem;
  problem.duration = ctx.key.duration;
  problem.n_bangs = ctx.key.n_bangs;
  const int k = ctx.key.flip_order;
  const std::string label = ctx.key.label();

  FidelityEvaluator eval(problem);

  json info{{"T", problem.duration}, {"N_T", problem.n_bangs}, {"k", k},
            {"label", label},        {"L", problem.n_sites}};

  if (an.order_parameters) {
    const SampleSet set =
        sample(eval, k, cfg.sweep.samples, derive_seed(cfg.seed, label + "/sample"));
    io::save_sample_set(staging, set);
    ctx.files.push_back((fs::path("cells") / ctx.key.dir_name() / "samples.csv").string());
    ctx.files.push_back((fs::path("cells") / ctx.key.dir_name() / "samples.json").string());

    const OrderParameters op = order_parameters(set, an.fidelity_filter);
    json stats{{"q", op.q},
               {"f", op.f},
               {"M", op.m},
               {"M_star", op.m_star},
               {"best_fidelity", op.best_fidelity},
               {"best_cost", op.best_cost},
               {"q_field_units", correlator_q_field_units(set, an.fidelity_filter)}};
    if (an.fidelity_filter)
      stats["fidelity_filter"] = *an.fidelity_filter;
    else
      stats["fidelity_filter"] = nullptr;
    write_file(ctx, staging, "stats.json", stats.dump(2) + "\n");

    std::vector<Protocol> protocols;
    protocols.reserve(set.records.size());
    for (const auto& r : set.records) protocols.push_back(r.protocol);
    const Histogram hist =
        pairwise_histogram(hamming_matrix(protocols), kHammingBins);
    write_file(ctx, staging, "hamming_hist.csv", histogram_csv(hist));
  }

  BruteForceResult brute;
  const bool need_table = an.dos || an.couplings || an.fits;
  if (need_table || an.complexity)
    brute = brute_force_optimum(eval, need_table, cfg.max_enum_bangs);

  if (an.dos) {
    const DosHistogram d = dos(brute.cost_table, an.dos_bins, DosOrigin::enumeration);
    write_file(ctx, staging, "dos.csv", histogram_csv(d.hist));
    json dj{{"origin", "enumeration"},
            {"bins", an.dos_bins},
            {"best_index", brute.best_index},
            {"best_protocol", protocol_string(brute.best)},
            {"best_cost", brute.best_cost},
            {"best_fidelity", brute.best_fidelity},
            {"degenerate", brute.degenerate}};
    write_file(ctx, staging, "dos.json", dj.dump(2) + "\n");

    const auto records = excitations_from_table(
        brute.cost_table, brute.best_index, problem.n_bangs, an.excitation_orders);
    io::CsvWriter csv({"flip_order", "flips", "m_h", "m_h_field", "cost", "delta_cost"});
    for (const auto& r : records) {
      std::string flips;
      for (std::size_t i = 0; i < r.flips.size(); ++i) {
        if (i) flips.push_back(';');
        flips += std::to_string(r.flips[i]);
      }
      csv.add_row({std::to_string(r.flips.size()), flips, std::to_string(r.magnetization),
                   fd(r.magnetization * problem.field_bound), fd(r.cost),
                   fd(r.delta_cost)});
    }
    write_file(ctx, staging, "excitations.csv", csv.str());
  }

  if (an.couplings) {
    const CouplingTable table = walsh_couplings(brute.cost_table);
    json cj;
    cj["N_T"] = problem.n_bangs;
    cj["C0"] = table.constant();
    const Eigen::VectorXd g = table.field_vector();
    cj["G"] = std::vector<double>(g.data(), g.data() + g.size());
    json jpairs = json::array();
    for (int i = 0; i < table.n_bangs(); ++i)
      for (int j = i + 1; j < table.n_bangs(); ++j)
        jpairs.push_back({{"i", i}, {"j", j}, {"value", table.pair(i, j)}});
    cj["J"] = std::move(jpairs);
    json ktriples = json::array();
    for (const auto& t : table.triples())
      ktriples.push_back({{"i", t.sites[0]},
                          {"j", t.sites[1]},
                          {"k", t.sites[2]},
                          {"value", t.value}});
    cj["K"] = std::move(ktriples);

    const std::vector<std::pair<std::string, std::vector<int>>> error_sets = {
        {"0+1", {0, 1}}, {"0+2", {0, 2}}, {"0+1+2", {0, 1, 2}}, {"0+1+2+3", {0, 1, 2, 3}}};
    json errors;
    for (const auto& [name, orders] : error_sets)
      errors[name] = truncation_error(brute.cost_table, table, orders);
    cj["truncation_error"] = std::move(errors);

    const std::vector<std::pair<std::string, std::vector<int>>> frust_sets = {
        {"2", {2}}, {"1+2", {1, 2}}, {"1+2+3", {1, 2, 3}}};
    json frust;
    for (const auto& [name, orders] : frust_sets)
      frust[name] = frustration(table, orders);
    cj["frustration"] = std::move(frust);
    write_file(ctx, staging, "couplings.json", cj.dump(2) + "\n");

    const LocalityCurve curve = three_body_locality(table);
    io::CsvWriter csv({"perimeter", "mean_abs_coupling", "count"});
    for (std::size_t i = 0; i < curve.perimeter.size(); ++i)
      csv.add_row({std::to_string(curve.perimeter[i]), fd(curve.mean_abs[i]),
                   std::to_string(curve.count[i])});
    write_file(ctx, staging, "locality.csv", csv.str());
  }

  if (an.fits) {
    const auto idx = lowest_cost_indices(
        brute.cost_table, static_cast<std::size_t>(an.low_manifold_size));
    std::vector<Protocol> protocols;
    std::vector<double> costs;
    protocols.reserve(idx.size());
    for (auto s : idx) {
      protocols.push_back(protocol_from_index(s, problem.n_bangs));
      costs.push_back(brute.cost_table[s]);
    }
    FitOptions base;
    base.orders = an.fit_orders;
    base.split_seed = derive_seed(cfg.seed, label + "/split");
    const std::vector<double> grid = default_lambda_grid();

    json fj;
    fj["low_manifold_size"] = idx.size();
    fj["orders"] = an.fit_orders;
    for (Regularizer reg : {Regularizer::ridge, Regularizer::lasso}) {
      base.regularizer = reg;
      std::vector<FitResult> all;
      const FitResult best = fit_lambda_grid(protocols, costs, base, grid, &all);
      json grid_json = json::array();
      for (const auto& fit : all)
        grid_json.push_back({{"lambda", fit.lambda},
                             {"r2_train", fit.r2_train},
                             {"r2_test", fit.r2_test},
                             {"converged", fit.converged}});
      fj[to_string(reg)] = {{"lambda", best.lambda},
                            {"r2_train", best.r2_train},
                            {"r2_test", best.r2_test},
                            {"converged", best.converged},
                            {"n_train", best.n_train},
                            {"n_test", best.n_test},
                            {"grid", std::move(grid_json)}};
    }
    write_file(ctx, staging, "fit.json", fj.dump(2) + "\n");
  }

  if (an.embedding) {
    std::vector<Protocol> unique_protocols;
    std::vector<double> unique_costs;
    std::unordered_set<std::string> seen;
    const int target = an.embedding_points;
    const int max_attempts = target * an.embedding_attempts_factor;
    int attempted = 0;
    while (static_cast<int>(unique_protocols.size()) < target &&
           attempted < max_attempts) {
      const int batch = std::min(target, max_attempts - attempted);
      std::vector<LocalMinimum> runs(batch);
      parallel_for(static_cast<std::size_t>(batch), 1,
                   [&](std::size_t begin, std::size_t end) {
                     for (std::size_t i = begin; i < end; ++i)
                       runs[i] = sd_run(eval, k,
                                        derive_seed(cfg.seed, label + "/embed",
                                                    attempted + i));
                   });
      attempted += batch;
      for (auto& r : runs) {
        if (static_cast<int>(unique_protocols.size()) >= target) break;
        std::string key(reinterpret_cast<const char*>(r.protocol.data()),
                        r.protocol.size());
        if (seen.insert(std::move(key)).second) {
          unique_protocols.push_back(std::move(r.protocol));
          unique_costs.push_back(r.cost);
        }
      }
    }

    EmbeddingConfig ec;
    ec.perplexity = an.tsne_perplexity;
    ec.iterations = an.tsne_iterations;
    ec.learning_rate = an.tsne_learning_rate;
    ec.seed = derive_seed(cfg.seed, label + "/tsne");
    const EmbeddingResult emb = tsne_protocols(unique_protocols, ec);

    ClusterConfig cc;
    cc.dc_quantile = an.cluster_dc_quantile;
    cc.n_centers = an.cluster_centers;
    const ClusterAssignment clusters = density_peak_cluster_points(emb.points, cc);

    io::CsvWriter csv({"index", "x", "y", "cluster", "rho", "delta", "cost", "protocol"});
    for (std::size_t i = 0; i < unique_protocols.size(); ++i)
      csv.add_row({std::to_string(i), fd(emb.points(i, 0)), fd(emb.points(i, 1)),
                   std::to_string(clusters.labels[i]), fd(clusters.rho[i]),
                   fd(clusters.delta[i]), fd(unique_costs[i]),
                   protocol_string(unique_protocols[i])});
    write_file(ctx, staging, "embedding.csv", csv.str());

    const Eigen::MatrixXd hamming = hamming_matrix(unique_protocols);
    std::vector<int> singletons;
    const Eigen::MatrixXd inter =
        mean_intercluster_distance(clusters, hamming, &singletons);
    io::CsvWriter icsv({"cluster_a", "cluster_b", "mean_hamming"});
    for (int a = 0; a < inter.rows(); ++a)
      for (int b = 0; b < inter.cols(); ++b)
        icsv.add_row({std::to_string(a), std::to_string(b), fd(inter(a, b))});
    write_file(ctx, staging, "intercluster.csv", icsv.str());

    json ej{{"n_points", unique_protocols.size()},
            {"attempted_runs", attempted},
            {"kl", emb.kl},
            {"unconverged_rows", emb.unconverged_rows},
            {"degenerate", emb.degenerate},
            {"n_clusters", clusters.n_clusters()},
            {"singleton_clusters", singletons},
            {"dc", clusters.dc},
            {"tsne",
             {{"perplexity", ec.perplexity},
              {"iterations", ec.iterations},
              {"learning_rate", ec.learning_rate},
              {"exaggeration", ec.exaggeration},
              {"exaggeration_epochs", ec.exaggeration_epochs},
              {"bh_angle", ec.bh_angle},
              {"seed", ec.seed}}}};
    write_file(ctx, staging, "embedding.json", ej.dump(2) + "\n");
  }

  if (an.complexity) {
    const ComplexityEstimate est = estimate_complexity(
        eval, k, an.complexity_runs, derive_seed(cfg.seed, label + "/complexity"), brute);
    json cj{{"mean_n_eval", est.mean_n_eval},
            {"sem_n_eval", est.sem_n_eval},
            {"p_opt", est.p_opt},
            {"sem_p_opt", est.sem_p_opt},
            {"complexity", est.complexity},
            {"sem_complexity",
             std::isnan(est.sem_complexity) ? json(nullptr) : json(est.sem_complexity)},
            {"n_runs", est.n_runs},
            {"n_hits", est.n_hits},
            {"censored", est.censored},
            {"degenerate_optimum", est.degenerate_optimum}};
    write_file(ctx, staging, "complexity.json", cj.dump(2) + "\n");
  }

  write_file(ctx, staging, "cell_info.json", info.dump(2) + "\n");
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config) {
  {
    const ParseResult check = parse_config(serialize_config(config));
    if (!check.ok()) {
      std::string msg = "invalid experiment config:";
      for (const auto& e : check.errors) msg += "\n  " + e;
      throw std::invalid_argument(msg);
    }
  }

  ExperimentResult result;
  result.dir = fs::path(config.output_dir);
  fs::create_directories(result.dir / "cells");
  io::write_text_atomic(result.dir / "config.txt", serialize_config(config));

  std::vector<CellKey> keys;
  for (double t : config.sweep.t_values)
    for (int nt : config.sweep.nt_values)
      for (int k : config.sweep.k_values) keys.push_back({t, nt, k});

  result.cells.resize(keys.size());
  parallel_for(keys.size(), config.threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      CellContext ctx{&config, keys[i], result.dir / "cells" / keys[i].dir_name(), {}};
      CellOutcome& outcome = result.cells[i];
      outcome.key = keys[i];
      const auto t0 = std::chrono::steady_clock::now();
      try {
        if (fs::exists(ctx.dir / "cell_info.json")) {
          // resumable sweeps: a finished cell is left untouched
          for (const auto& entry : fs::directory_iterator(ctx.dir))
            outcome.files.push_back(
                (fs::path("cells") / keys[i].dir_name() / entry.path().filename())
                    .string());
          std::sort(outcome.files.begin(), outcome.files.end());
        } else {
          const fs::path staging = ctx.dir.string() + ".partial";
          fs::remove_all(staging);
          fs::create_directories(staging);
          run_cell(ctx, staging);
          fs::remove_all(ctx.dir);
          fs::rename(staging, ctx.dir);
          outcome.files = ctx.files;
          std::sort(outcome.files.begin(), outcome.files.end());
        }
      } catch (const std::exception& e) {
        outcome.ok = false;
        outcome.error = e.what();
      }
      outcome.wall_seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
  });

  result.total_failure =
      !result.cells.empty() &&
      std::all_of(result.cells.begin(), result.cells.end(),
                  [](const CellOutcome& c) { return !c.ok; });

  json manifest;
  manifest["version"] = kVersion;
  manifest["seed"] = config.seed;
  manifest["config_file"] = "config.txt";
  manifest["seed_labels"] = {"<cell>/sample", "<cell>/split", "<cell>/tsne",
                             "<cell>/embed", "<cell>/complexity"};
  json cells = json::array();
  for (const auto& outcome : result.cells) {
    json c{{"label", outcome.key.label()},
           {"T", outcome.key.duration},
           {"N_T", outcome.key.n_bangs},
           {"k", outcome.key.flip_order},
           {"ok", outcome.ok},
           {"wall_seconds", outcome.wall_seconds}};
    if (!outcome.ok) c["error"] = outcome.error;
    json files = json::array();
    for (const auto& f : outcome.files)
      files.push_back({{"path", f}, {"fnv1a64", io::file_hash_hex(result.dir / f)}});
    c["files"] = std::move(files);
    cells.push_back(std::move(c));
  }
  manifest["cells"] = std::move(cells);
  io::write_text_atomic(result.dir / "manifest.json", manifest.dump(2) + "\n");
  return result;
}

bool plot_kind_from_string(const std::string& s, PlotKind& out) {
  if (s == "phase_diagram") out = PlotKind::phase_diagram;
  else if (s == "dos_excitations") out = PlotKind::dos_excitations;
  else if (s == "hamming_hist") out = PlotKind::hamming_hist;
  else if (s == "coupling_maps") out = PlotKind::coupling_maps;
  else if (s == "complexity_scaling") out = PlotKind::complexity_scaling;
  else if (s == "embedding_map") out = PlotKind::embedding_map;
  else return false;
  return true;
}

std::string to_string(PlotKind kind) {
  switch (kind) {
    case PlotKind::phase_diagram: return "phase_diagram";
    case PlotKind::dos_excitations: return "dos_excitations";
    case PlotKind::hamming_hist: return "hamming_hist";
    case PlotKind::coupling_maps: return "coupling_maps";
    case PlotKind::complexity_scaling: return "complexity_scaling";
    case PlotKind::embedding_map: return "embedding_map";
  }
  return "?";
}

namespace {

struct CellFiles {
  json info;
  fs::path dir;
};

std::vector<CellFiles> sorted_cells(const fs::path& run_dir) {
  std::vector<CellFiles> cells;
  const fs::path root = run_dir / "cells";
  if (!fs::exists(root)) return cells;
  for (const auto& entry : fs::directory_iterator(root)) {
    const fs::path info_path = entry.path() / "cell_info.json";
    if (!fs::exists(info_path)) continue;
    cells.push_back({json::parse(io::read_text(info_path)), entry.path()});
  }
  std::sort(cells.begin(), cells.end(), [](const CellFiles& a, const CellFiles& b) {
    const auto key = [](const json& j) {
      return std::tuple<int, int, double>{j.at("k").get<int>(), j.at("N_T").get<int>(),
                                          j.at("T").get<double>()};
    };
    return key(a.info) < key(b.info);
  });
  return cells;
}

[[noreturn]] void missing_upstream(PlotKind kind, const std::string& toggle) {
  throw std::runtime_error("plot kind '" + to_string(kind) +
                           "' has no upstream results; enable the analysis toggle '" +
                           toggle + "' and re-run");
}

}  // namespace

std::filesystem::path emit_plot_data(const std::filesystem::path& run_dir,
                                     PlotKind kind) {
  const std::vector<CellFiles> cells = sorted_cells(run_dir);
  const fs::path out_dir = run_dir / "plots";
  const fs::path out = out_dir / (to_string(kind) + ".csv");
  bool found = false;

  auto cell_t = [](const CellFiles& c) { return io::format_double(c.info.at("T").get<double>()); };
  auto cell_nt = [](const CellFiles& c) { return std::to_string(c.info.at("N_T").get<int>()); };
  auto cell_k = [](const CellFiles& c) { return std::to_string(c.info.at("k").get<int>()); };

  switch (kind) {
    case PlotKind::phase_diagram: {
      io::CsvWriter csv({"T", "k", "q", "f", "best_fidelity", "M", "M_star"});
      for (const auto& c : cells) {
        const fs::path p = c.dir / "stats.json";
        if (!fs::exists(p)) continue;
        found = true;
        const json s = json::parse(io::read_text(p));
        csv.add_row({cell_t(c), cell_k(c), fd(s.at("q").get<double>()),
                     fd(s.at("f").get<double>()),
                     fd(s.at("best_fidelity").get<double>()),
                     std::to_string(s.at("M").get<int>()),
                     std::to_string(s.at("M_star").get<int>())});
      }
      if (!found) missing_upstream(kind, "order_parameters");
      io::write_text_atomic(out, csv.str());
      break;
    }
    case PlotKind::hamming_hist: {
      io::CsvWriter csv({"T", "N_T", "k", "bin_lo", "bin_hi", "density", "count"});
      for (const auto& c : cells) {
        const fs::path p = c.dir / "hamming_hist.csv";
        if (!fs::exists(p)) continue;
        found = true;
        const io::CsvTable t = io::read_csv(p);
        const int lo = t.column("bin_lo"), hi = t.column("bin_hi"),
                  de = t.column("density"), cn = t.column("count");
        for (const auto& row : t.rows)
          csv.add_row({cell_t(c), cell_nt(c), cell_k(c), row[lo], row[hi], row[de],
                       row[cn]});
      }
      if (!found) missing_upstream(kind, "order_parameters");
      io::write_text_atomic(out, csv.str());
      break;
    }
    case PlotKind::dos_excitations: {
      io::CsvWriter csv({"T", "N_T", "series", "bin_lo", "bin_hi", "density", "count",
                         "flip_order", "m_h", "m_h_field", "cost", "delta_cost"});
      for (const auto& c : cells) {
        const fs::path pd = c.dir / "dos.csv";
        const fs::path pe = c.dir / "excitations.csv";
        if (!fs::exists(pd) || !fs::exists(pe)) continue;
        found = true;
        const io::CsvTable td = io::read_csv(pd);
        const int lo = td.column("bin_lo"), hi = td.column("bin_hi"),
                  de = td.column("density"), cn = td.column("count");
        for (const auto& row : td.rows)
          csv.add_row({cell_t(c), cell_nt(c), "dos", row[lo], row[hi], row[de], row[cn],
                       "", "", "", "", ""});
        const io::CsvTable te = io::read_csv(pe);
        const int fo = te.column("flip_order"), mh = te.column("m_h"),
                  mf = te.column("m_h_field"), co = te.column("cost"),
                  dc = te.column("delta_cost");
        for (const auto& row : te.rows)
          csv.add_row({cell_t(c), cell_nt(c), "excitation", "", "", "", "", row[fo],
                       row[mh], row[mf], row[co], row[dc]});
      }
      if (!found) missing_upstream(kind, "dos");
      io::write_text_atomic(out, csv.str());
      break;
    }
    case PlotKind::coupling_maps: {
      io::CsvWriter csv({"T", "N_T", "order", "i", "j", "k", "value"});
      for (const auto& c : cells) {
        const fs::path p = c.dir / "couplings.json";
        if (!fs::exists(p)) continue;
        found = true;
        const json cj = json::parse(io::read_text(p));
        csv.add_row({cell_t(c), cell_nt(c), "0", "", "", "",
                     fd(cj.at("C0").get<double>())});
        const auto g = cj.at("G").get<std::vector<double>>();
        for (std::size_t j = 0; j < g.size(); ++j)
          csv.add_row({cell_t(c), cell_nt(c), "1", std::to_string(j), "", "", fd(g[j])});
        for (const auto& e : cj.at("J"))
          csv.add_row({cell_t(c), cell_nt(c), "2", std::to_string(e.at("i").get<int>()),
                       std::to_string(e.at("j").get<int>()), "",
                       fd(e.at("value").get<double>())});
        for (const auto& e : cj.at("K"))
          csv.add_row({cell_t(c), cell_nt(c), "3", std::to_string(e.at("i").get<int>()),
                       std::to_string(e.at("j").get<int>()),
                       std::to_string(e.at("k").get<int>()),
                       fd(e.at("value").get<double>())});
      }
      if (!found) missing_upstream(kind, "couplings");
      io::write_text_atomic(out, csv.str());
      break;
    }
    case PlotKind::complexity_scaling: {
      io::CsvWriter csv({"N_T", "T", "k", "mean_n_eval", "p_opt", "complexity",
                         "stderr"});
      for (const auto& c : cells) {
        const fs::path p = c.dir / "complexity.json";
        if (!fs::exists(p)) continue;
        found = true;
        const json s = json::parse(io::read_text(p));
        const json& sem = s.at("sem_complexity");
        csv.add_row({cell_nt(c), cell_t(c), cell_k(c),
                     fd(s.at("mean_n_eval").get<double>()),
                     fd(s.at("p_opt").get<double>()),
                     fd(s.at("complexity").get<double>()),
                     sem.is_null() ? "nan" : fd(sem.get<double>())});
      }
      if (!found) missing_upstream(kind, "complexity");
      io::write_text_atomic(out, csv.str());
      break;
    }
    case PlotKind::embedding_map: {
      io::CsvWriter csv({"T", "N_T", "k", "index", "x", "y", "cluster", "rho", "delta",
                         "cost"});
      for (const auto& c : cells) {
        const fs::path p = c.dir / "embedding.csv";
        if (!fs::exists(p)) continue;
        found = true;
        const io::CsvTable t = io::read_csv(p);
        const int ix = t.column("index"), x = t.column("x"), y = t.column("y"),
                  cl = t.column("cluster"), rho = t.column("rho"),
                  de = t.column("delta"), co = t.column("cost");
        for (const auto& row : t.rows)
          csv.add_row({cell_t(c), cell_nt(c), cell_k(c), row[ix], row[x], row[y],
                       row[cl], row[rho], row[de], row[co]});
      }
      if (!found) missing_upstream(kind, "embedding");
      io::write_text_atomic(out, csv.str());
      break;
    }
  }
  return out;
}

}  // namespace qcland
