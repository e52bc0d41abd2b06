#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "tensorclust/config.hpp"
#include "tensorclust/io.hpp"
#include "tensorclust/postprocess.hpp"
#include "tensorclust/sampler.hpp"
#include "tensorclust/simbench.hpp"
#include "tensorclust/tensor.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace tensorclust;

namespace {

std::string join(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

void ensure_out_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::invalid_argument(dir + ": cannot create output directory: " + ec.message());
}

KeyValueConfig load_config(const std::string& path) {
  return path.empty() ? KeyValueConfig::parse("", "<defaults>") : KeyValueConfig::parse_file(path);
}

// ---- simulate ----------------------------------------------------------

struct SimulateArgs {
  int design = 1;
  std::uint64_t seed = 0;
  std::string out;
};

void run_simulate(const SimulateArgs& args) {
  const DesignSpec spec = DesignSpec::design(args.design);
  const std::vector<CountTensor> data = generate_design(spec, args.seed);
  ensure_out_dir(args.out);
  write_dataset(join(args.out, "dataset.json"), data);
  write_truth(join(args.out, "truth.json"), spec.truth());
  std::string echo = seed_comment(args.seed);
  echo += "simulate.design = " + std::to_string(args.design) + "\n";
  write_text_file(join(args.out, "config_echo.txt"), echo);
  std::cout << "simulated design " << args.design << ": " << data.size() << " units of "
            << spec.dims.p1 << "x" << spec.dims.p2 << "x" << spec.dims.p3 << " counts -> "
            << args.out << "\n";
}

// ---- fit ---------------------------------------------------------------

struct FitArgs {
  std::string data;
  std::string config;
  std::uint64_t seed = 0;
  std::string out;
  std::array<std::string, 3> adjacency;  // optional per-direction override files
};

MixingMeasure occupied_mixing(const DirectionState& d, int direction) {
  MixingMeasure g;
  g.direction = direction;
  const int t = d.occupied();
  double total = 0.0;
  for (int j = 0; j < t; ++j) total += d.weights[j];
  for (int j = 0; j < t; ++j) {
    g.weights.push_back(d.weights[j] / total);
    g.atoms.push_back(d.effects[static_cast<std::size_t>(j)]);
  }
  g.validate();
  return g;
}

void write_estimates_csv(const std::string& path, const std::array<MixingMeasure, 3>& mixing) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument(path + ": cannot open for writing");
  out << "direction,cluster,weight,bin,log_effect,effect\n";
  for (int e = 0; e < 3; ++e) {
    const MixingMeasure& g = mixing[static_cast<std::size_t>(e)];
    for (std::size_t j = 0; j < g.atoms.size(); ++j) {
      for (Eigen::Index q = 0; q < g.atoms[j].size(); ++q) {
        char buf[96];
        std::snprintf(buf, sizeof(buf), "%s,%zu,%.10g,%ld,%.10g,%.10g",
                      direction_name(e + 1), j + 1, g.weights[j], static_cast<long>(q + 1),
                      g.atoms[j][q], std::exp(g.atoms[j][q]));
        out << buf << '\n';
      }
    }
  }
}

void run_fit(const FitArgs& args) {
  SamplerConfig cfg;
  const KeyValueConfig kv = load_config(args.config);
  apply_sampler_config(kv, cfg);
  kv.require_all_consumed("sampler");
  cfg.seed = args.seed;

  std::string echo = seed_comment(args.seed);
  for (int e = 0; e < 3; ++e) {
    const std::string& path = args.adjacency[static_cast<std::size_t>(e)];
    if (path.empty()) continue;
    cfg.adjacency[static_cast<std::size_t>(e)] = read_adjacency(path);
    echo += std::string("# adjacency.") + direction_name(e + 1) + " = adjacency_" +
            direction_name(e + 1) + ".json\n";
  }
  echo += render_sampler_config(cfg);

  const std::vector<CountTensor> data = read_dataset(args.data);
  ensure_out_dir(args.out);
  for (int e = 0; e < 3; ++e) {
    if (!args.adjacency[static_cast<std::size_t>(e)].empty()) {
      write_adjacency(join(args.out, std::string("adjacency_") + direction_name(e + 1) + ".json"),
                      *cfg.adjacency[static_cast<std::size_t>(e)]);
    }
  }

  const auto t0 = std::chrono::steady_clock::now();
  const ChainRecord rec = run_chain(data, cfg);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  const auto kept = rec.kept();
  FitLabels fit;
  for (const CountTensor& t : data) fit.unit_ids.push_back(t.unit_id());
  std::array<MixingMeasure, 3> mixing;
  std::array<KPosterior, 3> ks;
  json summary;
  summary["n_units"] = data.size();
  summary["dims"] = {data.front().dims().p1, data.front().dims().p2, data.front().dims().p3};
  summary["n_iter"] = rec.n_iter;
  summary["thin"] = rec.thin;
  summary["burn_in"] = rec.burn_in;
  summary["seed"] = rec.seed;
  summary["kept_samples"] = kept.size();
  summary["runtime_seconds"] = seconds;
  summary["acceptance_rates"] = rec.acceptance_rates;
  double lp_mean = 0.0;
  for (const ModelState& s : kept) lp_mean += s.log_posterior;
  summary["mean_log_posterior"] = lp_mean / static_cast<double>(kept.size());

  for (int e = 0; e < 3; ++e) {
    std::vector<LabelVector> samples;
    samples.reserve(kept.size());
    for (const ModelState& s : kept) {
      samples.push_back(LabelVector{e + 1, s.dir[static_cast<std::size_t>(e)].labels});
    }
    const DahlResult dahl = dahl_configuration(samples);
    fit.labels[static_cast<std::size_t>(e)] = dahl.labels;
    fit.chosen_iteration[static_cast<std::size_t>(e)] = dahl.chosen_iteration;
    mixing[static_cast<std::size_t>(e)] = occupied_mixing(
        kept[dahl.chosen_iteration - 1].dir[static_cast<std::size_t>(e)], e + 1);
    ks[static_cast<std::size_t>(e)] = cluster_number_posterior(rec, e + 1);
    write_matrix_csv(join(args.out, std::string("mbar_") + direction_name(e + 1) + ".csv"),
                     mean_coclustering(samples));
    json dj;
    dj["k_mode"] = ks[static_cast<std::size_t>(e)].mode;
    dj["k_dahl"] = dahl.labels.cluster_count();
    dj["chosen_iteration"] = dahl.chosen_iteration;
    summary[direction_name(e + 1)] = std::move(dj);
  }

  write_chain(join(args.out, "chain.jsonl"), rec, echo);
  write_labels(join(args.out, "labels.json"), fit);
  write_mixing(join(args.out, "mixing.json"), mixing);
  write_k_histograms(join(args.out, "k_histogram.json"), ks);
  write_estimates_csv(join(args.out, "estimates.csv"), mixing);
  write_text_file(join(args.out, "fit_summary.json"), summary.dump(2) + "\n");
  write_text_file(join(args.out, "config_echo.txt"), echo);

  std::cout << "fit " << data.size() << " units, kept " << kept.size() << " samples in "
            << seconds << "s; K mode (angle, distance, quarter) = (" << ks[0].mode << ", "
            << ks[1].mode << ", " << ks[2].mode << ") -> " << args.out << "\n";
}

// ---- evaluate ----------------------------------------------------------

struct EvaluateArgs {
  std::string fit;
  std::string truth;
  std::string against;
  std::string config;
  std::string out;
};

void run_evaluate(const EvaluateArgs& args) {
  if (args.truth.empty() == args.against.empty()) {
    throw std::invalid_argument("evaluate needs exactly one of --truth or --against");
  }
  const KeyValueConfig kv = load_config(args.config);
  const GroundNorm norm = ground_norm_from_config(kv);
  kv.require_all_consumed("evaluate");

  const FitLabels fit = read_labels(join(args.fit, "labels.json"));
  std::optional<std::array<MixingMeasure, 3>> mixing;
  if (fs::exists(join(args.fit, "mixing.json"))) {
    mixing = read_mixing(join(args.fit, "mixing.json"));
  }

  std::array<LabelVector, 3> ref_labels;
  std::optional<std::array<MixingMeasure, 3>> ref_mixing;
  if (!args.truth.empty()) {
    DesignTruth truth = read_truth(args.truth);
    ref_labels = std::move(truth.labels);
    ref_mixing = std::move(truth.mixing);
  } else {
    FitLabels other = read_labels(join(args.against, "labels.json"));
    ref_labels = std::move(other.labels);
    if (fs::exists(join(args.against, "mixing.json"))) {
      ref_mixing = read_mixing(join(args.against, "mixing.json"));
    }
  }

  EvalReport report;
  for (int e = 0; e < 3; ++e) {
    EvalDirection& d = report.dir[static_cast<std::size_t>(e)];
    d.rand_index = rand_index(fit.labels[static_cast<std::size_t>(e)],
                              ref_labels[static_cast<std::size_t>(e)]);
    if (mixing && ref_mixing) {
      d.wasserstein_to_truth = wasserstein((*mixing)[static_cast<std::size_t>(e)],
                                           (*ref_mixing)[static_cast<std::size_t>(e)], norm);
    }
  }
  // K statistics come from the chain when available; a baseline directory has
  // no posterior, so its point partition stands in with a one-bar histogram.
  if (fs::exists(join(args.fit, "k_histogram.json"))) {
    const auto ks = read_k_histograms(join(args.fit, "k_histogram.json"));
    for (int e = 0; e < 3; ++e) {
      report.dir[static_cast<std::size_t>(e)].k_mode = ks[static_cast<std::size_t>(e)].mode;
      report.dir[static_cast<std::size_t>(e)].k_histogram =
          ks[static_cast<std::size_t>(e)].histogram;
    }
  } else {
    for (int e = 0; e < 3; ++e) {
      const int k = fit.labels[static_cast<std::size_t>(e)].cluster_count();
      report.dir[static_cast<std::size_t>(e)].k_mode = k;
      report.dir[static_cast<std::size_t>(e)].k_histogram = {{k, 1.0}};
    }
  }

  ensure_out_dir(args.out);
  write_eval_report_json(join(args.out, "report.json"), report);
  write_eval_report_csv(join(args.out, "report.csv"), report);
  write_text_file(join(args.out, "config_echo.txt"), render_evaluate_config(norm));
  for (int e = 0; e < 3; ++e) {
    const EvalDirection& d = report.dir[static_cast<std::size_t>(e)];
    std::cout << direction_name(e + 1) << ": rand index " << d.rand_index << ", K mode "
              << d.k_mode;
    if (d.wasserstein_to_truth) std::cout << ", Wasserstein " << *d.wasserstein_to_truth;
    std::cout << "\n";
  }
}

// ---- ingest ------------------------------------------------------------

struct IngestArgs {
  std::string csv;
  std::string config;
  std::string out;
};

void run_ingest(const IngestArgs& args) {
  PartitionScheme scheme;
  IngestFilters filters;
  ColumnMap columns;
  const KeyValueConfig kv = load_config(args.config);
  apply_scheme_config(kv, scheme);
  apply_ingest_config(kv, filters);
  apply_column_config(kv, columns);
  kv.require_all_consumed("ingest");
  scheme.validate();

  std::ifstream in(args.csv);
  if (!in) throw std::invalid_argument(args.csv + ": cannot open for reading");
  const CsvReadResult rows = read_shot_csv(in, columns);
  for (const std::string& msg : rows.messages) std::cerr << "warning: " << msg << "\n";
  if (rows.parse_errors > static_cast<long>(rows.messages.size())) {
    std::cerr << "warning: " << (rows.parse_errors - static_cast<long>(rows.messages.size()))
              << " further malformed rows\n";
  }

  const IngestResult result = build_tensors(rows.events, scheme, filters, rows.parse_errors);
  if (result.tensors.empty()) {
    throw std::runtime_error("no player passed the minimum-attempts filter; nothing to write");
  }
  ensure_out_dir(args.out);
  write_dataset(join(args.out, "dataset.json"), result.tensors);
  write_rejection_report(join(args.out, "rejections.json"), result.report);
  write_text_file(join(args.out, "config_echo.txt"),
                  render_ingest_config(scheme, filters, columns));
  std::cout << "ingested " << result.report.accepted << " of " << result.report.total
            << " events into " << result.tensors.size() << " player tensors -> " << args.out
            << "\n";
}

// ---- baseline ----------------------------------------------------------

struct BaselineArgs {
  std::string data;
  std::string method;  // kmeans or dbscan
  std::vector<int> k;  // kmeans: one value for all directions or one per direction
  double eps = 50.0;
  int min_pts = 5;
  std::uint64_t seed = 0;
  std::string out;
};

void run_baseline(const BaselineArgs& args) {
  const std::vector<CountTensor> data = read_dataset(args.data);
  std::array<int, 3> k_per_dir{};
  if (args.method == "kmeans") {
    if (args.k.size() == 1) {
      k_per_dir = {args.k[0], args.k[0], args.k[0]};
    } else if (args.k.size() == 3) {
      k_per_dir = {args.k[0], args.k[1], args.k[2]};
    } else {
      throw std::invalid_argument("baseline kmeans needs --k with one or three values");
    }
  } else if (args.method != "dbscan") {
    throw std::invalid_argument("baseline --method must be kmeans or dbscan");
  }

  FitLabels fit;
  for (const CountTensor& t : data) fit.unit_ids.push_back(t.unit_id());
  for (int e = 0; e < 3; ++e) {
    std::vector<Eigen::VectorXd> vectors;
    vectors.reserve(data.size());
    for (const CountTensor& t : data) vectors.push_back(marginalize(t, e + 1));
    if (args.method == "kmeans") {
      fit.labels[static_cast<std::size_t>(e)] =
          kmeans(vectors, k_per_dir[static_cast<std::size_t>(e)],
                 derive_seed(args.seed, static_cast<std::uint64_t>(e)), 20, e + 1);
    } else {
      fit.labels[static_cast<std::size_t>(e)] = dbscan(vectors, args.eps, args.min_pts, e + 1);
    }
    fit.chosen_iteration[static_cast<std::size_t>(e)] = 0;  // not a posterior sample
  }

  ensure_out_dir(args.out);
  write_labels(join(args.out, "labels.json"), fit);
  std::string echo = seed_comment(args.seed);
  echo += "baseline.method = " + args.method + "\n";
  if (args.method == "kmeans") {
    for (int e = 0; e < 3; ++e) {
      echo += std::string("baseline.k.") + direction_name(e + 1) + " = " +
              std::to_string(k_per_dir[static_cast<std::size_t>(e)]) + "\n";
    }
  } else {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "baseline.eps = %.17g\n", args.eps);
    echo += buf;
    echo += "baseline.min_pts = " + std::to_string(args.min_pts) + "\n";
  }
  write_text_file(join(args.out, "config_echo.txt"), echo);
  std::cout << args.method << " clusters (angle, distance, quarter) = ("
            << fit.labels[0].cluster_count() << ", " << fit.labels[1].cluster_count() << ", "
            << fit.labels[2].cluster_count() << ") -> " << args.out << "\n";
}

// ---- replicates --------------------------------------------------------

struct ReplicatesArgs {
  int design = 1;
  int n_rep = 10;
  std::string config;
  std::uint64_t seed = 0;
  int threads = 1;
  std::string out;
};

void run_replicates_cmd(const ReplicatesArgs& args) {
  SamplerConfig cfg;
  const KeyValueConfig kv = load_config(args.config);
  apply_sampler_config(kv, cfg);
  kv.require_all_consumed("sampler");

  const DesignSpec spec = DesignSpec::design(args.design);
  const ReplicateTable table = run_replicates(spec, args.n_rep, cfg, args.seed, args.threads);

  ensure_out_dir(args.out);
  write_replicate_table_csv(join(args.out, "summary.csv"), table);
  write_replicate_table_json(join(args.out, "summary.json"), table);
  write_replicate_rows_jsonl(join(args.out, "replicates.jsonl"), table);
  std::string echo = seed_comment(args.seed);
  echo += "# design = " + std::to_string(args.design) + "\n";
  echo += "# n_rep = " + std::to_string(args.n_rep) + "\n";
  echo += render_sampler_config(cfg);
  write_text_file(join(args.out, "config_echo.txt"), echo);

  std::cout << "design " << args.design << ", " << args.n_rep << " replicates\n";
  std::cout << "method            direction  mean_ri  sd_ri   pct_correct_k\n";
  for (const SummaryRow& row : table.summary) {
    char buf[128];
    std::snprintf(buf, sizeof(buf), "%-17s %-9s  %.4f   %.4f  %.2f", row.method.c_str(),
                  direction_name(row.direction), row.mean_ri, row.sd_ri, row.pct_correct_k);
    std::cout << buf << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian multidimensional clustering of count-valued tensors"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "0.1.0");

  SimulateArgs sim;
  auto* c_sim = app.add_subcommand("simulate", "Generate a synthetic benchmark dataset");
  c_sim->add_option("--design", sim.design, "Benchmark design id (1 or 2)")
      ->check(CLI::IsMember({1, 2}))
      ->required();
  c_sim->add_option("--seed", sim.seed, "RNG seed")->required();
  c_sim->add_option("--out", sim.out, "Output directory")->required();
  c_sim->callback([&] { run_simulate(sim); });

  FitArgs fit;
  auto* c_fit = app.add_subcommand("fit", "Run the sampler on a dataset");
  c_fit->add_option("--data", fit.data, "Dataset JSON file")->required();
  c_fit->add_option("--config", fit.config, "Sampler key=value config file");
  c_fit->add_option("--seed", fit.seed, "RNG seed")->required();
  c_fit->add_option("--out", fit.out, "Output directory")->required();
  c_fit->add_option("--adjacency-angle", fit.adjacency[0], "Adjacency JSON for the angle bins");
  c_fit->add_option("--adjacency-distance", fit.adjacency[1],
                    "Adjacency JSON for the distance bins");
  c_fit->add_option("--adjacency-quarter", fit.adjacency[2],
                    "Adjacency JSON for the quarter bins");
  c_fit->callback([&] { run_fit(fit); });

  EvaluateArgs eval;
  auto* c_eval = app.add_subcommand("evaluate", "Score a fit against truth or another fit");
  c_eval->add_option("--fit", eval.fit, "Fit (or baseline) output directory")->required();
  c_eval->add_option("--truth", eval.truth, "Truth JSON from simulate");
  c_eval->add_option("--against", eval.against, "Second fit directory to compare with");
  c_eval->add_option("--config", eval.config, "Evaluation key=value config file");
  c_eval->add_option("--out", eval.out, "Output directory")->required();
  c_eval->callback([&] { run_evaluate(eval); });

  IngestArgs ing;
  auto* c_ing = app.add_subcommand("ingest", "Bin a shot-event CSV into count tensors");
  c_ing->add_option("--csv", ing.csv, "Shot-event CSV file")->required();
  c_ing->add_option("--config", ing.config, "Ingest key=value config file");
  c_ing->add_option("--out", ing.out, "Output directory")->required();
  c_ing->callback([&] { run_ingest(ing); });

  BaselineArgs base;
  auto* c_base = app.add_subcommand("baseline", "Cluster marginal count vectors directly");
  c_base->add_option("--data", base.data, "Dataset JSON file")->required();
  c_base->add_option("--method", base.method, "kmeans or dbscan")
      ->check(CLI::IsMember({"kmeans", "dbscan"}))
      ->required();
  c_base->add_option("--k", base.k, "K-means cluster count (one value or one per direction)")
      ->expected(1, 3);
  c_base->add_option("--eps", base.eps, "Density-clustering reachability radius");
  c_base->add_option("--min-pts", base.min_pts, "Density-clustering core threshold");
  c_base->add_option("--seed", base.seed, "RNG seed")->required();
  c_base->add_option("--out", base.out, "Output directory")->required();
  c_base->callback([&] { run_baseline(base); });

  ReplicatesArgs rep;
  auto* c_rep = app.add_subcommand("replicates", "Simulation study: model vs baselines");
  c_rep->add_option("--design", rep.design, "Benchmark design id (1 or 2)")
      ->check(CLI::IsMember({1, 2}))
      ->required();
  c_rep->add_option("--n-rep", rep.n_rep, "Number of replicates")->required();
  c_rep->add_option("--config", rep.config, "Sampler key=value config file");
  c_rep->add_option("--seed", rep.seed, "RNG seed")->required();
  c_rep->add_option("--threads", rep.threads, "Worker threads (result is thread-invariant)");
  c_rep->add_option("--out", rep.out, "Output directory")->required();
  c_rep->callback([&] { run_replicates_cmd(rep); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  } catch (const std::invalid_argument& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 1;
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 2;
  }
  return 0;
}
