#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "doctest.h"
#include "tensorclust/config.hpp"
#include "tensorclust/io.hpp"
#include "tensorclust/simbench.hpp"

using namespace tensorclust;

namespace {

// Fresh per-test scratch directory under the system temp root.
struct TempDir {
  std::filesystem::path path;
  TempDir() {
    static int counter = 0;
    path = std::filesystem::temp_directory_path() /
           ("tensorclust_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST_SUITE("config_io") {

TEST_CASE("key-value parsing accepts comments and trims whitespace") {
  const KeyValueConfig cfg = KeyValueConfig::parse(
      "# full-line comment\n"
      "\n"
      "  alpha = 1.5  # trailing comment\n"
      "name=hello world\n"
      "flag = true\n");
  CHECK(cfg.has("alpha"));
  CHECK(cfg.get_double("alpha", 0.0) == 1.5);
  CHECK(cfg.get_string("name", "") == "hello world");
  CHECK(cfg.get_bool("flag", false) == true);
  CHECK_FALSE(cfg.has("absent"));
  CHECK(cfg.get_int("absent", 7) == 7);
  CHECK_NOTHROW(cfg.require_all_consumed("test"));
}

TEST_CASE("key-value parse errors carry origin and line") {
  CHECK_THROWS_WITH_AS(KeyValueConfig::parse("novalue\n", "run.cfg"),
                       "run.cfg: line 1: expected key = value", std::invalid_argument);
  CHECK_THROWS_AS(KeyValueConfig::parse("= 3\n"), std::invalid_argument);
  CHECK_THROWS_AS(KeyValueConfig::parse("a =\n"), std::invalid_argument);
  CHECK_THROWS_AS(KeyValueConfig::parse("a = 1\na = 2\n"), std::invalid_argument);
}

TEST_CASE("typed getters reject unparseable values") {
  const KeyValueConfig cfg = KeyValueConfig::parse(
      "d = 1.5x\ni = 2.5\nb = maybe\nhuge = 99999999999999999999\n", "o");
  CHECK_THROWS_AS(cfg.get_double("d", 0.0), std::invalid_argument);
  CHECK_THROWS_AS(cfg.get_int("i", 0), std::invalid_argument);
  CHECK_THROWS_AS(cfg.get_bool("b", false), std::invalid_argument);
  CHECK_THROWS_AS(cfg.get_int("huge", 0), std::invalid_argument);
}

TEST_CASE("unused keys are rejected by name") {
  const KeyValueConfig cfg = KeyValueConfig::parse("good = 1\ntypo_key = 2\n", "o");
  (void)cfg.get_int("good", 0);
  try {
    cfg.require_all_consumed("sampler config");
    FAIL("expected a throw");
  } catch (const std::invalid_argument& ex) {
    const std::string msg = ex.what();
    CHECK(msg.find("typo_key") != std::string::npos);
    CHECK(msg.find("sampler config") != std::string::npos);
    CHECK(msg.find("good") == std::string::npos);
  }
}

TEST_CASE("sampler config render-parse round trip is exact") {
  SamplerConfig cfg;
  cfg.n_iter = 4321;
  cfg.thin = 3;
  cfg.burn_in = 17;
  cfg.mh_step_effects = 0.123456789012345678;
  cfg.mh_step_sigma2 = 1.75;
  cfg.mh_step_rho = 0.089;
  cfg.adapt = false;
  cfg.init_components = 7;
  cfg.init_jitter = 0.0625;
  cfg.prior_only = true;
  cfg.car_form = CarForm::Inverse;
  cfg.sigma2_prior = GammaPrior{2.5, 0.75};
  cfg.mfm[0].dirichlet_gamma = 0.5;
  cfg.mfm[1].nu = 2.0;
  cfg.mfm[2].psi = 1.0 / 3.0;
  cfg.mfm[2].truncation_T = 12;

  const std::string text = render_sampler_config(cfg);
  const KeyValueConfig parsed = KeyValueConfig::parse(text, "echo");
  SamplerConfig got;
  apply_sampler_config(parsed, got);
  CHECK_NOTHROW(parsed.require_all_consumed("sampler config"));

  CHECK(got.n_iter == cfg.n_iter);
  CHECK(got.thin == cfg.thin);
  CHECK(got.burn_in == cfg.burn_in);
  CHECK(got.mh_step_effects == cfg.mh_step_effects);
  CHECK(got.mh_step_sigma2 == cfg.mh_step_sigma2);
  CHECK(got.mh_step_rho == cfg.mh_step_rho);
  CHECK(got.adapt == cfg.adapt);
  CHECK(got.init_components == cfg.init_components);
  CHECK(got.init_jitter == cfg.init_jitter);
  CHECK(got.prior_only == cfg.prior_only);
  CHECK(got.car_form == cfg.car_form);
  CHECK(got.sigma2_prior.a == cfg.sigma2_prior.a);
  CHECK(got.sigma2_prior.b == cfg.sigma2_prior.b);
  for (int e = 0; e < 3; ++e) {
    CHECK(got.mfm[static_cast<std::size_t>(e)].dirichlet_gamma ==
          cfg.mfm[static_cast<std::size_t>(e)].dirichlet_gamma);
    CHECK(got.mfm[static_cast<std::size_t>(e)].nu == cfg.mfm[static_cast<std::size_t>(e)].nu);
    CHECK(got.mfm[static_cast<std::size_t>(e)].psi == cfg.mfm[static_cast<std::size_t>(e)].psi);
    CHECK(got.mfm[static_cast<std::size_t>(e)].truncation_T ==
          cfg.mfm[static_cast<std::size_t>(e)].truncation_T);
  }
}

TEST_CASE("global mfm keys apply to all directions unless overridden") {
  const KeyValueConfig cfg = KeyValueConfig::parse(
      "mfm.gamma = 0.25\n"
      "mfm.psi = 2\n"
      "mfm.distance.gamma = 4\n"
      "mfm.quarter.truncation = 9\n",
      "o");
  SamplerConfig out;
  apply_sampler_config(cfg, out);
  CHECK_NOTHROW(cfg.require_all_consumed("sampler config"));
  CHECK(out.mfm[0].dirichlet_gamma == 0.25);
  CHECK(out.mfm[1].dirichlet_gamma == 4.0);
  CHECK(out.mfm[2].dirichlet_gamma == 0.25);
  for (int e = 0; e < 3; ++e) CHECK(out.mfm[static_cast<std::size_t>(e)].psi == 2.0);
  CHECK(out.mfm[2].truncation_T == 9);
  CHECK(out.mfm[0].truncation_T == 15);
}

TEST_CASE("sampler config rejects invalid enum values") {
  const KeyValueConfig cfg = KeyValueConfig::parse("sampler.car_form = diagonal\n", "o");
  SamplerConfig out;
  CHECK_THROWS_AS(apply_sampler_config(cfg, out), std::invalid_argument);
}

TEST_CASE("ingest config round trip") {
  PartitionScheme scheme;
  scheme.n_angle = 9;
  scheme.radius = 28.5;
  scheme.basket_y = 4.75;
  IngestFilters filters;
  filters.min_attempts = 123;
  ColumnMap columns;
  columns.x = "sx";

  const std::string text = render_ingest_config(scheme, filters, columns);
  const KeyValueConfig parsed = KeyValueConfig::parse(text, "echo");
  PartitionScheme scheme2;
  IngestFilters filters2;
  ColumnMap columns2;
  apply_scheme_config(parsed, scheme2);
  apply_ingest_config(parsed, filters2);
  apply_column_config(parsed, columns2);
  CHECK_NOTHROW(parsed.require_all_consumed("ingest config"));

  CHECK(scheme2.n_angle == 9);
  CHECK(scheme2.n_dist == scheme.n_dist);
  CHECK(scheme2.radius == 28.5);
  CHECK(scheme2.basket_y == 4.75);
  CHECK(filters2.min_attempts == 123);
  CHECK(columns2.x == "sx");
  CHECK(columns2.player_id == "player_id");
}

TEST_CASE("ground norm parsing") {
  CHECK(ground_norm_from_config(KeyValueConfig::parse("")) == GroundNorm::Euclidean);
  CHECK(ground_norm_from_config(KeyValueConfig::parse("evaluate.ground_norm = l1\n")) ==
        GroundNorm::L1);
  CHECK(ground_norm_from_config(KeyValueConfig::parse("evaluate.ground_norm = euclidean\n")) ==
        GroundNorm::Euclidean);
  CHECK_THROWS_AS(
      ground_norm_from_config(KeyValueConfig::parse("evaluate.ground_norm = manhattan\n")),
      std::invalid_argument);
  const std::string echo = render_evaluate_config(GroundNorm::L1);
  CHECK(ground_norm_from_config(KeyValueConfig::parse(echo)) == GroundNorm::L1);
}

TEST_CASE("seed comment stays a comment under the parser") {
  const std::string line = seed_comment(987654321);
  const KeyValueConfig cfg = KeyValueConfig::parse(line + "a = 1\n");
  CHECK(cfg.get_int("a", 0) == 1);
  CHECK(line.find("987654321") != std::string::npos);
  CHECK_NOTHROW(cfg.require_all_consumed("echo"));
}

TEST_CASE("dataset files round trip") {
  TempDir tmp;
  const auto data = generate_design(DesignSpec::design(1), 3);
  const std::string path = tmp.file("dataset.json");
  write_dataset(path, data);
  const auto back = read_dataset(path);
  REQUIRE(back.size() == data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    CHECK(back[i].unit_id() == data[i].unit_id());
    CHECK(back[i].dims() == data[i].dims());
    CHECK(back[i].counts() == data[i].counts());
  }
}

TEST_CASE("truth files round trip") {
  TempDir tmp;
  const DesignTruth truth = DesignSpec::design(2).truth();
  const std::string path = tmp.file("truth.json");
  write_truth(path, truth);
  const DesignTruth back = read_truth(path);
  for (int e = 0; e < 3; ++e) {
    const auto se = static_cast<std::size_t>(e);
    CHECK(back.labels[se].labels == truth.labels[se].labels);
    CHECK(back.labels[se].direction == e + 1);
    REQUIRE(back.mixing[se].weights.size() == truth.mixing[se].weights.size());
    for (std::size_t j = 0; j < truth.mixing[se].weights.size(); ++j) {
      CHECK(back.mixing[se].weights[j] == doctest::Approx(truth.mixing[se].weights[j]).epsilon(1e-12));
      CHECK(back.mixing[se].atoms[j].isApprox(truth.mixing[se].atoms[j], 1e-12));
    }
  }
}

TEST_CASE("label and histogram files round trip") {
  TempDir tmp;
  FitLabels fit;
  fit.unit_ids = {"a", "b", "c", "d"};
  fit.labels[0] = LabelVector{1, {1, 2, 1, 2}};
  fit.labels[1] = LabelVector{2, {1, 1, 1, 1}};
  fit.labels[2] = LabelVector{3, {1, 2, 3, 1}};
  fit.chosen_iteration = {5, 1, 9};
  const std::string lpath = tmp.file("labels.json");
  write_labels(lpath, fit);
  const FitLabels lback = read_labels(lpath);
  CHECK(lback.unit_ids == fit.unit_ids);
  for (int e = 0; e < 3; ++e) {
    CHECK(lback.labels[static_cast<std::size_t>(e)].labels ==
          fit.labels[static_cast<std::size_t>(e)].labels);
    CHECK(lback.chosen_iteration[static_cast<std::size_t>(e)] ==
          fit.chosen_iteration[static_cast<std::size_t>(e)]);
  }

  std::array<KPosterior, 3> ks;
  ks[0] = KPosterior{{{1, 0.25}, {2, 0.75}}, 2};
  ks[1] = KPosterior{{{3, 1.0}}, 3};
  ks[2] = KPosterior{{{1, 0.5}, {4, 0.5}}, 1};
  const std::string kpath = tmp.file("k.json");
  write_k_histograms(kpath, ks);
  const auto kback = read_k_histograms(kpath);
  for (int e = 0; e < 3; ++e) {
    CHECK(kback[static_cast<std::size_t>(e)].mode == ks[static_cast<std::size_t>(e)].mode);
    CHECK(kback[static_cast<std::size_t>(e)].histogram ==
          ks[static_cast<std::size_t>(e)].histogram);
  }
}

TEST_CASE("mixing files round trip") {
  TempDir tmp;
  const DesignTruth truth = DesignSpec::design(1).truth();
  const std::string path = tmp.file("mixing.json");
  write_mixing(path, truth.mixing);
  const auto back = read_mixing(path);
  for (int e = 0; e < 3; ++e) {
    const auto se = static_cast<std::size_t>(e);
    REQUIRE(back[se].atoms.size() == truth.mixing[se].atoms.size());
    CHECK(back[se].direction == e + 1);
    for (std::size_t j = 0; j < back[se].atoms.size(); ++j) {
      CHECK(back[se].atoms[j].isApprox(truth.mixing[se].atoms[j], 1e-12));
    }
  }
}

TEST_CASE("chain files round trip through a real run") {
  TempDir tmp;
  const auto data = generate_design(DesignSpec::design(1), 11);
  SamplerConfig cfg;
  cfg.n_iter = 40;
  cfg.thin = 2;
  cfg.burn_in = 5;
  cfg.seed = 77;
  const ChainRecord rec = run_chain(data, cfg);
  const std::string path = tmp.file("chain.jsonl");
  write_chain(path, rec, render_sampler_config(cfg));

  std::string echo;
  const ChainRecord back = read_chain(path, &echo);
  CHECK(back.seed == rec.seed);
  CHECK(back.n_iter == rec.n_iter);
  CHECK(back.thin == rec.thin);
  CHECK(back.burn_in == rec.burn_in);
  CHECK(back.acceptance_rates == rec.acceptance_rates);
  CHECK(echo == render_sampler_config(cfg));
  REQUIRE(back.samples.size() == rec.samples.size());
  for (std::size_t i = 0; i < rec.samples.size(); ++i) {
    CHECK(back.samples[i].log_posterior ==
          doctest::Approx(rec.samples[i].log_posterior).epsilon(1e-12));
    for (int e = 0; e < 3; ++e) {
      const auto& a = back.samples[i].dir[static_cast<std::size_t>(e)];
      const auto& b = rec.samples[i].dir[static_cast<std::size_t>(e)];
      CHECK(a.labels == b.labels);
      CHECK(a.k == b.k);
      REQUIRE(a.effects.size() == b.effects.size());
      for (std::size_t j = 0; j < b.effects.size(); ++j) {
        CHECK(a.effects[j].isApprox(b.effects[j], 1e-12));
      }
      CHECK(a.weights.isApprox(b.weights, 1e-12));
      CHECK(a.car.sigma2 == doctest::Approx(b.car.sigma2).epsilon(1e-12));
      CHECK(a.car.rho == doctest::Approx(b.car.rho).epsilon(1e-12));
    }
  }
}

TEST_CASE("adjacency files round trip and validate") {
  TempDir tmp;
  const Adjacency w = Adjacency::path(5);
  const std::string path = tmp.file("adj.json");
  write_adjacency(path, w);
  const Adjacency back = read_adjacency(path);
  CHECK(back.size() == 5);
  CHECK(back.matrix() == w.matrix());

  write_text_file(path, "{\"size\": 3, \"edges\": [[1, 4]]}");
  CHECK_THROWS_AS(read_adjacency(path), std::invalid_argument);
  write_text_file(path, "{\"size\": 3, \"edges\": [[2, 2]]}");
  CHECK_THROWS_AS(read_adjacency(path), std::invalid_argument);
}

TEST_CASE("read errors name the offending file") {
  TempDir tmp;
  const std::string path = tmp.file("missing.json");
  try {
    read_dataset(path);
    FAIL("expected a throw");
  } catch (const std::exception& ex) {
    CHECK(std::string(ex.what()).find(path) != std::string::npos);
  }
  const std::string garbled = tmp.file("garbled.json");
  write_text_file(garbled, "{not json");
  try {
    read_labels(garbled);
    FAIL("expected a throw");
  } catch (const std::exception& ex) {
    CHECK(std::string(ex.what()).find(garbled) != std::string::npos);
  }
}

TEST_CASE("eval report files carry one row per direction") {
  TempDir tmp;
  EvalReport report;
  for (int e = 0; e < 3; ++e) {
    report.dir[static_cast<std::size_t>(e)].rand_index = 0.9 + 0.01 * e;
    report.dir[static_cast<std::size_t>(e)].k_mode = e + 1;
    report.dir[static_cast<std::size_t>(e)].k_histogram = {{e + 1, 1.0}};
  }
  report.dir[0].wasserstein_to_truth = 0.125;
  const std::string jpath = tmp.file("report.json");
  const std::string cpath = tmp.file("report.csv");
  write_eval_report_json(jpath, report);
  write_eval_report_csv(cpath, report);

  const std::string csv = read_text_file(cpath);
  CHECK(csv.find("direction,rand_index,k_mode,wasserstein_to_truth") != std::string::npos);
  CHECK(csv.find("angle") != std::string::npos);
  CHECK(csv.find("quarter") != std::string::npos);
  const std::string json = read_text_file(jpath);
  CHECK(json.find("\"rand_index\"") != std::string::npos);
  CHECK(json.find("0.125") != std::string::npos);
}

TEST_CASE("replicate table files are written with summaries") {
  TempDir tmp;
  SamplerConfig cfg;
  cfg.n_iter = 60;
  cfg.thin = 2;
  cfg.burn_in = 10;
  const ReplicateTable table = run_replicates(DesignSpec::design(1), 1, cfg, 5, 1);
  const std::string cpath = tmp.file("summary.csv");
  const std::string jpath = tmp.file("summary.json");
  const std::string rpath = tmp.file("rows.jsonl");
  write_replicate_table_csv(cpath, table);
  write_replicate_table_json(jpath, table);
  write_replicate_rows_jsonl(rpath, table);

  const std::string csv = read_text_file(cpath);
  CHECK(csv.find("method,direction,mean_ri,sd_ri,pct_correct_k") != std::string::npos);
  CHECK(csv.find("proposed") != std::string::npos);
  CHECK(csv.find("dbscan-100") != std::string::npos);
  const std::string rows = read_text_file(rpath);
  CHECK(rows.find("\"replicate\"") != std::string::npos);
}

TEST_CASE("matrix csv uses one line per row") {
  TempDir tmp;
  Eigen::MatrixXd m(2, 3);
  m << 1, 2, 3, 4, 5.5, 6;
  const std::string path = tmp.file("m.csv");
  write_matrix_csv(path, m);
  const std::string text = read_text_file(path);
  CHECK(text == "1,2,3\n4,5.5,6\n");
}

}  // TEST_SUITE
