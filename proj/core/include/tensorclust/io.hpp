#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tensorclust/ingest.hpp"
#include "tensorclust/postprocess.hpp"
#include "tensorclust/sampler.hpp"
#include "tensorclust/simbench.hpp"
#include "tensorclust/spatial.hpp"
#include "tensorclust/tensor.hpp"

// File formats. Every read validates shape and value ranges and reports the
// offending path in its error. User-facing JSON is 1-based throughout:
// cluster labels, bin indices, adjacency vertex numbers.

namespace tensorclust {

// Dataset: JSON array of {"unit_id", "dims" [p1,p2,p3], "counts" flat
// row-major}.
void write_dataset(const std::string& path, const std::vector<CountTensor>& data);
std::vector<CountTensor> read_dataset(const std::string& path);

// Truth: {"labels": {angle|distance|quarter: [...]}, "mixing": {direction:
// {"weights": [...], "atoms": [[...], ...]}}}.
void write_truth(const std::string& path, const DesignTruth& truth);
DesignTruth read_truth(const std::string& path);

struct FitLabels {
  std::vector<std::string> unit_ids;
  std::array<LabelVector, 3> labels;
  std::array<std::size_t, 3> chosen_iteration{};  // 1-based kept-sample index
};
void write_labels(const std::string& path, const FitLabels& fit);
FitLabels read_labels(const std::string& path);

void write_mixing(const std::string& path, const std::array<MixingMeasure, 3>& mixing);
std::array<MixingMeasure, 3> read_mixing(const std::string& path);

void write_k_histograms(const std::string& path, const std::array<KPosterior, 3>& ks);
std::array<KPosterior, 3> read_k_histograms(const std::string& path);

// Chain: JSON lines; first line is a header with the schedule, seed,
// acceptance rates and the config echo, then one state per kept sample.
void write_chain(const std::string& path, const ChainRecord& rec, const std::string& config_echo);
ChainRecord read_chain(const std::string& path, std::string* config_echo = nullptr);

// Adjacency: {"size": p, "edges": [[i, j], ...]} with 1-based vertices.
void write_adjacency(const std::string& path, const Adjacency& w);
Adjacency read_adjacency(const std::string& path);

void write_rejection_report(const std::string& path, const RejectionReport& report);

struct EvalDirection {
  double rand_index = 0.0;
  int k_mode = 0;
  std::map<int, double> k_histogram;
  std::optional<double> wasserstein_to_truth;
};
struct EvalReport {
  std::array<EvalDirection, 3> dir;
};
void write_eval_report_json(const std::string& path, const EvalReport& report);
void write_eval_report_csv(const std::string& path, const EvalReport& report);

// Plain numeric CSV, one matrix row per line.
void write_matrix_csv(const std::string& path, const Eigen::MatrixXd& m);

void write_replicate_table_csv(const std::string& path, const ReplicateTable& table);
void write_replicate_table_json(const std::string& path, const ReplicateTable& table);
void write_replicate_rows_jsonl(const std::string& path, const ReplicateTable& table);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace tensorclust
