#include "tensorclust/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace tensorclust {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw std::invalid_argument(path + ": " + what);
}

json parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(path, "cannot open for reading");
  try {
    return json::parse(in);
  } catch (const json::exception& ex) {
    fail(path, std::string("invalid JSON: ") + ex.what());
  }
}

void dump_file(const std::string& path, const json& j, int indent = 2) {
  std::ofstream out(path);
  if (!out) fail(path, "cannot open for writing");
  out << j.dump(indent) << '\n';
  if (!out) fail(path, "write failed");
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.10g", x);
  return buf;
}

json effects_to_json(const std::vector<Eigen::VectorXd>& effects) {
  json arr = json::array();
  for (const auto& g : effects) {
    json row = json::array();
    for (Eigen::Index q = 0; q < g.size(); ++q) row.push_back(g[q]);
    arr.push_back(std::move(row));
  }
  return arr;
}

std::vector<Eigen::VectorXd> effects_from_json(const json& arr, const std::string& path) {
  if (!arr.is_array()) fail(path, "expected an array of effect vectors");
  std::vector<Eigen::VectorXd> out;
  out.reserve(arr.size());
  for (const auto& row : arr) {
    if (!row.is_array() || row.empty()) fail(path, "effect vector must be a non-empty array");
    Eigen::VectorXd g(static_cast<Eigen::Index>(row.size()));
    Eigen::Index q = 0;
    for (const auto& x : row) {
      if (!x.is_number()) fail(path, "effect entries must be numbers");
      g[q++] = x.get<double>();
    }
    out.push_back(std::move(g));
  }
  return out;
}

std::vector<int> labels_from_json(const json& arr, const std::string& path) {
  if (!arr.is_array() || arr.empty()) fail(path, "labels must be a non-empty array");
  std::vector<int> out;
  out.reserve(arr.size());
  for (const auto& x : arr) {
    if (!x.is_number_integer()) fail(path, "labels must be integers");
    const int z = x.get<int>();
    if (z < 1) fail(path, "labels are 1-based and must be positive");
    out.push_back(z);
  }
  return out;
}

json mixing_to_json(const MixingMeasure& g) {
  json out;
  out["weights"] = g.weights;
  out["atoms"] = effects_to_json(g.atoms);
  return out;
}

MixingMeasure mixing_from_json(const json& j, int direction, const std::string& path) {
  MixingMeasure g;
  g.direction = direction;
  if (!j.is_object() || !j.contains("weights") || !j.contains("atoms")) {
    fail(path, "mixing measure needs 'weights' and 'atoms'");
  }
  for (const auto& w : j.at("weights")) {
    if (!w.is_number()) fail(path, "mixing weights must be numbers");
    g.weights.push_back(w.get<double>());
  }
  g.atoms = effects_from_json(j.at("atoms"), path);
  try {
    g.validate();
  } catch (const std::exception& ex) {
    fail(path, ex.what());
  }
  return g;
}

}  // namespace

void write_dataset(const std::string& path, const std::vector<CountTensor>& data) {
  json arr = json::array();
  for (const CountTensor& t : data) {
    json obj;
    obj["unit_id"] = t.unit_id();
    obj["dims"] = {t.dims().p1, t.dims().p2, t.dims().p3};
    obj["counts"] = t.counts();
    arr.push_back(std::move(obj));
  }
  dump_file(path, arr);
}

std::vector<CountTensor> read_dataset(const std::string& path) {
  const json arr = parse_file(path);
  if (!arr.is_array() || arr.empty()) fail(path, "expected a non-empty array of tensors");
  std::vector<CountTensor> out;
  out.reserve(arr.size());
  for (const auto& obj : arr) {
    if (!obj.is_object() || !obj.contains("unit_id") || !obj.contains("dims") ||
        !obj.contains("counts")) {
      fail(path, "tensor needs 'unit_id', 'dims' and 'counts'");
    }
    const auto& dj = obj.at("dims");
    if (!dj.is_array() || dj.size() != 3) fail(path, "'dims' must be [p1, p2, p3]");
    Dims dims{dj.at(0).get<int>(), dj.at(1).get<int>(), dj.at(2).get<int>()};
    std::vector<std::int64_t> counts;
    for (const auto& c : obj.at("counts")) {
      if (!c.is_number_integer()) fail(path, "'counts' must hold integers");
      counts.push_back(c.get<std::int64_t>());
    }
    try {
      out.emplace_back(obj.at("unit_id").get<std::string>(), dims, std::move(counts));
    } catch (const std::exception& ex) {
      fail(path, ex.what());
    }
  }
  return out;
}

void write_truth(const std::string& path, const DesignTruth& truth) {
  json j;
  for (int e = 0; e < 3; ++e) {
    const char* name = direction_name(e + 1);
    j["labels"][name] = truth.labels[static_cast<std::size_t>(e)].labels;
    j["mixing"][name] = mixing_to_json(truth.mixing[static_cast<std::size_t>(e)]);
  }
  dump_file(path, j);
}

DesignTruth read_truth(const std::string& path) {
  const json j = parse_file(path);
  if (!j.is_object() || !j.contains("labels") || !j.contains("mixing")) {
    fail(path, "truth file needs 'labels' and 'mixing'");
  }
  DesignTruth t;
  for (int e = 0; e < 3; ++e) {
    const char* name = direction_name(e + 1);
    if (!j.at("labels").contains(name) || !j.at("mixing").contains(name)) {
      fail(path, std::string("missing direction '") + name + "'");
    }
    t.labels[static_cast<std::size_t>(e)] =
        LabelVector{e + 1, labels_from_json(j.at("labels").at(name), path)};
    t.mixing[static_cast<std::size_t>(e)] = mixing_from_json(j.at("mixing").at(name), e + 1, path);
  }
  return t;
}

void write_labels(const std::string& path, const FitLabels& fit) {
  json j;
  j["unit_ids"] = fit.unit_ids;
  for (int e = 0; e < 3; ++e) {
    const char* name = direction_name(e + 1);
    j[name]["labels"] = fit.labels[static_cast<std::size_t>(e)].labels;
    j[name]["chosen_iteration"] = fit.chosen_iteration[static_cast<std::size_t>(e)];
  }
  dump_file(path, j);
}

FitLabels read_labels(const std::string& path) {
  const json j = parse_file(path);
  FitLabels fit;
  if (!j.is_object() || !j.contains("unit_ids")) fail(path, "labels file needs 'unit_ids'");
  for (const auto& id : j.at("unit_ids")) fit.unit_ids.push_back(id.get<std::string>());
  for (int e = 0; e < 3; ++e) {
    const char* name = direction_name(e + 1);
    if (!j.contains(name)) fail(path, std::string("missing direction '") + name + "'");
    fit.labels[static_cast<std::size_t>(e)] =
        LabelVector{e + 1, labels_from_json(j.at(name).at("labels"), path)};
    fit.chosen_iteration[static_cast<std::size_t>(e)] =
        j.at(name).at("chosen_iteration").get<std::size_t>();
    if (fit.labels[static_cast<std::size_t>(e)].labels.size() != fit.unit_ids.size()) {
      fail(path, "label count does not match unit_ids");
    }
  }
  return fit;
}

void write_mixing(const std::string& path, const std::array<MixingMeasure, 3>& mixing) {
  json j;
  for (int e = 0; e < 3; ++e) {
    j[direction_name(e + 1)] = mixing_to_json(mixing[static_cast<std::size_t>(e)]);
  }
  dump_file(path, j);
}

std::array<MixingMeasure, 3> read_mixing(const std::string& path) {
  const json j = parse_file(path);
  std::array<MixingMeasure, 3> out;
  for (int e = 0; e < 3; ++e) {
    const char* name = direction_name(e + 1);
    if (!j.contains(name)) fail(path, std::string("missing direction '") + name + "'");
    out[static_cast<std::size_t>(e)] = mixing_from_json(j.at(name), e + 1, path);
  }
  return out;
}

void write_k_histograms(const std::string& path, const std::array<KPosterior, 3>& ks) {
  json j;
  for (int e = 0; e < 3; ++e) {
    const char* name = direction_name(e + 1);
    j[name]["mode"] = ks[static_cast<std::size_t>(e)].mode;
    json hist = json::object();
    for (const auto& [k, f] : ks[static_cast<std::size_t>(e)].histogram) {
      hist[std::to_string(k)] = f;
    }
    j[name]["histogram"] = std::move(hist);
  }
  dump_file(path, j);
}

std::array<KPosterior, 3> read_k_histograms(const std::string& path) {
  const json j = parse_file(path);
  std::array<KPosterior, 3> out;
  for (int e = 0; e < 3; ++e) {
    const char* name = direction_name(e + 1);
    if (!j.contains(name)) fail(path, std::string("missing direction '") + name + "'");
    out[static_cast<std::size_t>(e)].mode = j.at(name).at("mode").get<int>();
    for (const auto& [key, val] : j.at(name).at("histogram").items()) {
      out[static_cast<std::size_t>(e)].histogram[std::stoi(key)] = val.get<double>();
    }
  }
  return out;
}

namespace {

json state_to_json(const ModelState& s, std::size_t kept_index) {
  json line;
  line["type"] = "state";
  line["iter"] = kept_index;  // 1-based among kept samples
  line["log_posterior"] = s.log_posterior;
  json dirs = json::array();
  for (int e = 0; e < 3; ++e) {
    const DirectionState& d = s.dir[static_cast<std::size_t>(e)];
    json dj;
    dj["k"] = d.k;
    dj["labels"] = d.labels;
    json w = json::array();
    for (Eigen::Index i = 0; i < d.weights.size(); ++i) w.push_back(d.weights[i]);
    dj["weights"] = std::move(w);
    dj["effects"] = effects_to_json(d.effects);
    dj["sigma2"] = d.car.sigma2;
    dj["rho"] = d.car.rho;
    dj["rho_bounds"] = {d.car.bounds.lo, d.car.bounds.hi};
    dirs.push_back(std::move(dj));
  }
  line["dir"] = std::move(dirs);
  return line;
}

ModelState state_from_json(const json& line, const std::string& path) {
  ModelState s;
  s.log_posterior = line.at("log_posterior").get<double>();
  const auto& dirs = line.at("dir");
  if (!dirs.is_array() || dirs.size() != 3) fail(path, "state needs 3 directions");
  for (int e = 0; e < 3; ++e) {
    DirectionState& d = s.dir[static_cast<std::size_t>(e)];
    const auto& dj = dirs.at(static_cast<std::size_t>(e));
    d.k = dj.at("k").get<int>();
    d.labels = labels_from_json(dj.at("labels"), path);
    const auto& w = dj.at("weights");
    d.weights.resize(static_cast<Eigen::Index>(w.size()));
    Eigen::Index i = 0;
    for (const auto& x : w) d.weights[i++] = x.get<double>();
    d.effects = effects_from_json(dj.at("effects"), path);
    d.car.sigma2 = dj.at("sigma2").get<double>();
    d.car.rho = dj.at("rho").get<double>();
    d.car.bounds.lo = dj.at("rho_bounds").at(0).get<double>();
    d.car.bounds.hi = dj.at("rho_bounds").at(1).get<double>();
  }
  return s;
}

}  // namespace

void write_chain(const std::string& path, const ChainRecord& rec, const std::string& config_echo) {
  std::ofstream out(path);
  if (!out) fail(path, "cannot open for writing");
  json header;
  header["type"] = "header";
  header["seed"] = rec.seed;
  header["n_iter"] = rec.n_iter;
  header["thin"] = rec.thin;
  header["burn_in"] = rec.burn_in;
  header["acceptance_rates"] = rec.acceptance_rates;
  header["config_echo"] = config_echo;
  out << header.dump() << '\n';
  for (std::size_t t = 0; t < rec.samples.size(); ++t) {
    out << state_to_json(rec.samples[t], t + 1).dump() << '\n';
  }
  if (!out) fail(path, "write failed");
}

ChainRecord read_chain(const std::string& path, std::string* config_echo) {
  std::ifstream in(path);
  if (!in) fail(path, "cannot open for reading");
  ChainRecord rec;
  std::string line;
  if (!std::getline(in, line)) fail(path, "empty chain file");
  try {
    const json header = json::parse(line);
    if (header.at("type") != "header") fail(path, "first line must be the header");
    rec.seed = header.at("seed").get<std::uint64_t>();
    rec.n_iter = header.at("n_iter").get<int>();
    rec.thin = header.at("thin").get<int>();
    rec.burn_in = header.at("burn_in").get<int>();
    for (const auto& [key, val] : header.at("acceptance_rates").items()) {
      rec.acceptance_rates[key] = val.get<double>();
    }
    if (config_echo) *config_echo = header.value("config_echo", "");
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const json state = json::parse(line);
      rec.samples.push_back(state_from_json(state, path));
      rec.log_posterior_trace.push_back(rec.samples.back().log_posterior);
    }
  } catch (const json::exception& ex) {
    fail(path, std::string("invalid JSON: ") + ex.what());
  }
  return rec;
}

void write_adjacency(const std::string& path, const Adjacency& w) {
  json j;
  j["size"] = w.size();
  json edges = json::array();
  for (int i = 0; i < w.size(); ++i) {
    for (int k = i + 1; k < w.size(); ++k) {
      if (w.matrix()(i, k) != 0.0) edges.push_back(json::array({i + 1, k + 1}));
    }
  }
  j["edges"] = std::move(edges);
  dump_file(path, j);
}

Adjacency read_adjacency(const std::string& path) {
  const json j = parse_file(path);
  if (!j.is_object() || !j.contains("size") || !j.contains("edges")) {
    fail(path, "adjacency needs 'size' and 'edges'");
  }
  const int p = j.at("size").get<int>();
  if (p < 1) fail(path, "'size' must be positive");
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(p, p);
  for (const auto& edge : j.at("edges")) {
    if (!edge.is_array() || edge.size() != 2) fail(path, "edges must be [i, j] pairs");
    const int a = edge.at(0).get<int>();
    const int b = edge.at(1).get<int>();
    if (a < 1 || a > p || b < 1 || b > p || a == b) {
      fail(path, "edge vertices must be distinct and within 1..size");
    }
    w(a - 1, b - 1) = 1.0;
    w(b - 1, a - 1) = 1.0;
  }
  try {
    return Adjacency(std::move(w));
  } catch (const std::exception& ex) {
    fail(path, ex.what());
  }
}

void write_rejection_report(const std::string& path, const RejectionReport& report) {
  json j;
  j["total"] = report.total;
  j["accepted"] = report.accepted;
  j["rejected"] = report.counts;
  dump_file(path, j);
}

void write_eval_report_json(const std::string& path, const EvalReport& report) {
  json j;
  for (int e = 0; e < 3; ++e) {
    const EvalDirection& d = report.dir[static_cast<std::size_t>(e)];
    json dj;
    dj["rand_index"] = d.rand_index;
    dj["k_mode"] = d.k_mode;
    json hist = json::object();
    for (const auto& [k, f] : d.k_histogram) hist[std::to_string(k)] = f;
    dj["k_histogram"] = std::move(hist);
    if (d.wasserstein_to_truth) dj["wasserstein_to_truth"] = *d.wasserstein_to_truth;
    j[direction_name(e + 1)] = std::move(dj);
  }
  dump_file(path, j);
}

void write_eval_report_csv(const std::string& path, const EvalReport& report) {
  std::ofstream out(path);
  if (!out) fail(path, "cannot open for writing");
  out << "direction,rand_index,k_mode,wasserstein_to_truth\n";
  for (int e = 0; e < 3; ++e) {
    const EvalDirection& d = report.dir[static_cast<std::size_t>(e)];
    out << direction_name(e + 1) << ',' << fmt(d.rand_index) << ',' << d.k_mode << ',';
    if (d.wasserstein_to_truth) out << fmt(*d.wasserstein_to_truth);
    out << '\n';
  }
  if (!out) fail(path, "write failed");
}

void write_matrix_csv(const std::string& path, const Eigen::MatrixXd& m) {
  std::ofstream out(path);
  if (!out) fail(path, "cannot open for writing");
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << fmt(m(i, j));
    }
    out << '\n';
  }
  if (!out) fail(path, "write failed");
}

void write_replicate_table_csv(const std::string& path, const ReplicateTable& table) {
  std::ofstream out(path);
  if (!out) fail(path, "cannot open for writing");
  out << "method,direction,mean_ri,sd_ri,pct_correct_k\n";
  for (const SummaryRow& row : table.summary) {
    out << row.method << ',' << direction_name(row.direction) << ',' << fmt(row.mean_ri) << ','
        << fmt(row.sd_ri) << ',' << fmt(row.pct_correct_k) << '\n';
  }
  if (!out) fail(path, "write failed");
}

namespace {

json row_to_json(const ReplicateRow& row) {
  json j;
  j["replicate"] = row.replicate;
  j["ok"] = row.ok;
  if (!row.ok) {
    j["error"] = row.error;
    return j;
  }
  for (int e = 0; e < 3; ++e) {
    j["k_mode"][direction_name(e + 1)] = row.k_mode[static_cast<std::size_t>(e)];
  }
  for (const auto& [method, per_dir] : row.rand_index) {
    for (int e = 0; e < 3; ++e) {
      j["rand_index"][method][direction_name(e + 1)] = per_dir[static_cast<std::size_t>(e)];
    }
  }
  for (const auto& [method, per_dir] : row.cluster_counts) {
    for (int e = 0; e < 3; ++e) {
      j["cluster_counts"][method][direction_name(e + 1)] = per_dir[static_cast<std::size_t>(e)];
    }
  }
  return j;
}

}  // namespace

void write_replicate_table_json(const std::string& path, const ReplicateTable& table) {
  json j;
  for (int e = 0; e < 3; ++e) {
    j["true_k"][direction_name(e + 1)] = table.true_k[static_cast<std::size_t>(e)];
  }
  json rows = json::array();
  for (const SummaryRow& row : table.summary) {
    json rj;
    rj["method"] = row.method;
    rj["direction"] = direction_name(row.direction);
    rj["mean_ri"] = row.mean_ri;
    rj["sd_ri"] = row.sd_ri;
    rj["pct_correct_k"] = row.pct_correct_k;
    rows.push_back(std::move(rj));
  }
  j["summary"] = std::move(rows);
  dump_file(path, j);
}

void write_replicate_rows_jsonl(const std::string& path, const ReplicateTable& table) {
  std::ofstream out(path);
  if (!out) fail(path, "cannot open for writing");
  for (const ReplicateRow& row : table.rows) out << row_to_json(row).dump() << '\n';
  if (!out) fail(path, "write failed");
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(path, "cannot open for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) fail(path, "cannot open for writing");
  out << content;
  if (!out) fail(path, "write failed");
}

}  // namespace tensorclust
