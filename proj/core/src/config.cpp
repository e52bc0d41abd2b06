#include "tensorclust/config.hpp"

#include <cctype>
#include <cerrno>
#include <climits>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace tensorclust {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0;
  std::size_t b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

std::string fmt_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace

KeyValueConfig KeyValueConfig::parse(const std::string& text, const std::string& origin) {
  KeyValueConfig cfg;
  cfg.origin_ = origin;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument(origin + ": line " + std::to_string(lineno) +
                                  ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw std::invalid_argument(origin + ": line " + std::to_string(lineno) + ": empty key");
    }
    if (value.empty()) {
      throw std::invalid_argument(origin + ": line " + std::to_string(lineno) +
                                  ": empty value for '" + key + "'");
    }
    if (!cfg.entries_.emplace(key, Entry{value, false}).second) {
      throw std::invalid_argument(origin + ": line " + std::to_string(lineno) +
                                  ": duplicate key '" + key + "'");
    }
  }
  return cfg;
}

KeyValueConfig KeyValueConfig::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument(path + ": cannot open for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path);
}

bool KeyValueConfig::has(const std::string& key) const { return entries_.count(key) != 0; }

std::string KeyValueConfig::get_string(const std::string& key, const std::string& fallback) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  it->second.used = true;
  return it->second.value;
}

double KeyValueConfig::get_double(const std::string& key, double fallback) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  it->second.used = true;
  const std::string& v = it->second.value;
  errno = 0;
  char* end = nullptr;
  const double x = std::strtod(v.c_str(), &end);
  if (end != v.c_str() + v.size() || errno == ERANGE || !std::isfinite(x)) {
    throw std::invalid_argument(origin_ + ": " + key + ": expected a finite number, got '" + v +
                                "'");
  }
  return x;
}

int KeyValueConfig::get_int(const std::string& key, int fallback) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  it->second.used = true;
  const std::string& v = it->second.value;
  errno = 0;
  char* end = nullptr;
  const long long x = std::strtoll(v.c_str(), &end, 10);
  if (end != v.c_str() + v.size() || errno == ERANGE || x < INT_MIN || x > INT_MAX) {
    throw std::invalid_argument(origin_ + ": " + key + ": expected an integer, got '" + v + "'");
  }
  return static_cast<int>(x);
}

bool KeyValueConfig::get_bool(const std::string& key, bool fallback) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  it->second.used = true;
  const std::string& v = it->second.value;
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw std::invalid_argument(origin_ + ": " + key + ": expected true or false, got '" + v + "'");
}

void KeyValueConfig::require_all_consumed(const std::string& context) const {
  std::vector<std::string> unknown;
  for (const auto& [key, entry] : entries_) {
    if (!entry.used) unknown.push_back(key);
  }
  if (unknown.empty()) return;
  std::string msg = origin_ + ": unknown " + context + " keys:";
  for (const std::string& k : unknown) msg += " " + k;
  throw std::invalid_argument(msg);
}

namespace {

const char* kDirKeys[3] = {"angle", "distance", "quarter"};

void apply_mfm_direction(const KeyValueConfig& cfg, const std::string& prefix, MfmConfig& out) {
  out.dirichlet_gamma = cfg.get_double(prefix + ".gamma", out.dirichlet_gamma);
  out.nu = cfg.get_double(prefix + ".nu", out.nu);
  out.psi = cfg.get_double(prefix + ".psi", out.psi);
  out.truncation_T = cfg.get_int(prefix + ".truncation", out.truncation_T);
}

}  // namespace

void apply_sampler_config(const KeyValueConfig& cfg, SamplerConfig& out) {
  out.n_iter = cfg.get_int("sampler.n_iter", out.n_iter);
  out.thin = cfg.get_int("sampler.thin", out.thin);
  out.burn_in = cfg.get_int("sampler.burn_in", out.burn_in);
  out.mh_step_effects = cfg.get_double("sampler.mh_step_effects", out.mh_step_effects);
  out.mh_step_sigma2 = cfg.get_double("sampler.mh_step_sigma2", out.mh_step_sigma2);
  out.mh_step_rho = cfg.get_double("sampler.mh_step_rho", out.mh_step_rho);
  out.adapt = cfg.get_bool("sampler.adapt", out.adapt);
  out.init_components = cfg.get_int("sampler.init_components", out.init_components);
  out.init_jitter = cfg.get_double("sampler.init_jitter", out.init_jitter);
  out.prior_only = cfg.get_bool("sampler.prior_only", out.prior_only);
  out.sigma2_prior.a = cfg.get_double("sampler.sigma2_a", out.sigma2_prior.a);
  out.sigma2_prior.b = cfg.get_double("sampler.sigma2_b", out.sigma2_prior.b);
  const std::string form = cfg.get_string(
      "sampler.car_form", out.car_form == CarForm::Literal ? "literal" : "inverse");
  if (form == "literal") {
    out.car_form = CarForm::Literal;
  } else if (form == "inverse") {
    out.car_form = CarForm::Inverse;
  } else {
    throw std::invalid_argument("sampler.car_form: expected 'literal' or 'inverse', got '" + form +
                                "'");
  }
  // Global mfm.* keys apply to all three directions, then per-direction
  // mfm.<name>.* keys override.
  for (auto& m : out.mfm) {
    m.dirichlet_gamma = cfg.get_double("mfm.gamma", m.dirichlet_gamma);
    m.nu = cfg.get_double("mfm.nu", m.nu);
    m.psi = cfg.get_double("mfm.psi", m.psi);
    m.truncation_T = cfg.get_int("mfm.truncation", m.truncation_T);
  }
  for (int e = 0; e < 3; ++e) {
    apply_mfm_direction(cfg, std::string("mfm.") + kDirKeys[e],
                        out.mfm[static_cast<std::size_t>(e)]);
  }
}

void apply_scheme_config(const KeyValueConfig& cfg, PartitionScheme& out) {
  out.n_angle = cfg.get_int("scheme.n_angle", out.n_angle);
  out.n_dist = cfg.get_int("scheme.n_dist", out.n_dist);
  out.n_quarter = cfg.get_int("scheme.n_quarter", out.n_quarter);
  out.basket_x = cfg.get_double("scheme.basket_x", out.basket_x);
  out.basket_y = cfg.get_double("scheme.basket_y", out.basket_y);
  out.radius = cfg.get_double("scheme.radius", out.radius);
  out.court_width = cfg.get_double("scheme.court_width", out.court_width);
  out.court_height = cfg.get_double("scheme.court_height", out.court_height);
}

void apply_ingest_config(const KeyValueConfig& cfg, IngestFilters& out) {
  out.min_attempts = cfg.get_int("ingest.min_attempts", out.min_attempts);
  if (out.min_attempts < 0) {
    throw std::invalid_argument("ingest.min_attempts: must be non-negative");
  }
}

void apply_column_config(const KeyValueConfig& cfg, ColumnMap& out) {
  out.player_id = cfg.get_string("csv.player_id", out.player_id);
  out.x = cfg.get_string("csv.x", out.x);
  out.y = cfg.get_string("csv.y", out.y);
  out.period = cfg.get_string("csv.period", out.period);
}

GroundNorm ground_norm_from_config(const KeyValueConfig& cfg, GroundNorm fallback) {
  const std::string norm = cfg.get_string(
      "evaluate.ground_norm", fallback == GroundNorm::Euclidean ? "euclidean" : "l1");
  if (norm == "euclidean") return GroundNorm::Euclidean;
  if (norm == "l1") return GroundNorm::L1;
  throw std::invalid_argument("evaluate.ground_norm: expected 'euclidean' or 'l1', got '" + norm +
                              "'");
}

namespace {

void emit(std::string& out, const std::string& key, const std::string& value) {
  out += key;
  out += " = ";
  out += value;
  out += '\n';
}

void emit(std::string& out, const std::string& key, double value) {
  emit(out, key, fmt_double(value));
}

void emit(std::string& out, const std::string& key, int value) {
  emit(out, key, std::to_string(value));
}

void emit(std::string& out, const std::string& key, bool value) {
  emit(out, key, value ? std::string("true") : std::string("false"));
}

}  // namespace

std::string render_sampler_config(const SamplerConfig& cfg) {
  std::string out;
  emit(out, "sampler.n_iter", cfg.n_iter);
  emit(out, "sampler.thin", cfg.thin);
  emit(out, "sampler.burn_in", cfg.burn_in);
  emit(out, "sampler.mh_step_effects", cfg.mh_step_effects);
  emit(out, "sampler.mh_step_sigma2", cfg.mh_step_sigma2);
  emit(out, "sampler.mh_step_rho", cfg.mh_step_rho);
  emit(out, "sampler.adapt", cfg.adapt);
  emit(out, "sampler.init_components", cfg.init_components);
  emit(out, "sampler.init_jitter", cfg.init_jitter);
  emit(out, "sampler.prior_only", cfg.prior_only);
  emit(out, "sampler.car_form",
       cfg.car_form == CarForm::Literal ? std::string("literal") : std::string("inverse"));
  emit(out, "sampler.sigma2_a", cfg.sigma2_prior.a);
  emit(out, "sampler.sigma2_b", cfg.sigma2_prior.b);
  for (int e = 0; e < 3; ++e) {
    const MfmConfig& m = cfg.mfm[static_cast<std::size_t>(e)];
    const std::string prefix = std::string("mfm.") + kDirKeys[e];
    emit(out, prefix + ".gamma", m.dirichlet_gamma);
    emit(out, prefix + ".nu", m.nu);
    emit(out, prefix + ".psi", m.psi);
    emit(out, prefix + ".truncation", m.truncation_T);
  }
  return out;
}

std::string render_ingest_config(const PartitionScheme& scheme, const IngestFilters& filters,
                                 const ColumnMap& columns) {
  std::string out;
  emit(out, "scheme.n_angle", scheme.n_angle);
  emit(out, "scheme.n_dist", scheme.n_dist);
  emit(out, "scheme.n_quarter", scheme.n_quarter);
  emit(out, "scheme.basket_x", scheme.basket_x);
  emit(out, "scheme.basket_y", scheme.basket_y);
  emit(out, "scheme.radius", scheme.radius);
  emit(out, "scheme.court_width", scheme.court_width);
  emit(out, "scheme.court_height", scheme.court_height);
  emit(out, "ingest.min_attempts", static_cast<int>(filters.min_attempts));
  emit(out, "csv.player_id", columns.player_id);
  emit(out, "csv.x", columns.x);
  emit(out, "csv.y", columns.y);
  emit(out, "csv.period", columns.period);
  return out;
}

std::string render_evaluate_config(GroundNorm norm) {
  std::string out;
  emit(out, "evaluate.ground_norm",
       norm == GroundNorm::Euclidean ? std::string("euclidean") : std::string("l1"));
  return out;
}

std::string seed_comment(std::uint64_t seed) {
  return "# seed = " + std::to_string(seed) + "\n";
}

}  // namespace tensorclust
