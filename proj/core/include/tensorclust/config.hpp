#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "tensorclust/ingest.hpp"
#include "tensorclust/postprocess.hpp"
#include "tensorclust/sampler.hpp"

namespace tensorclust {

// Flat key=value run configuration. Lines hold one `key = value` pair each,
// '#' starts a comment, blank lines are ignored. Every getter marks its key
// as consumed; require_all_consumed() then rejects misspelled keys instead
// of silently running with defaults.
class KeyValueConfig {
 public:
  static KeyValueConfig parse(const std::string& text,
                              const std::string& origin = "<config>");
  static KeyValueConfig parse_file(const std::string& path);

  bool has(const std::string& key) const;

  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  int get_int(const std::string& key, int fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;

  // Throws listing every key no getter has touched; context names the schema
  // (e.g. "sampler config") in the message.
  void require_all_consumed(const std::string& context) const;

 private:
  struct Entry {
    std::string value;
    mutable bool used = false;
  };
  std::string origin_;
  std::map<std::string, Entry> entries_;
};

// Schema appliers. Each reads its keys from the config (marking them used)
// on top of the defaults already present in the target struct.
void apply_sampler_config(const KeyValueConfig& cfg, SamplerConfig& out);
void apply_scheme_config(const KeyValueConfig& cfg, PartitionScheme& out);
void apply_ingest_config(const KeyValueConfig& cfg, IngestFilters& out);
void apply_column_config(const KeyValueConfig& cfg, ColumnMap& out);
GroundNorm ground_norm_from_config(const KeyValueConfig& cfg,
                                   GroundNorm fallback = GroundNorm::Euclidean);

// Echo renderers. Output parses back through the matching applier to an
// identical struct; doubles print with %.17g so the round trip is exact.
// MFM settings always render per direction even when set globally.
std::string render_sampler_config(const SamplerConfig& cfg);
std::string render_ingest_config(const PartitionScheme& scheme, const IngestFilters& filters,
                                 const ColumnMap& columns);
std::string render_evaluate_config(GroundNorm norm);

// Seed travels as a CLI flag, not a config key; echoes record it as a
// comment so the echo file still parses under the same schema.
std::string seed_comment(std::uint64_t seed);

}  // namespace tensorclust
