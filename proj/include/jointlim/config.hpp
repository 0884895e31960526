#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "jointlim/dgp.hpp"
#include "jointlim/lrv.hpp"
#include "jointlim/process.hpp"
#include "jointlim/verify.hpp"

namespace jointlim {

// Flat ordered key-value store. Keys are dotted ("process.theta"); the file
// form groups them into [section] blocks. Setting an existing key overwrites
// in place, so insertion order is stable and serialization is deterministic.
class KeyValues {
 public:
  void set(const std::string& key, const std::string& value);
  bool has(const std::string& key) const;
  const std::string* find(const std::string& key) const;
  const std::vector<std::pair<std::string, std::string>>& items() const { return items_; }

 private:
  std::vector<std::pair<std::string, std::string>> items_;
};

// INI-style parse: [section] headers, key = value lines, # and ; comments.
// Throws parse_error with the origin name and 1-based line number.
KeyValues parse_config_text(const std::string& text, const std::string& origin);
KeyValues parse_config_file(const std::filesystem::path& path);

// Inverse of parse: sections in first-appearance order.
std::string serialize_config(const KeyValues& cfg);

// Apply --section.key value overrides (also --section.key=value). Unknown
// shapes throw parameter_error.
void apply_overrides(KeyValues& cfg, const std::vector<std::string>& extra_args);

// Typed builders. Each reads its section, falls back to documented defaults,
// and records every key it resolved into *resolved (when non-null), so the
// caller can write a fully-expanded config next to the outputs.
ProcessSpec build_process_spec(const KeyValues& cfg, KeyValues* resolved = nullptr);
CrossSectionSpec build_cross_section_spec(const KeyValues& cfg, KeyValues* resolved = nullptr);
LrvConfig build_lrv_config(const KeyValues& cfg, KeyValues* resolved = nullptr);
McConfig build_mc_config(const KeyValues& cfg, KeyValues* resolved = nullptr);

// Scalar parsers shared by builders and the CLI; all throw parameter_error
// naming the key on bad input.
std::int64_t parse_i64(const std::string& key, const std::string& value);
std::uint64_t parse_u64(const std::string& key, const std::string& value);
double parse_f64(const std::string& key, const std::string& value);
bool parse_bool(const std::string& key, const std::string& value);
std::vector<double> parse_f64_list(const std::string& key, const std::string& value);
std::vector<std::int64_t> parse_i64_list(const std::string& key, const std::string& value);
// "s,t;s,t;..." pairs.
std::vector<CfPoint> parse_cf_grid(const std::string& key, const std::string& value);

}  // namespace jointlim
