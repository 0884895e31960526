#include "jointlim/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "jointlim/errors.hpp"
#include "jointlim/io.hpp"

namespace jointlim {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t");
  return s.substr(begin, end - begin + 1);
}

// Reads cfg[key] (default fallback), recording the resolved value.
class Resolver {
 public:
  Resolver(const KeyValues& cfg, KeyValues* resolved) : cfg_(cfg), resolved_(resolved) {}

  std::string get(const std::string& key, const std::string& fallback) const {
    const std::string* found = cfg_.find(key);
    const std::string value = found ? *found : fallback;
    if (resolved_) resolved_->set(key, value);
    return value;
  }

  // Key whose presence depends on another choice (e.g. theta only for ar1).
  std::optional<std::string> get_optional(const std::string& key) const {
    const std::string* found = cfg_.find(key);
    if (!found) return std::nullopt;
    if (resolved_) resolved_->set(key, *found);
    return *found;
  }

 private:
  const KeyValues& cfg_;
  KeyValues* resolved_;
};

std::string cf_grid_to_string(const std::vector<CfPoint>& grid) {
  std::string out;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    if (g) out += ';';
    out += g17(grid[g].s);
    out += ',';
    out += g17(grid[g].t);
  }
  return out;
}

}  // namespace

void KeyValues::set(const std::string& key, const std::string& value) {
  for (auto& item : items_) {
    if (item.first == key) {
      item.second = value;
      return;
    }
  }
  items_.emplace_back(key, value);
}

bool KeyValues::has(const std::string& key) const { return find(key) != nullptr; }

const std::string* KeyValues::find(const std::string& key) const {
  for (const auto& item : items_) {
    if (item.first == key) return &item.second;
  }
  return nullptr;
}

KeyValues parse_config_text(const std::string& text, const std::string& origin) {
  KeyValues cfg;
  std::string section;
  long line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t nl = text.find('\n', start);
    if (nl == std::string::npos) nl = text.size();
    std::string line = text.substr(start, nl - start);
    start = nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    line = trim(line);
    if (line.empty() || line[0] == '#' || line[0] == ';') {
      if (start > text.size()) break;
      continue;
    }
    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3) {
        throw parse_error(origin, line_no, "malformed section header");
      }
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty()) throw parse_error(origin, line_no, "empty section name");
    } else {
      const std::size_t eq = line.find('=');
      if (eq == std::string::npos) {
        throw parse_error(origin, line_no, "expected 'key = value'");
      }
      const std::string key = trim(line.substr(0, eq));
      const std::string value = trim(line.substr(eq + 1));
      if (key.empty()) throw parse_error(origin, line_no, "empty key");
      if (section.empty()) {
        throw parse_error(origin, line_no, "key before any [section] header");
      }
      cfg.set(section + "." + key, value);
    }
    if (start > text.size()) break;
  }
  return cfg;
}

KeyValues parse_config_file(const std::filesystem::path& path) {
  return parse_config_text(read_text_file(path), path.string());
}

std::string serialize_config(const KeyValues& cfg) {
  std::string out;
  std::vector<std::string> sections;
  for (const auto& [key, value] : cfg.items()) {
    const std::size_t dot = key.find('.');
    const std::string section = dot == std::string::npos ? "" : key.substr(0, dot);
    if (std::find(sections.begin(), sections.end(), section) == sections.end()) {
      sections.push_back(section);
    }
  }
  for (const auto& section : sections) {
    if (!out.empty()) out += '\n';
    out += '[' + section + "]\n";
    for (const auto& [key, value] : cfg.items()) {
      const std::size_t dot = key.find('.');
      if (dot != std::string::npos && key.substr(0, dot) == section) {
        out += key.substr(dot + 1) + " = " + value + '\n';
      }
    }
  }
  return out;
}

void apply_overrides(KeyValues& cfg, const std::vector<std::string>& extra_args) {
  for (std::size_t i = 0; i < extra_args.size(); ++i) {
    const std::string& arg = extra_args[i];
    if (arg.rfind("--", 0) != 0) {
      throw parameter_error("unexpected argument '" + arg + "' (overrides look like --section.key value)");
    }
    std::string key = arg.substr(2);
    std::string value;
    const std::size_t eq = key.find('=');
    if (eq != std::string::npos) {
      value = key.substr(eq + 1);
      key = key.substr(0, eq);
    } else {
      if (i + 1 >= extra_args.size()) {
        throw parameter_error("override '" + arg + "' is missing a value");
      }
      value = extra_args[++i];
    }
    if (key.find('.') == std::string::npos) {
      throw parameter_error("unknown flag '--" + key + "' (overrides look like --section.key value)");
    }
    cfg.set(key, value);
  }
}

std::int64_t parse_i64(const std::string& key, const std::string& value) {
  std::int64_t out = 0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw parameter_error(key + ": expected an integer, got '" + value + "'");
  }
  return out;
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  std::uint64_t out = 0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw parameter_error(key + ": expected an unsigned integer, got '" + value + "'");
  }
  return out;
}

double parse_f64(const std::string& key, const std::string& value) {
  double out = 0.0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw parameter_error(key + ": expected a number, got '" + value + "'");
  }
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw parameter_error(key + ": expected a boolean, got '" + value + "'");
}

std::vector<double> parse_f64_list(const std::string& key, const std::string& value) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= value.size()) {
    std::size_t comma = value.find(',', start);
    if (comma == std::string::npos) comma = value.size();
    const std::string field = trim(value.substr(start, comma - start));
    if (!field.empty()) out.push_back(parse_f64(key, field));
    start = comma + 1;
    if (comma == value.size()) break;
  }
  return out;
}

std::vector<std::int64_t> parse_i64_list(const std::string& key, const std::string& value) {
  std::vector<std::int64_t> out;
  for (double v : parse_f64_list(key, value)) {
    const auto i = static_cast<std::int64_t>(v);
    if (static_cast<double>(i) != v) {
      throw parameter_error(key + ": expected integers, got '" + value + "'");
    }
    out.push_back(i);
  }
  return out;
}

std::vector<CfPoint> parse_cf_grid(const std::string& key, const std::string& value) {
  std::vector<CfPoint> out;
  std::size_t start = 0;
  while (start <= value.size()) {
    std::size_t semi = value.find(';', start);
    if (semi == std::string::npos) semi = value.size();
    const std::string pair = trim(value.substr(start, semi - start));
    if (!pair.empty()) {
      const auto nums = parse_f64_list(key, pair);
      if (nums.size() != 2) {
        throw parameter_error(key + ": expected 's,t' pairs separated by ';'");
      }
      out.push_back({nums[0], nums[1]});
    }
    start = semi + 1;
    if (semi == value.size()) break;
  }
  return out;
}

ProcessSpec build_process_spec(const KeyValues& cfg, KeyValues* resolved) {
  Resolver r(cfg, resolved);
  ProcessSpec spec;
  const std::string family = r.get("process.family", "ar1");
  if (family == "ar1") {
    spec.family = Family::ar1;
    spec.params = {parse_f64("process.theta", r.get("process.theta", "0.5"))};
  } else if (family == "iid") {
    spec.family = Family::iid;
  } else if (family == "ma") {
    spec.family = Family::ma;
    const auto weights = r.get_optional("process.ma_weights");
    if (!weights) throw parameter_error("process.ma_weights is required for the ma family");
    spec.params = parse_f64_list("process.ma_weights", *weights);
  } else {
    throw parameter_error("process.family must be ar1 | ma | iid, got '" + family + "'");
  }
  spec.innovation_sd = parse_f64("process.innovation_sd", r.get("process.innovation_sd", "1.0"));
  spec.mean = parse_f64("process.mean", r.get("process.mean", "0.0"));
  spec.validate();
  return spec;
}

CrossSectionSpec build_cross_section_spec(const KeyValues& cfg, KeyValues* resolved) {
  Resolver r(cfg, resolved);
  CrossSectionSpec cs;
  cs.n = parse_i64("cross_section.n", r.get("cross_section.n", "1000"));
  if (cs.n < 2) throw parameter_error("cross_section.n must be >= 2");
  const std::string upsilon = r.get("cross_section.upsilon", "potential_outcomes");
  if (upsilon == "potential_outcomes") {
    cs.upsilon = Upsilon::potential_outcomes;
  } else if (upsilon == "scaled_shock") {
    cs.upsilon = Upsilon::scaled_shock;
  } else {
    // The custom hook is programmatic only; a config file cannot carry a function.
    throw parameter_error(
        "cross_section.upsilon must be potential_outcomes | scaled_shock, got '" + upsilon + "'");
  }
  cs.u_sd = parse_f64("cross_section.u_sd", r.get("cross_section.u_sd", "1.0"));
  cs.beta = parse_f64("cross_section.beta", r.get("cross_section.beta", "1.0"));
  cs.treat_prob = parse_f64("cross_section.treat_prob", r.get("cross_section.treat_prob", "0.5"));
  const std::string law = r.get("cross_section.u_law", "gaussian");
  if (law == "gaussian") {
    cs.u_law = NoiseLaw::gaussian;
  } else if (law == "uniform") {
    cs.u_law = NoiseLaw::uniform;
  } else {
    throw parameter_error("cross_section.u_law must be gaussian | uniform, got '" + law + "'");
  }
  cs.validate();
  return cs;
}

LrvConfig build_lrv_config(const KeyValues& cfg, KeyValues* resolved) {
  Resolver r(cfg, resolved);
  LrvConfig lrv;
  const std::string kernel = r.get("lrv.kernel", "bartlett");
  if (kernel == "bartlett") {
    lrv.kernel = Kernel::bartlett;
  } else if (kernel == "parzen") {
    lrv.kernel = Kernel::parzen;
  } else if (kernel == "quadratic_spectral") {
    lrv.kernel = Kernel::quadratic_spectral;
  } else {
    throw parameter_error("lrv.kernel must be bartlett | parzen | quadratic_spectral, got '" +
                          kernel + "'");
  }
  const std::string bandwidth = r.get("lrv.bandwidth", "auto");
  if (bandwidth != "auto") {
    lrv.bandwidth = parse_i64("lrv.bandwidth", bandwidth);
    if (*lrv.bandwidth < 0) throw parameter_error("lrv.bandwidth must be non-negative");
  }
  lrv.demean = parse_bool("lrv.demean", r.get("lrv.demean", "true"));
  return lrv;
}

McConfig build_mc_config(const KeyValues& cfg, KeyValues* resolved) {
  McConfig mc;
  mc.proc = build_process_spec(cfg, resolved);
  mc.cs = build_cross_section_spec(cfg, resolved);
  mc.lrv = build_lrv_config(cfg, resolved);

  Resolver r(cfg, resolved);
  mc.replications = parse_i64("mc.replications", r.get("mc.replications", "1000"));
  mc.n_grid = parse_i64_list("mc.n_grid", r.get("mc.n_grid", "2000"));
  mc.tau_grid = parse_i64_list("mc.tau_grid", r.get("mc.tau_grid", "2000"));
  mc.master_seed = parse_u64("mc.master_seed", r.get("mc.master_seed", "1"));
  mc.cf_grid = parse_cf_grid("mc.cf_grid", r.get("mc.cf_grid", cf_grid_to_string(default_cf_grid())));
  mc.zeta = Zeta::parse(r.get("mc.zeta", "one"));
  mc.alpha = parse_f64("mc.alpha", r.get("mc.alpha", "0.05"));
  const std::string kappa = r.get("mc.kappa", "realized");
  if (kappa == "realized") {
    mc.kappa_policy = KappaPolicy::realized;
  } else {
    mc.kappa_policy = KappaPolicy::declared;
    mc.declared_kappa = parse_f64("mc.kappa", kappa);
  }
  mc.use_raw_estimator_yn = parse_bool("mc.raw_yn", r.get("mc.raw_yn", "false"));
  mc.workers = static_cast<int>(parse_i64("mc.workers", r.get("mc.workers", "1")));
  // cs.n follows the grid in the engine; keep them consistent here too.
  if (!mc.n_grid.empty()) mc.cs.n = mc.n_grid.front();
  mc.validate();
  return mc;
}

}  // namespace jointlim
