#include "jointlim/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "jointlim/errors.hpp"

namespace jointlim {

namespace {

const char* kernel_name(Kernel k) {
  switch (k) {
    case Kernel::bartlett:
      return "bartlett";
    case Kernel::parzen:
      return "parzen";
    case Kernel::quadratic_spectral:
      return "quadratic_spectral";
  }
  return "?";
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

double parse_field_f64(const std::string& file, long line, const std::string& field) {
  double value = 0.0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) {
    throw parse_error(file, line, "expected a number, got '" + field + "'");
  }
  return value;
}

long parse_field_i64(const std::string& file, long line, const std::string& field) {
  long value = 0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) {
    throw parse_error(file, line, "expected an integer, got '" + field + "'");
  }
  return value;
}

// Lines of a text file with the trailing \r (if any) stripped.
std::vector<std::string> read_lines(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t nl = text.find('\n', start);
    if (nl == std::string::npos) nl = text.size();
    std::string line = text.substr(start, nl - start);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
    start = nl + 1;
  }
  return lines;
}

}  // namespace

std::string g17(double x) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", x);
  return buffer;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error(path.string(), "cannot open for reading");
  std::ostringstream out;
  out << in.rdbuf();
  if (in.bad()) throw io_error(path.string(), "read failed");
  return out.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error(path.string(), "cannot open for writing");
  out << content;
  out.flush();
  if (!out) throw io_error(path.string(), "write failed");
}

void write_timeseries_csv(const std::filesystem::path& path, std::span<const double> z) {
  std::string text = "s,z\n";
  for (std::size_t s = 0; s < z.size(); ++s) {
    text += std::to_string(s + 1);
    text += ',';
    text += g17(z[s]);
    text += '\n';
  }
  write_text_file(path, text);
}

std::vector<double> read_timeseries_csv(const std::filesystem::path& path) {
  const auto lines = read_lines(path);
  const std::string file = path.string();
  if (lines.empty() || lines[0] != "s,z") {
    throw parse_error(file, 1, "expected header 's,z'");
  }
  std::vector<double> z;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const long line_no = static_cast<long>(i + 1);
    const auto fields = split_fields(lines[i]);
    if (fields.size() != 2) throw parse_error(file, line_no, "expected 2 columns");
    z.push_back(parse_field_f64(file, line_no, fields[1]));
  }
  return z;
}

void write_cross_section_csv(const std::filesystem::path& path,
                             std::span<const UnitRecord> cross) {
  std::string text = "i,y_tilde,d\n";
  for (std::size_t i = 0; i < cross.size(); ++i) {
    text += std::to_string(i + 1);
    text += ',';
    text += g17(cross[i].y_tilde);
    text += ',';
    text += cross[i].d ? '1' : '0';
    text += '\n';
  }
  write_text_file(path, text);
}

std::vector<UnitRecord> read_cross_section_csv(const std::filesystem::path& path) {
  const auto lines = read_lines(path);
  const std::string file = path.string();
  if (lines.empty() || lines[0] != "i,y_tilde,d") {
    throw parse_error(file, 1, "expected header 'i,y_tilde,d'");
  }
  std::vector<UnitRecord> cross;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const long line_no = static_cast<long>(i + 1);
    const auto fields = split_fields(lines[i]);
    if (fields.size() != 3) throw parse_error(file, line_no, "expected 3 columns");
    UnitRecord rec;
    rec.y_tilde = parse_field_f64(file, line_no, fields[1]);
    const long d = parse_field_i64(file, line_no, fields[2]);
    if (d != 0 && d != 1) throw parse_error(file, line_no, "d must be 0 or 1");
    rec.d = static_cast<std::uint8_t>(d);
    cross.push_back(rec);
  }
  return cross;
}

void write_replications_csv(const std::filesystem::path& path, const McReport& report) {
  std::string text = "r,wald,beta_hat,eta_hat,nu1_hat,covered\n";
  for (std::size_t r = 0; r < report.wald_draws.size(); ++r) {
    text += std::to_string(r + 1);
    text += ',';
    text += g17(report.wald_draws[r]);
    text += ',';
    text += g17(report.beta_hats[r]);
    text += ',';
    text += g17(report.eta_hats[r]);
    text += ',';
    text += g17(report.nu1_hats[r]);
    text += ',';
    text += report.covered[r] ? '1' : '0';
    text += '\n';
  }
  write_text_file(path, text);
}

void write_cf_grid_csv(const std::filesystem::path& path,
                       std::span<const CfPoint> grid,
                       std::span<const std::complex<double>> cf_empirical,
                       std::span<const std::complex<double>> cf_target) {
  std::string text = "s,t,re_empirical,im_empirical,re_target,im_target,deviation\n";
  for (std::size_t g = 0; g < grid.size(); ++g) {
    text += g17(grid[g].s);
    text += ',';
    text += g17(grid[g].t);
    text += ',';
    text += g17(cf_empirical[g].real());
    text += ',';
    text += g17(cf_empirical[g].imag());
    text += ',';
    text += g17(cf_target[g].real());
    text += ',';
    text += g17(cf_target[g].imag());
    text += ',';
    text += g17(std::abs(cf_empirical[g] - cf_target[g]));
    text += '\n';
  }
  write_text_file(path, text);
}

KvPairs to_kv(const EstimateSet& est) {
  return {
      {"pi1_hat", g17(est.pi1_hat)},
      {"phi_hat", g17(est.phi_hat)},
      {"beta_hat", g17(est.beta_hat)},
      {"nu1_hat", g17(est.nu1_hat)},
      {"sigma_u2_hat", g17(est.sigma_u2_hat)},
      {"n", std::to_string(est.n)},
      {"tau", std::to_string(est.tau)},
      {"kappa", g17(est.kappa)},
  };
}

KvPairs to_kv(const InferenceResult& res) {
  return {
      {"estimate", g17(res.estimate)},
      {"se", g17(res.se)},
      {"ci_low", g17(res.ci_low)},
      {"ci_high", g17(res.ci_high)},
      {"statistic", g17(res.statistic)},
      {"alpha", g17(res.alpha)},
      {"beta0", g17(res.beta0)},
      {"reject", res.reject ? "true" : "false"},
  };
}

KvPairs to_kv(const LrvEstimate& lrv) {
  return {
      {"eta_hat", g17(lrv.value)},
      {"kernel", kernel_name(lrv.kernel)},
      {"bandwidth_used", std::to_string(lrv.bandwidth_used)},
      {"tau", std::to_string(lrv.tau)},
      {"bandwidth_clipped", lrv.bandwidth_clipped ? "true" : "false"},
  };
}

void write_kv_file(const std::filesystem::path& path, const KvPairs& pairs) {
  std::string text;
  for (const auto& [key, value] : pairs) {
    text += key;
    text += " = ";
    text += value;
    text += '\n';
  }
  write_text_file(path, text);
}

std::string summary_line(const InferenceResult& res) {
  std::string line = "estimate=" + g17(res.estimate) + " se=" + g17(res.se) +
                     " ci=[" + g17(res.ci_low) + ", " + g17(res.ci_high) + "]" +
                     " t=" + g17(res.statistic) + " H0(beta=" + g17(res.beta0) + "): ";
  line += res.reject ? "reject" : "fail to reject";
  line += " at alpha=" + g17(res.alpha);
  return line;
}

}  // namespace jointlim
