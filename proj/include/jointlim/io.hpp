#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "jointlim/dgp.hpp"
#include "jointlim/estimate.hpp"
#include "jointlim/infer.hpp"
#include "jointlim/verify.hpp"

namespace jointlim {

using KvPairs = std::vector<std::pair<std::string, std::string>>;

// Shortest round-trip-exact decimal form (17 significant digits, %.17g).
std::string g17(double x);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& content);

// Data tables: comma-delimited, header row, LF line endings, values in
// round-trip-exact form.
void write_timeseries_csv(const std::filesystem::path& path, std::span<const double> z);
std::vector<double> read_timeseries_csv(const std::filesystem::path& path);

void write_cross_section_csv(const std::filesystem::path& path,
                             std::span<const UnitRecord> cross);
std::vector<UnitRecord> read_cross_section_csv(const std::filesystem::path& path);

// Per-replication table (r, wald, beta_hat, eta_hat, nu1_hat, covered).
void write_replications_csv(const std::filesystem::path& path, const McReport& report);

// Characteristic-function grid table (s, t, re/im empirical, re/im target, deviation).
void write_cf_grid_csv(const std::filesystem::path& path,
                       std::span<const CfPoint> grid,
                       std::span<const std::complex<double>> cf_empirical,
                       std::span<const std::complex<double>> cf_target);

// Flat key = value records.
KvPairs to_kv(const EstimateSet& est);
KvPairs to_kv(const InferenceResult& res);
KvPairs to_kv(const LrvEstimate& lrv);
void write_kv_file(const std::filesystem::path& path, const KvPairs& pairs);

// One-line human-readable inference summary: estimate, se, CI, statistic, decision.
std::string summary_line(const InferenceResult& res);

}  // namespace jointlim
