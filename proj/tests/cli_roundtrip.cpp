// CLI integration check. argv[1] is the path to the built binary; everything
// runs inside a scratch directory under the system temp dir. Exits non-zero on
// the first failed expectation.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>

#include "jointlim/errors.hpp"
#include "jointlim/estimate.hpp"
#include "jointlim/io.hpp"
#include "jointlim/lrv.hpp"

namespace fs = std::filesystem;
using namespace jointlim;

namespace {

std::string g_cli;
int g_failures = 0;

void expect(bool ok, const std::string& what) {
  if (!ok) {
    std::cerr << "[FAIL] " << what << '\n';
    ++g_failures;
  }
}

int run(const std::string& args, const fs::path& log) {
  const std::string cmd = g_cli + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return status < 0 ? status : WEXITSTATUS(status);
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: cli_roundtrip <path-to-cli>\n";
    return 2;
  }
  g_cli = argv[1];
  const fs::path root = fs::temp_directory_path() / "jointlim_cli_roundtrip";
  fs::remove_all(root);
  fs::create_directories(root);
  const fs::path log = root / "log.txt";

  // simulate with defaults plus a couple of overrides
  const fs::path data = root / "data";
  expect(run("simulate --seed 42 --run.tau 600 --cross_section.n 400 --out " + data.string(),
             log) == 0,
         "simulate exits 0");
  expect(fs::exists(data / "timeseries.csv"), "timeseries.csv written");
  expect(fs::exists(data / "cross_section.csv"), "cross_section.csv written");
  expect(fs::exists(data / "resolved.cfg"), "resolved.cfg written");

  // estimate on the dataset; beta0 flag shows up in the decision line
  const fs::path est_dir = root / "est";
  expect(run("estimate " + data.string() + " --infer.beta0 0.9 --out " + est_dir.string(), log) ==
             0,
         "estimate exits 0");
  const std::string stdout_text = read_text_file(log);
  expect(stdout_text.find("beta_hat") != std::string::npos, "estimate prints beta_hat");
  expect(stdout_text.find("H0(beta=0.90000000000000002)") != std::string::npos ||
             stdout_text.find("H0(beta=0.9)") != std::string::npos,
         "estimate prints the Wald decision against beta0");

  // the written estimate matches an in-memory pipeline on the same files
  const auto z = read_timeseries_csv(data / "timeseries.csv");
  const auto cross = read_cross_section_csv(data / "cross_section.csv");
  const double pi1_hat = estimate_pi1(cross);
  const double phi_hat = estimate_phi(z);
  const double beta_hat = estimate_beta(pi1_hat, phi_hat, z.front());
  const std::string est_kv = read_text_file(est_dir / "estimate.kv");
  expect(est_kv.find("beta_hat = " + g17(beta_hat) + "\n") != std::string::npos,
         "beta_hat round-trips bit-exactly through the files");
  expect(est_kv.find("pi1_hat = " + g17(pi1_hat) + "\n") != std::string::npos,
         "pi1_hat round-trips bit-exactly through the files");

  // validation failure names the offending key and exits 1
  expect(run("simulate --cross_section.n 0 --out " + (root / "bad").string(), log) == 1,
         "n = 0 is rejected with exit code 1");
  const std::string err_text = read_text_file(log);
  expect(err_text.find("cross_section.n") != std::string::npos, "error names the field");

  // malformed dataset: parse error with a line number, exit 1
  const fs::path broken = root / "broken";
  fs::create_directories(broken);
  write_text_file(broken / "timeseries.csv", "s,z\n1,0.5\n");
  write_text_file(broken / "cross_section.csv", "i,y_tilde,d\n1,0.5\n");
  expect(run("estimate " + broken.string(), log) == 1, "missing column exits 1");
  expect(read_text_file(log).find("cross_section.csv:2") != std::string::npos,
         "parse error carries file:line");

  // missing dataset directory: I/O error, exit 3
  expect(run("estimate " + (root / "nowhere").string(), log) == 3,
         "missing dataset exits 3");

  // mc gate: a deliberately impossible threshold fails with exit 2
  expect(run("mc --seed 7 --mc.replications 600 --mc.n_grid 200 --mc.tau_grid 200 "
             "--mc.ks_max 1e-9 --out " +
                 (root / "gate").string(),
             log) == 2,
         "impossible ks threshold exits 2");
  // and with R < 500 the gate is skipped entirely
  expect(run("mc --seed 7 --mc.replications 200 --mc.n_grid 200 --mc.tau_grid 200 "
             "--mc.ks_max 1e-9 --out " +
                 (root / "skip").string(),
             log) == 0,
         "gates are skipped below 500 replications");
  expect(read_text_file(root / "skip" / "summary.kv").find("gate = skipped") != std::string::npos,
         "summary records the skipped gate");

  // theorem2 profile writes the cf table
  expect(run("mc --seed 7 --mc.profile theorem2 --mc.replications 500 --mc.n_grid 200 "
             "--mc.tau_grid 200 --mc.zeta indicator:0 --out " +
                 (root / "t2").string(),
             log) == 0,
         "theorem2 profile exits 0");
  expect(fs::exists(root / "t2" / "cf_grid.csv"), "cf_grid.csv written");

  // remaining diagnostic profiles run end to end
  expect(run("mc --seed 7 --mc.profile theorem1 --mc.nu1_fixed 0.5 --mc.replications 600 "
             "--mc.n_grid 500 --mc.tau_grid 500 --out " +
                 (root / "t1").string(),
             log) == 0,
         "theorem1 profile exits 0");
  expect(run("mc --seed 7 --mc.profile lemma1 --mc.replications 600 --mc.n_grid 500 "
             "--mc.tau_grid 500 --out " +
                 (root / "l1").string(),
             log) == 0,
         "lemma1 profile exits 0");
  expect(run("mc --seed 7 --mc.profile panel --mc.T 2 --mc.q coord:1 --mc.replications 400 "
             "--mc.n_grid 500 --mc.tau_grid 500 --out " +
                 (root / "p1").string(),
             log) == 0,
         "panel profile exits 0");
  expect(run("mc --seed 7 --mc.profile expansion --mc.replications 200 --mc.n_grid 200,800 "
             "--mc.tau_grid 200,800 --out " +
                 (root / "e1").string(),
             log) == 0,
         "expansion profile exits 0");
  expect(read_text_file(root / "e1" / "summary.kv").find("strictly_decreasing = true") !=
             std::string::npos,
         "expansion summary reports the decay check");

  // oracle prints analytic values
  expect(run("oracle --process.theta 0.5 --oracle.nu1 2 --cross_section.upsilon scaled_shock",
             log) == 0,
         "oracle exits 0");
  const std::string oracle_text = read_text_file(log);
  expect(oracle_text.find("eta = 4\n") != std::string::npos, "oracle prints eta = 4");
  expect(oracle_text.find("sigma2 = 4\n") != std::string::npos,
         "oracle prints sigma2(nu1=2) = 4");

  // unknown flag shapes are usage errors
  expect(run("mc --definitely.not=unused --mc.replications 100 --mc.n_grid 50 --mc.tau_grid 50 "
             "--out " +
                 (root / "junk").string(),
             log) == 0,
         "unknown dotted overrides are accepted as config keys");
  expect(run("simulate --badflag 1 --out " + (root / "junk2").string(), log) == 1,
         "non-dotted unknown flags exit 1");

  if (g_failures == 0) std::cout << "cli roundtrip: all checks passed\n";
  return g_failures == 0 ? 0 : 1;
}
