// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "oracles.hpp"
#include "steerlab/covariance.hpp"
#include "steerlab/error.hpp"
#include "steerlab/experiment.hpp"

using namespace steerlab;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::size_t jobs() { return std::max(1u, std::thread::hardware_concurrency()); }

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

ScenarioConfig preset(const std::string& name, std::size_t trials, std::size_t draws) {
  ScenarioConfig cfg = load_config(std::string(STEERLAB_CONFIG_DIR) + "/" + name + ".toml");
  cfg.trials = trials;
  cfg.interferer_draws = draws;
  validate_config(cfg);
  return cfg;
}

const SummaryStats& stat(const ExperimentResult& r, const std::string& label) {
  for (std::size_t i = 0; i < r.labels.size(); ++i)
    if (r.labels[i] == label) return r.stats[i];
  throw InvalidInput("no beamformer " + label);
}

Outcome ac1() {
  std::mt19937_64 rng(101);
  double worst = 0.0;
  for (int t = 0; t < 200; ++t) {
    const HermitianMatrix s(oracle::random_hpd(9, rng)), a(oracle::random_hpd(9, rng));
    for (auto v : {MapVariant::kCoral, MapVariant::kParallelTransport}) {
      const auto e = fit_map(s, a, v);
      worst = std::max(worst, relative_frobenius_error(adapt_covariance(e, a).matrix(), s.matrix()));
    }
  }
  return {worst < 1e-10, "max rel err " + fmt("%.2e", worst) + " (< 1e-10)"};
}

Outcome ac2() {
  std::mt19937_64 rng(102);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const auto [sm, am] = oracle::random_commuting_hpd(9, rng);
    const HermitianMatrix s(sm), a(am);
    const auto e = fit_map(s, a, MapVariant::kCoral).matrix();
    const auto p = fit_map(s, a, MapVariant::kParallelTransport).matrix();
    worst = std::max(worst, (e - p).norm() / e.norm());
  }
  return {worst < 1e-9, "max ||E - E_PT|| / ||E|| " + fmt("%.2e", worst) + " (< 1e-9)"};
}

Outcome ac3() {
  OutputSirSetup setup;
  double worst = 1e300;
  for (const auto& angles : {std::vector<double>{30.0}, std::vector<double>{30.0, 150.0}}) {
    setup.interferer_angles = angles;
    for (const auto& p : theoretic_output_sir(setup)) worst = std::min({worst, p.coral_db, p.pt_db});
  }
  return {worst > 0.0, "min adapted output SIR " + fmt("%.2f", worst) + " dB over 40..140 deg, 1 and 2 interferers (> 0)"};
}

ExperimentResult rf_run(double sir_db) {
  const char* name = sir_db == 0.0 ? "rf_sir0" : (sir_db == -10.0 ? "rf_sir-10" : "rf_sir-20");
  return run_experiment(preset(name, 100, 10), jobs());
}

Outcome ac4() {
  const auto r = rf_run(-20.0);
  const double ads = stat(r, "ds_adapted").median, amv = stat(r, "mvdr_adapted").median,
               amu = stat(r, "music_adapted").median, bds = stat(r, "ds").median;
  const bool pass = ads <= 2.0 && amv <= 2.0 && amu <= 2.0 && bds >= 20.0;
  return {pass, "adapted medians ds " + fmt("%.2f", ads) + " mvdr " + fmt("%.2f", amv) + " music " + fmt("%.2f", amu) +
                    " (<= 2); baseline ds " + fmt("%.2f", bds) + " (>= 20)"};
}

Outcome ac5() {
  bool pass = true;
  std::string detail;
  for (double sir : {0.0, -10.0, -20.0}) {
    const auto r = rf_run(sir);
    detail += "SIR " + fmt("%.0f", sir) + ":";
    for (const char* k : {"ds", "mvdr", "music"}) {
      const auto& b = stat(r, k);
      const auto& a = stat(r, std::string(k) + "_adapted");
      pass = pass && a.median <= 2.0 && a.iqr < b.iqr;
      detail += std::string(" ") + k + " " + fmt("%.2f", a.median) + "/" + fmt("%.2f", a.iqr) + "<" + fmt("%.2f", b.iqr);
    }
    detail += "; ";
  }
  return {pass, detail + "(adapted median/iqr < baseline iqr)"};
}

Outcome ac6() {
  const auto rev = run_experiment(preset("acoustic_reverb", 100, 1), jobs());
  const double rb = stat(rev, "ds").median, ra = stat(rev, "ds_adapted").median;
  bool pass = ra < rb;
  std::string detail = "beta 400 ms ds " + fmt("%.2f", rb) + " -> " + fmt("%.2f", ra) + "; SIR -20:";
  const auto sir = run_experiment(preset("acoustic_sir-20", 100, 5), jobs());
  for (const char* k : {"ds", "mvdr", "music"}) {
    const double b = stat(sir, k).median, a = stat(sir, std::string(k) + "_adapted").median;
    pass = pass && a <= 0.5 * b;
    detail += std::string(" ") + k + " " + fmt("%.2f", b) + " -> " + fmt("%.2f", a);
  }
  return {pass, detail + " (adapted <= 0.5 x baseline)"};
}

Outcome ac7() {
  const auto cfg = preset("rf_two_section", 1, 1);
  const auto sys = train_system(cfg, run_reference_phase(cfg), 0, jobs());
  const auto spec = induced_spectrum(sys.map(MapVariant::kCoral), cfg.geometry(), cfg.grid);
  const auto& roi = std::get<SectorRegion>(cfg.roi);
  const auto& intf = std::get<SectorRegion>(cfg.interference());
  double peak = 0.0, worst = 0.0;
  for (std::size_t k = 0; k < spec.values.size(); ++k) {
    const double th = spec.grid.angle(k);
    if (region_contains_angle(roi, th)) peak = std::max(peak, spec.values[k]);
    if (region_contains_angle(intf, th)) worst = std::max(worst, spec.values[k]);
  }
  const double atten = to_db(peak) - to_db(worst);
  return {atten >= 15.0, "min attenuation in interference regions " + fmt("%.2f", atten) + " dB (>= 15)"};
}

Outcome ac8() {
  std::mt19937_64 rng(108);
  double worst = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const Eigen::Index m = 1 + t % 16;
    const HermitianMatrix a(oracle::random_hpd(m, rng));
    const auto eig = hermitian_eig(a);
    const CMatrix& u = eig.eigenvectors;
    const CMatrix rec = u * eig.eigenvalues.cast<Complex>().asDiagonal() * u.adjoint();
    worst = std::max(worst, relative_frobenius_error(rec, a.matrix()));
    worst = std::max(worst, (u.adjoint() * u - CMatrix::Identity(m, m)).norm() / std::sqrt(static_cast<double>(m)));
    const CMatrix r = matrix_sqrt(a).matrix();
    worst = std::max(worst, relative_frobenius_error(r * r, a.matrix()));
    const CMatrix ir = matrix_inv_sqrt(a).matrix();
    worst = std::max(worst, relative_frobenius_error(ir * a.matrix() * ir, CMatrix::Identity(m, m)));
  }
  double worst2 = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const CMatrix c = oracle::random_complex(2, 2, rng);
    const HermitianMatrix a = HermitianMatrix::symmetrize(c);
    const auto [l1, l2] = oracle::eig2x2(a.matrix());
    const auto eig = hermitian_eig(a);
    const double scale = std::max(1.0, std::abs(l1) + std::abs(l2));
    worst2 = std::max({worst2, std::abs(eig.eigenvalues(0) - l1) / scale, std::abs(eig.eigenvalues(1) - l2) / scale});
  }
  return {worst < 1e-9 && worst2 < 1e-12,
          "max rel err " + fmt("%.2e", worst) + " (< 1e-9); 2x2 eigenvalue err " + fmt("%.2e", worst2) + " (< 1e-12)"};
}

Outcome ac9() {
  auto cfg = parse_config("schema = 1\nseed = 109\nn_s = 50\nn_a = 20\nsir_db = -10\n");
  cfg.rf.snapshots = 10000;
  const auto ad = run_adaptation_phase(cfg, 0, jobs());
  const double err =
      relative_frobenius_error(ad.sigma_a.matrix(), population_adaptation_correlation(cfg, ad).matrix());
  const double tol = 3.0 / std::sqrt(10000.0);
  return {err < tol, "rel err " + fmt("%.4f", err) + " (< " + fmt("%.3f", tol) + ")"};
}

Outcome ac10() {
  const auto cfg = preset("rf_crb", 1, 1);
  std::size_t column = 0;
  for (std::size_t i = 0; i < cfg.beamformers.size(); ++i)
    if (cfg.beamformers[i].label == "ds_adapted") column = i;
  const auto pts = crb_study(cfg, {0.0, 10.0, 20.0, 30.0}, column, 20, 50, jobs());
  bool pass = true;
  std::string detail = "std/crb:";
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (i > 0) pass = pass && pts[i].pooled_std < pts[i - 1].pooled_std;
    detail += " " + fmt("%.0f", pts[i].snr_db) + "dB " + fmt("%.4f", pts[i].pooled_std) + "/" + fmt("%.4f", pts[i].crb);
  }
  const double ratio = pts.back().pooled_std / pts.back().crb;
  pass = pass && ratio <= 3.0;
  return {pass, detail + "; ratio at 30 dB " + fmt("%.2f", ratio) + " (<= 3, std decreasing)"};
}

}  // namespace

int main() {
  struct Criterion {
    const char* id;
    double limit_s;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {"AC1 second-order alignment identity", 5, ac1},
      {"AC2 commuting agreement", 5, ac2},
      {"AC3 theoretic output SIR", 120, ac3},
      {"AC4 RF SIR -20 dB table", 600, ac4},
      {"AC5 RF SIR sweep", 1200, ac5},
      {"AC6 acoustic trends", 1800, ac6},
      {"AC7 induced-spectrum nulls", 120, ac7},
      {"AC8 numerical substrate", 10, ac8},
      {"AC9 population correlation", 60, ac9},
      {"AC10 CRB trend", 600, ac10},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool pass = o.pass && dt < c.limit_s;
    failures += !pass;
    std::printf("%s %s: %s [%.1f s, limit %.0f s]\n", pass ? "PASS" : "FAIL", c.id, o.detail.c_str(), dt, c.limit_s);
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures ? 1 : 0;
}
