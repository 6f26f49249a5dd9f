// End-to-end acceptance run: one PASS/FAIL line per criterion, exit status 1
// if any criterion fails.
//
//   acceptance [--reps N] [--only 1,2,7]
//
// Criteria 3-6 and 8 share one full-scale solve/simulate grid (several
// minutes on a single core).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "aoisched/config.hpp"
#include "aoisched/errors.hpp"
#include "aoisched/experiment.hpp"
#include "aoisched/policy_io.hpp"
#include "oracles.hpp"

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Verdict {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

const std::vector<double> kGammas{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};

// ---------------------------------------------------------------------------
// Criterion 1: two-state fixed point.

Verdict fixed_point() {
  Verdict v;
  const std::vector<aoi::LoopModel> loops{aoi::LoopModel::scalar(1.0, 1.0, 1.0, 1.0, 0.5)};
  const auto r = aoi::value_iteration(loops, aoi::NetworkConfig{1, 1, 2}, aoi::CostKind::error,
                                      aoi::SolverConfig{0.5, 1e-10});
  const auto [j1, j2] = oracle::solve_2x2_fixed_point(1.0, 2.0, 0.5, 0.5, 0.5, 0.5, 0.5);
  const double err = std::max(std::abs(r.J[0] - j1), std::abs(r.J[1] - j2));
  v.detail << "J=(" << r.J[0] << ", " << r.J[1] << "), closed form (" << j1 << ", " << j2 << "), max err " << err;
  v.require(err <= 1e-8, "J within 1e-8");
  v.require(r.policy.action_at(0).mask == 1 && r.policy.action_at(1).mask == 1, "schedule in both states");
  return v;
}

// ---------------------------------------------------------------------------
// Criterion 2: brute-force finite-horizon DP on N=2, M=3.

Verdict brute_force() {
  Verdict v;
  std::mt19937_64 rng(20240601);
  std::uniform_real_distribution<double> ua(1.0, 2.0), up(0.5, 1.0);
  const double gamma = 0.9, theta = 1e-8;
  const int H = 200, M = 3;
  double worst = 0.0, worst_tol = 0.0;
  int failures = 0;
  for (int inst = 0; inst < 20; ++inst) {
    const std::vector<double> a{ua(rng), ua(rng)}, p{up(rng), up(rng)};
    std::vector<aoi::LoopModel> loops;
    for (int i = 0; i < 2; ++i) loops.push_back(aoi::LoopModel::scalar(a[i], 1, 1, a[i], p[i]));
    auto cost = [&](const oracle::Ages& s) {
      return oracle::penalty_scalar(a[0], 1.0, s[0]) + oracle::penalty_scalar(a[1], 1.0, s[1]);
    };
    const auto V = oracle::finite_horizon_dp(2, M, 1, p, cost, gamma, H);
    double cmax = 0.0;
    for (const auto& s : oracle::all_states(2, M)) cmax = std::max(cmax, cost(s));
    const double tol = std::pow(gamma, H) * cmax / (1 - gamma) + 2 * theta;
    const aoi::NetworkConfig net{2, 1, static_cast<std::uint32_t>(M)};
    const aoi::StateSpace space(net);
    const auto r = aoi::value_iteration(loops, net, aoi::CostKind::error, aoi::SolverConfig{gamma, theta});
    for (const auto& [s, val] : V) {
      const double d = std::abs(r.J[space.encode(aoi::AoiState(s.begin(), s.end()))] - val);
      if (d > tol) ++failures;
      if (d > worst) {
        worst = d;
        worst_tol = tol;
      }
    }
  }
  v.detail << "20 instances, theta=" << theta << ", worst |J-V_H|=" << worst << " (tol " << worst_tol << ")";
  v.require(failures == 0, std::to_string(failures) + " states out of tolerance");
  return v;
}

// ---------------------------------------------------------------------------
// Criteria 3-6, 8: full-scale grid.

struct Grid {
  std::map<double, aoi::RunSummary> des25, aois25, des20, des15;
  aoi::RunSummary ges;
  double des09_solve_seconds = 0.0;
  long des09_sweeps = 0;
  double fig46_seconds = 0.0;  // DES + AoIS + GES over all gammas at M = 25
  double total_seconds = 0.0;
};

aoi::RunSummary table_run(const aoi::ExperimentConfig& cfg, aoi::CostKind kind, double gamma, std::uint32_t M,
                          aoi::SolvedPolicy* solved_out = nullptr) {
  const auto solved = aoi::solve_policy(cfg, kind, gamma, M);
  if (solved_out) *solved_out = solved;
  const auto net = cfg.network(M);
  const auto summary = aoi::run_monte_carlo(aoi::lookup_spec(solved.policy, net), cfg.loops, net, cfg.sim);
  std::fprintf(stderr, "  %-4s M=%-2u gamma=%.1f: %ld sweeps %.1fs | err %.3f +- %.3f, aoi %.4f +- %.4f\n",
               kind == aoi::CostKind::error ? "DES" : "AoIS", M, gamma, solved.sweeps, solved.seconds,
               summary.avg_error.mean, summary.avg_error.ci, summary.avg_aoi.mean, summary.avg_aoi.ci);
  return summary;
}

Grid run_grid(aoi::ExperimentConfig cfg) {
  Grid g;
  const auto start = Clock::now();
  cfg.cache_dir.clear();  // time real solves
  std::fprintf(stderr, "full-scale grid: T=%llu reps=%u\n", static_cast<unsigned long long>(cfg.sim.T),
               cfg.sim.reps);

  for (double gamma : kGammas) {
    aoi::SolvedPolicy solved;
    g.des25[gamma] = table_run(cfg, aoi::CostKind::error, gamma, 25, &solved);
    if (gamma == 0.9) {
      g.des09_solve_seconds = solved.seconds;
      g.des09_sweeps = solved.sweeps;
    }
  }
  for (double gamma : kGammas) g.aois25[gamma] = table_run(cfg, aoi::CostKind::aoi, gamma, 25);
  const auto net = cfg.network(25);
  g.ges = aoi::run_monte_carlo(aoi::greedy_spec(cfg.loops, cfg.R, 100), cfg.loops, net, cfg.sim);
  std::fprintf(stderr, "  GES: err %.3f +- %.3f, aoi %.4f +- %.4f\n", g.ges.avg_error.mean, g.ges.avg_error.ci,
               g.ges.avg_aoi.mean, g.ges.avg_aoi.ci);
  g.fig46_seconds = seconds_since(start);

  for (double gamma : kGammas) g.des20[gamma] = table_run(cfg, aoi::CostKind::error, gamma, 20);
  for (double gamma : kGammas) g.des15[gamma] = table_run(cfg, aoi::CostKind::error, gamma, 15);
  g.total_seconds = seconds_since(start);
  return g;
}

bool within(double x, double target, double tol) { return std::abs(x - target) <= tol; }

Verdict aoi_levels(const Grid& g) {
  Verdict v;
  double lo = INFINITY, hi = -INFINITY;
  for (const auto& [gamma, s] : g.aois25) {
    lo = std::min(lo, s.avg_aoi.mean);
    hi = std::max(hi, s.avg_aoi.mean);
    v.require(within(s.avg_aoi.mean, 3.33, 0.05), "AoIS avg AoI at gamma " + std::to_string(gamma));
  }
  const double d01 = g.des25.at(0.1).avg_aoi.mean, d05 = g.des25.at(0.5).avg_aoi.mean,
               d09 = g.des25.at(0.9).avg_aoi.mean;
  v.detail << "AoIS in [" << lo << ", " << hi << "], GES " << g.ges.avg_aoi.mean << ", DES(0.1/0.5/0.9) " << d01
           << "/" << d05 << "/" << d09;
  v.require(within(g.ges.avg_aoi.mean, 3.685, 0.05), "GES avg AoI");
  v.require(within(d09, 3.94, 0.10), "DES avg AoI at gamma 0.9");
  v.require(within(d05, 4.21, 0.10), "DES avg AoI at gamma 0.5");
  v.require(d05 > d01 && d05 > d09, "DES concave in gamma");
  return v;
}

Verdict error_levels(const Grid& g) {
  Verdict v;
  const double d01 = g.des25.at(0.1).avg_error.mean, d09 = g.des25.at(0.9).avg_error.mean;
  v.detail << "DES(0.1)=" << d01 << " DES(0.9)=" << d09 << " GES=" << g.ges.avg_error.mean << " AoIS in [";
  double lo = INFINITY, hi = -INFINITY;
  for (const auto& [gamma, s] : g.aois25) {
    lo = std::min(lo, s.avg_error.mean);
    hi = std::max(hi, s.avg_error.mean);
  }
  v.detail << lo << ", " << hi << "]";
  v.require(within(d01, 31.2, 1.5), "DES at gamma 0.1");
  v.require(within(d09, 27.8, 1.5), "DES at gamma 0.9");
  for (std::size_t k = 4; k + 1 < kGammas.size(); ++k)
    v.require(g.des25.at(kGammas[k + 1]).avg_error.mean <= g.des25.at(kGammas[k]).avg_error.mean,
              "DES decreasing after gamma " + std::to_string(kGammas[k]));
  v.require(within(g.ges.avg_error.mean, 32.7, 1.5), "GES error");
  for (double gamma : kGammas) {
    const double aois = g.aois25.at(gamma).avg_error.mean;
    const double des = g.des25.at(gamma).avg_error.mean;
    v.require(aois >= 80 && aois <= 110, "AoIS error range at gamma " + std::to_string(gamma));
    v.require(des < g.ges.avg_error.mean && g.ges.avg_error.mean < aois, "ordering at gamma " + std::to_string(gamma));
  }
  return v;
}

Verdict truncation_trend(const Grid& g) {
  Verdict v;
  int overlaps = 0;
  for (double gamma : kGammas) {
    const auto& a = g.des20.at(gamma).avg_error;
    const auto& b = g.des25.at(gamma).avg_error;
    const bool overlap = a.mean - a.ci <= b.mean + b.ci && b.mean - b.ci <= a.mean + a.ci;
    overlaps += overlap;
    v.require(overlap, "M=20 vs M=25 CI overlap at gamma " + std::to_string(gamma));
  }
  const double m15 = g.des15.at(0.6).avg_error.mean, m25 = g.des25.at(0.6).avg_error.mean;
  double peak_gamma = 0.0, peak = -INFINITY;
  for (const auto& [gamma, s] : g.des15)
    if (s.avg_error.mean > peak) {
      peak = s.avg_error.mean;
      peak_gamma = gamma;
    }
  v.detail << overlaps << "/9 overlaps; at gamma 0.6 M=15 " << m15 << " vs M=25 " << m25 << "; M=15 peak " << peak
           << " at gamma " << peak_gamma;
  v.require(m15 - m25 >= 10.0, "M=15 exceeds M=25 by >= 10 at gamma 0.6");
  v.require(peak_gamma >= 0.5 && peak_gamma <= 0.7, "M=15 degradation peaks in [0.5, 0.7]");
  return v;
}

Verdict fairness(const Grid& g) {
  Verdict v;
  double lo = INFINITY, hi = -INFINITY;
  for (const auto& [gamma, s] : g.aois25)
    for (const auto& share : s.shares) {
      lo = std::min(lo, share.mean);
      hi = std::max(hi, share.mean);
    }
  v.detail << "AoIS shares over all gammas in [" << lo << ", " << hi << "]";
  v.require(lo >= 0.19 && hi <= 0.21, "every share 0.20 +- 0.01");
  return v;
}

Verdict performance(const Grid& g) {
  Verdict v;
  v.detail << "gamma=0.9 solve " << g.des09_solve_seconds << " s (" << g.des09_sweeps << " sweeps); DES+AoIS+GES "
           << "sweep " << g.fig46_seconds << " s; whole grid " << g.total_seconds << " s";
  v.require(g.des09_solve_seconds <= 600.0, "full-scale solve within 10 minutes");
  v.require(g.fig46_seconds <= 7200.0, "full sweep within 2 hours");
  return v;
}

// ---------------------------------------------------------------------------
// Criterion 7: property suites (compact re-runs of the unit-level properties).

Verdict properties() {
  Verdict v;
  int checks = 0;
  auto check = [&](bool ok, const std::string& what) {
    ++checks;
    v.require(ok, what);
  };

  // Penalty monotonicity and identity dynamics.
  for (double a : {0.5, 1.0, 1.1, 1.9}) {
    const auto t = aoi::build_penalty_table(aoi::LoopModel::scalar(a, 1, 1, a, 0.9), 40);
    bool mono = true;
    for (std::uint64_t d = 1; d < 40; ++d) mono = mono && t(d + 1) >= t(d);
    check(mono, "penalty monotone");
  }
  {
    aoi::LoopModel id;
    id.A = Eigen::MatrixXd::Identity(2, 2);
    id.B = Eigen::MatrixXd::Identity(2, 2);
    id.L = Eigen::MatrixXd::Zero(2, 2);
    id.Sigma = Eigen::MatrixXd::Identity(2, 2) * 0.5;
    const auto t = aoi::build_penalty_table(id, 30);
    bool ok = true;
    for (std::uint64_t d = 1; d <= 30; ++d) ok = ok && t(d) == static_cast<double>(d);
    check(ok, "g = age for identity dynamics");
  }

  // Transition sums and encoding bijection.
  {
    bool sums = true, bij = true;
    for (std::uint32_t N = 1; N <= 3; ++N)
      for (std::uint32_t M = 1; M <= 5; ++M)
        for (std::uint32_t R = 1; R <= N; ++R) {
          const aoi::NetworkConfig net{N, R, M};
          const aoi::StateSpace space(net);
          const std::vector<double> p{0.9, 0.35, 0.6};
          const std::span<const double> pp(p.data(), N);
          std::set<aoi::StateIndex> seen;
          for (const auto& t : oracle::all_states(static_cast<int>(N), static_cast<int>(M))) {
            const aoi::AoiState s(t.begin(), t.end());
            const auto idx = space.encode(s);
            bij = bij && space.decode(idx) == s && idx < space.size();
            seen.insert(idx);
            for (const auto& a : aoi::enumerate_actions(net)) {
              double total = 0.0;
              for (const auto& tr : aoi::successors(s, a, pp, space)) total += tr.prob;
              sums = sums && std::abs(total - 1.0) <= 1e-12;
            }
          }
          bij = bij && seen.size() == space.size();
        }
    check(sums, "transition probabilities sum to 1");
    check(bij, "encode/decode bijection");
  }

  std::vector<aoi::LoopModel> three;
  for (double a : {1.1, 1.5, 1.9}) three.push_back(aoi::LoopModel::scalar(a, 1, 1, a, 0.8));

  // Jacobi contraction.
  {
    const auto r = aoi::value_iteration(three, aoi::NetworkConfig{3, 1, 10}, aoi::CostKind::error,
                                        aoi::SolverConfig{0.9, 1e-6});
    bool ok = true;
    for (std::size_t k = 1; k < r.residuals.size(); ++k) ok = ok && r.residuals[k] <= 0.9 * r.residuals[k - 1] + 1e-9;
    check(ok, "residual contraction");
  }

  // Sigma scaling leaves the policy bit-identical.
  {
    auto scaled = three;
    for (auto& l : scaled) l.Sigma *= 4.0;
    const aoi::NetworkConfig net{3, 1, 8};
    const auto base = aoi::value_iteration(three, net, aoi::CostKind::error, aoi::SolverConfig{0.9, 0.1});
    const auto big = aoi::value_iteration(scaled, net, aoi::CostKind::error, aoi::SolverConfig{0.9, 0.4});
    check(aoi::serialize_policy(base.policy) == aoi::serialize_policy(big.policy), "sigma scaling, factor 4");
    for (auto& l : scaled) l.Sigma *= 3.7 / 4.0;
    const auto tight = aoi::value_iteration(three, net, aoi::CostKind::error, aoi::SolverConfig{0.9, 1e-9});
    const auto odd = aoi::value_iteration(scaled, net, aoi::CostKind::error, aoi::SolverConfig{0.9, 3.7e-9});
    bool rel = true;
    for (std::size_t i = 0; i < tight.J.size(); ++i) rel = rel && std::abs(odd.J[i] - 3.7 * tight.J[i]) <= 1e-9 * 3.7 * tight.J[i];
    check(rel && odd.policy.choice == tight.policy.choice, "sigma scaling, factor 3.7");
  }

  // Permutation symmetry for identical loops.
  for (std::uint32_t N : {2u, 3u}) {
    const std::vector<aoi::LoopModel> same(N, aoi::LoopModel::scalar(1.4, 1, 1, 1.4, 0.8));
    const aoi::NetworkConfig net{N, 1, 6};
    const aoi::StateSpace space(net);
    const auto r = aoi::value_iteration(same, net, aoi::CostKind::error, aoi::SolverConfig{0.9, 1e-6});
    bool ok = true;
    for (aoi::StateIndex idx = 0; idx < space.size(); ++idx) {
      auto s = space.decode(idx);
      std::sort(s.begin(), s.end());
      do ok = ok && std::abs(r.J[space.encode(s)] - r.J[idx]) <= 1e-12 * r.J[idx];
      while (std::next_permutation(s.begin(), s.end()));
    }
    check(ok, "permutation symmetry N=" + std::to_string(N));
  }

  // Full-state vs error-recursion trajectories.
  {
    aoi::SimConfig sim;
    sim.T = 500;
    std::vector<double> e1, e2;
    auto record = [](std::vector<double>& out) {
      return aoi::SlotObserver([&out](const aoi::SlotRecord& rec) {
        out.insert(out.end(), rec.squared_error.begin(), rec.squared_error.end());
      });
    };
    const aoi::NetworkConfig net{3, 1, 10};
    auto s1 = aoi::greedy_spec(three, 1, 40).make();
    const auto o1 = record(e1);
    aoi::run_episode(*s1, three, net, sim, 17, &o1);
    sim.mode = aoi::SimMode::full_state;
    auto s2 = aoi::greedy_spec(three, 1, 40).make();
    const auto o2 = record(e2);
    aoi::run_episode(*s2, three, net, sim, 17, &o2);
    bool ok = e1.size() == e2.size();
    for (std::size_t k = 0; ok && k < e1.size(); ++k) ok = std::abs(e1[k] - e2[k]) <= 1e-9 * (1 + e1[k]);
    check(ok, "full-state equivalence");
  }

  // Seed determinism end to end.
  {
    aoi::SimConfig sim;
    sim.T = 2000;
    sim.reps = 6;
    sim.seed = 5;
    const aoi::NetworkConfig net{3, 1, 10};
    const auto spec = aoi::greedy_spec(three, 1, 40);
    const auto a = aoi::run_monte_carlo(spec, three, net, sim);
    const auto b = aoi::run_monte_carlo(spec, three, net, sim);
    check(a.avg_error.mean == b.avg_error.mean && a.avg_error.std == b.avg_error.std &&
              a.avg_aoi.mean == b.avg_aoi.mean,
          "seed determinism");
  }
  v.detail << checks << " property checks";
  return v;
}

void report(int id, const char* name, const Verdict& v, int& failures) {
  std::printf("criterion %d %s: %s | %s\n", id, v.pass ? "PASS" : "FAIL", name, v.detail.str().c_str());
  std::fflush(stdout);
  if (!v.pass) ++failures;
}

}  // namespace

int main(int argc, char** argv) {
  std::uint32_t reps = 100;
  std::set<int> only;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--reps" && i + 1 < argc) {
      reps = static_cast<std::uint32_t>(std::stoul(argv[++i]));
    } else if (arg == "--only" && i + 1 < argc) {
      std::stringstream ss(argv[++i]);
      for (std::string tok; std::getline(ss, tok, ',');) only.insert(std::stoi(tok));
    } else {
      std::fprintf(stderr, "usage: acceptance [--reps N] [--only 1,2,...]\n");
      return 2;
    }
  }
  auto wanted = [&](int id) { return only.empty() || only.count(id) > 0; };

  int failures = 0;
  try {
    if (wanted(1)) report(1, "two-state fixed point", fixed_point(), failures);
    if (wanted(2)) report(2, "brute-force DP agreement", brute_force(), failures);
    if (wanted(7)) report(7, "property suites", properties(), failures);

    if (wanted(3) || wanted(4) || wanted(5) || wanted(6) || wanted(8)) {
      auto cfg = aoi::load_config(std::string(AOISCHED_CONFIG_DIR) + "/baseline.json");
      cfg.sim.reps = reps;
      const Grid g = run_grid(cfg);
      if (wanted(3)) report(3, "average AoI levels", aoi_levels(g), failures);
      if (wanted(4)) report(4, "average error levels", error_levels(g), failures);
      if (wanted(5)) report(5, "truncation level trend", truncation_trend(g), failures);
      if (wanted(6)) report(6, "age-optimal fairness", fairness(g), failures);
      if (wanted(8)) report(8, "performance envelope", performance(g), failures);
    }
  } catch (const std::exception& e) {
    std::printf("acceptance aborted: %s\n", e.what());
    return 1;
  }
  std::printf("%s: %d criteria failed\n", failures == 0 ? "ALL PASS" : "FAILURES", failures);
  return failures == 0 ? 0 : 1;
}
