#include "aoisched/config.hpp"

#include <fstream>

#include "aoisched/errors.hpp"

namespace aoi {

namespace {

using nlohmann::json;

Eigen::MatrixXd matrix_from(const json& j, const std::string& what) {
  if (j.is_number()) return Eigen::MatrixXd::Constant(1, 1, j.get<double>());
  if (!j.is_array() || j.empty()) throw ConfigError(what + " must be a number or a non-empty nested array");
  // A flat array is a column vector.
  if (j.front().is_number()) {
    Eigen::MatrixXd m(static_cast<Eigen::Index>(j.size()), 1);
    for (std::size_t r = 0; r < j.size(); ++r) m(static_cast<Eigen::Index>(r), 0) = j[r].get<double>();
    return m;
  }
  const std::size_t rows = j.size();
  const std::size_t cols = j.front().size();
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    if (!j[r].is_array() || j[r].size() != cols) throw ConfigError(what + " rows must have equal length");
    for (std::size_t c = 0; c < cols; ++c)
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = j[r][c].get<double>();
  }
  return m;
}

template <typename T>
std::vector<T> scalar_or_list(const json& j) {
  if (j.is_array()) return j.get<std::vector<T>>();
  return {j.get<T>()};
}

SweepMode sweep_from(const std::string& s) {
  if (s == "jacobi") return SweepMode::jacobi;
  if (s == "gauss_seidel") return SweepMode::gauss_seidel;
  throw ConfigError("solver.sweep must be 'jacobi' or 'gauss_seidel'");
}

CostKind cost_from(const std::string& s) {
  if (s == "error") return CostKind::error;
  if (s == "aoi") return CostKind::aoi;
  throw ConfigError("solver.cost must be 'error' or 'aoi'");
}

SimMode mode_from(const std::string& s) {
  if (s == "error_recursion") return SimMode::error_recursion;
  if (s == "full_state") return SimMode::full_state;
  throw ConfigError("sim.mode must be 'error_recursion' or 'full_state'");
}

}  // namespace

void ExperimentConfig::validate() const {
  if (loops.empty()) throw ConfigError("config needs at least one loop");
  for (std::size_t i = 0; i < loops.size(); ++i) {
    try {
      loops[i].validate();
    } catch (const ConfigError& e) {
      throw ConfigError("loop " + std::to_string(i) + ": " + e.what());
    }
  }
  if (M_list.empty()) throw ConfigError("network.M list is empty");
  if (gammas.empty()) throw ConfigError("solver.gamma list is empty");
  for (auto M : M_list) network(M).validate();
  for (double g : gammas) solver(g).validate();
  sim.validate(N());
}

std::vector<std::size_t> ExperimentConfig::non_diagonal_noise_loops() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < loops.size(); ++i)
    if (!loops[i].has_diagonal_noise()) out.push_back(i);
  return out;
}

ExperimentConfig parse_config(const json& j) {
  ExperimentConfig cfg;
  try {
    if (!j.contains("loops") || !j["loops"].is_array()) throw ConfigError("config needs a 'loops' array");
    for (const auto& lj : j["loops"]) {
      LoopModel loop;
      loop.A = matrix_from(lj.at("A"), "A");
      const auto n = loop.A.rows();
      loop.B = lj.contains("B") ? matrix_from(lj["B"], "B") : Eigen::MatrixXd::Identity(n, n);
      loop.Sigma = lj.contains("Sigma") ? matrix_from(lj["Sigma"], "Sigma") : Eigen::MatrixXd::Identity(n, n);
      loop.L = lj.contains("L") ? matrix_from(lj["L"], "L") : Eigen::MatrixXd::Zero(loop.B.cols(), n);
      // A row gain for a single-input loop may be written as a flat array.
      if (loop.L.cols() == 1 && loop.L.rows() == n && n > 1 && loop.B.cols() == 1) loop.L.transposeInPlace();
      loop.p = lj.value("p", 1.0);
      cfg.loops.push_back(std::move(loop));
    }

    if (j.contains("network")) {
      const auto& nj = j["network"];
      cfg.R = nj.value("R", 1u);
      if (nj.contains("M")) cfg.M_list = scalar_or_list<std::uint32_t>(nj["M"]);
      if (nj.contains("N") && nj["N"].get<std::uint32_t>() != cfg.N())
        throw ConfigError("network.N does not match the number of loops");
    }

    if (j.contains("solver")) {
      const auto& sj = j["solver"];
      if (sj.contains("gamma")) cfg.gammas = scalar_or_list<double>(sj["gamma"]);
      cfg.theta = sj.value("theta", cfg.theta);
      cfg.max_sweeps = sj.value("max_sweeps", cfg.max_sweeps);
      if (sj.contains("sweep")) cfg.sweep = sweep_from(sj["sweep"].get<std::string>());
      if (sj.contains("cost")) cfg.solve_cost = cost_from(sj["cost"].get<std::string>());
    }

    if (j.contains("sim")) {
      const auto& mj = j["sim"];
      cfg.sim.T = mj.value("T", cfg.sim.T);
      cfg.sim.reps = mj.value("reps", cfg.sim.reps);
      cfg.sim.seed = mj.value("seed", cfg.sim.seed);
      if (mj.contains("mode")) cfg.sim.mode = mode_from(mj["mode"].get<std::string>());
      if (mj.contains("initial_aoi")) {
        const auto& ij = mj["initial_aoi"];
        if (ij.is_string()) {
          if (ij.get<std::string>() != "all_one") throw ConfigError("sim.initial_aoi must be 'all_one' or a list");
        } else {
          cfg.sim.initial_ages = ij.get<std::vector<std::uint64_t>>();
        }
      }
    }

    if (j.contains("schedulers"))
      for (const auto& s : j["schedulers"]) cfg.schedulers.push_back(scheduler_kind_from_string(s.get<std::string>()));
    cfg.output = j.value("output", std::string{});
    cfg.cache_dir = j.value("cache_dir", std::string{});
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
  }
  return parse_config(j);
}

}  // namespace aoi
