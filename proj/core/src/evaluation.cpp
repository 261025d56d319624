#include "ovq/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include <nlohmann/json.hpp>

#include "ovq/errors.hpp"

namespace ovq {

namespace {

void check_lengths(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw ArgumentError("vector lengths differ");
  if (x.size() < 2) throw ArgumentError("need at least 2 points");
}

std::vector<double> average_ranks(const std::vector<double>& v) {
  const std::size_t n = v.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
    const double rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

double model(double q, const std::array<double, 4>& b) {
  const double denom = std::max(std::abs(b[3]), 1e-12);
  return b[1] + (b[0] - b[1]) / (1.0 + std::exp(-(q - b[2]) / denom));
}

double sse_of(const std::vector<double>& q, const std::vector<double>& target,
              const std::array<double, 4>& b) {
  double sse = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    const double r = model(q[i], b) - target[i];
    sse += r * r;
  }
  return sse;
}

// Solves the 4x4 normal equations with partial pivoting; tiny ridge keeps
// near-singular Jacobians solvable.
bool solve4(std::array<std::array<double, 4>, 4> a, std::array<double, 4> rhs,
            std::array<double, 4>& out) {
  for (int i = 0; i < 4; ++i) a[i][i] += 1e-12 * (1.0 + std::abs(a[i][i]));
  for (int col = 0; col < 4; ++col) {
    int pivot = col;
    for (int row = col + 1; row < 4; ++row) {
      if (std::abs(a[row][col]) > std::abs(a[pivot][col])) pivot = row;
    }
    if (std::abs(a[pivot][col]) < 1e-300) return false;
    std::swap(a[col], a[pivot]);
    std::swap(rhs[col], rhs[pivot]);
    for (int row = col + 1; row < 4; ++row) {
      const double f = a[row][col] / a[col][col];
      for (int k = col; k < 4; ++k) a[row][k] -= f * a[col][k];
      rhs[row] -= f * rhs[col];
    }
  }
  for (int row = 3; row >= 0; --row) {
    double acc = rhs[row];
    for (int k = row + 1; k < 4; ++k) acc -= a[row][k] * out[k];
    out[row] = acc / a[row][row];
  }
  return true;
}

}  // namespace

LogisticFit logistic_fit(const std::vector<double>& objective,
                         const std::vector<double>& target) {
  if (objective.size() != target.size()) throw ArgumentError("vector lengths differ");
  if (objective.size() < 5) throw ArgumentError("logistic fit needs at least 5 points");
  const std::size_t n = objective.size();

  double q_mean = 0.0;
  for (double q : objective) q_mean += q;
  q_mean /= static_cast<double>(n);
  double q_ss = 0.0;
  for (double q : objective) q_ss += (q - q_mean) * (q - q_mean);
  const double q_std = std::sqrt(q_ss / static_cast<double>(n - 1));
  if (q_std == 0.0) throw DataError("objective scores are constant; cannot fit");

  std::array<double, 4> beta = {*std::max_element(target.begin(), target.end()),
                                *std::min_element(target.begin(), target.end()), q_mean,
                                q_std / 4.0};

  double sse = sse_of(objective, target, beta);
  LogisticFit fit;
  constexpr int kMaxIterations = 10000;
  int iter = 0;
  for (; iter < kMaxIterations; ++iter) {
    // Gauss-Newton step from the residual Jacobian.
    std::array<std::array<double, 4>, 4> jtj{};
    std::array<double, 4> jtr{};
    const double b4 = std::max(std::abs(beta[3]), 1e-12);
    for (std::size_t i = 0; i < n; ++i) {
      const double x = (objective[i] - beta[2]) / b4;
      const double s = 1.0 / (1.0 + std::exp(-x));
      const double resid = beta[1] + (beta[0] - beta[1]) * s - target[i];
      const double ds = s * (1.0 - s);
      const std::array<double, 4> grad = {
          s,
          1.0 - s,
          -(beta[0] - beta[1]) * ds / b4,
          -(beta[0] - beta[1]) * ds * x / b4,
      };
      for (int a = 0; a < 4; ++a) {
        jtr[a] += grad[a] * resid;
        for (int b = 0; b < 4; ++b) jtj[a][b] += grad[a] * grad[b];
      }
    }
    std::array<double, 4> step{};
    if (!solve4(jtj, jtr, step)) break;

    double alpha = 1.0;
    std::array<double, 4> next = beta;
    double next_sse = sse;
    bool improved = false;
    for (int halving = 0; halving < 40; ++halving) {
      std::array<double, 4> trial = beta;
      for (int a = 0; a < 4; ++a) trial[a] -= alpha * step[a];
      const double trial_sse = sse_of(objective, target, trial);
      if (trial_sse < sse) {
        next = trial;
        next_sse = trial_sse;
        improved = true;
        break;
      }
      alpha /= 2.0;
    }
    if (!improved) break;  // local minimum at the current point

    const double change = std::abs(sse - next_sse) / std::max(sse, 1e-300);
    beta = next;
    sse = next_sse;
    if (change < 1e-10) {
      ++iter;
      break;
    }
  }

  fit.converged = iter < kMaxIterations;
  fit.iterations = iter;
  beta[3] = std::abs(beta[3]);
  fit.betas = beta;
  fit.fitted.resize(n);
  for (std::size_t i = 0; i < n; ++i) fit.fitted[i] = model(objective[i], beta);
  return fit;
}

double pcc(const std::vector<double>& x, const std::vector<double>& y) {
  check_lengths(x, y);
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double cov = 0.0, vx = 0.0, vy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    cov += (x[i] - mx) * (y[i] - my);
    vx += (x[i] - mx) * (x[i] - mx);
    vy += (y[i] - my) * (y[i] - my);
  }
  if (vx == 0.0 || vy == 0.0) throw DataError("zero variance; correlation undefined");
  return cov / std::sqrt(vx * vy);
}

double srcc(const std::vector<double>& x, const std::vector<double>& y) {
  check_lengths(x, y);
  return pcc(average_ranks(x), average_ranks(y));
}

double rmse(const std::vector<double>& x, const std::vector<double>& y) {
  check_lengths(x, y);
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) acc += (x[i] - y[i]) * (x[i] - y[i]);
  return std::sqrt(acc / static_cast<double>(x.size()));
}

double mae(const std::vector<double>& x, const std::vector<double>& y) {
  check_lengths(x, y);
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) acc += std::abs(x[i] - y[i]);
  return acc / static_cast<double>(x.size());
}

EvalStats evaluate_metric(const std::map<std::string, double>& objective_by_sequence,
                          const std::map<std::string, double>& dmos_by_sequence) {
  std::string mismatch;
  for (const auto& [seq, v] : objective_by_sequence) {
    if (dmos_by_sequence.count(seq) == 0) mismatch += " -" + seq;
  }
  for (const auto& [seq, v] : dmos_by_sequence) {
    if (objective_by_sequence.count(seq) == 0) mismatch += " +" + seq;
  }
  if (!mismatch.empty()) {
    throw DataError("objective and DMOS sequence sets differ:" + mismatch);
  }

  EvalStats stats;
  for (const auto& [seq, q] : objective_by_sequence) {
    stats.sequence_ids.push_back(seq);
    stats.objective.push_back(q);
    stats.target.push_back(100.0 - dmos_by_sequence.at(seq));  // reversed DMOS
  }
  const LogisticFit fit = logistic_fit(stats.objective, stats.target);
  stats.fitted = fit.fitted;
  stats.betas = fit.betas;
  stats.fit_converged = fit.converged;
  stats.srcc = srcc(stats.fitted, stats.target);
  stats.pcc = pcc(stats.fitted, stats.target);
  stats.rmse = rmse(stats.fitted, stats.target);
  stats.mae = mae(stats.fitted, stats.target);
  return stats;
}

void write_eval_json(const EvalStats& stats, const std::string& path) {
  nlohmann::json j;
  j["srcc"] = stats.srcc;
  j["pcc"] = stats.pcc;
  j["rmse"] = stats.rmse;
  j["mae"] = stats.mae;
  j["betas"] = stats.betas;
  j["fit_converged"] = stats.fit_converged;
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < stats.sequence_ids.size(); ++i) {
    rows.push_back({{"sequence_id", stats.sequence_ids[i]},
                    {"objective", stats.objective[i]},
                    {"fitted", stats.fitted[i]},
                    {"target", stats.target[i]}});
  }
  j["sequences"] = std::move(rows);
  std::ofstream out(path);
  if (!out) throw DataError("cannot write evaluation: " + path);
  out << j.dump(2) << "\n";
}

}  // namespace ovq
