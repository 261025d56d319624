#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

namespace ovq {

struct LogisticFit {
  std::array<double, 4> betas{};  // beta1..beta4, beta4 reported as |beta4|
  std::vector<double> fitted;
  bool converged = true;
  int iterations = 0;
};

// Fits Q' = b2 + (b1 - b2) / (1 + exp(-(Q - b3)/|b4|)) to the targets by
// nonlinear least squares (Gauss-Newton with step halving). Converged when
// the relative SSE change drops below 1e-10, capped at 1e4 iterations;
// non-convergence returns the best iterate with converged = false.
LogisticFit logistic_fit(const std::vector<double>& objective,
                         const std::vector<double>& target);

double pcc(const std::vector<double>& x, const std::vector<double>& y);
double srcc(const std::vector<double>& x, const std::vector<double>& y);  // average ranks on ties
double rmse(const std::vector<double>& x, const std::vector<double>& y);
double mae(const std::vector<double>& x, const std::vector<double>& y);

struct EvalStats {
  double srcc = 0.0;
  double pcc = 0.0;
  double rmse = 0.0;
  double mae = 0.0;
  std::array<double, 4> betas{};
  bool fit_converged = true;
  // sequence -> (objective, fitted, reversed-DMOS target)
  std::vector<std::string> sequence_ids;
  std::vector<double> objective;
  std::vector<double> fitted;
  std::vector<double> target;
};

// Reverses the DMOS (100 - value), fits the logistic curve, then computes the
// four statistics between fitted scores and the reversed DMOS. Sequence sets
// must match exactly.
EvalStats evaluate_metric(const std::map<std::string, double>& objective_by_sequence,
                          const std::map<std::string, double>& dmos_by_sequence);

void write_eval_json(const EvalStats& stats, const std::string& path);

}  // namespace ovq
