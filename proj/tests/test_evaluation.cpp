#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "helpers.hpp"
#include "ovq/errors.hpp"
#include "ovq/evaluation.hpp"

using namespace ovq;

namespace {

double unit(std::uint64_t& state) {
  return static_cast<double>(testutil::splitmix(state) >> 11) * 0x1.0p-53;
}

double logistic(double q, double b1, double b2, double b3, double b4) {
  return b2 + (b1 - b2) / (1.0 + std::exp(-(q - b3) / std::abs(b4)));
}

// rank vector with average ranks on ties, straight from the definition
std::vector<double> ranks_of(const std::vector<double>& v) {
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    double less = 0.0, equal = 0.0;
    for (std::size_t j = 0; j < v.size(); ++j) {
      if (v[j] < v[i]) ++less;
      if (v[j] == v[i]) ++equal;
    }
    r[i] = less + (equal + 1.0) / 2.0;
  }
  return r;
}

double pearson_loop(const std::vector<double>& x, const std::vector<double>& y) {
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(y.size());
  double cov = 0.0, vx = 0.0, vy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    cov += (x[i] - mx) * (y[i] - my);
    vx += (x[i] - mx) * (x[i] - mx);
    vy += (y[i] - my) * (y[i] - my);
  }
  return cov / std::sqrt(vx * vy);
}

}  // namespace

TEST_SUITE("evaluation") {

TEST_CASE("logistic_fit recovers a noise-free curve") {
  std::vector<double> q, target;
  for (int i = 0; i < 20; ++i) {
    q.push_back(10.0 + 2.0 * i);
    target.push_back(logistic(q.back(), 90.0, 10.0, 30.0, 5.0));
  }
  const LogisticFit fit = logistic_fit(q, target);
  CHECK(fit.converged);
  double sse = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    sse += (fit.fitted[i] - target[i]) * (fit.fitted[i] - target[i]);
  }
  CHECK(std::sqrt(sse / static_cast<double>(q.size())) < 1e-6);
  CHECK(fit.betas[3] >= 0.0);  // |beta4| is reported
}

TEST_CASE("logistic_fit on linear data dominates the constant fit") {
  std::vector<double> q, target;
  for (int i = 0; i < 12; ++i) {
    q.push_back(static_cast<double>(i));
    target.push_back(5.0 + 3.0 * i);
  }
  const LogisticFit fit = logistic_fit(q, target);

  // fitted curve is monotone in q
  for (std::size_t i = 1; i < q.size(); ++i) CHECK(fit.fitted[i] >= fit.fitted[i - 1]);

  double mean = 0.0;
  for (double t : target) mean += t;
  mean /= static_cast<double>(target.size());
  double const_sse = 0.0, fit_sse = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    const_sse += (target[i] - mean) * (target[i] - mean);
    fit_sse += (target[i] - fit.fitted[i]) * (target[i] - fit.fitted[i]);
  }
  CHECK(fit_sse <= const_sse);

  // range bound from the sigmoid shape
  const double lo = std::min(fit.betas[0], fit.betas[1]);
  const double hi = std::max(fit.betas[0], fit.betas[1]);
  for (double f : fit.fitted) {
    CHECK(f >= lo - 1e-9);
    CHECK(f <= hi + 1e-9);
  }
}

TEST_CASE("logistic_fit never worsens its starting point") {
  std::uint64_t state = 44;
  for (int round = 0; round < 10; ++round) {
    std::vector<double> q, target;
    for (int i = 0; i < 15; ++i) {
      q.push_back(unit(state) * 50.0);
      target.push_back(unit(state) * 100.0);
    }
    // the implementation's initialization, reproduced here
    const double b1 = *std::max_element(target.begin(), target.end());
    const double b2 = *std::min_element(target.begin(), target.end());
    double mean = 0.0;
    for (double v : q) mean += v;
    mean /= static_cast<double>(q.size());
    double ss = 0.0;
    for (double v : q) ss += (v - mean) * (v - mean);
    const double b4 = std::sqrt(ss / static_cast<double>(q.size() - 1)) / 4.0;

    double init_sse = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) {
      const double r = logistic(q[i], b1, b2, mean, b4) - target[i];
      init_sse += r * r;
    }
    const LogisticFit fit = logistic_fit(q, target);
    double fit_sse = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) {
      fit_sse += (fit.fitted[i] - target[i]) * (fit.fitted[i] - target[i]);
    }
    CHECK(fit_sse <= init_sse + 1e-9);
  }
}

TEST_CASE("logistic_fit input validation") {
  CHECK_THROWS_AS(logistic_fit({1, 2, 3}, {1, 2, 3}), ArgumentError);
  CHECK_THROWS_AS(logistic_fit({1, 1, 1, 1, 1}, {1, 2, 3, 4, 5}), DataError);
}

TEST_CASE("rank statistics basics") {
  CHECK(srcc({1, 2, 3, 4}, {10, 20, 30, 40}) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(srcc({1, 2, 3, 4}, {40, 30, 20, 10}) == doctest::Approx(-1.0).epsilon(1e-12));

  // tie convention: x = (1,2,2,3) carries average ranks (1, 2.5, 2.5, 4)
  const std::vector<double> tied = {1, 2, 2, 3};
  CHECK(ranks_of(tied) == std::vector<double>{1.0, 2.5, 2.5, 4.0});
  CHECK(srcc(tied, {1.0, 2.5, 2.5, 4.0}) == doctest::Approx(1.0).epsilon(1e-12));

  CHECK(rmse({1, 2, 3}, {1, 2, 3}) == 0.0);
  CHECK(mae({1, 2, 3}, {1, 2, 3}) == 0.0);
  CHECK(rmse({0, 0}, {3, 4}) == doctest::Approx(std::sqrt(12.5)).epsilon(1e-12));
  CHECK(mae({0, 0}, {3, 4}) == doctest::Approx(3.5).epsilon(1e-12));

  CHECK_THROWS_AS(pcc({1, 2}, {1, 2, 3}), ArgumentError);
  CHECK_THROWS_AS(srcc({1}, {1}), ArgumentError);
  CHECK_THROWS_AS(pcc({1, 1, 1}, {1, 2, 3}), DataError);
}

TEST_CASE("statistics match brute-force loops on random vectors") {
  std::uint64_t state = 3;
  for (int round = 0; round < 100; ++round) {
    const std::size_t n = 5 + testutil::splitmix(state) % 20;
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = unit(state) * 100.0;
      y[i] = unit(state) * 100.0;
      if (i % 3 == 0 && i > 0) x[i] = x[i - 1];  // inject ties
    }
    CHECK(std::abs(pcc(x, y) - pearson_loop(x, y)) <= 1e-12);
    CHECK(std::abs(srcc(x, y) - pearson_loop(ranks_of(x), ranks_of(y))) <= 1e-12);

    double se = 0.0, ae = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      se += (x[i] - y[i]) * (x[i] - y[i]);
      ae += std::abs(x[i] - y[i]);
    }
    CHECK(std::abs(rmse(x, y) - std::sqrt(se / n)) <= 1e-12);
    CHECK(std::abs(mae(x, y) - ae / n) <= 1e-12);
  }
}

TEST_CASE("SRCC is exactly invariant under monotone transforms") {
  std::uint64_t state = 8;
  std::vector<double> x(25), y(25);
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = unit(state) * 50.0;
    y[i] = unit(state) * 50.0;
  }
  const double base = srcc(x, y);
  std::vector<double> warped = x;
  for (double& v : warped) v = std::exp(v / 10.0) + 3.0;
  CHECK(srcc(warped, y) == base);

  // PCC is invariant under positive affine maps
  std::vector<double> affine = x;
  for (double& v : affine) v = 4.0 * v + 11.0;
  CHECK(pcc(affine, y) == doctest::Approx(pcc(x, y)).epsilon(1e-12));
}

TEST_CASE("evaluate_metric pipeline") {
  std::map<std::string, double> objective, dmos;
  std::uint64_t state = 15;
  for (int i = 0; i < 12; ++i) {
    const double q = 20.0 + 5.0 * i + unit(state);
    objective["seq" + std::to_string(i)] = q;
    dmos["seq" + std::to_string(i)] = 100.0 - q;  // objective equals reversed DMOS
  }
  const EvalStats stats = evaluate_metric(objective, dmos);
  CHECK(stats.srcc == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(stats.pcc > 0.9999);
  CHECK(stats.rmse < 1.0);
  CHECK(stats.mae <= stats.rmse + 1e-12);

  // any strictly increasing transform of the objective keeps SRCC at 1
  std::map<std::string, double> warped;
  for (const auto& [seq, v] : objective) warped[seq] = std::sqrt(v) * 3.0 + 1.0;
  CHECK(evaluate_metric(warped, dmos).srcc == doctest::Approx(1.0).epsilon(1e-12));

  std::map<std::string, double> short_set(objective);
  short_set.erase("seq3");
  CHECK_THROWS_WITH_AS(evaluate_metric(short_set, dmos), doctest::Contains("seq3"), DataError);
}

TEST_CASE("eval stats serialize to JSON") {
  testutil::TempDir tmp;
  std::map<std::string, double> objective, dmos;
  std::uint64_t state = 19;
  for (int i = 0; i < 8; ++i) {
    objective["s" + std::to_string(i)] = 10.0 * i + unit(state);
    dmos["s" + std::to_string(i)] = 90.0 - 9.0 * i;
  }
  write_eval_json(evaluate_metric(objective, dmos), tmp.path("e.json"));
  const std::string json = testutil::read_file(tmp.path("e.json"));
  CHECK(json.find("\"srcc\"") != std::string::npos);
  CHECK(json.find("\"betas\"") != std::string::npos);
  CHECK(json.find("\"sequences\"") != std::string::npos);
}

}  // TEST_SUITE
