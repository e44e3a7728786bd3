#include <algorithm>
#include <cmath>
#include <sstream>

#include "doctest.h"
#include "greeniot/errors.hpp"
#include "greeniot/forecast.hpp"

using namespace greeniot;

namespace {

std::vector<double> draw_mixture(const Gmm& g, int n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> xs(n);
  for (auto& x : xs) x = g.sample(rng);
  return xs;
}

}  // namespace

TEST_CASE("EM recovers a two-component mixture") {
  const Gmm truth{{{0.3, 5.0, 0.25}, {0.7, 10.0, 1.0}}};
  const double analytic_mean = 0.3 * 5.0 + 0.7 * 10.0;
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto xs = draw_mixture(truth, 10000, seed);
    GmmFitOptions opt;
    opt.components = 2;
    std::vector<double> trace;
    const Gmm fit = fit_gmm(xs, opt, &trace);
    CHECK_NOTHROW(fit.validate());
    std::vector<double> means;
    for (const auto& c : fit.components) means.push_back(c.mean);
    std::sort(means.begin(), means.end());
    CHECK(std::abs(means[0] - 5.0) < 0.2);
    CHECK(std::abs(means[1] - 10.0) < 0.2);
    CHECK(std::abs(predict_mean(fit) - analytic_mean) <= 0.01 * analytic_mean);
    double fitted_mean = 0.0, sampled_m2 = 0.0;
    for (const auto& c : fit.components) fitted_mean += c.weight * c.mean;
    for (double x : xs) sampled_m2 += x * x / xs.size();
    CHECK(predict_mean(fit) == doctest::Approx(fitted_mean).epsilon(1e-12));
    CHECK(fit.second_moment() == doctest::Approx(sampled_m2).epsilon(0.01));
    REQUIRE(trace.size() >= 2);
    for (std::size_t k = 1; k < trace.size(); ++k)
      CHECK(trace[k] >= trace[k - 1] - 1e-9 * std::abs(trace[k - 1]));
    CHECK(fit.log_likelihood(xs) == doctest::Approx(trace.back()).epsilon(1e-9));
  }
}

TEST_CASE("fit is scale invariant") {
  const Gmm truth{{{0.5, 1.0, 0.04}, {0.5, 2.0, 0.04}}};
  auto xs = draw_mixture(truth, 4000, 9);
  GmmFitOptions opt;
  opt.components = 2;
  const Gmm a = fit_gmm(xs, opt);
  for (auto& x : xs) x *= 1e-8;
  const Gmm b = fit_gmm(xs, opt);
  CHECK(b.mean() == doctest::Approx(a.mean() * 1e-8).epsilon(1e-6));
}

TEST_CASE("degenerate data") {
  GmmFitOptions opt;
  opt.components = 2;
  const Gmm g = fit_gmm(std::vector<double>(50, 3.5), opt);
  CHECK(predict_mean(g) == doctest::Approx(3.5));
  CHECK_THROWS_AS(fit_gmm({1.0}, opt), ConfigError);
  opt.components = 0;
  CHECK_THROWS_AS(fit_gmm({1.0, 2.0}, opt), ConfigError);
}

TEST_CASE("window forecast is clamped at zero") {
  const Gmm neg{{{1.0, -4.0, 1.0}}};
  const auto w = predict_window(neg, 3);
  CHECK(w == std::vector<double>{0.0, 0.0, 0.0});
  const Gmm pos{{{0.5, 1.0, 1.0}, {0.5, 3.0, 1.0}}};
  CHECK(predict_window(pos, 2) == std::vector<double>{2.0, 2.0});
  CHECK_THROWS_AS(predict_window(pos, 0), DomainError);
  CHECK(pos.second_moment() == doctest::Approx(6.0));
}

TEST_CASE("text round trip") {
  const Gmm g{{{0.25, -1.0 / 3.0, 0.5}, {0.75, 2.0, 1e-9}}};
  std::stringstream ss;
  write_gmm(ss, g);
  const Gmm back = read_gmm(ss);
  REQUIRE(back.components.size() == 2);
  CHECK(back.components[0].mean == g.components[0].mean);
  CHECK(back.components[1].variance == g.components[1].variance);
  std::istringstream bad("component 1 2\n");
  CHECK_THROWS_AS(read_gmm(bad), ConfigError);
  std::istringstream weights("component 0.5 0 1\n");
  CHECK_THROWS_AS(read_gmm(weights), ConfigError);
}
