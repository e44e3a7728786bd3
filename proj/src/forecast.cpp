#include "greeniot/forecast.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>

#include "greeniot/errors.hpp"

namespace greeniot {

namespace {

double log_normal_pdf(double x, double mean, double var) {
  const double d = x - mean;
  return -0.5 * (std::log(2.0 * std::numbers::pi * var) + d * d / var);
}

double log_sum_exp(const std::vector<double>& v) {
  double hi = -std::numeric_limits<double>::infinity();
  for (double x : v) hi = std::max(hi, x);
  if (!std::isfinite(hi)) return hi;
  double s = 0.0;
  for (double x : v) s += std::exp(x - hi);
  return hi + std::log(s);
}

double mixture_ll(const std::vector<GmmComponent>& comps, const std::vector<double>& xs) {
  std::vector<double> terms(comps.size());
  double ll = 0.0;
  for (double x : xs) {
    for (std::size_t k = 0; k < comps.size(); ++k)
      terms[k] = comps[k].weight > 0.0
                     ? std::log(comps[k].weight) + log_normal_pdf(x, comps[k].mean, comps[k].variance)
                     : -std::numeric_limits<double>::infinity();
    ll += log_sum_exp(terms);
  }
  return ll;
}

double quantile(const std::vector<double>& sorted, double q) {
  const double pos = q * (sorted.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - lo) * (sorted[hi] - sorted[lo]);
}

}  // namespace

double Gmm::mean() const {
  double m = 0.0;
  for (const auto& c : components) m += c.weight * c.mean;
  return m;
}

double Gmm::second_moment() const {
  double m = 0.0;
  for (const auto& c : components) m += c.weight * (c.variance + c.mean * c.mean);
  return m;
}

double Gmm::log_likelihood(const std::vector<double>& samples) const {
  return mixture_ll(components, samples);
}

double Gmm::sample(Rng& rng) const {
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  double acc = 0.0;
  std::size_t k = components.size() - 1;
  for (std::size_t j = 0; j < components.size(); ++j) {
    acc += components[j].weight;
    if (u < acc) {
      k = j;
      break;
    }
  }
  return std::normal_distribution<double>(components[k].mean,
                                          std::sqrt(components[k].variance))(rng);
}

void Gmm::validate() const {
  if (components.empty()) throw ConfigError("mixture has no components");
  double s = 0.0;
  for (const auto& c : components) {
    if (c.weight < 0.0) throw ConfigError("negative mixture weight");
    if (!(c.variance > 0.0)) throw ConfigError("mixture variance must be positive");
    s += c.weight;
  }
  if (std::abs(s - 1.0) > 1e-9) throw ConfigError("mixture weights do not sum to 1");
}

Gmm fit_gmm(const std::vector<double>& samples, const GmmFitOptions& opt,
            std::vector<double>* trace) {
  const int K = opt.components;
  if (K < 1) throw ConfigError("mixture needs at least one component");
  if (static_cast<int>(samples.size()) < K)
    throw ConfigError("fewer samples than mixture components");
  const std::size_t N = samples.size();

  double mu = 0.0;
  for (double x : samples) mu += x;
  mu /= N;
  double var = 0.0;
  for (double x : samples) var += (x - mu) * (x - mu);
  var /= N;
  const double sd = var > 0.0 ? std::sqrt(var) : 1.0;
  std::vector<double> z(N);
  for (std::size_t n = 0; n < N; ++n) z[n] = (samples[n] - mu) / sd;

  std::vector<double> sorted = z;
  std::sort(sorted.begin(), sorted.end());
  double pooled = 0.0;
  for (double x : z) pooled += x * x;
  pooled = std::max(pooled / N, opt.variance_floor);
  std::vector<GmmComponent> comps(K);
  for (int k = 0; k < K; ++k)
    comps[k] = {1.0 / K, quantile(sorted, (k + 1.0) / (K + 1.0)), pooled};

  std::vector<std::vector<double>> resp(K, std::vector<double>(N));
  std::vector<double> terms(K), base(K), inv(K);
  // One E-step pass: responsibilities under `comps` and their log-likelihood.
  auto e_step = [&] {
    for (int k = 0; k < K; ++k) {
      base[k] = comps[k].weight > 0.0
                    ? std::log(comps[k].weight) - 0.5 * std::log(2.0 * std::numbers::pi * comps[k].variance)
                    : -std::numeric_limits<double>::infinity();
      inv[k] = 0.5 / comps[k].variance;
    }
    double ll = 0.0;
    for (std::size_t n = 0; n < N; ++n) {
      double hi = -std::numeric_limits<double>::infinity();
      for (int k = 0; k < K; ++k) {
        const double d = z[n] - comps[k].mean;
        terms[k] = base[k] - d * d * inv[k];
        hi = std::max(hi, terms[k]);
      }
      double sum = 0.0;
      for (int k = 0; k < K; ++k) {
        terms[k] = std::exp(terms[k] - hi);
        sum += terms[k];
      }
      for (int k = 0; k < K; ++k) resp[k][n] = terms[k] / sum;
      ll += hi + std::log(sum);
    }
    return ll;
  };

  const double log_sd = std::log(sd);
  double prev_ll = e_step();
  for (int it = 0; it < opt.max_iterations; ++it) {
    // M step
    for (int k = 0; k < K; ++k) {
      double nk = 0.0, sx = 0.0;
      for (std::size_t n = 0; n < N; ++n) {
        nk += resp[k][n];
        sx += resp[k][n] * z[n];
      }
      if (nk <= 0.0) {
        comps[k].weight = 0.0;
        continue;
      }
      const double m = sx / nk;
      double sv = 0.0;
      for (std::size_t n = 0; n < N; ++n) sv += resp[k][n] * (z[n] - m) * (z[n] - m);
      comps[k] = {nk / N, m, std::max(sv / nk, opt.variance_floor)};
    }
    double wsum = 0.0;
    for (const auto& c : comps) wsum += c.weight;
    for (auto& c : comps) c.weight /= wsum;

    // The next E step scores the updated mixture; the Jacobian term maps the
    // likelihood back to the original units.
    const double ll = e_step();
    if (trace) trace->push_back(ll - N * log_sd);
    if (ll - prev_ll < opt.tolerance) break;
    prev_ll = ll;
  }

  Gmm g;
  for (const auto& c : comps) g.components.push_back({c.weight, c.mean * sd + mu, c.variance * sd * sd});
  return g;
}

double predict_mean(const Gmm& gmm) { return gmm.mean(); }

std::vector<double> predict_window(const Gmm& gmm, int window) {
  if (window < 1) throw DomainError("forecast window must be at least one slot");
  return std::vector<double>(window, std::max(0.0, gmm.mean()));
}

void write_gmm(std::ostream& out, const Gmm& gmm) {
  const auto old = out.precision(17);
  for (const auto& c : gmm.components)
    out << "component " << c.weight << ' ' << c.mean << ' ' << c.variance << '\n';
  out.precision(old);
}

Gmm read_gmm(std::istream& in) {
  Gmm g;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string kw;
    if (!(ls >> kw) || kw[0] == '#') continue;
    GmmComponent c;
    if (kw != "component" || !(ls >> c.weight >> c.mean >> c.variance))
      throw ConfigError("malformed mixture line: " + line);
    g.components.push_back(c);
  }
  g.validate();
  return g;
}

}  // namespace greeniot
