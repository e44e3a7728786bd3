#pragma once

#include <iosfwd>
#include <vector>

#include "greeniot/rng.hpp"

namespace greeniot {

struct GmmComponent {
  double weight = 0.0;
  double mean = 0.0;
  double variance = 1.0;
};

struct Gmm {
  std::vector<GmmComponent> components;

  double mean() const;
  double second_moment() const;
  double log_likelihood(const std::vector<double>& samples) const;
  double sample(Rng& rng) const;
  void validate() const;
};

struct GmmFitOptions {
  int components = 4;
  int max_iterations = 200;
  double tolerance = 1e-8;
  double variance_floor = 1e-9;  // in standardized units
};

// Scalar EM. Data are standardized first so that the floor and tolerance do
// not depend on the scale of the samples (channel gains are ~1e-8).
// `trace`, when given, receives the log-likelihood after every iteration.
Gmm fit_gmm(const std::vector<double>& samples, const GmmFitOptions& options,
            std::vector<double>* trace = nullptr);

double predict_mean(const Gmm& gmm);
// Mixture mean repeated over the window, clamped at zero.
std::vector<double> predict_window(const Gmm& gmm, int window);

// One "component <weight> <mean> <variance>" line per component.
void write_gmm(std::ostream& out, const Gmm& gmm);
Gmm read_gmm(std::istream& in);

}  // namespace greeniot
