#include "neurodetect/gmm.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace neurodetect {

namespace {

const double kLogSqrt2Pi = 0.5 * std::log(2.0 * std::numbers::pi);

double log_normal_pdf(double y, double mean, double var) {
  const double d = y - mean;
  return -kLogSqrt2Pi - 0.5 * std::log(var) - 0.5 * d * d / var;
}

}  // namespace

Gmm fit_gmm(std::span<const double> samples, int components, int max_iters,
            double tol, std::uint64_t /*seed*/,
            std::vector<double>* log_likelihood_trace) {
  // The quantile initialization is deterministic, so the seed is unused; it
  // stays in the signature for non-deterministic initializers.
  const int n = static_cast<int>(samples.size());
  if (components < 1) {
    throw std::invalid_argument("fit_gmm: components must be >= 1");
  }
  if (n < components) {
    throw std::invalid_argument("fit_gmm: fewer samples than components");
  }

  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());

  double sum = 0.0;
  for (double y : samples) {
    sum += y;
  }
  const double global_mean = sum / n;
  double ssq = 0.0;
  for (double y : samples) {
    ssq += (y - global_mean) * (y - global_mean);
  }
  const double global_var = std::max(ssq / n, kGmmVarianceFloor);

  Gmm model;
  model.weights = Eigen::VectorXd::Constant(components, 1.0 / components);
  model.means.resize(components);
  model.variances = Eigen::VectorXd::Constant(components, global_var);
  for (int j = 0; j < components; ++j) {
    const int pos = std::min<int>(
        n - 1, static_cast<int>((j + 0.5) / components * n));
    model.means(j) = sorted[static_cast<std::size_t>(pos)];
  }

  Eigen::MatrixXd resp(n, components);
  double prev_ll = -std::numeric_limits<double>::infinity();
  if (log_likelihood_trace) {
    log_likelihood_trace->clear();
  }

  for (int iter = 0; iter < max_iters; ++iter) {
    // E-step in the log domain
    double ll = 0.0;
    for (int i = 0; i < n; ++i) {
      Eigen::VectorXd logp(components);
      for (int j = 0; j < components; ++j) {
        logp(j) = std::log(std::max(model.weights(j), 1e-300)) +
                  log_normal_pdf(samples[static_cast<std::size_t>(i)],
                                 model.means(j), model.variances(j));
      }
      const double peak = logp.maxCoeff();
      const Eigen::ArrayXd shifted = (logp.array() - peak).exp();
      const double total = shifted.sum();
      resp.row(i) = (shifted / total).transpose();
      ll += peak + std::log(total);
    }
    if (log_likelihood_trace) {
      log_likelihood_trace->push_back(ll);
    }
    if (ll - prev_ll < tol && iter > 0) {
      break;
    }
    prev_ll = ll;

    // M-step
    for (int j = 0; j < components; ++j) {
      const double mass = resp.col(j).sum();
      model.weights(j) = mass / n;
      if (mass < 1e-300) {
        model.variances(j) = kGmmVarianceFloor;
        continue;
      }
      double mean = 0.0;
      for (int i = 0; i < n; ++i) {
        mean += resp(i, j) * samples[static_cast<std::size_t>(i)];
      }
      mean /= mass;
      double var = 0.0;
      for (int i = 0; i < n; ++i) {
        const double d = samples[static_cast<std::size_t>(i)] - mean;
        var += resp(i, j) * d * d;
      }
      model.means(j) = mean;
      model.variances(j) = std::max(var / mass, kGmmVarianceFloor);
    }
    // renormalize against accumulated rounding
    model.weights /= model.weights.sum();
  }
  return model;
}

double gmm_pdf(const Gmm& model, double y) {
  double density = 0.0;
  for (int j = 0; j < model.components(); ++j) {
    density += model.weights(j) *
               std::exp(log_normal_pdf(y, model.means(j), model.variances(j)));
  }
  return density;
}

}  // namespace neurodetect
