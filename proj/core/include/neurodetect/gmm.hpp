#ifndef NEURODETECT_GMM_HPP_
#define NEURODETECT_GMM_HPP_

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <vector>

namespace neurodetect {

// Scalar Gaussian mixture: weights on the simplex, variances kept above the
// collapse floor.
struct Gmm {
  Eigen::VectorXd weights;
  Eigen::VectorXd means;
  Eigen::VectorXd variances;

  int components() const { return static_cast<int>(weights.size()); }
};

inline constexpr double kGmmVarianceFloor = 1e-6;
inline constexpr int kGmmDefaultMaxIters = 200;
inline constexpr double kGmmDefaultTol = 1e-7;

// EM fit from a deterministic k-quantile initialization (uniform weights,
// global sample variance). Stops at max_iters or when the log-likelihood
// gain drops below tol; the per-iteration log-likelihood is non-decreasing.
// If log_likelihood_trace is given it receives one entry per EM iteration.
Gmm fit_gmm(std::span<const double> samples, int components,
            int max_iters = kGmmDefaultMaxIters, double tol = kGmmDefaultTol,
            std::uint64_t seed = 0,
            std::vector<double>* log_likelihood_trace = nullptr);

double gmm_pdf(const Gmm& model, double y);

}  // namespace neurodetect

#endif  // NEURODETECT_GMM_HPP_
