#include "neurodetect/sic.hpp"

#include <cmath>

namespace neurodetect {

std::vector<SoftEstimate> sic_iterate(const Eigen::VectorXd& y,
                                      const Eigen::MatrixXd& gains, double noise_var,
                                      const Constellation& cons,
                                      const std::vector<SoftEstimate>& priors) {
  const int n_r = static_cast<int>(gains.rows());
  const int users = static_cast<int>(gains.cols());
  const int m = cons.size();
  if (y.size() != n_r) {
    throw std::invalid_argument("sic_iterate: observation length mismatch");
  }
  if (static_cast<int>(priors.size()) != users) {
    throw std::invalid_argument("sic_iterate: one prior per user required");
  }

  // per-user means and variances under the priors
  Eigen::VectorXd mean(users);
  Eigen::VectorXd var(users);
  for (int k = 0; k < users; ++k) {
    const SoftEstimate& p = priors[static_cast<std::size_t>(k)];
    if (p.size() != m) {
      throw std::invalid_argument("sic_iterate: prior has wrong length");
    }
    double e = 0.0;
    for (int j = 0; j < m; ++j) {
      e += cons.value(j) * p(j);
    }
    double v = 0.0;
    for (int j = 0; j < m; ++j) {
      const double d = cons.value(j) - e;
      v += d * d * p(j);
    }
    mean(k) = e;
    var(k) = v;
  }

  std::vector<SoftEstimate> out(static_cast<std::size_t>(users));
  for (int k = 0; k < users; ++k) {
    Eigen::VectorXd z = y;
    Eigen::MatrixXd cov = noise_var * Eigen::MatrixXd::Identity(n_r, n_r);
    for (int l = 0; l < users; ++l) {
      if (l == k) {
        continue;
      }
      z -= gains.col(l) * mean(l);
      cov += var(l) * gains.col(l) * gains.col(l).transpose();
    }

    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success) {
      const double trace = cov.trace();
      cov += 1e-10 * std::max(trace, 1.0) * Eigen::MatrixXd::Identity(n_r, n_r);
      llt.compute(cov);
      if (llt.info() != Eigen::Success) {
        throw std::runtime_error("sic_iterate: covariance not positive definite");
      }
    }

    Eigen::VectorXd quad(m);
    for (int j = 0; j < m; ++j) {
      const Eigen::VectorXd r = z - gains.col(k) * cons.value(j);
      quad(j) = -0.5 * r.dot(llt.solve(r));
    }
    const double peak = quad.maxCoeff();
    Eigen::VectorXd p = (quad.array() - peak).exp();
    out[static_cast<std::size_t>(k)] = p / p.sum();
  }
  return out;
}

std::vector<SoftEstimate> iterative_sic_soft(const Eigen::VectorXd& y,
                                             const Eigen::MatrixXd& gains,
                                             double noise_var,
                                             const Constellation& cons,
                                             int iterations) {
  if (iterations < 1) {
    throw std::invalid_argument("iterative_sic: iterations must be >= 1");
  }
  const int users = static_cast<int>(gains.cols());
  std::vector<SoftEstimate> estimates(
      static_cast<std::size_t>(users),
      SoftEstimate::Constant(cons.size(), 1.0 / cons.size()));
  for (int q = 0; q < iterations; ++q) {
    estimates = sic_iterate(y, gains, noise_var, cons, estimates);
  }
  return estimates;
}

std::vector<int> iterative_sic(const Eigen::VectorXd& y, const Eigen::MatrixXd& gains,
                               double noise_var, const Constellation& cons,
                               int iterations) {
  return decide(iterative_sic_soft(y, gains, noise_var, cons, iterations));
}

std::vector<int> map_mimo_brute(const Eigen::VectorXd& y, const MimoLogScoreFn& score,
                                int users, int m) {
  long long count = 1;
  for (int k = 0; k < users; ++k) {
    count *= m;
    if (count > (1LL << 20)) {
      throw InstanceTooLargeError("map_mimo_brute: m^K exceeds 2^20");
    }
  }
  std::vector<int> candidate(static_cast<std::size_t>(users), 0);
  std::vector<int> best = candidate;
  double best_score = score(candidate, y);
  for (long long code = 1; code < count; ++code) {
    long long rest = code;
    for (int k = 0; k < users; ++k) {
      candidate[static_cast<std::size_t>(k)] = static_cast<int>(rest % m);
      rest /= m;
    }
    const double s = score(candidate, y);
    if (s > best_score) {
      best_score = s;
      best = candidate;
    }
  }
  return best;
}

MimoLogScoreFn exact_mimo_log_score(const MimoChannel& ch, const Constellation& cons) {
  const Eigen::MatrixXd gains = ch.gains;
  const double noise_var = ch.noise_var;
  if (ch.kind == NoiseKind::awgn) {
    return [gains, noise_var, cons](const std::vector<int>& idx,
                                    const Eigen::VectorXd& y) {
      Eigen::VectorXd s(gains.cols());
      for (int k = 0; k < s.size(); ++k) {
        s(k) = cons.value(idx[static_cast<std::size_t>(k)]);
      }
      return -(y - gains * s).squaredNorm() / (2.0 * noise_var);
    };
  }
  return [gains, noise_var, cons](const std::vector<int>& idx,
                                  const Eigen::VectorXd& y) {
    Eigen::VectorXd s(gains.cols());
    for (int k = 0; k < s.size(); ++k) {
      s(k) = cons.value(idx[static_cast<std::size_t>(k)]);
    }
    const Eigen::VectorXd rates =
        (gains * s / std::sqrt(noise_var)).array() + 1.0;
    double log_p = 0.0;
    for (int j = 0; j < y.size(); ++j) {
      log_p += y(j) * std::log(rates(j)) - rates(j) - std::lgamma(y(j) + 1.0);
    }
    return log_p;
  };
}

}  // namespace neurodetect
