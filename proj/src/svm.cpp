#include "wsnids/svm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "wsnids/error.hpp"

namespace wsnids::svm {

namespace {

constexpr double kTau = 1e-12;

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    sum += d * d;
  }
  return sum;
}

double kernel_unchecked(std::span<const double> a, std::span<const double> b, const KernelParams& k) {
  const double d2 = squared_distance(a, b);
  const double dist = k.squared_norm ? d2 : std::sqrt(d2);
  return std::exp(-dist / (2.0 * k.sigma * k.sigma));
}

void validate(std::span<const Sample> data, const TrainOptions& options) {
  if (data.empty()) throw InvalidInput("training set is empty");
  if (!(options.c > 0.0)) throw InvalidInput("C must be positive");
  if (!(options.kernel.sigma > 0.0)) throw InvalidInput("sigma must be positive");
  const std::size_t dim = data.front().x.size();
  if (dim == 0) throw InvalidInput("feature dimension must be at least 1");
  bool has_pos = false;
  bool has_neg = false;
  for (const auto& s : data) {
    if (s.x.size() != dim) throw InvalidInput("inconsistent feature dimension in training set");
    for (double v : s.x) {
      if (!std::isfinite(v)) throw InvalidInput("non-finite feature value");
    }
    if (s.y == 1) {
      has_pos = true;
    } else if (s.y == -1) {
      has_neg = true;
    } else {
      throw InvalidInput("label must be +1 or -1");
    }
  }
  if (!has_pos || !has_neg) throw InvalidInput("training set must contain both labels");
}

}  // namespace

double rbf_kernel(std::span<const double> x1, std::span<const double> x2, const KernelParams& k) {
  if (x1.size() != x2.size()) throw InvalidInput("kernel arguments differ in dimension");
  if (!(k.sigma > 0.0)) throw InvalidInput("sigma must be positive");
  return kernel_unchecked(x1, x2, k);
}

SvmModel train(std::span<const Sample> data, const TrainOptions& options) {
  validate(data, options);

  const std::size_t n = data.size();
  const double c = options.c;
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = data[i].y;

  std::vector<double> kmat(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    kmat[i * n + i] = 1.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = kernel_unchecked(data[i].x, data[j].x, options.kernel);
      kmat[i * n + j] = v;
      kmat[j * n + i] = v;
    }
  }
  auto kv = [&](std::size_t i, std::size_t j) { return kmat[i * n + j]; };

  std::vector<double> alpha(n, 0.0);
  // Gradient of 1/2 a'Qa - e'a with Q_ij = y_i y_j K_ij.
  std::vector<double> grad(n, -1.0);

  auto in_up = [&](std::size_t t) {
    return (y[t] > 0 && alpha[t] < c) || (y[t] < 0 && alpha[t] > 0);
  };
  auto in_low = [&](std::size_t t) {
    return (y[t] > 0 && alpha[t] > 0) || (y[t] < 0 && alpha[t] < c);
  };

  const std::size_t max_iterations = options.max_sweeps * std::max<std::size_t>(n, 1);
  std::size_t iter = 0;
  for (;; ++iter) {
    double gmax = -std::numeric_limits<double>::infinity();
    std::size_t i = n;
    for (std::size_t t = 0; t < n; ++t) {
      if (in_up(t) && -y[t] * grad[t] > gmax) {
        gmax = -y[t] * grad[t];
        i = t;
      }
    }
    double gmin = std::numeric_limits<double>::infinity();
    std::size_t j = n;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < n; ++t) {
      if (!in_low(t)) continue;
      const double v = -y[t] * grad[t];
      gmin = std::min(gmin, v);
      if (i == n || v >= gmax) continue;
      const double b = gmax - v;
      double a = kv(i, i) + kv(t, t) - 2.0 * kv(i, t);
      if (a <= 0) a = kTau;
      const double score = -(b * b) / a;
      if (score < best) {
        best = score;
        j = t;
      }
    }
    if (i == n || j == n || gmax - gmin <= options.tolerance) break;
    if (iter >= max_iterations) throw SolverError(iter, "SMO did not converge");

    // Two-variable subproblem along the feasible line, clipped to the box.
    const double old_ai = alpha[i];
    const double old_aj = alpha[j];
    double quad = kv(i, i) + kv(j, j) - 2.0 * kv(i, j);
    if (quad <= 0) quad = kTau;
    if (y[i] != y[j]) {
      const double delta = (-grad[i] - grad[j]) / quad;
      const double diff = alpha[i] - alpha[j];
      alpha[i] += delta;
      alpha[j] += delta;
      if (diff > 0) {
        if (alpha[j] < 0) {
          alpha[j] = 0;
          alpha[i] = diff;
        }
      } else if (alpha[i] < 0) {
        alpha[i] = 0;
        alpha[j] = -diff;
      }
      if (diff > 0) {
        if (alpha[i] > c) {
          alpha[i] = c;
          alpha[j] = c - diff;
        }
      } else if (alpha[j] > c) {
        alpha[j] = c;
        alpha[i] = c + diff;
      }
    } else {
      const double delta = (grad[i] - grad[j]) / quad;
      const double sum = alpha[i] + alpha[j];
      alpha[i] -= delta;
      alpha[j] += delta;
      if (sum > c) {
        if (alpha[i] > c) {
          alpha[i] = c;
          alpha[j] = sum - c;
        }
      } else if (alpha[j] < 0) {
        alpha[j] = 0;
        alpha[i] = sum;
      }
      if (sum > c) {
        if (alpha[j] > c) {
          alpha[j] = c;
          alpha[i] = sum - c;
        }
      } else if (alpha[i] < 0) {
        alpha[i] = 0;
        alpha[j] = sum;
      }
    }

    const double dai = alpha[i] - old_ai;
    const double daj = alpha[j] - old_aj;
    for (std::size_t t = 0; t < n; ++t) {
      grad[t] += y[t] * (y[i] * kv(t, i) * dai + y[j] * kv(t, j) * daj);
    }
  }

  // Bias from the KKT conditions: averaged over free vectors, otherwise the
  // midpoint of the feasible interval.
  double ub = std::numeric_limits<double>::infinity();
  double lb = -std::numeric_limits<double>::infinity();
  double free_sum = 0.0;
  std::size_t n_free = 0;
  for (std::size_t t = 0; t < n; ++t) {
    const double yg = -y[t] * grad[t];
    if (alpha[t] > 0 && alpha[t] < c) {
      free_sum += yg;
      ++n_free;
    } else if ((y[t] > 0) == (alpha[t] >= c)) {
      ub = std::min(ub, yg);
    } else {
      lb = std::max(lb, yg);
    }
  }

  SvmModel model;
  model.bias_ = n_free > 0 ? free_sum / static_cast<double>(n_free) : (ub + lb) / 2.0;
  model.c_ = c;
  model.kernel_ = options.kernel;
  model.iterations_ = iter;
  for (std::size_t t = 0; t < n; ++t) {
    if (alpha[t] > 0) {
      model.support_vectors_.push_back(data[t]);
      model.alphas_.push_back(alpha[t]);
    }
  }
  return model;
}

double SvmModel::decision_value(std::span<const double> x) const {
  if (x.size() != dimension()) throw InvalidInput("input dimension does not match the model");
  double sum = bias_;
  for (std::size_t i = 0; i < support_vectors_.size(); ++i) {
    const auto& sv = support_vectors_[i];
    sum += sv.y * alphas_[i] * kernel_unchecked(x, sv.x, kernel_);
  }
  return sum;
}

Decision SvmModel::decide(std::span<const double> x) const {
  const double v = decision_value(x);
  return {v < 0 ? -1 : 1, v};
}

}  // namespace wsnids::svm
