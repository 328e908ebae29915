#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "wsnids/types.hpp"

namespace wsnids::svm {

struct KernelParams {
  double sigma = 1.0;
  /// When false the distance enters the exponent unsquared.
  bool squared_norm = true;

  friend bool operator==(const KernelParams&, const KernelParams&) = default;
};

/// exp(-|x1 - x2|^2 / (2 sigma^2)), or exp(-|x1 - x2| / (2 sigma^2)) with the
/// squared_norm flag cleared. Throws InvalidInput on dimension mismatch.
double rbf_kernel(std::span<const double> x1, std::span<const double> x2, const KernelParams& k);

struct TrainOptions {
  double c = 10.0;
  KernelParams kernel;
  /// Stop once the maximal violating pair gap drops to this value.
  double tolerance = 1e-3;
  /// Iteration budget, in units of the training-set size.
  std::size_t max_sweeps = 10000;
};

struct Decision {
  int label = 1;
  double value = 0.0;
};

class SvmModel;

/// Soft-margin dual solved by SMO with second-order working set selection.
SvmModel train(std::span<const Sample> data, const TrainOptions& options);

/// Trained binary classifier. Only vectors with a non-zero dual coefficient
/// are kept. Immutable once built.
class SvmModel {
 public:
  const std::vector<Sample>& support_vectors() const noexcept { return support_vectors_; }
  const std::vector<double>& alphas() const noexcept { return alphas_; }
  double bias() const noexcept { return bias_; }
  double c() const noexcept { return c_; }
  const KernelParams& kernel() const noexcept { return kernel_; }
  std::size_t dimension() const noexcept { return support_vectors_.front().x.size(); }
  /// Number of SMO iterations the solver ran.
  std::size_t iterations() const noexcept { return iterations_; }

  /// Sum of y_i alpha_i K(x, x_i) + b. Throws InvalidInput on dimension mismatch.
  double decision_value(std::span<const double> x) const;

  /// Label is the sign of the decision value; an exact zero maps to +1.
  Decision decide(std::span<const double> x) const;

  friend bool operator==(const SvmModel&, const SvmModel&) = default;

 private:
  friend SvmModel train(std::span<const Sample>, const TrainOptions&);
  SvmModel() = default;

  std::vector<Sample> support_vectors_;
  std::vector<double> alphas_;
  double bias_ = 0.0;
  double c_ = 0.0;
  KernelParams kernel_;
  std::size_t iterations_ = 0;
};

inline Decision decide(const SvmModel& model, std::span<const double> x) { return model.decide(x); }

/// The samples with alpha > 0, labels preserved.
inline const std::vector<Sample>& support_vector_set(const SvmModel& model) {
  return model.support_vectors();
}

}  // namespace wsnids::svm
