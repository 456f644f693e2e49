#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "sipm/bounds.hpp"
#include "sipm/libsvm.hpp"

namespace sipm {

/// Smooth objective with a full gradient and a mini-batch gradient oracle.
/// Implementations are immutable after construction.
class Objective {
 public:
  virtual ~Objective() = default;

  virtual std::size_t dimension() const = 0;
  /// Number of samples batches are drawn from; 0 means no stochastic oracle.
  virtual std::size_t sample_count() const = 0;
  virtual double value(std::span<const double> x) const = 0;
  virtual Vector gradient(std::span<const double> x) const = 0;
  virtual Vector stochastic_gradient(std::span<const double> x,
                                     std::span<const std::size_t> batch) const = 0;

 protected:
  void check(std::span<const double> x) const {
    if (x.size() != dimension()) {
      throw Error(Errc::dimension_mismatch,
                  "parameter vector has length " + std::to_string(x.size()) +
                      ", expected " + std::to_string(dimension()));
    }
  }
};

/// f(x) = 1/2 sum c_i (x_i - center_i)^2. The stochastic oracle adds the mean
/// of a fixed pool of zero-mean noise vectors with ||noise||_inf <= sigma.
class QuadraticObjective final : public Objective {
 public:
  QuadraticObjective(Vector center, Vector curvature, double noise_level = 0.0,
                     std::size_t noise_samples = 0, std::uint64_t seed = 0)
      : center_(std::move(center)), curvature_(std::move(curvature)) {
    if (center_.size() != curvature_.size()) {
      throw Error(Errc::dimension_mismatch, "center and curvature differ in length");
    }
    for (double c : curvature_) {
      if (!(c > 0)) throw Error(Errc::invalid_argument, "curvature must be positive");
    }
    if (noise_samples > 0) build_noise(noise_level, noise_samples, seed);
  }

  std::size_t dimension() const override { return center_.size(); }
  std::size_t sample_count() const override { return noise_.size(); }
  const Vector& center() const { return center_; }
  const Vector& curvature() const { return curvature_; }

  double value(std::span<const double> x) const override {
    check(x);
    double f = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double r = x[i] - center_[i];
      f += 0.5 * curvature_[i] * r * r;
    }
    return f;
  }

  Vector gradient(std::span<const double> x) const override {
    check(x);
    Vector g(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) g[i] = curvature_[i] * (x[i] - center_[i]);
    return g;
  }

  Vector stochastic_gradient(std::span<const double> x,
                             std::span<const std::size_t> batch) const override {
    Vector g = gradient(x);
    if (noise_.empty() || batch.empty()) return g;
    const double w = 1.0 / static_cast<double>(batch.size());
    for (std::size_t s : batch) {
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += w * noise_[s][i];
    }
    return g;
  }

 private:
  void build_noise(double level, std::size_t samples, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    const std::size_t n = center_.size();
    noise_.assign(samples, Vector(n));
    Vector mean(n, 0.0);
    for (auto& v : noise_) {
      for (std::size_t i = 0; i < n; ++i) {
        v[i] = unit(rng);
        mean[i] += v[i] / static_cast<double>(samples);
      }
    }
    double peak = 0.0;
    for (auto& v : noise_) {
      for (std::size_t i = 0; i < n; ++i) {
        v[i] -= mean[i];
        peak = std::max(peak, std::abs(v[i]));
      }
    }
    const double scale = peak > 0 ? level / peak : 0.0;
    for (auto& v : noise_) {
      for (double& e : v) e *= scale;
    }
  }

  Vector center_;
  Vector curvature_;
  std::vector<Vector> noise_;
};

inline std::size_t logistic_dimension(std::size_t n_features) { return n_features + 1; }

/// h = max{2, min{ceil(n_f / 2), 100}}
inline std::size_t hidden_width(std::size_t n_features) {
  return std::max<std::size_t>(2, std::min<std::size_t>((n_features + 1) / 2, 100));
}

inline std::size_t network_dimension(std::size_t n_features, std::size_t hidden) {
  return (n_features + 2) * hidden + 1;
}

namespace detail {

/// log(1 + e^s) without overflow.
inline double softplus(double s) {
  return s > 0 ? s + std::log1p(std::exp(-s)) : std::log1p(std::exp(s));
}

inline double sigmoid(double s) {
  if (s >= 0) return 1.0 / (1.0 + std::exp(-s));
  const double e = std::exp(s);
  return e / (1.0 + e);
}

inline std::vector<std::size_t> all_indices(std::size_t m) {
  std::vector<std::size_t> idx(m);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  return idx;
}

}  // namespace detail

/// Shared base for the dataset-backed losses: value/gradient are averages of
/// per-sample terms, so a mini-batch gradient is the same average restricted
/// to the batch.
class DatasetObjective : public Objective {
 public:
  DatasetObjective(std::shared_ptr<const SparseDataset> data, const LabelMap& labels)
      : data_(std::move(data)) {
    if (!data_) throw Error(Errc::invalid_argument, "dataset is null");
    y_ = labels.apply(*data_);
    all_ = detail::all_indices(data_->size());
  }

  std::size_t sample_count() const override { return data_->size(); }
  const SparseDataset& data() const { return *data_; }

  double value(std::span<const double> x) const override {
    check(x);
    if (all_.empty()) return 0.0;
    double f = 0.0;
    for (std::size_t s : all_) f += sample_loss(x, s, nullptr, 0.0);
    return f / static_cast<double>(all_.size());
  }

  Vector gradient(std::span<const double> x) const override {
    return stochastic_gradient(x, all_);
  }

  Vector stochastic_gradient(std::span<const double> x,
                             std::span<const std::size_t> batch) const override {
    check(x);
    Vector g(dimension(), 0.0);
    if (batch.empty()) return g;
    const double w = 1.0 / static_cast<double>(batch.size());
    for (std::size_t s : batch) {
      if (s >= data_->size()) throw Error(Errc::invalid_argument, "batch index out of range");
      sample_loss(x, s, &g, w);
    }
    return g;
  }

 protected:
  /// Returns the loss of sample s; when grad is set, adds weight * gradient.
  virtual double sample_loss(std::span<const double> x, std::size_t s, Vector* grad,
                             double weight) const = 0;

  double label(std::size_t s) const { return y_[s]; }

 private:
  std::shared_ptr<const SparseDataset> data_;
  std::vector<double> y_;
  std::vector<std::size_t> all_;
};

/// f(w, b) = 1/m sum log(1 + exp(-y_i (a_i^T w + b))), parameters [w, b].
class LogisticObjective final : public DatasetObjective {
 public:
  LogisticObjective(std::shared_ptr<const SparseDataset> data, const LabelMap& labels)
      : DatasetObjective(std::move(data), labels) {}

  std::size_t dimension() const override { return logistic_dimension(data().n_features); }

 protected:
  double sample_loss(std::span<const double> x, std::size_t s, Vector* grad,
                     double weight) const override {
    const std::size_t nf = data().n_features;
    double z = x[nf];
    for (const SparseEntry& e : data().row(s)) z += x[e.index - 1] * e.value;
    const double y = label(s);
    const double margin = y * z;
    if (grad) {
      const double coef = -y * detail::sigmoid(-margin) * weight;
      for (const SparseEntry& e : data().row(s)) (*grad)[e.index - 1] += coef * e.value;
      (*grad)[nf] += coef;
    }
    return detail::softplus(-margin);
  }
};

/// One tanh hidden layer of width h and a sigmoid output with cross-entropy
/// loss. Parameters are [W1 (h x n_f, row-major), b1 (h), w2 (h), b2].
class NeuralNetObjective final : public DatasetObjective {
 public:
  NeuralNetObjective(std::shared_ptr<const SparseDataset> data, const LabelMap& labels,
                     std::size_t hidden)
      : DatasetObjective(std::move(data), labels), hidden_(hidden) {
    if (hidden_ == 0) throw Error(Errc::invalid_argument, "hidden width must be positive");
  }

  NeuralNetObjective(std::shared_ptr<const SparseDataset> data, const LabelMap& labels)
      : NeuralNetObjective(data, labels, hidden_width(data->n_features)) {}

  std::size_t dimension() const override {
    return network_dimension(data().n_features, hidden_);
  }
  std::size_t hidden() const { return hidden_; }

 protected:
  double sample_loss(std::span<const double> x, std::size_t s, Vector* grad,
                     double weight) const override {
    const std::size_t nf = data().n_features;
    const std::size_t h = hidden_;
    const std::size_t b1 = h * nf;
    const std::size_t w2 = b1 + h;
    const std::size_t b2 = w2 + h;
    const auto row = data().row(s);

    thread_local Vector z;
    z.assign(h, 0.0);
    double out = x[b2];
    for (std::size_t j = 0; j < h; ++j) {
      double pre = x[b1 + j];
      for (const SparseEntry& e : row) pre += x[j * nf + e.index - 1] * e.value;
      z[j] = std::tanh(pre);
      out += x[w2 + j] * z[j];
    }
    const double target = label(s) > 0 ? 1.0 : 0.0;
    if (grad) {
      Vector& g = *grad;
      const double delta = (detail::sigmoid(out) - target) * weight;
      g[b2] += delta;
      for (std::size_t j = 0; j < h; ++j) {
        g[w2 + j] += delta * z[j];
        const double back = delta * x[w2 + j] * (1.0 - z[j] * z[j]);
        g[b1 + j] += back;
        for (const SparseEntry& e : row) g[j * nf + e.index - 1] += back * e.value;
      }
    }
    return detail::softplus(out) - target * out;
  }

 private:
  std::size_t hidden_;
};

/// Central differences (f(x + h e_i) - f(x - h e_i)) / 2h.
inline Vector finite_difference_gradient(const Objective& objective,
                                         std::span<const double> x, double step) {
  if (!(step > 0)) throw Error(Errc::invalid_argument, "step must be positive");
  Vector probe(x.begin(), x.end());
  Vector g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double xi = probe[i];
    probe[i] = xi + step;
    const double fp = objective.value(probe);
    probe[i] = xi - step;
    const double fm = objective.value(probe);
    probe[i] = xi;
    g[i] = (fp - fm) / (2.0 * step);
  }
  return g;
}

/// Uniform size-b subsets of {0, ..., m-1} drawn without replacement, returned
/// in increasing order; successive draws are independent.
class BatchSampler {
 public:
  BatchSampler(std::size_t m, std::size_t batch_size, std::uint64_t seed)
      : population_(detail::all_indices(m)), batch_size_(batch_size), rng_(seed) {
    if (batch_size == 0 || batch_size > m) {
      throw Error(Errc::batch_too_large, "batch size " + std::to_string(batch_size) +
                                             " not in [1, " + std::to_string(m) + "]");
    }
  }

  std::vector<std::size_t> next() {
    std::vector<std::size_t> out;
    out.reserve(batch_size_);
    std::sample(population_.begin(), population_.end(), std::back_inserter(out),
                batch_size_, rng_);
    return out;
  }

  std::size_t batch_size() const { return batch_size_; }

 private:
  std::vector<std::size_t> population_;
  std::size_t batch_size_;
  std::mt19937_64 rng_;
};

/// ceil(fraction * m), at least 1.
inline std::size_t batch_size_for(std::size_t m, double fraction) {
  if (!(fraction > 0 && fraction <= 1)) {
    throw Error(Errc::invalid_argument, "batch fraction must lie in (0, 1]");
  }
  const auto b = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(m) - 1e-9));
  return std::clamp<std::size_t>(b, 1, std::max<std::size_t>(m, 1));
}

/// Features uniform in [-1, 1], labels in {-1, +1} drawn from a logistic model
/// with weights uniform in [-scale, scale].
inline SparseDataset make_synthetic_classification(std::size_t m, std::size_t n_features,
                                                   std::uint64_t seed,
                                                   double weight_scale = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  Vector w(n_features);
  for (double& v : w) v = weight_scale * unit(rng);
  const double bias = 0.25 * weight_scale * unit(rng);

  SparseDataset data;
  data.n_features = n_features;
  std::vector<SparseEntry> row(n_features);
  for (std::size_t s = 0; s < m; ++s) {
    double z = bias;
    for (std::size_t j = 0; j < n_features; ++j) {
      row[j] = {j + 1, unit(rng)};
      z += w[j] * row[j].value;
    }
    const double label = coin(rng) < detail::sigmoid(z) ? 1.0 : -1.0;
    data.push_row(label, row);
  }
  // Keep both classes present.
  if (m >= 2 && data.distinct_labels().size() < 2) data.labels[0] = -data.labels[0];
  return data;
}

}  // namespace sipm
