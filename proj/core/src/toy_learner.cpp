#include "streammem/toy_learner.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "streammem/scoring.hpp"

namespace streammem {

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

}  // namespace

ToyLearner::ToyLearner(int n_classes, const GridSpec& grid, int embed_dim, double learning_rate,
                       Rng& init_rng)
    : n_classes_(n_classes),
      grid_(grid),
      embed_dim_(embed_dim),
      learning_rate_(learning_rate),
      weights_(static_cast<std::size_t>(n_classes) * grid.channels),
      bias_(static_cast<std::size_t>(n_classes), 0.0),
      projection_(static_cast<std::size_t>(embed_dim) * grid.channels) {
  if (n_classes < 1 || embed_dim < 1 || learning_rate <= 0.0) {
    throw std::invalid_argument("ToyLearner: invalid configuration");
  }
  for (double& w : weights_) w = init_rng.normal(0.0, 0.01);
  for (double& p : projection_) p = init_rng.normal(0.0, 1.0);
}

std::vector<ProbGrid> ToyLearner::predict_probs(const Sample& sample) const {
  const FeatureGrid& f = sample.features;
  if (f.channels != grid_.channels) {
    throw std::invalid_argument("predict_probs: feature channel mismatch");
  }
  std::vector<ProbGrid> probs;
  probs.reserve(static_cast<std::size_t>(n_classes_));
  for (int c = 0; c < n_classes_; ++c) {
    ProbGrid grid(f.height, f.width);
    const double* w = &weights_[static_cast<std::size_t>(c) * grid_.channels];
    for (std::size_t px = 0; px < f.pixel_count(); ++px) {
      const double* feat = f.data.data() + px * f.channels;
      double z = bias_[static_cast<std::size_t>(c)];
      for (int ch = 0; ch < f.channels; ++ch) z += w[ch] * feat[ch];
      grid.data[px] = sigmoid(z);
    }
    probs.push_back(std::move(grid));
  }
  return probs;
}

std::vector<double> ToyLearner::embed(const Sample& sample) const {
  const FeatureGrid& f = sample.features;
  if (f.channels != grid_.channels) {
    throw std::invalid_argument("embed: feature channel mismatch");
  }
  std::vector<double> pooled(static_cast<std::size_t>(f.channels), 0.0);
  for (std::size_t px = 0; px < f.pixel_count(); ++px) {
    const double* feat = f.data.data() + px * f.channels;
    for (int ch = 0; ch < f.channels; ++ch) pooled[static_cast<std::size_t>(ch)] += feat[ch];
  }
  for (double& v : pooled) v /= static_cast<double>(f.pixel_count());

  std::vector<double> e(static_cast<std::size_t>(embed_dim_), 0.0);
  double norm = 0.0;
  for (int k = 0; k < embed_dim_; ++k) {
    const double* row = &projection_[static_cast<std::size_t>(k) * grid_.channels];
    double v = 0.0;
    for (int ch = 0; ch < grid_.channels; ++ch) v += row[ch] * pooled[static_cast<std::size_t>(ch)];
    e[static_cast<std::size_t>(k)] = v;
    norm += v * v;
  }
  norm = std::sqrt(norm);
  if (norm < 1e-12) {
    e.assign(static_cast<std::size_t>(embed_dim_), 0.0);
    e[0] = 1.0;
    return e;
  }
  for (double& v : e) v /= norm;
  return e;
}

double ToyLearner::forward_backward(const std::vector<const Sample*>& batch,
                                    std::vector<double>* gradients) const {
  if (batch.empty()) {
    throw std::invalid_argument("train_step: empty batch");
  }
  if (gradients) gradients->assign(weights_.size() + bias_.size(), 0.0);

  const double batch_scale = 1.0 / static_cast<double>(batch.size());
  double total_loss = 0.0;

  for (const Sample* sample : batch) {
    const FeatureGrid& f = sample->features;
    if (f.channels != grid_.channels) {
      throw std::invalid_argument("train_step: feature channel mismatch");
    }
    if (sample->labels.empty()) continue;  // nothing annotated, nothing to learn
    const double class_scale = 1.0 / static_cast<double>(sample->labels.size());
    const std::size_t n_px = f.pixel_count();

    for (const auto& [cls, gt] : sample->labels) {
      if (cls < 0 || cls >= n_classes_) {
        throw std::invalid_argument("train_step: label class " + std::to_string(cls) +
                                    " outside model range");
      }
      if (static_cast<std::size_t>(gt.height) * gt.width != n_px) {
        throw std::invalid_argument("train_step: label shape mismatch for class " +
                                    std::to_string(cls));
      }
      const double* w = &weights_[static_cast<std::size_t>(cls) * grid_.channels];

      std::vector<double> p(n_px);
      double bce = 0.0;
      double sum_p = 0.0, sum_g = 0.0, sum_pg = 0.0;
      for (std::size_t px = 0; px < n_px; ++px) {
        const double* feat = f.data.data() + px * f.channels;
        double z = bias_[static_cast<std::size_t>(cls)];
        for (int ch = 0; ch < f.channels; ++ch) z += w[ch] * feat[ch];
        const double prob = sigmoid(z);
        p[px] = prob;
        const double g = gt.data[px] ? 1.0 : 0.0;
        const double clamped = std::clamp(prob, kProbClamp, 1.0 - kProbClamp);
        bce += g ? -std::log(clamped) : -std::log(1.0 - clamped);
        sum_p += prob;
        sum_g += g;
        sum_pg += prob * g;
      }
      bce /= static_cast<double>(n_px);
      const double dice_num = 2.0 * sum_pg + kDiceSmooth;
      const double dice_den = sum_p + sum_g + kDiceSmooth;
      const double dice_loss = 1.0 - dice_num / dice_den;
      total_loss += batch_scale * class_scale * (bce + dice_loss);

      if (!gradients) continue;
      double* gw = gradients->data() + static_cast<std::size_t>(cls) * grid_.channels;
      double* gb = gradients->data() + weights_.size() + static_cast<std::size_t>(cls);
      const double scale = batch_scale * class_scale;
      for (std::size_t px = 0; px < n_px; ++px) {
        const double prob = p[px];
        const double g = gt.data[px] ? 1.0 : 0.0;
        // BCE: d/dz collapses to (p - g); zero where the clamp is active.
        double dz = 0.0;
        if (prob > kProbClamp && prob < 1.0 - kProbClamp) {
          dz += (prob - g) / static_cast<double>(n_px);
        }
        // Soft Dice: dL/dp = -(2 g den - num) / den^2, chain through p(1-p).
        const double dldp = -(2.0 * g * dice_den - dice_num) / (dice_den * dice_den);
        dz += dldp * prob * (1.0 - prob);
        dz *= scale;
        const double* feat = f.data.data() + px * f.channels;
        for (int ch = 0; ch < f.channels; ++ch) gw[ch] += dz * feat[ch];
        *gb += dz;
      }
    }
  }
  return total_loss;
}

double ToyLearner::train_step(const std::vector<const Sample*>& batch) {
  std::vector<double> grads;
  const double loss = forward_backward(batch, &grads);
  for (std::size_t i = 0; i < weights_.size(); ++i) weights_[i] -= learning_rate_ * grads[i];
  for (std::size_t i = 0; i < bias_.size(); ++i) {
    bias_[i] -= learning_rate_ * grads[weights_.size() + i];
  }
  return loss;
}

double ToyLearner::batch_loss(const std::vector<const Sample*>& batch) const {
  return forward_backward(batch, nullptr);
}

std::vector<double> ToyLearner::flat_parameters() const {
  std::vector<double> params(weights_);
  params.insert(params.end(), bias_.begin(), bias_.end());
  return params;
}

void ToyLearner::set_flat_parameters(const std::vector<double>& params) {
  if (params.size() != weights_.size() + bias_.size()) {
    throw std::invalid_argument("set_flat_parameters: size mismatch");
  }
  std::copy(params.begin(), params.begin() + static_cast<std::ptrdiff_t>(weights_.size()),
            weights_.begin());
  std::copy(params.begin() + static_cast<std::ptrdiff_t>(weights_.size()), params.end(),
            bias_.begin());
}

std::vector<double> ToyLearner::flat_gradients(const std::vector<const Sample*>& batch) const {
  std::vector<double> grads;
  forward_backward(batch, &grads);
  return grads;
}

double sample_uncertainty(const ToyLearner& learner, const Sample& sample) {
  std::map<int, MaskGrid> visible;
  for (const auto& [cls, grid] : sample.labels) {
    if (positive_count(grid) > 0) visible.emplace(cls, grid);
  }
  if (visible.empty()) return 0.0;

  const auto probs = learner.predict_probs(sample);
  std::map<int, ProbGrid> pred;
  std::vector<int> mask;
  for (const auto& [cls, grid] : visible) {
    pred.emplace(cls, probs[static_cast<std::size_t>(cls)]);
    mask.push_back(cls);
  }
  const PenaltyVector alpha = structure_penalty(visible);
  return weighted_bce_uncertainty(pred, visible, mask, alpha);
}

}  // namespace streammem
