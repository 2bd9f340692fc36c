#pragma once

#include <vector>

#include "streammem/rng.hpp"
#include "streammem/sample.hpp"
#include "streammem/stream_sim.hpp"

namespace streammem {

/// Per-pixel linear logistic predictor, one weight row per class, plus a fixed
/// random projection of the mean-pooled features that serves as the sample
/// encoder. Trains with masked BCE + soft Dice over annotated classes only;
/// classes outside a sample's label mask contribute exactly zero gradient.
class ToyLearner {
 public:
  ToyLearner(int n_classes, const GridSpec& grid, int embed_dim, double learning_rate, Rng& init_rng);

  /// Sigmoid probabilities for every class, indexed by class id.
  std::vector<ProbGrid> predict_probs(const Sample& sample) const;

  /// Unit-norm embedding of the mean-pooled features.
  std::vector<double> embed(const Sample& sample) const;

  /// One SGD step on the batch mean of masked BCE + soft Dice.
  /// Returns the pre-step loss.
  double train_step(const std::vector<const Sample*>& batch);

  double batch_loss(const std::vector<const Sample*>& batch) const;

  /// Parameters as one flat vector [class weights row-major, biases]; the
  /// analytic gradient uses the same layout. Exposed for gradient checks.
  std::vector<double> flat_parameters() const;
  void set_flat_parameters(const std::vector<double>& params);
  std::vector<double> flat_gradients(const std::vector<const Sample*>& batch) const;

  int n_classes() const { return n_classes_; }
  int embed_dim() const { return embed_dim_; }
  double learning_rate() const { return learning_rate_; }

  static constexpr double kDiceSmooth = 1e-5;

 private:
  double forward_backward(const std::vector<const Sample*>& batch,
                          std::vector<double>* gradients) const;

  int n_classes_;
  GridSpec grid_;
  int embed_dim_;
  double learning_rate_;
  std::vector<double> weights_;     // n_classes x channels
  std::vector<double> bias_;        // n_classes
  std::vector<double> projection_;  // embed_dim x channels, fixed after init
};

/// Penalty-weighted BCE uncertainty of the learner's current prediction on a
/// sample, over its annotated classes with at least one positive pixel.
/// Returns 0 when no annotated structure is visible.
double sample_uncertainty(const ToyLearner& learner, const Sample& sample);

}  // namespace streammem
