#pragma once

// Multiclass logistic regression over sparse binary string features, trained
// with full-batch proximal gradient descent and an L2 penalty. Biases are not
// penalized, so a heavily regularized model falls back to the class prior.

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace coach {

struct LinearExample {
  std::vector<std::string> features;
  std::size_t label = 0;
};

struct LinearTrainOptions {
  double reg = 1.0;
  std::size_t epochs = 300;
  double learning_rate = 0.5;
};

class LinearModel {
 public:
  LinearModel() = default;

  static LinearModel train(const std::vector<LinearExample>& examples, std::size_t num_classes,
                           const LinearTrainOptions& options);

  // Unnormalized class scores; unknown features are ignored.
  std::vector<double> scores(const std::vector<std::string>& features) const;
  std::vector<double> probabilities(const std::vector<std::string>& features) const;

  std::size_t num_classes() const { return bias_.size(); }
  double reg() const { return reg_; }
  const std::vector<double>& bias() const { return bias_; }
  const std::map<std::string, std::vector<double>>& weights() const { return weights_; }
  double weight_norm() const;

  nlohmann::json to_json() const;
  static LinearModel from_json(const nlohmann::json& j);

 private:
  double reg_ = 0.0;
  std::vector<double> bias_;
  std::map<std::string, std::vector<double>> weights_;
};

}  // namespace coach
