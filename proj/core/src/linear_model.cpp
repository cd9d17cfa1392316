#include "coach/linear_model.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "coach/error.hpp"

namespace coach {
namespace {

void softmax_in_place(std::vector<double>& v) {
  const double m = *std::max_element(v.begin(), v.end());
  double z = 0.0;
  for (double& x : v) {
    x = std::exp(x - m);
    z += x;
  }
  for (double& x : v) x /= z;
}

}  // namespace

LinearModel LinearModel::train(const std::vector<LinearExample>& examples,
                               std::size_t num_classes, const LinearTrainOptions& options) {
  if (examples.empty()) throw Error(ErrorCode::kDegenerateCorpus, "no training examples");
  if (num_classes < 2) throw Error(ErrorCode::kInvalidArgument, "need at least two classes");
  if (!(options.reg >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "reg must be >= 0");

  // Index features in sorted order so training is independent of hash layout.
  std::map<std::string, std::size_t> index;
  for (const auto& ex : examples) {
    for (const auto& f : ex.features) index.emplace(f, 0);
  }
  std::size_t next = 0;
  for (auto& [name, idx] : index) idx = next++;

  std::vector<std::vector<std::size_t>> rows;
  rows.reserve(examples.size());
  for (const auto& ex : examples) {
    std::vector<std::size_t> r;
    r.reserve(ex.features.size());
    for (const auto& f : ex.features) r.push_back(index.at(f));
    std::sort(r.begin(), r.end());
    r.erase(std::unique(r.begin(), r.end()), r.end());
    rows.push_back(std::move(r));
    if (ex.label >= num_classes) throw Error(ErrorCode::kInvalidArgument, "label out of range");
  }

  const std::size_t dim = index.size();
  const double n = static_cast<double>(examples.size());
  std::vector<double> w(dim * num_classes, 0.0);
  std::vector<double> b(num_classes, 0.0);
  std::vector<double> gw(dim * num_classes);
  std::vector<double> gb(num_classes);
  std::vector<double> p(num_classes);
  const double eta = options.learning_rate;
  const double shrink = 1.0 / (1.0 + eta * options.reg / n);

  for (std::size_t epoch = 0; epoch < options.epochs; ++epoch) {
    std::fill(gw.begin(), gw.end(), 0.0);
    std::fill(gb.begin(), gb.end(), 0.0);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      for (std::size_t c = 0; c < num_classes; ++c) {
        double s = b[c];
        for (std::size_t f : rows[i]) s += w[f * num_classes + c];
        p[c] = s;
      }
      softmax_in_place(p);
      p[examples[i].label] -= 1.0;
      for (std::size_t c = 0; c < num_classes; ++c) {
        gb[c] += p[c];
        for (std::size_t f : rows[i]) gw[f * num_classes + c] += p[c];
      }
    }
    for (std::size_t c = 0; c < num_classes; ++c) b[c] -= eta * gb[c] / n;
    // Proximal step for the L2 term keeps the update stable for any reg.
    for (std::size_t k = 0; k < w.size(); ++k) w[k] = (w[k] - eta * gw[k] / n) * shrink;
  }

  LinearModel model;
  model.reg_ = options.reg;
  model.bias_ = b;
  for (const auto& [name, idx] : index) {
    model.weights_[name] =
        std::vector<double>(w.begin() + static_cast<std::ptrdiff_t>(idx * num_classes),
                            w.begin() + static_cast<std::ptrdiff_t>((idx + 1) * num_classes));
  }
  return model;
}

std::vector<double> LinearModel::scores(const std::vector<std::string>& features) const {
  std::vector<double> s = bias_;
  for (const auto& f : features) {
    if (auto it = weights_.find(f); it != weights_.end()) {
      for (std::size_t c = 0; c < s.size(); ++c) s[c] += it->second[c];
    }
  }
  return s;
}

std::vector<double> LinearModel::probabilities(const std::vector<std::string>& features) const {
  std::vector<double> s = scores(features);
  softmax_in_place(s);
  return s;
}

double LinearModel::weight_norm() const {
  double sum = 0.0;
  for (const auto& [name, ws] : weights_) {
    for (double x : ws) sum += x * x;
  }
  return std::sqrt(sum);
}

nlohmann::json LinearModel::to_json() const {
  nlohmann::json j;
  j["reg"] = reg_;
  j["bias"] = bias_;
  nlohmann::json w = nlohmann::json::object();
  for (const auto& [name, ws] : weights_) w[name] = ws;
  j["weights"] = std::move(w);
  return j;
}

LinearModel LinearModel::from_json(const nlohmann::json& j) {
  LinearModel m;
  try {
    m.reg_ = j.at("reg").get<double>();
    m.bias_ = j.at("bias").get<std::vector<double>>();
    for (const auto& [name, ws] : j.at("weights").items()) {
      auto v = ws.get<std::vector<double>>();
      if (v.size() != m.bias_.size()) {
        throw Error(ErrorCode::kFormatError, "weight row size mismatch for " + name);
      }
      m.weights_[name] = std::move(v);
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kFormatError, std::string("bad linear model: ") + e.what());
  }
  return m;
}

}  // namespace coach
