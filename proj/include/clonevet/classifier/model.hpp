#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "clonevet/classifier/features.hpp"

namespace clonevet::classifier {

enum class ModelKind { Feedforward, Logistic };

const char* to_string(ModelKind kind) noexcept;
std::optional<ModelKind> parse_model_kind(std::string_view text);

struct Hyperparameters {
  ModelKind kind = ModelKind::Feedforward;
  int hidden_units = 16;
  int epochs = 400;
  double learning_rate = 0.05;
  double l2 = 1e-4;
  std::uint64_t seed = 42;
  /// Share of each class held out for evaluation.
  double holdout_fraction = 0.2;
  std::size_t min_rows = 10;
  /// Operating point used for the held-out metrics.
  double cutoff = 0.5;
};

struct HeldOutMetrics {
  std::size_t train_rows = 0;
  std::size_t heldout_rows = 0;
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
  /// Unset when the denominator is zero.
  std::optional<double> precision;
  std::optional<double> recall;
  double initial_loss = 0;
  double final_loss = 0;
};

struct LabeledRow {
  FeatureVector features{};
  bool clone = false;
};

/// A trained model together with everything needed to reproduce and audit
/// it. Serializes to a self-describing JSON document.
class ClassifierModel final : public Classifier {
 public:
  double predict(const FeatureVector& features) const override;

  ModelKind kind = ModelKind::Feedforward;
  std::string metric_dictionary_version;
  FeatureVector mean{};
  FeatureVector stddev{};
  Hyperparameters hyperparameters;
  std::string training_fingerprint;
  HeldOutMetrics heldout;

  // Feedforward: w1 is hidden x features (row-major), b1 and w2 are hidden.
  // Logistic: w1 is 1 x features and the other arrays are empty.
  std::vector<double> w1;
  std::vector<double> b1;
  std::vector<double> w2;
  double b2 = 0;

  std::string to_json() const;
  /// Throws Error(MalformedModel), or Error(VersionMismatch) when the model
  /// was trained under another metric dictionary than `expected_version`.
  static ClassifierModel from_json(std::string_view text,
                                   std::string_view expected_version = metrics::kMetricDictionaryVersion);

  void save(const std::filesystem::path& path) const;
  /// Throws Error(ModelUnavailable) if the file cannot be read.
  static ClassifierModel load(const std::filesystem::path& path,
                              std::string_view expected_version = metrics::kMetricDictionaryVersion);

  /// SHA-256 of to_json().
  std::string digest() const;
};

/// Deterministic given the rows (in order) and hyperparameters. Throws
/// Error(DegenerateData) for fewer than min_rows rows or a single class,
/// Error(NonConvergence) when the loss does not decrease or turns non-finite.
ClassifierModel train(const std::vector<LabeledRow>& rows, const Hyperparameters& hp);

}  // namespace clonevet::classifier
