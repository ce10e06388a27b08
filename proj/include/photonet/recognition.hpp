#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "photonet/corpus.hpp"
#include "photonet/ids.hpp"

namespace photonet {

/// Class probabilities: each entry in [0, 1], summing to 1 within tolerance.
class ProbVector {
 public:
  static constexpr double kSumTolerance = 1e-9;

  explicit ProbVector(std::vector<double> probs,
                      double tolerance = kSumTolerance);

  std::size_t size() const noexcept { return probs_.size(); }
  double operator[](std::size_t j) const { return probs_[j]; }
  std::span<const double> values() const noexcept { return probs_; }
  std::size_t argmax() const;

 private:
  std::vector<double> probs_;
};

/// y_j = exp(x_j) / sum_i exp(x_i), evaluated after subtracting max(x).
/// Throws Error(domain) for an empty or non-finite input.
ProbVector softmax(std::span<const double> logits);

/// -ln(probs[actual]). Throws Error(infinite_loss) when that probability is 0.
double cross_entropy(const ProbVector& probs, std::size_t actual);

struct LabeledProb {
  IdentityId label;
  double probability;
  friend bool operator==(const LabeledProb&, const LabeledProb&) = default;
};

struct PredictionRecord {
  PhotoId photo;
  std::uint32_t face_index = 0;
  IdentityId predicted;
  std::optional<std::vector<LabeledProb>> probs;
  friend bool operator==(const PredictionRecord&,
                         const PredictionRecord&) = default;
};

/// Fraction of records whose prediction differs from the face's true label.
double top1_error(std::span<const PredictionRecord> predictions,
                  const Corpus& corpus);

/// One record per usable instance that carries a predicted label.
std::vector<PredictionRecord> predictions_of(const Corpus& corpus);

enum class RecognizerMode { oracle, predictions_file, noise };

struct RecognizerConfig {
  RecognizerMode mode = RecognizerMode::oracle;
  std::optional<std::filesystem::path> predictions_path;
  std::optional<double> noise_accuracy;
  std::uint64_t seed = 0;

  /// Throws Error(parameter) when the mode's required field is missing.
  void validate() const;
};

RecognizerMode parse_recognizer_mode(const std::string& name);

/// Fills predicted_identity for every usable instance.
///
///   oracle            predicted = true label
///   predictions_file  predicted read from the file; every usable instance
///                     must be covered
///   noise             keep the true label with probability noise_accuracy,
///                     otherwise draw uniformly among the other identities;
///                     each face has its own stream keyed by
///                     (seed, photo, face_index)
Corpus recognize(const Corpus& corpus, const RecognizerConfig& config);

/// predictions_file mode with records already in memory.
Corpus apply_predictions(const Corpus& corpus,
                         std::span<const PredictionRecord> records);

/// Predictions TSV: photo_id, face_index, predicted_identity, then optional
/// label:probability columns. Probabilities must sum to 1 within 1e-6 and
/// their argmax must be the predicted label.
std::vector<PredictionRecord> parse_predictions(std::istream& in);
std::vector<PredictionRecord> read_predictions(
    const std::filesystem::path& path);
void write_predictions(std::ostream& out,
                       std::span<const PredictionRecord> records);

}  // namespace photonet
