#include "photonet/recognition.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>

#include "photonet/errors.hpp"
#include "photonet/rng.hpp"
#include "text_util.hpp"

namespace photonet {

namespace {

constexpr double kFileSumTolerance = 1e-6;

std::string face_ref(const PhotoId& photo, std::uint32_t face_index) {
  return photo.key() + "#" + std::to_string(face_index);
}

void check_distribution(std::span<const double> probs, double tolerance) {
  if (probs.empty()) {
    throw Error(ErrorKind::domain, "probability vector is empty");
  }
  double sum = 0;
  for (double p : probs) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw Error(ErrorKind::domain,
                  "probability " + text::format_double(p) + " outside [0, 1]");
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > tolerance) {
    throw Error(ErrorKind::domain,
                "probabilities sum to " + text::format_double(sum) +
                    ", expected 1");
  }
}

}  // namespace

ProbVector::ProbVector(std::vector<double> probs, double tolerance)
    : probs_(std::move(probs)) {
  check_distribution(probs_, tolerance);
}

std::size_t ProbVector::argmax() const {
  return static_cast<std::size_t>(
      std::max_element(probs_.begin(), probs_.end()) - probs_.begin());
}

ProbVector softmax(std::span<const double> logits) {
  if (logits.empty()) throw Error(ErrorKind::domain, "softmax of empty vector");
  for (double x : logits) {
    if (!std::isfinite(x)) {
      throw Error(ErrorKind::domain, "softmax input must be finite");
    }
  }
  const double top = *std::max_element(logits.begin(), logits.end());
  std::vector<double> y(logits.size());
  double total = 0;
  for (std::size_t j = 0; j < logits.size(); ++j) {
    y[j] = std::exp(logits[j] - top);
    total += y[j];
  }
  for (double& v : y) v /= total;
  return ProbVector(std::move(y));
}

double cross_entropy(const ProbVector& probs, std::size_t actual) {
  if (actual >= probs.size()) {
    throw Error(ErrorKind::precondition,
                "actual class " + std::to_string(actual) + " out of range");
  }
  const double p = probs[actual];
  if (p == 0.0) {
    throw Error(ErrorKind::infinite_loss,
                "true class has probability 0; loss is infinite");
  }
  // -log(1) is -0.0; report +0.
  return p == 1.0 ? 0.0 : -std::log(p);
}

double top1_error(std::span<const PredictionRecord> predictions,
                  const Corpus& corpus) {
  if (predictions.empty()) {
    throw Error(ErrorKind::undefined_rate, "top-1 error of zero predictions");
  }
  std::size_t wrong = 0;
  for (const PredictionRecord& r : predictions) {
    const FaceInstance* face = corpus.find(r.photo, r.face_index);
    if (!face) {
      throw Error(ErrorKind::precondition,
                  "prediction for unknown face " +
                      face_ref(r.photo, r.face_index));
    }
    if (!face->true_identity) {
      throw Error(ErrorKind::precondition,
                  "face " + face_ref(r.photo, r.face_index) +
                      " has no true identity");
    }
    if (!(r.predicted == *face->true_identity)) ++wrong;
  }
  return static_cast<double>(wrong) / static_cast<double>(predictions.size());
}

std::vector<PredictionRecord> predictions_of(const Corpus& corpus) {
  std::vector<PredictionRecord> out;
  for (const FaceInstance& f : corpus.instances()) {
    if (f.quality == Quality::usable && f.predicted_identity) {
      out.push_back({f.photo, f.face_index, *f.predicted_identity, {}});
    }
  }
  return out;
}

void RecognizerConfig::validate() const {
  if (mode == RecognizerMode::predictions_file && !predictions_path) {
    throw Error(ErrorKind::parameter,
                "predictions_file recognizer requires a predictions path");
  }
  if (mode == RecognizerMode::noise) {
    if (!noise_accuracy) {
      throw Error(ErrorKind::parameter,
                  "noise recognizer requires a noise accuracy");
    }
    if (!(*noise_accuracy >= 0.0 && *noise_accuracy <= 1.0)) {
      throw Error(ErrorKind::parameter, "noise accuracy must lie in [0, 1]");
    }
  }
}

RecognizerMode parse_recognizer_mode(const std::string& name) {
  if (name == "oracle") return RecognizerMode::oracle;
  if (name == "file" || name == "predictions_file") {
    return RecognizerMode::predictions_file;
  }
  if (name == "noise") return RecognizerMode::noise;
  throw Error(ErrorKind::usage, "unknown recognizer '" + name +
                                    "' (expected oracle, file or noise)");
}

namespace {

const IdentityId& require_true(const FaceInstance& f, const char* mode) {
  if (!f.true_identity) {
    throw Error(ErrorKind::precondition,
                std::string(mode) + " recognizer needs a true identity for face " +
                    face_ref(f.photo, f.face_index));
  }
  return *f.true_identity;
}

Corpus recognize_oracle(const Corpus& corpus) {
  std::vector<FaceInstance> out = corpus.instances();
  for (FaceInstance& f : out) {
    if (f.quality == Quality::usable) {
      f.predicted_identity = require_true(f, "oracle");
    }
  }
  return Corpus(std::move(out));
}

Corpus recognize_noise(const Corpus& corpus, double accuracy,
                       std::uint64_t seed) {
  const auto& ids = corpus.identities(LabelSource::true_labels);
  const std::vector<IdentityId> universe(ids.begin(), ids.end());
  std::vector<FaceInstance> out = corpus.instances();
  for (FaceInstance& f : out) {
    if (f.quality != Quality::usable) continue;
    const IdentityId& truth = require_true(f, "noise");
    Rng rng(derive_seed(seed, face_ref(f.photo, f.face_index)));
    if (rng.uniform() < accuracy || universe.size() < 2) {
      f.predicted_identity = truth;
      continue;
    }
    // Uniform over universe minus the true label: draw from n-1 slots and
    // skip over the truth's position.
    const auto truth_pos = static_cast<std::size_t>(
        std::lower_bound(universe.begin(), universe.end(), truth) -
        universe.begin());
    auto pick = static_cast<std::size_t>(rng.below(universe.size() - 1));
    if (pick >= truth_pos) ++pick;
    f.predicted_identity = universe[pick];
  }
  return Corpus(std::move(out));
}

}  // namespace

Corpus apply_predictions(const Corpus& corpus,
                         std::span<const PredictionRecord> records) {
  std::map<std::pair<PhotoId, std::uint32_t>, const PredictionRecord*> by_face;
  for (const PredictionRecord& r : records) {
    if (!corpus.find(r.photo, r.face_index)) {
      throw Error(ErrorKind::coverage,
                  "prediction for face not in corpus: " +
                      face_ref(r.photo, r.face_index));
    }
    if (!by_face.emplace(std::pair{r.photo, r.face_index}, &r).second) {
      throw Error(ErrorKind::consistency,
                  "duplicate prediction for face " +
                      face_ref(r.photo, r.face_index));
    }
  }
  std::vector<FaceInstance> out = corpus.instances();
  std::vector<std::string> missing;
  for (FaceInstance& f : out) {
    if (f.quality != Quality::usable) continue;
    auto it = by_face.find({f.photo, f.face_index});
    if (it == by_face.end()) {
      missing.push_back(face_ref(f.photo, f.face_index));
      continue;
    }
    f.predicted_identity = it->second->predicted;
  }
  if (!missing.empty()) {
    std::string msg = "predictions do not cover " +
                      std::to_string(missing.size()) + " usable face(s):";
    const std::size_t shown = std::min<std::size_t>(missing.size(), 20);
    for (std::size_t i = 0; i < shown; ++i) msg += " " + missing[i];
    if (shown < missing.size()) msg += " ...";
    throw Error(ErrorKind::coverage, msg);
  }
  return Corpus(std::move(out));
}

Corpus recognize(const Corpus& corpus, const RecognizerConfig& config) {
  config.validate();
  switch (config.mode) {
    case RecognizerMode::oracle:
      return recognize_oracle(corpus);
    case RecognizerMode::noise:
      return recognize_noise(corpus, *config.noise_accuracy, config.seed);
    case RecognizerMode::predictions_file: {
      auto records = read_predictions(*config.predictions_path);
      return apply_predictions(corpus, records);
    }
  }
  return corpus;
}

std::vector<PredictionRecord> parse_predictions(std::istream& in) {
  std::vector<PredictionRecord> out;
  std::string raw;
  std::size_t line = 0;
  auto fail = [&](const std::string& what) -> void {
    throw Error(ErrorKind::parse, "line " + std::to_string(line) + ": " + what);
  };
  while (std::getline(in, raw)) {
    ++line;
    std::string_view text = text::strip_cr(raw);
    if (text.empty() || text.front() == '#') continue;
    auto fields = text::split(text, '\t');
    if (out.empty() && fields[0] == "photo_id") continue;  // header
    if (fields.size() < 3) fail("expected photo_id, face_index, predicted_identity");
    auto index = text::parse_uint(fields[1]);
    if (!index || *index > UINT32_MAX) fail("bad face_index '" + std::string(fields[1]) + "'");
    if (fields[0].empty() || fields[2].empty()) fail("empty photo_id or predicted_identity");
    try {
      PredictionRecord r{PhotoId::from_key(fields[0]),
                         static_cast<std::uint32_t>(*index),
                         IdentityId(std::string(fields[2])),
                         {}};
      if (fields.size() > 3) {
        std::vector<LabeledProb> probs;
        std::vector<double> values;
        for (std::size_t i = 3; i < fields.size(); ++i) {
          auto colon = fields[i].rfind(':');
          if (colon == std::string_view::npos || colon == 0) {
            fail("probability column '" + std::string(fields[i]) +
                 "' is not label:probability");
          }
          auto p = text::parse_double(fields[i].substr(colon + 1));
          if (!p) fail("bad probability in '" + std::string(fields[i]) + "'");
          probs.push_back({IdentityId(std::string(fields[i].substr(0, colon))), *p});
          values.push_back(*p);
        }
        check_distribution(values, kFileSumTolerance);
        const double top = *std::max_element(values.begin(), values.end());
        auto stated = std::find_if(probs.begin(), probs.end(), [&](const auto& lp) {
          return lp.label == r.predicted;
        });
        if (stated == probs.end() || stated->probability < top) {
          fail("predicted label " + r.predicted.str() +
               " is not the argmax of its probability vector");
        }
        r.probs = std::move(probs);
      }
      out.push_back(std::move(r));
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::parse) throw;
      fail(e.what());
    }
  }
  return out;
}

std::vector<PredictionRecord> read_predictions(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorKind::io, "cannot open predictions file " + path.string());
  }
  try {
    return parse_predictions(in);
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

void write_predictions(std::ostream& out,
                       std::span<const PredictionRecord> records) {
  out << "photo_id\tface_index\tpredicted_identity\n";
  for (const PredictionRecord& r : records) {
    out << r.photo.key() << '\t' << r.face_index << '\t' << r.predicted;
    if (r.probs) {
      for (const LabeledProb& lp : *r.probs) {
        out << '\t' << lp.label << ':' << text::format_double(lp.probability);
      }
    }
    out << '\n';
  }
}

}  // namespace photonet
