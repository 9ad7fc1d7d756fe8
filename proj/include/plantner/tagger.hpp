#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "plantner/corpus.hpp"
#include "plantner/subword.hpp"

namespace plantner {

/// Per-label loss weights.  Before the O factor is applied the weights
/// satisfy w_c = N / (K * n_c), so sum(n_c * w_c) = N over the (smoothed)
/// counts n_c.
struct ClassWeights {
  std::vector<double> by_label;  // indexed like LabelSchema::bio_labels()
  double o_factor = 1.0;

  double at(std::size_t label_index) const { return by_label[label_index]; }
};

/// Inverse-frequency weights over the corpus label counts; labels absent
/// from the corpus are smoothed to count 1.  The O weight is multiplied by
/// o_factor afterwards.  Throws Error on an empty corpus.
ClassWeights compute_class_weights(std::span<const Document> corpus,
                                   const LabelSchema& schema, double o_factor);

struct LossGrad {
  double loss;
  std::vector<double> gradient;
};

/// Class-weighted cross entropy at one position:
///   loss = -w * log softmax(logits)[gold]
///   gradient = w * (softmax(logits) - onehot(gold))
/// Softmax uses max-subtraction, so any finite logits are safe.
LossGrad weighted_ce_loss(std::span<const double> logits, std::size_t gold_index,
                          double gold_weight);

/// Hashed feature extraction.  The template list is fixed: lowercased form,
/// word shape, prefixes/suffixes of length 1-3, POS at offsets -1/0/+1,
/// lowercased forms at -1/+1, and begin/end-of-sentence flags.  Each feature
/// string is prefixed with its template id, hashed with 64-bit FNV-1a and
/// reduced modulo hash_dimension.
struct FeatureSpec {
  std::uint32_t hash_dimension = 1u << 18;  // must be a power of two
};

/// Active feature slots for one word of a sentence (duplicates possible;
/// each occurrence counts once more).
std::vector<std::uint32_t> word_features(const Sentence& sentence, std::size_t word,
                                         const FeatureSpec& spec);

struct TrainConfig {
  int epochs = 20;
  double learning_rate = 0.1;
  double decay = 0.1;
  std::uint64_t seed = 42;
  double o_factor = 0.1;
  std::uint32_t hash_dimension = 1u << 18;
};

/// Log-linear emission model over hashed features with BIO-constrained
/// Viterbi decoding.  Serialization is a versioned text document that
/// round-trips bit-exactly.
class TaggerModel {
public:
  TaggerModel(LabelSchema schema, FeatureSpec spec, TrainConfig config);

  const LabelSchema& schema() const { return schema_; }
  const FeatureSpec& feature_spec() const { return spec_; }
  const TrainConfig& config() const { return config_; }

  /// Logits for one word, indexed like bio_labels().
  std::vector<double> logits(std::span<const std::uint32_t> features) const;

  void save(std::ostream& out) const;
  void save_file(const std::string& path) const;
  static TaggerModel load(std::istream& in);
  static TaggerModel load_file(const std::string& path);

  bool operator==(const TaggerModel& other) const;

  // weight storage is row-major [label][slot]; exposed for training
  std::vector<double>& weights() { return weights_; }
  const std::vector<double>& weights() const { return weights_; }
  std::vector<double>& bias() { return bias_; }
  const std::vector<double>& bias() const { return bias_; }

private:
  LabelSchema schema_;
  FeatureSpec spec_;
  TrainConfig config_;
  std::vector<double> weights_;  // label_count * hash_dimension
  std::vector<double> bias_;     // label_count
};

struct TrainResult {
  TaggerModel model;
  std::vector<double> epoch_losses;  // mean loss over supervised positions
};

/// Deterministic SGD: sentences are Fisher-Yates shuffled each epoch with a
/// SplitMix64 stream seeded once from config.seed, the learning rate decays
/// as lr0 / (1 + decay * epoch), and the loss honors the supervision mask
/// (continuation pieces contribute nothing).  Equal seeds and data give
/// bit-identical models.  Throws Error on an empty corpus or non-positive
/// learning rate.
TrainResult train(std::span<const Document> corpus, const LabelSchema& schema,
                  const SubwordVocab& vocab, const TrainConfig& config);

/// Highest-scoring label sequence under the BIO transition constraints
/// (start and O admit {O, B-*}; B-X and I-X additionally admit I-X).  Ties
/// break toward the lower label index, resolved from the last position
/// backwards.  The result always validates clean.
std::vector<std::string> viterbi_decode(
    const std::vector<std::vector<double>>& emission_log_probs,
    const LabelSchema& schema);

/// segment -> featurize -> emissions -> viterbi -> project_to_words -> repair.
/// Output is valid BIO of sentence length.  Throws Error when the sentence
/// carries labels outside the model schema.
std::vector<std::string> predict(const TaggerModel& model, const Sentence& sentence,
                                 const SubwordVocab& vocab);

}  // namespace plantner
