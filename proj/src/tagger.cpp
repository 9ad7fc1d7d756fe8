#include "plantner/tagger.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include "plantner/bio_codec.hpp"
#include "plantner/rng.hpp"

namespace plantner {

namespace {

constexpr std::uint64_t kFnvOffset = 14695981039346656037ULL;
constexpr std::uint64_t kFnvPrime = 1099511628211ULL;

std::uint64_t fnv1a(std::string_view data, std::uint64_t h = kFnvOffset) {
  for (unsigned char c : data) {
    h ^= c;
    h *= kFnvPrime;
  }
  return h;
}

bool power_of_two(std::uint32_t v) { return v != 0 && (v & (v - 1)) == 0; }

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out)
    if (static_cast<unsigned char>(c) < 0x80)
      c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

// X for uppercase, x for lowercase, d for digits, other characters pass
// through (no run collapsing)
std::string shape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (unsigned char c : s) {
    if (c < 0x80 && std::isupper(c)) out.push_back('X');
    else if (c < 0x80 && std::islower(c)) out.push_back('x');
    else if (c < 0x80 && std::isdigit(c)) out.push_back('d');
    else out.push_back(static_cast<char>(c));
  }
  return out;
}

constexpr std::string_view kBoundary = "<S>";

}  // namespace

std::vector<std::uint32_t> word_features(const Sentence& sentence, std::size_t word,
                                         const FeatureSpec& spec) {
  if (!power_of_two(spec.hash_dimension))
    throw Error("hash_dimension must be a power of two");
  const std::uint32_t mask = spec.hash_dimension - 1;
  const std::size_t n = sentence.size();
  if (word >= n) throw Error("word_features: word index out of range");

  std::vector<std::uint32_t> slots;
  slots.reserve(16);
  auto add = [&](std::string_view tid, std::string_view payload) {
    std::uint64_t h = fnv1a(tid);
    h = fnv1a(payload, h);
    slots.push_back(static_cast<std::uint32_t>(h) & mask);
  };

  const std::string form = lower(sentence.tokens[word].form);
  add("f0=", form);
  add("f1=", shape(sentence.tokens[word].form));
  for (std::size_t len = 1; len <= 3; ++len) {
    if (form.size() >= len) {
      add(len == 1 ? "f2=" : len == 2 ? "f3=" : "f4=", std::string_view(form).substr(0, len));
      add(len == 1 ? "f5=" : len == 2 ? "f6=" : "f7=",
          std::string_view(form).substr(form.size() - len));
    }
  }
  add("f8=", word > 0 ? std::string_view(sentence.tokens[word - 1].pos) : kBoundary);
  add("f9=", sentence.tokens[word].pos);
  add("f10=", word + 1 < n ? std::string_view(sentence.tokens[word + 1].pos) : kBoundary);
  const std::string prev_form =
      word > 0 ? lower(sentence.tokens[word - 1].form) : std::string(kBoundary);
  const std::string next_form =
      word + 1 < n ? lower(sentence.tokens[word + 1].form) : std::string(kBoundary);
  add("f11=", prev_form);
  add("f12=", next_form);
  if (word == 0) add("f13=", "bos");
  if (word + 1 == n) add("f14=", "eos");
  return slots;
}

ClassWeights compute_class_weights(std::span<const Document> corpus,
                                   const LabelSchema& schema, double o_factor) {
  if (o_factor <= 0.0) throw Error("o_factor must be positive");

  const std::size_t k = schema.label_count();
  std::vector<std::int64_t> counts(k, 0);
  std::int64_t seen = 0;
  for (const auto& doc : corpus) {
    for (const auto& sentence : doc.sentences) {
      for (const auto& token : sentence.tokens) {
        const int idx = schema.label_index(token.label);
        if (idx < 0)
          throw Error("compute_class_weights: unknown label '" + token.label + "'");
        ++counts[static_cast<std::size_t>(idx)];
        ++seen;
      }
    }
  }
  if (seen == 0) throw Error("compute_class_weights: empty corpus");

  // absent labels are smoothed to count 1; N is the smoothed total, so
  // sum(n_c * w_c) = N holds exactly
  double total = 0.0;
  for (auto& c : counts) {
    if (c == 0) c = 1;
    total += static_cast<double>(c);
  }

  ClassWeights weights;
  weights.o_factor = o_factor;
  weights.by_label.resize(k);
  for (std::size_t i = 0; i < k; ++i)
    weights.by_label[i] = total / (static_cast<double>(k) * static_cast<double>(counts[i]));
  weights.by_label[0] *= o_factor;  // O sits at index 0
  return weights;
}

LossGrad weighted_ce_loss(std::span<const double> logits, std::size_t gold_index,
                          double gold_weight) {
  if (gold_index >= logits.size()) throw Error("weighted_ce_loss: gold index out of range");

  const double max_logit = *std::max_element(logits.begin(), logits.end());
  double z = 0.0;
  for (double logit : logits) z += std::exp(logit - max_logit);
  const double log_z = std::log(z);

  LossGrad out;
  out.loss = -gold_weight * (logits[gold_index] - max_logit - log_z);
  out.gradient.resize(logits.size());
  for (std::size_t k = 0; k < logits.size(); ++k) {
    const double p = std::exp(logits[k] - max_logit - log_z);
    out.gradient[k] = gold_weight * (p - (k == gold_index ? 1.0 : 0.0));
  }
  return out;
}

TaggerModel::TaggerModel(LabelSchema schema, FeatureSpec spec, TrainConfig config)
    : schema_(std::move(schema)), spec_(spec), config_(config) {
  if (!power_of_two(spec_.hash_dimension))
    throw Error("hash_dimension must be a power of two");
  weights_.assign(static_cast<std::size_t>(schema_.label_count()) * spec_.hash_dimension,
                  0.0);
  bias_.assign(schema_.label_count(), 0.0);
}

std::vector<double> TaggerModel::logits(std::span<const std::uint32_t> features) const {
  const std::size_t k = schema_.label_count();
  const std::size_t d = spec_.hash_dimension;
  std::vector<double> out(bias_);
  for (const auto slot : features) {
    for (std::size_t label = 0; label < k; ++label)
      out[label] += weights_[label * d + slot];
  }
  return out;
}

namespace {

void append_double(std::string& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out += buf;
}

double read_double(const char*& p, std::size_t where) {
  char* end = nullptr;
  const double v = std::strtod(p, &end);
  if (end == p)
    throw Error("model file: malformed number in row " + std::to_string(where));
  p = end;
  return v;
}

std::string expect_line(std::istream& in, const char* what) {
  std::string line;
  if (!std::getline(in, line)) throw Error(std::string("model file: missing ") + what);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t pos = 0;
  while (true) {
    const std::size_t tab = line.find('\t', pos);
    if (tab == std::string::npos) {
      fields.push_back(line.substr(pos));
      break;
    }
    fields.push_back(line.substr(pos, tab - pos));
    pos = tab + 1;
  }
  return fields;
}

}  // namespace

void TaggerModel::save(std::ostream& out) const {
  std::string buf;
  buf.reserve(1 << 20);
  buf += "plantner-model 1\n";
  buf += "classes";
  for (const auto& c : schema_.entity_classes()) {
    buf += '\t';
    buf += c;
  }
  buf += "\nhash_dimension\t" + std::to_string(spec_.hash_dimension);
  buf += "\nseed\t" + std::to_string(config_.seed);
  buf += "\nepochs\t" + std::to_string(config_.epochs);
  buf += "\nlearning_rate\t";
  append_double(buf, config_.learning_rate);
  buf += "\ndecay\t";
  append_double(buf, config_.decay);
  buf += "\no_factor\t";
  append_double(buf, config_.o_factor);
  buf += "\nbias";
  for (const double v : bias_) {
    buf += '\t';
    append_double(buf, v);
  }
  buf += "\nweights\t" + std::to_string(schema_.label_count()) + "\t" +
         std::to_string(spec_.hash_dimension) + "\n";
  out << buf;

  // rows are written label-major, matching the in-memory layout
  const std::size_t d = spec_.hash_dimension;
  for (std::size_t label = 0; label < schema_.label_count(); ++label) {
    buf.clear();
    for (std::size_t slot = 0; slot < d; ++slot) {
      if (slot) buf += ' ';
      append_double(buf, weights_[label * d + slot]);
    }
    buf += '\n';
    out << buf;
  }
  out << "end\n";
}

void TaggerModel::save_file(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write model file '" + path + "'");
  save(out);
  if (!out) throw Error("short write to model file '" + path + "'");
}

TaggerModel TaggerModel::load(std::istream& in) {
  if (expect_line(in, "header") != "plantner-model 1")
    throw Error("model file: bad header");

  auto classes = split_tabs(expect_line(in, "classes"));
  if (classes.empty() || classes[0] != "classes")
    throw Error("model file: expected classes line");
  classes.erase(classes.begin());

  auto field = [&](const char* name) {
    const auto fields = split_tabs(expect_line(in, name));
    if (fields.size() != 2 || fields[0] != name)
      throw Error(std::string("model file: expected ") + name + " line");
    return fields[1];
  };

  FeatureSpec spec;
  spec.hash_dimension = static_cast<std::uint32_t>(std::stoul(field("hash_dimension")));
  TrainConfig config;
  config.hash_dimension = spec.hash_dimension;
  config.seed = std::stoull(field("seed"));
  config.epochs = std::stoi(field("epochs"));
  config.learning_rate = std::stod(field("learning_rate"));
  config.decay = std::stod(field("decay"));
  config.o_factor = std::stod(field("o_factor"));

  TaggerModel model(LabelSchema(std::move(classes)), spec, config);

  const auto bias_fields = split_tabs(expect_line(in, "bias"));
  if (bias_fields.empty() || bias_fields[0] != "bias" ||
      bias_fields.size() != model.schema_.label_count() + 1)
    throw Error("model file: bad bias line");
  for (std::size_t i = 0; i < model.bias_.size(); ++i)
    model.bias_[i] = std::stod(bias_fields[i + 1]);

  const auto dims = split_tabs(expect_line(in, "weights"));
  if (dims.size() != 3 || dims[0] != "weights" ||
      std::stoul(dims[1]) != model.schema_.label_count() ||
      std::stoul(dims[2]) != spec.hash_dimension)
    throw Error("model file: bad weights header");

  const std::size_t d = spec.hash_dimension;
  for (std::size_t label = 0; label < model.schema_.label_count(); ++label) {
    const std::string row = expect_line(in, "weights row");
    const char* p = row.c_str();
    for (std::size_t slot = 0; slot < d; ++slot)
      model.weights_[label * d + slot] = read_double(p, label);
    while (*p == ' ') ++p;
    if (*p != '\0') throw Error("model file: trailing data in row " + std::to_string(label));
  }
  if (expect_line(in, "end marker") != "end") throw Error("model file: missing end marker");
  return model;
}

TaggerModel TaggerModel::load_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open model file '" + path + "'");
  return load(in);
}

bool TaggerModel::operator==(const TaggerModel& other) const {
  return schema_.entity_classes() == other.schema_.entity_classes() &&
         spec_.hash_dimension == other.spec_.hash_dimension &&
         config_.seed == other.config_.seed && config_.epochs == other.config_.epochs &&
         config_.learning_rate == other.config_.learning_rate &&
         config_.decay == other.config_.decay &&
         config_.o_factor == other.config_.o_factor && weights_ == other.weights_ &&
         bias_ == other.bias_;
}

namespace {

struct TrainingSentence {
  std::vector<std::vector<std::uint32_t>> features;  // per word
  std::vector<int> gold;                             // per piece
  std::vector<std::size_t> word_index;               // per piece
  std::vector<bool> supervised;                      // per piece
};

}  // namespace

TrainResult train(std::span<const Document> corpus, const LabelSchema& schema,
                  const SubwordVocab& vocab, const TrainConfig& config) {
  if (config.learning_rate <= 0.0) throw Error("learning rate must be positive");
  if (config.epochs < 0) throw Error("epochs must be non-negative");
  if (config.decay < 0.0) throw Error("decay must be non-negative");

  FeatureSpec spec{config.hash_dimension};
  std::vector<TrainingSentence> sentences;
  for (const auto& doc : corpus) {
    for (const auto& sentence : doc.sentences) {
      if (sentence.tokens.empty()) continue;
      const auto aligned = align_labels(sentence, vocab, schema);
      TrainingSentence ts;
      ts.features.reserve(sentence.size());
      for (std::size_t w = 0; w < sentence.size(); ++w)
        ts.features.push_back(word_features(sentence, w, spec));
      ts.gold.reserve(aligned.size());
      for (const auto& label : aligned.labels)
        ts.gold.push_back(schema.label_index(label));
      ts.word_index = aligned.word_index;
      ts.supervised.assign(aligned.supervision_mask.begin(),
                           aligned.supervision_mask.end());
      sentences.push_back(std::move(ts));
    }
  }
  if (sentences.empty()) throw Error("train: empty corpus");

  const auto class_weights = compute_class_weights(corpus, schema, config.o_factor);

  TrainResult result{TaggerModel(schema, spec, config), {}};
  auto& weights = result.model.weights();
  auto& bias = result.model.bias();
  const std::size_t k = schema.label_count();
  const std::size_t d = spec.hash_dimension;

  SplitMix64 rng(config.seed);
  std::vector<std::size_t> order(sentences.size());
  std::iota(order.begin(), order.end(), 0);
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    const double lr = config.learning_rate / (1.0 + config.decay * epoch);
    fisher_yates_shuffle(order, rng);

    double loss_sum = 0.0;
    std::size_t loss_count = 0;
    for (const std::size_t si : order) {
      const auto& ts = sentences[si];
      for (std::size_t p = 0; p < ts.gold.size(); ++p) {
        if (!ts.supervised[p]) continue;
        const auto& feats = ts.features[ts.word_index[p]];
        const auto logits = result.model.logits(feats);
        const auto gold = static_cast<std::size_t>(ts.gold[p]);
        const auto lg = weighted_ce_loss(logits, gold, class_weights.at(gold));
        loss_sum += lg.loss;
        ++loss_count;
        for (std::size_t label = 0; label < k; ++label) {
          const double step = lr * lg.gradient[label];
          if (step == 0.0) continue;
          bias[label] -= step;
          double* row = weights.data() + label * d;
          for (const auto slot : feats) row[slot] -= step;
        }
      }
    }
    result.epoch_losses.push_back(loss_count ? loss_sum / static_cast<double>(loss_count)
                                             : 0.0);
  }
  return result;
}

namespace {

struct LabelInfo {
  BioKind kind;
  int b_index;  // for I-X, the index of B-X; -1 otherwise
};

std::vector<LabelInfo> label_info(const LabelSchema& schema) {
  std::vector<LabelInfo> info;
  info.reserve(schema.label_count());
  for (const auto& label : schema.bio_labels()) {
    const auto parsed = parse_label(label);
    LabelInfo li{parsed->kind, -1};
    if (parsed->kind == BioKind::I)
      li.b_index = schema.label_index("B-" + parsed->class_name);
    info.push_back(li);
  }
  return info;
}

}  // namespace

std::vector<std::string> viterbi_decode(
    const std::vector<std::vector<double>>& emission_log_probs,
    const LabelSchema& schema) {
  const std::size_t k = schema.label_count();
  const std::size_t t_max = emission_log_probs.size();
  if (t_max == 0) return {};
  for (const auto& row : emission_log_probs) {
    if (row.size() != k)
      throw Error("viterbi_decode: emission width does not match the schema");
  }

  const auto info = label_info(schema);
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();

  std::vector<std::vector<double>> delta(t_max, std::vector<double>(k, kNegInf));
  std::vector<std::vector<int>> backptr(t_max, std::vector<int>(k, -1));

  for (std::size_t label = 0; label < k; ++label) {
    if (info[label].kind != BioKind::I)  // start admits O and B-* only
      delta[0][label] = emission_log_probs[0][label];
  }

  for (std::size_t t = 1; t < t_max; ++t) {
    for (std::size_t label = 0; label < k; ++label) {
      double best = kNegInf;
      int best_prev = -1;
      auto consider = [&](std::size_t prev) {
        const double score = delta[t - 1][prev];
        if (score > best) {  // strict: ties keep the lower prev index
          best = score;
          best_prev = static_cast<int>(prev);
        }
      };
      if (info[label].kind == BioKind::I) {
        // I-X is reachable from B-X and I-X only
        consider(static_cast<std::size_t>(info[label].b_index));
        consider(label);
      } else {
        for (std::size_t prev = 0; prev < k; ++prev) consider(prev);
      }
      if (best_prev >= 0) {
        delta[t][label] = best + emission_log_probs[t][label];
        backptr[t][label] = best_prev;
      }
    }
  }

  std::size_t best_label = 0;
  double best_score = kNegInf;
  for (std::size_t label = 0; label < k; ++label) {
    if (delta[t_max - 1][label] > best_score) {
      best_score = delta[t_max - 1][label];
      best_label = label;
    }
  }

  std::vector<std::string> out(t_max);
  std::size_t label = best_label;
  for (std::size_t t = t_max; t-- > 0;) {
    out[t] = schema.bio_labels()[label];
    if (t > 0) label = static_cast<std::size_t>(backptr[t][label]);
  }
  return out;
}

std::vector<std::string> predict(const TaggerModel& model, const Sentence& sentence,
                                 const SubwordVocab& vocab) {
  const auto& schema = model.schema();
  for (const auto& token : sentence.tokens) {
    if (!token.label.empty() && !schema.has_label(token.label))
      throw Error("predict: sentence label '" + token.label +
                  "' is outside the model schema");
  }
  if (sentence.tokens.empty()) return {};

  // piece-level emissions; every piece of a word shares the word's features
  std::vector<std::size_t> piece_word;
  std::vector<std::size_t> first_piece(sentence.size());
  for (std::size_t w = 0; w < sentence.size(); ++w) {
    const auto pieces = segment(sentence.tokens[w].form, vocab);
    first_piece[w] = piece_word.size();
    for (std::size_t p = 0; p < pieces.size(); ++p) piece_word.push_back(w);
  }

  const std::size_t k = schema.label_count();
  std::vector<std::vector<double>> emissions(piece_word.size());
  std::vector<std::vector<double>> word_logits(sentence.size());
  for (std::size_t w = 0; w < sentence.size(); ++w)
    word_logits[w] = model.logits(word_features(sentence, w, model.feature_spec()));

  for (std::size_t p = 0; p < piece_word.size(); ++p) {
    const auto& logits = word_logits[piece_word[p]];
    const double max_logit = *std::max_element(logits.begin(), logits.end());
    double z = 0.0;
    for (double logit : logits) z += std::exp(logit - max_logit);
    const double log_z = std::log(z);
    auto& row = emissions[p];
    row.resize(k);
    for (std::size_t label = 0; label < k; ++label)
      row[label] = logits[label] - max_logit - log_z;
  }

  const auto decoded = viterbi_decode(emissions, schema);
  std::vector<std::string> word_labels(sentence.size());
  for (std::size_t w = 0; w < sentence.size(); ++w)
    word_labels[w] = decoded[first_piece[w]];
  return repair_bio(word_labels, schema);
}

}  // namespace plantner
