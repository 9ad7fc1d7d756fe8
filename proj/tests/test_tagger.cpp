#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "oracles.hpp"
#include "plantner/bio_codec.hpp"
#include "plantner/metrics.hpp"
#include "plantner/rng.hpp"
#include "plantner/synthetic.hpp"
#include "plantner/tagger.hpp"

using namespace plantner;

namespace {

const LabelSchema& schema() {
  static const LabelSchema s = LabelSchema::default_schema();
  return s;
}

LabelSchema one_class() { return LabelSchema({"X"}); }

Document doc_with_counts(int o, int b, int i) {
  // one long sentence with the requested label counts (valid BIO)
  Document doc;
  doc.id = "d";
  Sentence s;
  for (int n = 0; n < b; ++n) {
    s.tokens.push_back({"e", "NOUN", "B-X"});
    for (int m = 0; m < (n < 1 ? i : 0); ++m) s.tokens.push_back({"e", "NOUN", "I-X"});
  }
  for (int n = 0; n < o; ++n) s.tokens.push_back({"w", "NOUN", "O"});
  doc.sentences.push_back(std::move(s));
  return doc;
}

}  // namespace

TEST_CASE("class weights follow the inverse-frequency formula") {
  // counts {O:80, B-X:15, I-X:5}, K = 3
  const std::vector<Document> corpus{doc_with_counts(80, 15, 5)};
  const auto cw = compute_class_weights(corpus, one_class(), 1.0);
  CHECK(cw.by_label[0] == doctest::Approx(100.0 / 240.0).epsilon(1e-9));
  CHECK(cw.by_label[1] == doctest::Approx(100.0 / 45.0).epsilon(1e-9));
  CHECK(cw.by_label[2] == doctest::Approx(100.0 / 15.0).epsilon(1e-9));
  // conservation: sum n_c * w_c = N
  const double conserved =
      80 * cw.by_label[0] + 15 * cw.by_label[1] + 5 * cw.by_label[2];
  CHECK(std::abs(conserved - 100.0) < 1e-9);
}

TEST_CASE("the O factor scales only the O weight") {
  const std::vector<Document> corpus{doc_with_counts(80, 15, 5)};
  const auto base = compute_class_weights(corpus, one_class(), 1.0);
  const auto down = compute_class_weights(corpus, one_class(), 0.1);
  CHECK(down.by_label[0] == doctest::Approx(base.by_label[0] * 0.1).epsilon(1e-12));
  CHECK(down.by_label[1] == base.by_label[1]);
  CHECK(down.by_label[2] == base.by_label[2]);
}

TEST_CASE("uniform counts give uniform weights") {
  Document doc;
  doc.id = "d";
  Sentence s;
  s.tokens.push_back({"a", "N", "B-X"});
  s.tokens.push_back({"b", "N", "I-X"});
  s.tokens.push_back({"c", "N", "O"});
  doc.sentences.push_back(s);
  const auto cw = compute_class_weights({&doc, 1}, one_class(), 1.0);
  CHECK(cw.by_label[0] == doctest::Approx(1.0));
  CHECK(cw.by_label[1] == doctest::Approx(1.0));
  CHECK(cw.by_label[2] == doctest::Approx(1.0));
}

TEST_CASE("absent labels are smoothed to count 1") {
  const std::vector<Document> corpus{doc_with_counts(9, 0, 0)};
  const auto cw = compute_class_weights(corpus, one_class(), 1.0);
  // smoothed counts {9, 1, 1}, N = 11
  CHECK(cw.by_label[0] == doctest::Approx(11.0 / 27.0).epsilon(1e-12));
  CHECK(cw.by_label[1] == doctest::Approx(11.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("empty corpus is an error") {
  CHECK_THROWS_AS(compute_class_weights({}, one_class(), 1.0), Error);
}

TEST_CASE("uniform logits give loss ln K") {
  const std::vector<double> logits(15, 0.7);
  const auto lg = weighted_ce_loss(logits, 3, 1.0);
  CHECK(lg.loss == doctest::Approx(std::log(15.0)).epsilon(1e-12));
}

TEST_CASE("loss and gradient are linear in the weight") {
  const std::vector<double> logits{0.4, -1.2, 2.0, 0.0};
  const auto base = weighted_ce_loss(logits, 1, 1.3);
  const auto twice = weighted_ce_loss(logits, 1, 2.6);
  CHECK(twice.loss == doctest::Approx(2.0 * base.loss).epsilon(1e-12));
  for (std::size_t k = 0; k < logits.size(); ++k)
    CHECK(twice.gradient[k] == doctest::Approx(2.0 * base.gradient[k]).epsilon(1e-12));
}

TEST_CASE("extreme logits stay finite") {
  const std::vector<double> logits{1000.0, -1000.0, 999.0};
  const auto lg = weighted_ce_loss(logits, 1, 1.0);
  CHECK(std::isfinite(lg.loss));
  for (const double g : lg.gradient) CHECK(std::isfinite(g));
}

TEST_CASE("analytic gradient matches central finite differences") {
  SplitMix64 rng(41);
  const double h = 1e-5;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t k = 2 + rng.next_below(14);
    std::vector<double> logits(k);
    for (auto& v : logits) v = rng.next_double() * 6.0 - 3.0;
    const std::size_t gold = rng.next_below(k);
    const double w = 0.1 + rng.next_double() * 4.0;

    const auto analytic = weighted_ce_loss(logits, gold, w);
    for (std::size_t j = 0; j < k; ++j) {
      auto plus = logits, minus = logits;
      plus[j] += h;
      minus[j] -= h;
      const double numeric = (weighted_ce_loss(plus, gold, w).loss -
                              weighted_ce_loss(minus, gold, w).loss) /
                             (2.0 * h);
      const double err = std::abs(analytic.gradient[j] - numeric);
      CHECK(err <= 1e-6 * std::max(1.0, std::abs(numeric)));
    }
  }
}

TEST_CASE("viterbi never starts inside an entity") {
  // single position, I-PlantSpecies has the best emission
  std::vector<std::vector<double>> emissions(1, std::vector<double>(15, 0.0));
  emissions[0][schema().label_index("I-PlantSpecies")] = 10.0;
  emissions[0][schema().label_index("B-AbioticStress")] = 5.0;
  const auto decoded = viterbi_decode(emissions, schema());
  REQUIRE(decoded.size() == 1);
  CHECK(decoded[0] == "B-AbioticStress");  // best reachable label
}

TEST_CASE("viterbi recovers a dominant valid sequence") {
  const std::vector<std::string> target{"B-AbioticStress", "I-AbioticStress", "O",
                                        "B-BioticStress"};
  std::vector<std::vector<double>> emissions(4, std::vector<double>(15, -10.0));
  for (std::size_t t = 0; t < target.size(); ++t)
    emissions[t][schema().label_index(target[t])] = 10.0;
  CHECK(viterbi_decode(emissions, schema()) == target);
}

TEST_CASE("viterbi ties break toward the lower label index") {
  // all-zero emissions: every valid sequence scores 0, O wins everywhere
  std::vector<std::vector<double>> emissions(3, std::vector<double>(15, 0.0));
  CHECK(viterbi_decode(emissions, schema()) ==
        std::vector<std::string>{"O", "O", "O"});
}

TEST_CASE("viterbi output always validates") {
  SplitMix64 rng(43);
  for (int iter = 0; iter < 300; ++iter) {
    const std::size_t t = 1 + rng.next_below(8);
    std::vector<std::vector<double>> emissions(t, std::vector<double>(15));
    for (auto& row : emissions)
      for (auto& v : row) v = rng.next_double() * 10.0 - 5.0;
    const auto decoded = viterbi_decode(emissions, schema());
    CHECK(validate_bio(decoded, schema()).empty());
  }
}

TEST_CASE("viterbi equals exhaustive enumeration on small instances") {
  SplitMix64 rng(47);
  const oracles::DecoderOracle oracle(schema().bio_labels());
  for (int iter = 0; iter < 60; ++iter) {
    const std::size_t t = 1 + rng.next_below(6);
    std::vector<std::vector<double>> emissions(t, std::vector<double>(15));
    for (auto& row : emissions)
      for (auto& v : row) v = rng.next_double() * 10.0 - 5.0;
    const auto decoded = viterbi_decode(emissions, schema());
    const auto expected = oracle.best(emissions);
    REQUIRE(decoded.size() == expected.size());
    for (std::size_t i = 0; i < t; ++i)
      CHECK(decoded[i] == schema().bio_labels()[expected[i]]);
  }
}

TEST_CASE("viterbi matches the oracle under heavy score ties") {
  // emissions drawn from {0, 1} make most optima non-unique, so this pins
  // the tie rule itself, not just the scores
  SplitMix64 rng(49);
  const oracles::DecoderOracle oracle(schema().bio_labels());
  for (int iter = 0; iter < 200; ++iter) {
    const std::size_t t = 1 + rng.next_below(5);
    std::vector<std::vector<double>> emissions(t, std::vector<double>(15));
    for (auto& row : emissions)
      for (auto& v : row) v = static_cast<double>(rng.next_below(2));
    const auto decoded = viterbi_decode(emissions, schema());
    const auto expected = oracle.best(emissions);
    REQUIRE(decoded.size() == expected.size());
    for (std::size_t i = 0; i < t; ++i)
      CHECK(decoded[i] == schema().bio_labels()[expected[i]]);
  }
}

TEST_CASE("training is deterministic in the seed") {
  const auto corpus = synthetic_separable_corpus(100, 5);
  const auto vocab = synthetic_vocab(corpus);
  TrainConfig config;
  config.epochs = 3;
  config.hash_dimension = 1u << 12;
  const auto a = train(corpus, schema(), vocab, config);
  const auto b = train(corpus, schema(), vocab, config);
  CHECK(a.model == b.model);
  CHECK(a.epoch_losses == b.epoch_losses);

  std::ostringstream sa, sb;
  a.model.save(sa);
  b.model.save(sb);
  CHECK(sa.str() == sb.str());

  config.seed = 99;
  const auto c = train(corpus, schema(), vocab, config);
  CHECK_FALSE(a.model == c.model);
}

TEST_CASE("training loss decreases on the synthetic corpus") {
  const auto corpus = synthetic_separable_corpus(120, 6);
  const auto vocab = synthetic_vocab(corpus);
  TrainConfig config;
  config.epochs = 5;
  config.hash_dimension = 1u << 12;
  const auto result = train(corpus, schema(), vocab, config);
  REQUIRE(result.epoch_losses.size() == 5);
  CHECK(result.epoch_losses[4] < result.epoch_losses[0]);
}

TEST_CASE("training rejects bad input") {
  const auto corpus = synthetic_separable_corpus(5, 1);
  const auto vocab = synthetic_vocab(corpus);
  TrainConfig config;
  CHECK_THROWS_AS(train({}, schema(), vocab, config), Error);
  config.learning_rate = 0.0;
  CHECK_THROWS_AS(train(corpus, schema(), vocab, config), Error);
  config.learning_rate = 0.1;
  config.hash_dimension = 300;  // not a power of two
  CHECK_THROWS_AS(train(corpus, schema(), vocab, config), Error);
}

TEST_CASE("held-out entity F1 reaches 0.95 on the separable corpus") {
  const auto corpus = synthetic_separable_corpus(500, 20250611);
  const std::size_t split = corpus.size() * 4 / 5;
  const std::vector<Document> train_docs(corpus.begin(), corpus.begin() + split);
  const std::vector<Document> held_out(corpus.begin() + split, corpus.end());

  const auto vocab = synthetic_vocab(corpus);
  TrainConfig config;
  config.hash_dimension = 1u << 14;
  const auto result = train(train_docs, schema(), vocab, config);

  std::vector<std::vector<EntitySpan>> gold, pred;
  for (const auto& doc : held_out) {
    for (const auto& sentence : doc.sentences) {
      gold.push_back(bio_to_spans(sentence.labels()));
      pred.push_back(bio_to_spans(predict(result.model, sentence, vocab)));
    }
  }
  const auto report = entity_metrics(gold, pred);
  CHECK(report.micro_f1 >= 0.95);
}

TEST_CASE("prediction always yields valid BIO of sentence length") {
  const auto corpus = synthetic_separable_corpus(60, 9);
  const auto vocab = synthetic_vocab(corpus);
  TrainConfig config;
  config.epochs = 2;
  config.hash_dimension = 1u << 12;
  const auto result = train(corpus, schema(), vocab, config);

  SplitMix64 rng(53);
  for (const auto& doc : synthetic_separable_corpus(20, 77)) {
    for (const auto& sentence : doc.sentences) {
      const auto labels = predict(result.model, sentence, vocab);
      CHECK(labels.size() == sentence.size());
      CHECK(validate_bio(labels, schema()).empty());
    }
  }

  Sentence single{{{"drought", "NOUN", "O"}}};
  const auto labels = predict(result.model, single, vocab);
  REQUIRE(labels.size() == 1);
  const auto parsed = parse_label(labels[0]);
  REQUIRE(parsed.has_value());
  CHECK(parsed->kind != BioKind::I);
}

TEST_CASE("prediction rejects sentences labeled outside the model schema") {
  const auto corpus = synthetic_separable_corpus(20, 9);
  const auto vocab = synthetic_vocab(corpus);
  TrainConfig config;
  config.epochs = 1;
  config.hash_dimension = 1u << 12;
  const auto result = train(corpus, schema(), vocab, config);
  Sentence sentence{{{"x", "NOUN", "B-SomethingElse"}}};
  CHECK_THROWS_AS(predict(result.model, sentence, vocab), Error);
}

TEST_CASE("model files round trip bit-exactly") {
  const auto corpus = synthetic_separable_corpus(40, 3);
  const auto vocab = synthetic_vocab(corpus);
  TrainConfig config;
  config.epochs = 2;
  config.hash_dimension = 1u << 10;
  config.learning_rate = 0.07;  // not exactly representable, exercises %.17g
  const auto result = train(corpus, schema(), vocab, config);

  std::ostringstream first;
  result.model.save(first);
  std::istringstream in(first.str());
  const auto loaded = TaggerModel::load(in);
  CHECK(loaded == result.model);

  std::ostringstream second;
  loaded.save(second);
  CHECK(second.str() == first.str());
}

TEST_CASE("model loading rejects corrupted input") {
  std::istringstream empty("");
  CHECK_THROWS_AS(TaggerModel::load(empty), Error);
  std::istringstream junk("not-a-model 9\n");
  CHECK_THROWS_AS(TaggerModel::load(junk), Error);
}

TEST_CASE("word features are stable and within the hash range") {
  Sentence sentence{{{"Drought", "NOUN", "O"}, {"hit", "VERB", "O"}}};
  const FeatureSpec spec{1u << 10};
  const auto a = word_features(sentence, 0, spec);
  const auto b = word_features(sentence, 0, spec);
  CHECK(a == b);
  for (const auto slot : a) CHECK(slot < spec.hash_dimension);
  // boundary flags differ between the two words
  CHECK(a != word_features(sentence, 1, spec));
}
