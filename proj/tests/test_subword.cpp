#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "plantner/rng.hpp"
#include "plantner/subword.hpp"

using namespace plantner;

namespace {

const LabelSchema& schema() {
  static const LabelSchema s = LabelSchema::default_schema();
  return s;
}

SubwordVocab chars_and(std::vector<std::string> extra) {
  std::vector<std::string> pieces;
  for (char c = 'a'; c <= 'z'; ++c) {
    pieces.push_back(std::string(1, c));
    pieces.push_back("##" + std::string(1, c));
  }
  for (auto& p : extra) pieces.push_back(std::move(p));
  return SubwordVocab(std::move(pieces));
}

std::string reconstruct(const std::vector<std::string>& pieces, const SubwordVocab& v) {
  std::string out;
  for (const auto& piece : pieces) {
    if (piece.rfind(v.continuation_marker(), 0) == 0)
      out += piece.substr(v.continuation_marker().size());
    else
      out += piece;
  }
  return out;
}

}  // namespace

TEST_CASE("a word that is itself a piece stays whole") {
  const auto vocab = chars_and({"drought"});
  CHECK(segment("drought", vocab) == std::vector<std::string>{"drought"});
}

TEST_CASE("greedy longest match from the left") {
  const auto vocab = chars_and({"dro", "##ught"});
  CHECK(segment("drought", vocab) == std::vector<std::string>{"dro", "##ught"});
}

TEST_CASE("characters missing from the vocab become the unknown piece") {
  const auto vocab = chars_and({});
  const auto pieces = segment("ab9cd", vocab);
  REQUIRE(pieces.size() == 5);
  CHECK(pieces[2] == vocab.unknown_piece());
  CHECK(pieces[0] == "a");
  CHECK(pieces[4] == "##d");
}

TEST_CASE("multi-byte characters fall back as one unknown piece") {
  const auto vocab = chars_and({});
  const auto pieces = segment("a\xC3\xA9t", vocab);  // 'é' is absent
  REQUIRE(pieces.size() == 3);
  CHECK(pieces[1] == vocab.unknown_piece());
}

TEST_CASE("segmentation reconstructs random words") {
  SplitMix64 rng(3);
  auto vocab = chars_and({"dro", "##ught", "stress", "##ing", "sal", "##inity"});
  for (int iter = 0; iter < 10000; ++iter) {
    std::string word;
    const std::size_t len = 1 + rng.next_below(12);
    for (std::size_t i = 0; i < len; ++i)
      word.push_back(static_cast<char>('a' + rng.next_below(26)));
    CHECK(reconstruct(segment(word, vocab), vocab) == word);
  }
}

TEST_CASE("alignment carries first-piece labels and masks continuations") {
  const SubwordVocab vocab({"Le", "##ns"});
  Sentence sentence{{{"Lens", "PROPN", "B-PlantSpecies"}}};
  const auto aligned = align_labels(sentence, vocab, schema());
  REQUIRE(aligned.size() == 2);
  CHECK(aligned.pieces == std::vector<std::string>{"Le", "##ns"});
  CHECK(aligned.labels ==
        std::vector<std::string>{"B-PlantSpecies", "I-PlantSpecies"});
  CHECK(aligned.supervision_mask == std::vector<bool>{true, false});
  CHECK(aligned.word_index == std::vector<std::size_t>{0, 0});
}

TEST_CASE("single-piece words keep their labels with full supervision") {
  const auto vocab = chars_and({"drought", "hit"});
  Sentence sentence{{{"drought", "NOUN", "B-AbioticStress"}, {"hit", "VERB", "O"}}};
  const auto aligned = align_labels(sentence, vocab, schema());
  CHECK(aligned.labels == sentence.labels());
  CHECK(aligned.supervision_mask == std::vector<bool>{true, true});
}

TEST_CASE("O words stay O on every piece") {
  const auto vocab = chars_and({});
  Sentence sentence{{{"abc", "NOUN", "O"}}};
  const auto aligned = align_labels(sentence, vocab, schema());
  REQUIRE(aligned.size() == 3);
  CHECK(aligned.labels == std::vector<std::string>{"O", "O", "O"});
  CHECK(aligned.supervision_mask == std::vector<bool>{true, false, false});
}

TEST_CASE("alignment refuses invalid BIO") {
  const auto vocab = chars_and({});
  Sentence sentence{{{"abc", "NOUN", "I-AbioticStress"}}};
  CHECK_THROWS_AS(align_labels(sentence, vocab, schema()), Error);
}

TEST_CASE("supervised positions equal the word count") {
  const auto vocab = chars_and({"dro", "##ught"});
  Sentence sentence{{{"drought", "NOUN", "B-AbioticStress"},
                     {"hurt", "VERB", "O"},
                     {"crops", "NOUN", "O"}}};
  const auto aligned = align_labels(sentence, vocab, schema());
  const auto supervised =
      std::count(aligned.supervision_mask.begin(), aligned.supervision_mask.end(), true);
  CHECK(static_cast<std::size_t>(supervised) == sentence.size());
}

TEST_CASE("projecting aligned gold labels reproduces the word labels") {
  const auto vocab = chars_and({"dro", "##ught"});
  Sentence sentence{{{"drought", "NOUN", "B-AbioticStress"},
                     {"stress", "NOUN", "I-AbioticStress"},
                     {"hurt", "VERB", "O"}}};
  const auto aligned = align_labels(sentence, vocab, schema());
  CHECK(project_to_words(aligned, aligned.labels, schema()) == sentence.labels());
}

TEST_CASE("projection repairs first-piece predictions") {
  const auto vocab = chars_and({});
  Sentence sentence{{{"ab", "NOUN", "O"}}};
  const auto aligned = align_labels(sentence, vocab, schema());
  const std::vector<std::string> predicted{"I-AbioticStress", "I-AbioticStress"};
  CHECK(project_to_words(aligned, predicted, schema()) ==
        std::vector<std::string>{"B-AbioticStress"});
}

TEST_CASE("projection checks the length") {
  const auto vocab = chars_and({});
  Sentence sentence{{{"ab", "NOUN", "O"}}};
  const auto aligned = align_labels(sentence, vocab, schema());
  const std::vector<std::string> wrong{"O"};
  CHECK_THROWS_AS(project_to_words(aligned, wrong, schema()), Error);
}

TEST_CASE("align/project round trip over random sentences and vocabs") {
  SplitMix64 rng(17);
  const auto& classes = schema().entity_classes();
  for (int iter = 0; iter < 2000; ++iter) {
    // random vocab: all chars plus a few random multi-char pieces
    std::vector<std::string> pieces;
    for (char c = 'a'; c <= 'z'; ++c) {
      pieces.push_back(std::string(1, c));
      pieces.push_back("##" + std::string(1, c));
    }
    for (int p = 0; p < 6; ++p) {
      std::string piece;
      const std::size_t len = 2 + rng.next_below(3);
      for (std::size_t i = 0; i < len; ++i)
        piece.push_back(static_cast<char>('a' + rng.next_below(26)));
      pieces.push_back(rng.next_below(2) ? piece : "##" + piece);
    }
    const SubwordVocab vocab(std::move(pieces));

    Sentence sentence;
    const std::size_t n = 1 + rng.next_below(8);
    for (std::size_t w = 0; w < n; ++w) {
      std::string form;
      const std::size_t len = 1 + rng.next_below(8);
      for (std::size_t i = 0; i < len; ++i)
        form.push_back(static_cast<char>('a' + rng.next_below(26)));
      sentence.tokens.push_back({form, "NOUN", "O"});
    }
    // valid random labels
    std::size_t w = 0;
    while (w < n) {
      if (rng.next_below(3) == 0) {
        const auto& cls = classes[rng.next_below(classes.size())];
        sentence.tokens[w].label = "B-" + cls;
        std::size_t len = 1 + rng.next_below(3);
        for (std::size_t i = 1; i < len && w + i < n; ++i)
          sentence.tokens[w + i].label = "I-" + cls;
        w += len;
      } else {
        ++w;
      }
    }

    const auto aligned = align_labels(sentence, vocab, schema());
    CHECK(project_to_words(aligned, aligned.labels, schema()) == sentence.labels());
  }
}

TEST_CASE("vocab files round trip") {
  const auto vocab = chars_and({"dro", "##ught"});
  const std::string path = "vocab_roundtrip.txt";
  vocab.save(path);
  const auto loaded = SubwordVocab::from_file(path);
  CHECK(loaded.size() == vocab.size());
  CHECK(loaded.has_piece("##ught"));
  CHECK(segment("drought", loaded) == segment("drought", vocab));
  std::remove(path.c_str());
}
