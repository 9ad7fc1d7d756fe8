#include "plantner/synthetic.hpp"

#include <array>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "plantner/rng.hpp"

namespace plantner {

namespace {

struct Phrase {
  std::vector<std::pair<const char*, const char*>> tokens;  // form, POS
};

struct EntityPool {
  const char* class_name;
  std::vector<Phrase> phrases;
};

const std::vector<std::pair<const char*, const char*>>& filler_words() {
  static const std::vector<std::pair<const char*, const char*>> fillers = {
      {"the", "DET"},        {"a", "DET"},          {"under", "ADP"},
      {"during", "ADP"},     {"in", "ADP"},         {"of", "ADP"},
      {"was", "AUX"},        {"were", "AUX"},       {"we", "PRON"},
      {"observed", "VERB"},  {"measured", "VERB"},  {"showed", "VERB"},
      {"exhibited", "VERB"}, {"compared", "VERB"},  {"grown", "VERB"},
      {"and", "CCONJ"},      {"plants", "NOUN"},    {"seedlings", "NOUN"},
      {"plots", "NOUN"},     {"treatment", "NOUN"}, {"trial", "NOUN"},
      {"conditions", "NOUN"},{"strongly", "ADV"},   {"significantly", "ADV"},
      {"after", "ADP"},      {"days", "NOUN"},      {"greenhouse", "NOUN"},
  };
  return fillers;
}

// entity vocabularies are token-disjoint from the fillers and from each
// other, which is what makes the corpus separable
const std::vector<EntityPool>& separable_pools() {
  static const std::vector<EntityPool> pools = {
      {"PlantSpecies",
       {{{{"Lens", "PROPN"}, {"culinaris", "PROPN"}}},
        {{{"Cicer", "PROPN"}, {"arietinum", "PROPN"}}},
        {{{"lentil", "NOUN"}}},
        {{{"chickpea", "NOUN"}}},
        {{{"Medicago", "PROPN"}, {"truncatula", "PROPN"}}},
        {{{"barley", "NOUN"}}}}},
      {"AbioticStress",
       {{{{"drought", "NOUN"}}},
        {{{"salinity", "NOUN"}}},
        {{{"waterlogging", "NOUN"}}},
        {{{"frost", "NOUN"}}},
        {{{"alkalinity", "NOUN"}}},
        {{{"chilling", "NOUN"}}}}},
      {"BioticStress",
       {{{{"fusarium", "NOUN"}, {"wilt", "NOUN"}}},
        {{{"ascochyta", "NOUN"}, {"blight", "NOUN"}}},
        {{{"rust", "NOUN"}}},
        {{{"aphid", "NOUN"}, {"infestation", "NOUN"}}},
        {{{"nematode", "NOUN"}}}}},
      {"MolecularResponse",
       {{{{"dreb2a", "NOUN"}, {"upregulation", "NOUN"}}},
        {{{"lea", "NOUN"}, {"induction", "NOUN"}}},
        {{{"abscisic", "ADJ"}, {"signaling", "NOUN"}}},
        {{{"transcript", "NOUN"}, {"abundance", "NOUN"}}}}},
      {"PhysiologicalResponse",
       {{{{"stomatal", "ADJ"}, {"closure", "NOUN"}}},
        {{{"osmotic", "ADJ"}, {"adjustment", "NOUN"}}},
        {{{"transpiration", "NOUN"}}},
        {{{"wilting", "NOUN"}}}}},
      {"AgronomicResponse",
       {{{{"yield", "NOUN"}, {"penalty", "NOUN"}}},
        {{{"biomass", "NOUN"}, {"decline", "NOUN"}}},
        {{{"early", "ADJ"}, {"maturity", "NOUN"}}},
        {{{"harvest", "NOUN"}, {"shortfall", "NOUN"}}}}},
      {"BiochemicalResponse",
       {{{{"proline", "NOUN"}, {"accumulation", "NOUN"}}},
        {{{"antioxidant", "ADJ"}, {"activity", "NOUN"}}},
        {{{"peroxidase", "NOUN"}, {"burst", "NOUN"}}},
        {{{"sugar", "NOUN"}, {"buildup", "NOUN"}}}}},
  };
  return pools;
}

Token make_token(const char* form, const char* pos, std::string label) {
  return Token{form, pos, std::move(label)};
}

void append_fillers(Sentence& sentence, std::size_t count, SplitMix64& rng) {
  const auto& fillers = filler_words();
  for (std::size_t i = 0; i < count; ++i) {
    const auto& [form, pos] = fillers[rng.next_below(fillers.size())];
    sentence.tokens.push_back(make_token(form, pos, "O"));
  }
}

void append_entity(Sentence& sentence, const EntityPool& pool, const Phrase& phrase) {
  for (std::size_t i = 0; i < phrase.tokens.size(); ++i) {
    const auto& [form, pos] = phrase.tokens[i];
    sentence.tokens.push_back(
        make_token(form, pos,
                   (i == 0 ? "B-" : "I-") + std::string(pool.class_name)));
  }
}

std::vector<Document> group_into_documents(std::vector<Sentence> sentences,
                                           std::size_t per_doc) {
  std::vector<Document> docs;
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    if (i % per_doc == 0) {
      Document doc;
      doc.id = "doc-" + std::to_string(docs.size() + 1);
      docs.push_back(std::move(doc));
    }
    docs.back().sentences.push_back(std::move(sentences[i]));
  }
  return docs;
}

}  // namespace

std::vector<Document> synthetic_separable_corpus(std::size_t n_sentences,
                                                 std::uint64_t seed) {
  SplitMix64 rng(seed);
  const auto& pools = separable_pools();

  std::vector<Sentence> sentences;
  sentences.reserve(n_sentences);
  for (std::size_t s = 0; s < n_sentences; ++s) {
    Sentence sentence;
    const std::size_t n_entities = 1 + rng.next_below(2);
    append_fillers(sentence, 1 + rng.next_below(4), rng);
    for (std::size_t e = 0; e < n_entities; ++e) {
      const auto& pool = pools[rng.next_below(pools.size())];
      append_entity(sentence, pool, pool.phrases[rng.next_below(pool.phrases.size())]);
      append_fillers(sentence, 1 + rng.next_below(3), rng);
    }
    sentence.tokens.push_back(make_token(".", "PUNCT", "O"));
    sentences.push_back(std::move(sentence));
  }
  return group_into_documents(std::move(sentences), 50);
}

std::vector<Document> synthetic_imbalanced_corpus(std::size_t n_sentences,
                                                  std::uint64_t seed) {
  SplitMix64 rng(seed);

  // "stress" occurs between the same two anchor tokens whether it is a true
  // AbioticStress mention or plain filler, so both readings share one feature
  // vector.  The O reading dominates locally (~50x) while B-AbioticStress is
  // common elsewhere via "salt toxicity"; with plain inverse-frequency
  // weights the O mass still wins this context, and the extra O down-weight
  // is what tips the argmax to the entity reading.
  static const std::vector<std::pair<Phrase, const char*>> anchored = {
      {{{{"salt", "NOUN"}, {"toxicity", "NOUN"}}}, "AbioticStress"},
      {{{{"mildew", "NOUN"}}}, "BioticStress"},
      {{{{"osmolyte", "NOUN"}, {"pool", "NOUN"}}}, "BiochemicalResponse"},
      {{{{"lentil", "NOUN"}}}, "PlantSpecies"},
  };

  std::vector<Sentence> sentences;
  sentences.reserve(n_sentences);
  for (std::size_t s = 0; s < n_sentences; ++s) {
    Sentence sentence;
    append_fillers(sentence, 5 + rng.next_below(4), rng);

    // a fixed handful of sentences carry the entity reading of the sandwich,
    // keeping the local O:entity mass ratio pinned
    const bool forced_entity = s % 175 == 100;
    const std::uint64_t role = forced_entity ? 0 : rng.next_below(1000);
    if (role < 600) {
      sentence.tokens.push_back(make_token("under", "ADP", "O"));
      sentence.tokens.push_back(
          make_token("stress", "NOUN", forced_entity ? "B-AbioticStress" : "O"));
      sentence.tokens.push_back(make_token("conditions", "NOUN", "O"));
    } else if (role < 940) {
      const auto& [phrase, cls] = anchored[0];
      for (std::size_t i = 0; i < phrase.tokens.size(); ++i) {
        const auto& [form, pos] = phrase.tokens[i];
        sentence.tokens.push_back(
            make_token(form, pos, (i == 0 ? "B-" : "I-") + std::string(cls)));
      }
    } else {
      const auto& [phrase, cls] = anchored[1 + rng.next_below(anchored.size() - 1)];
      for (std::size_t i = 0; i < phrase.tokens.size(); ++i) {
        const auto& [form, pos] = phrase.tokens[i];
        sentence.tokens.push_back(
            make_token(form, pos, (i == 0 ? "B-" : "I-") + std::string(cls)));
      }
    }
    append_fillers(sentence, 5 + rng.next_below(4), rng);
    sentence.tokens.push_back(make_token(".", "PUNCT", "O"));
    sentences.push_back(std::move(sentence));
  }
  return group_into_documents(std::move(sentences), 50);
}

SubwordVocab synthetic_vocab(std::span<const Document> corpus) {
  std::set<std::string> words;
  std::set<std::string> pieces;
  for (const auto& doc : corpus) {
    for (const auto& sentence : doc.sentences) {
      for (const auto& token : sentence.tokens) words.insert(token.form);
    }
  }
  for (const auto& word : words) {
    for (char c : word) {
      pieces.insert(std::string(1, c));
      pieces.insert("##" + std::string(1, c));
    }
    if (word.size() <= 8) pieces.insert(word);
    else pieces.insert(word.substr(0, 4));  // long words split after a prefix
  }
  return SubwordVocab(std::vector<std::string>(pieces.begin(), pieces.end()));
}

}  // namespace plantner
