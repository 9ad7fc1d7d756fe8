#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "plantner/corpus.hpp"
#include "plantner/rng.hpp"

using namespace plantner;

TEST_CASE("schema derives the BIO inventory in order") {
  const auto schema = LabelSchema::default_schema();
  CHECK(schema.entity_classes().size() == 7);
  CHECK(schema.bio_labels().size() == 15);
  CHECK(schema.bio_labels()[0] == "O");
  CHECK(schema.bio_labels()[1] == "B-PlantSpecies");
  CHECK(schema.bio_labels()[2] == "I-PlantSpecies");
  CHECK(schema.label_index("O") == 0);
  CHECK(schema.label_index("I-BiochemicalResponse") == 14);
  CHECK(schema.label_index("B-Nope") == -1);
  CHECK(schema.has_label("B-AbioticStress"));
}

TEST_CASE("schema rejects malformed class names") {
  CHECK_THROWS_AS(LabelSchema({"Good", "Good"}), Error);
  CHECK_THROWS_AS(LabelSchema({""}), Error);
  CHECK_THROWS_AS(LabelSchema({"has space"}), Error);
  CHECK_THROWS_AS(LabelSchema({"has-hyphen"}), Error);
}

TEST_CASE("parse_label splits kinds and classes") {
  CHECK(parse_label("O")->kind == BioKind::O);
  CHECK(parse_label("B-X")->class_name == "X");
  CHECK(parse_label("I-PlantSpecies")->kind == BioKind::I);
  CHECK_FALSE(parse_label("Q-X").has_value());
  CHECK_FALSE(parse_label("B-").has_value());
  CHECK_FALSE(parse_label("junk").has_value());
}

TEST_CASE("parse maps columns directly") {
  const auto schema = LabelSchema::default_schema();
  const auto docs = parse_conll(
      "Lens\tPROPN\tB-PlantSpecies\nculinaris\tPROPN\tI-PlantSpecies\n", schema, true);
  REQUIRE(docs.size() == 1);
  CHECK(docs[0].id == "default");
  REQUIRE(docs[0].sentences.size() == 1);
  REQUIRE(docs[0].sentences[0].size() == 2);
  CHECK(docs[0].sentences[0].tokens[0].form == "Lens");
  CHECK(docs[0].sentences[0].tokens[0].pos == "PROPN");
  CHECK(docs[0].sentences[0].tokens[1].label == "I-PlantSpecies");
}

TEST_CASE("column-count errors carry the line number") {
  const auto schema = LabelSchema::default_schema();
  try {
    parse_conll("good\tX\tO\nbad\tX\n", schema, true);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
}

TEST_CASE("doc headers split documents") {
  const auto schema = LabelSchema::default_schema();
  const std::string text =
      "#doc id=a\n"
      "x\tNOUN\tO\n"
      "\n"
      "y\tNOUN\tO\n"
      "\n"
      "#doc id=b\n"
      "z\tNOUN\tO\n";
  const auto docs = parse_conll(text, schema, true);
  REQUIRE(docs.size() == 2);
  CHECK(docs[0].id == "a");
  CHECK(docs[1].id == "b");
  CHECK(docs[0].sentences.size() + docs[1].sentences.size() == 3);
}

TEST_CASE("duplicate document ids are rejected") {
  const auto schema = LabelSchema::default_schema();
  CHECK_THROWS_AS(parse_conll("#doc id=a\nx\tN\tO\n\n#doc id=a\ny\tN\tO\n", schema, true),
                  ParseError);
}

TEST_CASE("empty input gives an empty corpus, not an error") {
  const auto schema = LabelSchema::default_schema();
  CHECK(parse_conll("", schema, true).empty());
  CHECK(serialize_conll({}).empty());
}

TEST_CASE("strict mode aborts on unknown labels, lenient keeps them") {
  const auto schema = LabelSchema::default_schema();
  CHECK_THROWS_AS(parse_conll("x\tNOUN\tB-Wrong\n", schema, true), ParseError);
  const auto docs = parse_conll("x\tNOUN\tB-Wrong\n", schema, false);
  CHECK(docs[0].sentences[0].tokens[0].label == "B-Wrong");
}

TEST_CASE("CRLF input is accepted, comments are skipped") {
  const auto schema = LabelSchema::default_schema();
  const auto docs = parse_conll("# a comment\r\nx\tNOUN\tO\r\ny\tNOUN\tO\r\n", schema, true);
  REQUIRE(docs.size() == 1);
  CHECK(docs[0].sentences[0].size() == 2);
}

TEST_CASE("forms containing # mid-line survive a round trip") {
  const auto schema = LabelSchema::default_schema();
  const std::string text = "count#3\tNOUN\tO\n";
  const auto docs = parse_conll(text, schema, true);
  CHECK(docs[0].sentences[0].tokens[0].form == "count#3");
  CHECK(parse_conll(serialize_conll(docs), schema, true) == docs);
}

TEST_CASE("round trip is the identity on structure") {
  const auto schema = LabelSchema::default_schema();
  const std::string text =
      "#doc id=a\n"
      "Lens\tPROPN\tB-PlantSpecies\n"
      "culinaris\tPROPN\tI-PlantSpecies\n"
      "wilted\tVERB\tO\n"
      "\n"
      "drought\tNOUN\tB-AbioticStress\n"
      "\n"
      "#doc id=b\n"
      "rust\tNOUN\tB-BioticStress\n";
  const auto docs = parse_conll(text, schema, true);
  const auto round = parse_conll(serialize_conll(docs), schema, true);
  CHECK(round == docs);
  // serialization is a fixed point after one pass
  CHECK(serialize_conll(round) == serialize_conll(docs));
}

TEST_CASE("random corpora round trip") {
  const auto schema = LabelSchema::default_schema();
  SplitMix64 rng(7);
  const auto& labels = schema.bio_labels();
  for (int iter = 0; iter < 200; ++iter) {
    std::vector<Document> docs;
    const std::size_t n_docs = 1 + rng.next_below(3);
    for (std::size_t d = 0; d < n_docs; ++d) {
      Document doc;
      doc.id = "doc" + std::to_string(d);
      const std::size_t n_sent = 1 + rng.next_below(4);
      for (std::size_t s = 0; s < n_sent; ++s) {
        Sentence sentence;
        const std::size_t n_tok = 1 + rng.next_below(6);
        for (std::size_t t = 0; t < n_tok; ++t) {
          sentence.tokens.push_back({"w" + std::to_string(rng.next_below(50)),
                                     rng.next_below(2) ? "NOUN" : "VERB",
                                     labels[rng.next_below(labels.size())]});
        }
        doc.sentences.push_back(std::move(sentence));
      }
      docs.push_back(std::move(doc));
    }
    CHECK(parse_conll(serialize_conll(docs), schema, false) == docs);
  }
}

TEST_CASE("token line numbers are tracked for diagnostics") {
  const auto schema = LabelSchema::default_schema();
  const auto parsed = parse_conll_detailed(
      "# header\nx\tN\tO\ny\tN\tO\n\nz\tN\tO\n", schema, true);
  REQUIRE(parsed.documents.size() == 1);
  CHECK(parsed.token_lines[0][0] == std::vector<std::size_t>{2, 3});
  CHECK(parsed.token_lines[0][1] == std::vector<std::size_t>{5});
}
