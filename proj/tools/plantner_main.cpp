// plantner: corpus validation, repair, agreement, training, prediction and
// evaluation for BIO-labeled plant stress corpora.
//
// Exit codes: 0 success, 1 validation failures found, 2 usage error,
// 3 runtime error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "plantner/agreement.hpp"
#include "plantner/bio_codec.hpp"
#include "plantner/corpus.hpp"
#include "plantner/metrics.hpp"
#include "plantner/ontology.hpp"
#include "plantner/postprocess.hpp"
#include "plantner/subword.hpp"
#include "plantner/tagger.hpp"

using json = nlohmann::ordered_json;

namespace {

using namespace plantner;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// no partial output on error: write a sibling temp file, rename on success
void write_file_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write '" + tmp + "'");
    out << content;
    if (!out) {
      std::remove(tmp.c_str());
      throw Error("short write to '" + tmp + "'");
    }
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    throw Error("cannot rename '" + tmp + "' to '" + path + "'");
  }
}

LabelSchema schema_from_flag(const std::string& classes_flag) {
  if (classes_flag.empty()) return LabelSchema::default_schema();
  std::vector<std::string> classes;
  std::stringstream ss(classes_flag);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) classes.push_back(item);
  }
  return LabelSchema(std::move(classes));
}

std::string fmt4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

std::string fmt17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// ---------------------------------------------------------------- validate

int cmd_validate(const std::string& corpus_path, const std::string& classes_flag) {
  const auto schema = schema_from_flag(classes_flag);
  const auto parsed = parse_conll_detailed(read_file(corpus_path), schema, false);

  bool any = false;
  for (std::size_t d = 0; d < parsed.documents.size(); ++d) {
    const auto& doc = parsed.documents[d];
    for (std::size_t s = 0; s < doc.sentences.size(); ++s) {
      const auto labels = doc.sentences[s].labels();
      for (const auto& violation : validate_bio(labels, schema)) {
        any = true;
        const auto line = parsed.token_lines[d][s][violation.position];
        std::cout << corpus_path << ':' << line << ": "
                  << to_string(violation.kind) << ' ' << violation.detail << '\n';
      }
    }
  }
  return any ? 1 : 0;
}

// ------------------------------------------------------------------ repair

int cmd_repair(const std::string& in_path, const std::string& out_path,
               const std::string& classes_flag) {
  const auto schema = schema_from_flag(classes_flag);
  auto docs = parse_conll(read_file(in_path), schema, false);
  for (auto& doc : docs) {
    for (auto& sentence : doc.sentences) {
      const auto repaired = repair_bio(sentence.labels(), schema);
      for (std::size_t i = 0; i < repaired.size(); ++i)
        sentence.tokens[i].label = repaired[i];
    }
  }
  write_file_atomic(out_path, serialize_conll(docs));
  return 0;
}

// --------------------------------------------------------------------- iaa

json iaa_to_json(const PairwiseIaa& result, const std::string& unit) {
  auto report_json = [](const IaaReport& r) {
    return json{{"p0", r.p0}, {"pe", r.pe}, {"kappa", r.kappa},
                {"g_index", r.g_index}, {"k", r.k}};
  };
  json pairs = json::array();
  for (const auto& pair : result.pairs) {
    json entry = report_json(pair.report);
    entry["annotator_a"] = pair.annotator_a;
    entry["annotator_b"] = pair.annotator_b;
    pairs.push_back(std::move(entry));
  }
  return json{{"unit", unit}, {"pairs", std::move(pairs)},
              {"mean", report_json(result.mean)}};
}

int cmd_iaa(const std::vector<std::string>& files, const std::string& unit,
            const std::string& classes_flag, const std::string& json_path) {
  const auto schema = schema_from_flag(classes_flag);

  std::vector<std::vector<std::string>> annotations;
  std::vector<std::string> reference_forms;
  for (std::size_t f = 0; f < files.size(); ++f) {
    const auto docs = parse_conll(read_file(files[f]), schema, false);
    std::vector<std::string> labels, forms;
    for (const auto& doc : docs) {
      for (const auto& sentence : doc.sentences) {
        for (const auto& token : sentence.tokens) {
          forms.push_back(token.form);
          labels.push_back(token.label);
        }
      }
    }
    if (f == 0) {
      reference_forms = std::move(forms);
    } else {
      if (forms.size() != reference_forms.size())
        throw Error("'" + files[f] + "' has " + std::to_string(forms.size()) +
                    " tokens, expected " + std::to_string(reference_forms.size()));
      for (std::size_t i = 0; i < forms.size(); ++i) {
        if (forms[i] != reference_forms[i])
          throw Error("token streams diverge at position " + std::to_string(i) +
                      ": '" + reference_forms[i] + "' vs '" + forms[i] + "' in '" +
                      files[f] + "'");
      }
    }
    annotations.push_back(std::move(labels));
  }

  std::vector<std::string> categories;
  if (unit == "token") {
    categories = schema.bio_labels();
  } else {  // class: collapse B-X/I-X to X, keep O
    categories.push_back("O");
    for (const auto& c : schema.entity_classes()) categories.push_back(c);
    for (auto& labels : annotations) {
      for (auto& label : labels) {
        if (const auto parsed = parse_label(label); parsed && parsed->kind != BioKind::O)
          label = parsed->class_name;
      }
    }
  }

  const auto result = pairwise_iaa(annotations, categories);
  for (const auto& pair : result.pairs) {
    std::cout << "pair (" << pair.annotator_a << ',' << pair.annotator_b
              << "): P0=" << fmt4(pair.report.p0) << " Pe=" << fmt4(pair.report.pe)
              << " kappa=" << fmt4(pair.report.kappa)
              << " G=" << fmt4(pair.report.g_index) << " k=" << pair.report.k << '\n';
  }
  std::cout << "average: P0=" << fmt4(result.mean.p0) << " Pe=" << fmt4(result.mean.pe)
            << " kappa=" << fmt4(result.mean.kappa)
            << " G=" << fmt4(result.mean.g_index) << " k=" << result.mean.k << " ("
            << result.pairs.size() << " pair" << (result.pairs.size() == 1 ? "" : "s")
            << ")\n";

  if (!json_path.empty())
    write_file_atomic(json_path, iaa_to_json(result, unit).dump(2) + "\n");
  return 0;
}

// ------------------------------------------------------------------- train

int cmd_train(const std::string& corpus_path, const std::string& vocab_path,
              const std::string& model_out, const std::string& loss_log,
              const TrainConfig& config, const std::string& classes_flag) {
  const auto schema = schema_from_flag(classes_flag);
  const auto docs = parse_conll(read_file(corpus_path), schema, true);
  const auto vocab = SubwordVocab::from_file(vocab_path);

  const auto result = train(docs, schema, vocab, config);

  std::ostringstream model_text;
  result.model.save(model_text);
  write_file_atomic(model_out, model_text.str());

  std::string log_text;
  for (std::size_t e = 0; e < result.epoch_losses.size(); ++e)
    log_text += std::to_string(e + 1) + "\t" + fmt17(result.epoch_losses[e]) + "\n";
  const std::string log_path = loss_log.empty() ? model_out + ".loss" : loss_log;
  write_file_atomic(log_path, log_text);

  std::cout << "trained " << config.epochs << " epochs on " << corpus_path;
  if (!result.epoch_losses.empty())
    std::cout << ", final loss " << fmt4(result.epoch_losses.back());
  std::cout << "\nmodel: " << model_out << "\nloss log: " << log_path << '\n';
  return 0;
}

// ----------------------------------------------------------------- predict

json entities_to_json(const std::vector<NormalizedEntity>& entities) {
  json out = json::array();
  for (const auto& e : entities) {
    json entry{{"doc_id", e.doc_id},
               {"sentence_index", e.sentence_index},
               {"start", e.span.start},
               {"end", e.span.end},
               {"class", e.span.class_name},
               {"surface", e.surface},
               {"canonical_id", nullptr},
               {"match_tier", to_string(e.tier)}};
    if (e.canonical_id) entry["canonical_id"] = *e.canonical_id;
    out.push_back(std::move(entry));
  }
  return out;
}

int cmd_predict(const std::string& model_path, const std::string& vocab_path,
                const std::string& input_path, const std::string& output_path,
                bool postprocess, const std::string& rules_path,
                const std::string& ontology_path, const std::string& entities_out,
                const std::string& classes_flag) {
  const auto model = TaggerModel::load_file(model_path);
  const auto& schema = model.schema();
  if (!classes_flag.empty() &&
      schema_from_flag(classes_flag).entity_classes() != schema.entity_classes())
    throw Error("schema mismatch: --classes disagrees with the model's classes");
  const auto vocab = SubwordVocab::from_file(vocab_path);
  auto docs = parse_conll(read_file(input_path), schema, false);

  ChunkRuleConfig rules;
  if (!rules_path.empty()) rules = ChunkRuleConfig::from_file(rules_path);
  const bool run_postprocess = postprocess || !rules_path.empty();

  for (auto& doc : docs) {
    for (auto& sentence : doc.sentences) {
      auto labels = predict(model, sentence, vocab);
      if (run_postprocess) labels = run_pipeline(sentence, labels, schema, rules);
      for (std::size_t i = 0; i < labels.size(); ++i)
        sentence.tokens[i].label = labels[i];
    }
  }
  write_file_atomic(output_path, serialize_conll(docs));

  if (!ontology_path.empty()) {
    const auto dict = OntologyDictionary::load(ontology_path);
    std::cout << "dictionary: " << dict.size() << " entries\n";
    std::vector<NormalizedEntity> entities;
    for (const auto& doc : docs) {
      std::vector<std::vector<EntitySpan>> spans;
      spans.reserve(doc.sentences.size());
      for (const auto& sentence : doc.sentences)
        spans.push_back(bio_to_spans(sentence.labels()));
      auto annotated = annotate_document(doc, spans, dict);
      entities.insert(entities.end(), annotated.begin(), annotated.end());
    }
    const std::string path =
        entities_out.empty() ? output_path + ".entities.json" : entities_out;
    write_file_atomic(path, entities_to_json(entities).dump(2) + "\n");
    std::cout << "entities: " << path << '\n';
  }
  std::cout << "predictions: " << output_path << '\n';
  return 0;
}

// ---------------------------------------------------------------- evaluate

json report_to_json(const EvalReport& report) {
  json per_class = json::object();
  for (const auto& [name, m] : report.per_class) {
    per_class[name] = {{"precision", m.precision},
                       {"recall", m.recall},
                       {"f1", m.f1},
                       {"support", m.support}};
  }
  json out{{"mode", report.mode == EvalMode::Token ? "token" : "entity"},
           {"include_o", report.include_o},
           {"accuracy", nullptr},
           {"per_class", std::move(per_class)},
           {"macro",
            {{"precision", report.macro_precision},
             {"recall", report.macro_recall},
             {"f1", report.macro_f1}}},
           {"weighted",
            {{"precision", report.weighted_precision},
             {"recall", report.weighted_recall},
             {"f1", report.weighted_f1}}},
           {"micro",
            {{"precision", report.micro_precision},
             {"recall", report.micro_recall},
             {"f1", report.micro_f1}}}};
  if (report.accuracy) out["accuracy"] = *report.accuracy;
  return out;
}

int cmd_evaluate(const std::string& gold_path, const std::string& pred_path,
                 const std::string& mode, bool include_o,
                 const std::string& classes_flag, const std::string& json_path) {
  const auto schema = schema_from_flag(classes_flag);
  const auto gold = parse_conll(read_file(gold_path), schema, false);
  const auto pred = parse_conll(read_file(pred_path), schema, false);

  EvalReport report;
  if (mode == "token") {
    report = token_metrics(gold, pred, include_o);
  } else {
    auto decode = [](std::span<const Document> docs) {
      std::vector<std::vector<EntitySpan>> spans;
      for (const auto& doc : docs)
        for (const auto& sentence : doc.sentences)
          spans.push_back(bio_to_spans(sentence.labels()));
      return spans;
    };
    report = entity_metrics(decode(gold), decode(pred));
  }

  std::cout << render_report_table(report);
  if (!json_path.empty())
    write_file_atomic(json_path, report_to_json(report).dump(2) + "\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sequence-labeling pipeline for plant stress-response NER"};
  app.require_subcommand(1);

  std::string classes_flag;
  auto add_classes_flag = [&classes_flag](CLI::App* sub) {
    sub->add_option("--classes", classes_flag,
                    "comma-separated entity classes (default: the built-in 7)");
  };

  // validate
  auto* validate = app.add_subcommand("validate", "report BIO violations in a corpus");
  std::string validate_corpus;
  validate->add_option("--corpus", validate_corpus, "CoNLL corpus file")->required();
  add_classes_flag(validate);

  // repair
  auto* repair = app.add_subcommand("repair", "rewrite a corpus with repaired labels");
  std::string repair_in, repair_out;
  repair->add_option("--in", repair_in, "input corpus")->required();
  repair->add_option("--out", repair_out, "output corpus")->required();
  add_classes_flag(repair);

  // iaa
  auto* iaa = app.add_subcommand("iaa", "inter-annotator agreement over parallel corpora");
  std::vector<std::string> iaa_files;
  std::string iaa_unit = "token", iaa_json;
  iaa->add_option("files", iaa_files, "two or more parallel CoNLL files")
      ->required()
      ->expected(2, -1);
  iaa->add_option("--unit", iaa_unit, "token | class")
      ->check(CLI::IsMember({"token", "class"}));
  iaa->add_option("--json", iaa_json, "write the JSON report here");
  add_classes_flag(iaa);

  // train
  auto* train_cmd = app.add_subcommand("train", "train a tagger model");
  std::string train_corpus, train_vocab, train_model_out, train_loss_log;
  TrainConfig config;
  train_cmd->add_option("--corpus", train_corpus, "training corpus")->required();
  train_cmd->add_option("--vocab", train_vocab, "subword vocab file")->required();
  train_cmd->add_option("--model-out", train_model_out, "model output path")->required();
  train_cmd->add_option("--epochs", config.epochs, "training epochs")
      ->check(CLI::NonNegativeNumber);
  train_cmd->add_option("--lr", config.learning_rate, "initial learning rate")
      ->check(CLI::PositiveNumber);
  train_cmd->add_option("--decay", config.decay, "learning-rate decay")
      ->check(CLI::NonNegativeNumber);
  train_cmd->add_option("--seed", config.seed, "shuffle seed");
  train_cmd->add_option("--o-weight", config.o_factor, "O down-weighting factor")
      ->check(CLI::PositiveNumber);
  train_cmd->add_option("--hash-dim", config.hash_dimension,
                        "feature hash dimension (power of two)")
      ->check([](const std::string& value) -> std::string {
        const unsigned long v = std::strtoul(value.c_str(), nullptr, 10);
        if (v == 0 || (v & (v - 1)) != 0) return "must be a power of two";
        return {};
      });
  train_cmd->add_option("--loss-log", train_loss_log,
                        "loss log path (default: <model>.loss)");
  add_classes_flag(train_cmd);

  // predict
  auto* predict_cmd = app.add_subcommand("predict", "label a corpus with a model");
  std::string predict_model, predict_vocab, predict_in, predict_out;
  std::string predict_rules, predict_ontology, predict_entities;
  bool predict_postprocess = false;
  predict_cmd->add_option("--model", predict_model, "model file")->required();
  predict_cmd->add_option("--vocab", predict_vocab, "subword vocab file")->required();
  predict_cmd->add_option("--input", predict_in, "input corpus")->required();
  predict_cmd->add_option("--output", predict_out, "output corpus")->required();
  predict_cmd->add_flag("--postprocess", predict_postprocess,
                        "apply POS-aware realignment and heuristics");
  predict_cmd->add_option("--rules", predict_rules,
                          "rules config file (implies --postprocess)");
  predict_cmd->add_option("--ontology", predict_ontology, "ontology dictionary TSV");
  predict_cmd->add_option("--entities-out", predict_entities,
                          "entity JSON path (default: <output>.entities.json)");
  add_classes_flag(predict_cmd);

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "score predictions against gold");
  std::string eval_gold, eval_pred, eval_mode = "token", eval_json;
  bool eval_include_o = false;
  evaluate->add_option("--gold", eval_gold, "gold corpus")->required();
  evaluate->add_option("--pred", eval_pred, "predicted corpus")->required();
  evaluate->add_option("--mode", eval_mode, "token | entity")
      ->check(CLI::IsMember({"token", "entity"}));
  evaluate->add_flag("--include-o", eval_include_o, "score O as a class too");
  evaluate->add_option("--json", eval_json, "write the JSON report here");
  add_classes_flag(evaluate);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (app.got_subcommand(validate)) return cmd_validate(validate_corpus, classes_flag);
    if (app.got_subcommand(repair)) return cmd_repair(repair_in, repair_out, classes_flag);
    if (app.got_subcommand(iaa))
      return cmd_iaa(iaa_files, iaa_unit, classes_flag, iaa_json);
    if (app.got_subcommand(train_cmd))
      return cmd_train(train_corpus, train_vocab, train_model_out, train_loss_log,
                       config, classes_flag);
    if (app.got_subcommand(predict_cmd))
      return cmd_predict(predict_model, predict_vocab, predict_in, predict_out,
                         predict_postprocess, predict_rules, predict_ontology,
                         predict_entities, classes_flag);
    if (app.got_subcommand(evaluate))
      return cmd_evaluate(eval_gold, eval_pred, eval_mode, eval_include_o, classes_flag,
                          eval_json);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 2;
}
