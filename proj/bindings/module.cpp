#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "plantner/agreement.hpp"
#include "plantner/bio_codec.hpp"
#include "plantner/corpus.hpp"
#include "plantner/metrics.hpp"
#include "plantner/ontology.hpp"
#include "plantner/postprocess.hpp"
#include "plantner/subword.hpp"
#include "plantner/tagger.hpp"

namespace py = pybind11;
using namespace plantner;

PYBIND11_MODULE(_core, m) {
  m.doc() = "sequence-labeling pipeline for plant stress-response NER";

  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);

  // ------------------------------------------------------------- corpus
  py::class_<LabelSchema>(m, "LabelSchema")
      .def(py::init<std::vector<std::string>>(), py::arg("entity_classes"))
      .def_static("default_schema", &LabelSchema::default_schema)
      .def_property_readonly("entity_classes", &LabelSchema::entity_classes)
      .def_property_readonly("bio_labels", &LabelSchema::bio_labels)
      .def("has_label", &LabelSchema::has_label)
      .def("label_index", &LabelSchema::label_index);

  py::class_<Token>(m, "Token")
      .def(py::init<std::string, std::string, std::string>(), py::arg("form"),
           py::arg("pos") = "", py::arg("label") = "O")
      .def_readwrite("form", &Token::form)
      .def_readwrite("pos", &Token::pos)
      .def_readwrite("label", &Token::label)
      .def("__repr__", [](const Token& t) {
        return "Token(" + t.form + "/" + t.pos + "/" + t.label + ")";
      });

  py::class_<Sentence>(m, "Sentence")
      .def(py::init<std::vector<Token>>(), py::arg("tokens"))
      .def_readwrite("tokens", &Sentence::tokens)
      .def("labels", &Sentence::labels)
      .def("forms", &Sentence::forms)
      .def("__len__", &Sentence::size);

  py::class_<Document>(m, "Document")
      .def(py::init<std::string, std::vector<Sentence>>(), py::arg("id"),
           py::arg("sentences"))
      .def_readwrite("id", &Document::id)
      .def_readwrite("sentences", &Document::sentences);

  m.def("parse_conll", &parse_conll, py::arg("text"), py::arg("schema"),
        py::arg("strict") = true);
  m.def("serialize_conll",
        [](const std::vector<Document>& docs) { return serialize_conll(docs); },
        py::arg("documents"));

  // ---------------------------------------------------------- bio_codec
  py::class_<EntitySpan>(m, "EntitySpan")
      .def(py::init<std::size_t, std::size_t, std::string>(), py::arg("start"),
           py::arg("end"), py::arg("class_name"))
      .def_readwrite("start", &EntitySpan::start)
      .def_readwrite("end", &EntitySpan::end)
      .def_readwrite("class_name", &EntitySpan::class_name)
      .def(py::self == py::self)
      .def("__repr__", [](const EntitySpan& s) {
        return "EntitySpan(" + std::to_string(s.start) + ", " + std::to_string(s.end) +
               ", " + s.class_name + ")";
      });

  py::class_<BioViolation>(m, "BioViolation")
      .def_readonly("position", &BioViolation::position)
      .def_property_readonly("kind",
                             [](const BioViolation& v) { return to_string(v.kind); })
      .def_readonly("detail", &BioViolation::detail);

  m.def("validate_bio",
        [](const std::vector<std::string>& labels, const LabelSchema& schema) {
          return validate_bio(labels, schema);
        },
        py::arg("labels"), py::arg("schema"));
  m.def("repair_bio",
        [](const std::vector<std::string>& labels, const LabelSchema& schema,
           bool match_previous) {
          return repair_bio(labels, schema,
                            match_previous ? MismatchPolicy::MatchPrevious
                                           : MismatchPolicy::NewEntity);
        },
        py::arg("labels"), py::arg("schema"), py::arg("match_previous") = false);
  m.def("bio_to_spans",
        [](const std::vector<std::string>& labels) { return bio_to_spans(labels); },
        py::arg("labels"));
  m.def("spans_to_bio",
        [](const std::vector<EntitySpan>& spans, std::size_t length) {
          return spans_to_bio(spans, length);
        },
        py::arg("spans"), py::arg("length"));

  // ------------------------------------------------------------ subword
  py::class_<SubwordVocab>(m, "SubwordVocab")
      .def(py::init<std::vector<std::string>, std::string, std::string>(),
           py::arg("pieces"), py::arg("continuation_marker") = "##",
           py::arg("unknown_piece") = "[UNK]")
      .def_static("from_file", &SubwordVocab::from_file, py::arg("path"))
      .def("save", &SubwordVocab::save, py::arg("path"))
      .def("__len__", &SubwordVocab::size)
      .def("has_piece", &SubwordVocab::has_piece);

  py::class_<AlignedSequence>(m, "AlignedSequence")
      .def_readonly("pieces", &AlignedSequence::pieces)
      .def_readonly("labels", &AlignedSequence::labels)
      .def_readonly("supervision_mask", &AlignedSequence::supervision_mask)
      .def_readonly("word_index", &AlignedSequence::word_index)
      .def("__len__", &AlignedSequence::size);

  m.def("segment", &segment, py::arg("word"), py::arg("vocab"));
  m.def("align_labels", &align_labels, py::arg("sentence"), py::arg("vocab"),
        py::arg("schema"));
  m.def("project_to_words",
        [](const AlignedSequence& aligned, const std::vector<std::string>& predicted,
           const LabelSchema& schema) {
          return project_to_words(aligned, predicted, schema);
        },
        py::arg("aligned"), py::arg("predicted"), py::arg("schema"));

  // ---------------------------------------------------------- agreement
  py::class_<AgreementTable>(m, "AgreementTable")
      .def_readonly("categories", &AgreementTable::categories)
      .def_readonly("counts", &AgreementTable::counts)
      .def_readonly("total", &AgreementTable::total);

  py::class_<IaaReport>(m, "IaaReport")
      .def_readonly("p0", &IaaReport::p0)
      .def_readonly("pe", &IaaReport::pe)
      .def_readonly("kappa", &IaaReport::kappa)
      .def_readonly("g_index", &IaaReport::g_index)
      .def_readonly("k", &IaaReport::k);

  py::class_<PairwiseIaa::Pair>(m, "IaaPair")
      .def_readonly("annotator_a", &PairwiseIaa::Pair::annotator_a)
      .def_readonly("annotator_b", &PairwiseIaa::Pair::annotator_b)
      .def_readonly("report", &PairwiseIaa::Pair::report);

  py::class_<PairwiseIaa>(m, "PairwiseIaa")
      .def_readonly("pairs", &PairwiseIaa::pairs)
      .def_readonly("mean", &PairwiseIaa::mean);

  m.def("build_table",
        [](const std::vector<std::string>& a, const std::vector<std::string>& b,
           const std::vector<std::string>& categories) {
          return build_table(a, b, categories);
        },
        py::arg("ann_a"), py::arg("ann_b"), py::arg("categories"));
  m.def("cohen_kappa", &cohen_kappa, py::arg("table"));
  m.def("g_index", &g_index, py::arg("table"));
  m.def("iaa_report", &iaa_report, py::arg("table"));
  m.def("pairwise_iaa",
        [](const std::vector<std::vector<std::string>>& annotations,
           const std::vector<std::string>& categories) {
          return pairwise_iaa(annotations, categories);
        },
        py::arg("annotations"), py::arg("categories"));

  // ------------------------------------------------------------- tagger
  py::class_<ClassWeights>(m, "ClassWeights")
      .def_readonly("by_label", &ClassWeights::by_label)
      .def_readonly("o_factor", &ClassWeights::o_factor);

  m.def("compute_class_weights",
        [](const std::vector<Document>& corpus, const LabelSchema& schema,
           double o_factor) { return compute_class_weights(corpus, schema, o_factor); },
        py::arg("corpus"), py::arg("schema"), py::arg("o_factor") = 0.1);

  m.def("weighted_ce_loss",
        [](const std::vector<double>& logits, std::size_t gold_index, double weight) {
          const auto lg = weighted_ce_loss(logits, gold_index, weight);
          return py::make_tuple(lg.loss, lg.gradient);
        },
        py::arg("logits"), py::arg("gold_index"), py::arg("weight") = 1.0);

  py::class_<TrainConfig>(m, "TrainConfig")
      .def(py::init<>())
      .def_readwrite("epochs", &TrainConfig::epochs)
      .def_readwrite("learning_rate", &TrainConfig::learning_rate)
      .def_readwrite("decay", &TrainConfig::decay)
      .def_readwrite("seed", &TrainConfig::seed)
      .def_readwrite("o_factor", &TrainConfig::o_factor)
      .def_readwrite("hash_dimension", &TrainConfig::hash_dimension);

  py::class_<TaggerModel>(m, "TaggerModel")
      .def_property_readonly("schema", &TaggerModel::schema)
      .def("save_file", &TaggerModel::save_file, py::arg("path"))
      .def_static("load_file", &TaggerModel::load_file, py::arg("path"))
      .def(py::self == py::self);

  py::class_<TrainResult>(m, "TrainResult")
      .def_readonly("model", &TrainResult::model)
      .def_readonly("epoch_losses", &TrainResult::epoch_losses);

  m.def("train",
        [](const std::vector<Document>& corpus, const LabelSchema& schema,
           const SubwordVocab& vocab, const TrainConfig& config) {
          return train(corpus, schema, vocab, config);
        },
        py::arg("corpus"), py::arg("schema"), py::arg("vocab"),
        py::arg("config") = TrainConfig{});
  m.def("viterbi_decode", &viterbi_decode, py::arg("emission_log_probs"),
        py::arg("schema"));
  m.def("predict", &predict, py::arg("model"), py::arg("sentence"), py::arg("vocab"));

  // -------------------------------------------------------- postprocess
  py::class_<ChunkRuleConfig>(m, "ChunkRuleConfig")
      .def(py::init<>())
      .def_readwrite("chunk_pos", &ChunkRuleConfig::chunk_pos)
      .def_readwrite("trim_pos", &ChunkRuleConfig::trim_pos)
      .def_readwrite("expansion_enabled", &ChunkRuleConfig::expansion_enabled)
      .def_readwrite("trim_enabled", &ChunkRuleConfig::trim_enabled)
      .def_static("from_file", &ChunkRuleConfig::from_file, py::arg("path"));

  m.def("pos_realign",
        [](const Sentence& sentence, const std::vector<EntitySpan>& spans,
           const ChunkRuleConfig& config) { return pos_realign(sentence, spans, config); },
        py::arg("sentence"), py::arg("spans"), py::arg("config") = ChunkRuleConfig{});
  m.def("fix_inconsistent",
        [](const Sentence& sentence, const std::vector<std::string>& labels,
           const LabelSchema& schema, const ChunkRuleConfig& config) {
          return fix_inconsistent(sentence, labels, schema, config);
        },
        py::arg("sentence"), py::arg("labels"), py::arg("schema"),
        py::arg("config") = ChunkRuleConfig{});
  m.def("run_pipeline",
        [](const Sentence& sentence, const std::vector<std::string>& labels,
           const LabelSchema& schema, const ChunkRuleConfig& config) {
          return run_pipeline(sentence, labels, schema, config);
        },
        py::arg("sentence"), py::arg("labels"), py::arg("schema"),
        py::arg("config") = ChunkRuleConfig{});

  // ----------------------------------------------------------- ontology
  py::class_<OntologyEntry>(m, "OntologyEntry")
      .def(py::init<std::string, std::string, std::string>(), py::arg("surface"),
           py::arg("canonical_id"), py::arg("class_name"))
      .def_readonly("surface", &OntologyEntry::surface)
      .def_readonly("canonical_id", &OntologyEntry::canonical_id)
      .def_readonly("class_name", &OntologyEntry::class_name);

  py::class_<OntologyDictionary>(m, "OntologyDictionary")
      .def(py::init<std::vector<OntologyEntry>>(), py::arg("entries"))
      .def_static("load", &OntologyDictionary::load, py::arg("path"))
      .def("__len__", &OntologyDictionary::size);

  py::class_<NormalizedEntity>(m, "NormalizedEntity")
      .def_readonly("doc_id", &NormalizedEntity::doc_id)
      .def_readonly("sentence_index", &NormalizedEntity::sentence_index)
      .def_readonly("span", &NormalizedEntity::span)
      .def_readonly("surface", &NormalizedEntity::surface)
      .def_readonly("canonical_id", &NormalizedEntity::canonical_id)
      .def_property_readonly("match_tier",
                             [](const NormalizedEntity& e) { return to_string(e.tier); });

  m.def("normalize_entity",
        [](const std::string& surface, const std::string& class_name,
           const OntologyDictionary& dict) {
          const auto lookup = normalize_entity(surface, class_name, dict);
          return py::make_tuple(lookup.canonical_id, to_string(lookup.tier));
        },
        py::arg("surface"), py::arg("class_name"), py::arg("dictionary"));
  m.def("annotate_document",
        [](const Document& doc, const std::vector<std::vector<EntitySpan>>& spans,
           const OntologyDictionary& dict) { return annotate_document(doc, spans, dict); },
        py::arg("document"), py::arg("spans_per_sentence"), py::arg("dictionary"));

  // ------------------------------------------------------------ metrics
  py::class_<ClassMetrics>(m, "ClassMetrics")
      .def_readonly("precision", &ClassMetrics::precision)
      .def_readonly("recall", &ClassMetrics::recall)
      .def_readonly("f1", &ClassMetrics::f1)
      .def_readonly("support", &ClassMetrics::support);

  py::class_<EvalReport>(m, "EvalReport")
      .def_property_readonly("mode",
                             [](const EvalReport& r) {
                               return r.mode == EvalMode::Token ? "token" : "entity";
                             })
      .def_readonly("include_o", &EvalReport::include_o)
      .def_readonly("per_class", &EvalReport::per_class)
      .def_readonly("accuracy", &EvalReport::accuracy)
      .def_readonly("macro_precision", &EvalReport::macro_precision)
      .def_readonly("macro_recall", &EvalReport::macro_recall)
      .def_readonly("macro_f1", &EvalReport::macro_f1)
      .def_readonly("weighted_precision", &EvalReport::weighted_precision)
      .def_readonly("weighted_recall", &EvalReport::weighted_recall)
      .def_readonly("weighted_f1", &EvalReport::weighted_f1)
      .def_readonly("micro_precision", &EvalReport::micro_precision)
      .def_readonly("micro_recall", &EvalReport::micro_recall)
      .def_readonly("micro_f1", &EvalReport::micro_f1);

  m.def("token_metrics",
        [](const std::vector<Document>& gold, const std::vector<Document>& pred,
           bool include_o) { return token_metrics(gold, pred, include_o); },
        py::arg("gold"), py::arg("pred"), py::arg("include_o") = false);
  m.def("entity_metrics", &entity_metrics, py::arg("gold"), py::arg("pred"));
  m.def("render_report_table", &render_report_table, py::arg("report"));
}
