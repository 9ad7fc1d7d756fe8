#include "plantner/postprocess.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace plantner {

namespace {

std::string trim_copy(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  std::size_t e = s.find_last_not_of(" \t\r");
  return b == std::string::npos ? "" : s.substr(b, e - b + 1);
}

std::set<std::string> parse_pos_set(const std::string& value, std::size_t lineno) {
  std::set<std::string> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim_copy(item);
    if (!item.empty()) out.insert(item);
  }
  if (out.empty()) throw ParseError(lineno, "empty POS set");
  return out;
}

bool parse_bool(const std::string& value, std::size_t lineno) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw ParseError(lineno, "expected true/false, got '" + value + "'");
}

}  // namespace

ChunkRuleConfig ChunkRuleConfig::from_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open rules file '" + path + "'");

  ChunkRuleConfig config;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string stripped = trim_copy(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const std::size_t eq = stripped.find('=');
    if (eq == std::string::npos)
      throw ParseError(lineno, "expected key = value");
    const std::string key = trim_copy(stripped.substr(0, eq));
    const std::string value = trim_copy(stripped.substr(eq + 1));
    if (key == "chunk_pos") config.chunk_pos = parse_pos_set(value, lineno);
    else if (key == "trim_pos") config.trim_pos = parse_pos_set(value, lineno);
    else if (key == "expansion_enabled") config.expansion_enabled = parse_bool(value, lineno);
    else if (key == "trim_enabled") config.trim_enabled = parse_bool(value, lineno);
    else throw ParseError(lineno, "unknown key '" + key + "'");
  }
  config.validate();
  return config;
}

void ChunkRuleConfig::validate() const {
  for (const auto& pos : chunk_pos) {
    if (trim_pos.count(pos))
      throw Error("chunk_pos and trim_pos must be disjoint; both contain '" + pos +
                  "'");
  }
}

std::vector<EntitySpan> pos_realign(const Sentence& sentence,
                                    std::span<const EntitySpan> spans,
                                    const ChunkRuleConfig& config) {
  config.validate();
  const std::size_t n = sentence.size();

  std::vector<EntitySpan> sorted(spans.begin(), spans.end());
  std::sort(sorted.begin(), sorted.end(),
            [](const EntitySpan& a, const EntitySpan& b) { return a.start < b.start; });
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (sorted[i].start >= sorted[i].end || sorted[i].end > n)
      throw Error("pos_realign: span out of range");
    if (i > 0 && sorted[i].start < sorted[i - 1].end)
      throw Error("pos_realign: overlapping input spans");
  }

  auto is_chunk = [&](std::size_t i) {
    return config.chunk_pos.count(sentence.tokens[i].pos) > 0;
  };
  auto is_trim = [&](std::size_t i) {
    return config.trim_pos.count(sentence.tokens[i].pos) > 0;
  };

  std::vector<EntitySpan> out;
  std::size_t left_barrier = 0;  // end of the previous span after expansion
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    EntitySpan span = sorted[i];
    const std::size_t right_barrier =
        i + 1 < sorted.size() ? sorted[i + 1].start : n;

    if (config.expansion_enabled) {
      while (span.start > left_barrier && is_chunk(span.start - 1)) --span.start;
      while (span.end < right_barrier && is_chunk(span.end)) ++span.end;
    }
    left_barrier = span.end;

    if (config.trim_enabled) {
      while (span.start < span.end && is_trim(span.start)) ++span.start;
      while (span.end > span.start && is_trim(span.end - 1)) --span.end;
    }
    if (span.start < span.end) out.push_back(std::move(span));
  }
  return out;
}

std::vector<std::string> fix_inconsistent(const Sentence& sentence,
                                          std::span<const std::string> labels,
                                          const LabelSchema& schema,
                                          const ChunkRuleConfig& config) {
  config.validate();
  if (labels.size() != sentence.size())
    throw Error("fix_inconsistent: label/sentence length mismatch");

  auto repaired = repair_bio(labels, schema);
  auto spans = bio_to_spans(repaired);

  // H1: drop single-token entities sitting on trim-POS tokens
  std::vector<EntitySpan> kept;
  for (auto& span : spans) {
    const bool singleton_trim =
        span.end - span.start == 1 &&
        config.trim_pos.count(sentence.tokens[span.start].pos) > 0;
    if (!singleton_trim) kept.push_back(std::move(span));
  }

  // H2: merge same-class spans separated by exactly one O chunk-POS token
  std::vector<EntitySpan> merged;
  for (auto& span : kept) {
    if (!merged.empty()) {
      auto& prev = merged.back();
      const bool gap_of_one = span.start == prev.end + 1;
      if (gap_of_one && prev.class_name == span.class_name &&
          config.chunk_pos.count(sentence.tokens[prev.end].pos) > 0) {
        prev.end = span.end;
        continue;
      }
    }
    merged.push_back(std::move(span));
  }

  return spans_to_bio(merged, labels.size());
}

std::vector<std::string> run_pipeline(const Sentence& sentence,
                                      std::span<const std::string> labels,
                                      const LabelSchema& schema,
                                      const ChunkRuleConfig& config) {
  if (labels.size() != sentence.size())
    throw Error("run_pipeline: label/sentence length mismatch");
  const auto fixed = fix_inconsistent(sentence, labels, schema, config);
  const auto spans = bio_to_spans(fixed);
  const auto realigned = pos_realign(sentence, spans, config);
  return spans_to_bio(realigned, labels.size());
}

}  // namespace plantner
