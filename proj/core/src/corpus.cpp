#include "subsum/corpus.hpp"

#include <fstream>
#include <unordered_set>

#include <json.hpp>

#include "subsum/ptb.hpp"

namespace subsum {

namespace {

using json = nlohmann::ordered_json;

json chunk_to_json(const Chunk& chunk) {
  json j;
  j["span"] = {chunk.span.begin, chunk.span.end};
  j["origin"] = origin_name(chunk.origin);
  return j;
}

ChunkOrigin origin_from_name(const std::string& name) {
  if (name == "clause-unit") return ChunkOrigin::ClauseUnit;
  if (name == "residual") return ChunkOrigin::Residual;
  if (name == "whole-sentence") return ChunkOrigin::WholeSentence;
  throw std::runtime_error("unknown chunk origin '" + name + "'");
}

std::vector<std::string> string_list(const json& j, const char* field) {
  if (!j.is_array()) throw std::runtime_error(std::string(field) + " must be an array");
  std::vector<std::string> out;
  out.reserve(j.size());
  for (const auto& item : j) {
    if (!item.is_string()) throw std::runtime_error(std::string(field) + " must contain strings");
    out.push_back(item.get<std::string>());
  }
  return out;
}

}  // namespace

std::string to_json_line(const Document& document) {
  json j;
  j["id"] = document.id;
  j["sentences"] = json::array();
  for (const Sentence& sentence : document.sentences) {
    json s;
    s["tokens"] = sentence.tokens;
    if (sentence.parse) s["parse"] = *sentence.parse;
    if (sentence.chunks) {
      json chunks = json::array();
      for (const Chunk& chunk : *sentence.chunks) chunks.push_back(chunk_to_json(chunk));
      s["chunks"] = chunks;
    }
    if (sentence.labels) {
      json labels = json::array();
      for (std::uint8_t label : *sentence.labels) labels.push_back(static_cast<int>(label));
      s["labels"] = labels;
    }
    j["sentences"].push_back(std::move(s));
  }
  j["reference"] = document.reference;
  return j.dump();
}

Document document_from_json_line(const std::string& line) {
  json j = json::parse(line);
  if (!j.is_object()) throw std::runtime_error("record must be a JSON object");

  Document doc;
  if (!j.contains("id") || !j["id"].is_string() || j["id"].get<std::string>().empty())
    throw std::runtime_error("missing or empty 'id'");
  doc.id = j["id"].get<std::string>();

  if (!j.contains("sentences") || !j["sentences"].is_array())
    throw std::runtime_error("missing 'sentences' array");

  std::size_t sentence_index = 0;
  for (const auto& s : j["sentences"]) {
    Sentence sentence;
    if (!s.is_object() || !s.contains("tokens"))
      throw std::runtime_error("sentence " + std::to_string(sentence_index) + " has no 'tokens'");
    sentence.tokens = string_list(s["tokens"], "tokens");

    if (s.contains("parse")) {
      if (!s["parse"].is_string()) throw std::runtime_error("'parse' must be a string");
      sentence.parse = s["parse"].get<std::string>();
    }
    if (s.contains("chunks")) {
      std::vector<Chunk> chunks;
      for (const auto& c : s["chunks"]) {
        Chunk chunk;
        chunk.sentence_index = sentence_index;
        if (!c.is_object() || !c.contains("span") || !c["span"].is_array() || c["span"].size() != 2)
          throw std::runtime_error("chunk without a [begin, end] span");
        chunk.span.begin = c["span"][0].get<std::size_t>();
        chunk.span.end = c["span"][1].get<std::size_t>();
        if (chunk.span.end > sentence.tokens.size() || chunk.span.begin >= chunk.span.end)
          throw std::runtime_error("chunk span out of bounds in sentence " +
                                   std::to_string(sentence_index));
        chunk.tokens.assign(
            sentence.tokens.begin() + static_cast<std::ptrdiff_t>(chunk.span.begin),
            sentence.tokens.begin() + static_cast<std::ptrdiff_t>(chunk.span.end));
        chunk.origin = origin_from_name(c.value("origin", std::string("whole-sentence")));
        chunks.push_back(std::move(chunk));
      }
      sentence.chunks = std::move(chunks);
    }
    if (s.contains("labels")) {
      std::vector<std::uint8_t> labels;
      for (const auto& l : s["labels"]) {
        int v = l.get<int>();
        if (v != 0 && v != 1) throw std::runtime_error("labels must be 0 or 1");
        labels.push_back(static_cast<std::uint8_t>(v));
      }
      sentence.labels = std::move(labels);
    }
    doc.sentences.push_back(std::move(sentence));
    ++sentence_index;
  }

  if (!j.contains("reference")) throw std::runtime_error("missing 'reference'");
  doc.reference = string_list(j["reference"], "reference");
  return doc;
}

std::optional<std::string> validate_document(const Document& document) {
  if (document.id.empty()) return "empty document id";
  if (document.sentences.empty()) return "empty sentence list";

  for (std::size_t i = 0; i < document.sentences.size(); ++i) {
    const Sentence& sentence = document.sentences[i];
    if (sentence.tokens.empty()) return "sentence " + std::to_string(i) + " is empty";

    if (sentence.parse) {
      try {
        ptb::align_leaves(ptb::parse_bracketed(*sentence.parse), sentence.tokens);
      } catch (const std::exception& e) {
        return "sentence " + std::to_string(i) + ": " + e.what();
      }
    }
    if (sentence.chunks) {
      std::size_t expected = 0;
      for (const Chunk& chunk : *sentence.chunks) {
        if (chunk.span.begin != expected)
          return "sentence " + std::to_string(i) + ": chunks do not partition the sentence";
        expected = chunk.span.end;
      }
      if (expected != sentence.tokens.size())
        return "sentence " + std::to_string(i) + ": chunks do not partition the sentence";
    }
    if (sentence.labels) {
      if (!sentence.chunks) return "sentence " + std::to_string(i) + ": labels without chunks";
      if (sentence.labels->size() != sentence.chunks->size())
        return "sentence " + std::to_string(i) + ": labels length differs from chunks length";
    }
  }
  return std::nullopt;
}

LoadResult load_corpus(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open corpus file: " + path.string());

  LoadResult result;
  std::unordered_set<std::string> seen_ids;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty()) continue;
    try {
      Document doc = document_from_json_line(line);
      if (auto problem = validate_document(doc)) throw std::runtime_error(*problem);
      if (!seen_ids.insert(doc.id).second)
        throw std::runtime_error("duplicate document id '" + doc.id + "'");
      result.documents.push_back(std::move(doc));
    } catch (const std::exception& e) {
      result.issues.push_back({line_number, e.what()});
    }
  }
  return result;
}

void save_corpus(const Corpus& corpus, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);  // binary keeps \n byte-exact on any platform
  if (!out) throw std::runtime_error("cannot write corpus file: " + path.string());
  for (const Document& document : corpus) out << to_json_line(document) << '\n';
}

std::optional<UnitKind> unit_kind_from_name(std::string_view name) {
  if (name == "sentence") return UnitKind::Sentence;
  if (name == "chunk") return UnitKind::Chunk;
  return std::nullopt;
}

std::vector<Chunk> document_units(const Document& document, UnitKind kind) {
  std::vector<Chunk> units;
  for (std::size_t i = 0; i < document.sentences.size(); ++i) {
    const Sentence& sentence = document.sentences[i];
    if (kind == UnitKind::Sentence) {
      Chunk whole;
      whole.sentence_index = i;
      whole.span = {0, sentence.tokens.size()};
      whole.tokens = sentence.tokens;
      whole.origin = ChunkOrigin::WholeSentence;
      units.push_back(std::move(whole));
    } else {
      if (!sentence.chunks) throw MissingChunksError(document.id);
      units.insert(units.end(), sentence.chunks->begin(), sentence.chunks->end());
    }
  }
  return units;
}

std::vector<std::uint8_t> document_labels(const Document& document) {
  std::vector<std::uint8_t> labels;
  for (const Sentence& sentence : document.sentences) {
    if (!sentence.labels)
      throw std::runtime_error("document '" + document.id + "' has no oracle labels");
    labels.insert(labels.end(), sentence.labels->begin(), sentence.labels->end());
  }
  return labels;
}

std::vector<std::string> flatten_tokens(const Document& document) {
  std::vector<std::string> tokens;
  for (const Sentence& sentence : document.sentences)
    tokens.insert(tokens.end(), sentence.tokens.begin(), sentence.tokens.end());
  return tokens;
}

}  // namespace subsum
