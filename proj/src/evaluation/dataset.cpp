#include "docverify/evaluation/dataset.hpp"

#include <algorithm>
#include <map>

#include <json.hpp>

#include "docverify/core/error.hpp"
#include "docverify/core/fs.hpp"
#include "docverify/core/text.hpp"

namespace docverify {

using nlohmann::json;

std::string_view to_string(Label l) {
  return l == Label::Inconsistent ? "inconsistent" : "consistent";
}

std::optional<Label> label_from_string(std::string_view s) {
  if (s == "inconsistent") return Label::Inconsistent;
  if (s == "consistent") return Label::Consistent;
  return std::nullopt;
}

namespace {

[[noreturn]] void schema_error(const std::string& where, const std::string& msg) {
  throw Error(ErrorCode::SchemaError, where + ": " + msg);
}

std::string required_string(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) schema_error(where, std::string("missing field '") + key + "'");
  if (!it->is_string()) schema_error(where, std::string("field '") + key + "' must be a string");
  auto v = it->get<std::string>();
  if (v.empty()) schema_error(where, std::string("field '") + key + "' is empty");
  return v;
}

}  // namespace

std::vector<DatasetEntry> parse_dataset(std::string_view content, const std::string& source) {
  static const std::vector<std::string> known = {"id",       "project", "revision", "file",
                                                 "function", "label",   "pair_id"};
  std::vector<DatasetEntry> entries;
  std::map<std::string, std::size_t> index;
  std::map<std::string, std::string> where_of;

  int line_no = 0;
  for (const auto& line : text::split_lines(content)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    const std::string where = source + ":" + std::to_string(line_no);
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      schema_error(where, std::string("not valid JSON (") + e.what() + ")");
    }
    if (!obj.is_object()) schema_error(where, "record must be a JSON object");
    for (const auto& [key, _] : obj.items()) {
      if (std::find(known.begin(), known.end(), key) == known.end()) {
        schema_error(where, "unknown field '" + key + "'");
      }
    }
    DatasetEntry e;
    e.id = required_string(obj, "id", where);
    e.subject.project = required_string(obj, "project", where);
    e.subject.revision = required_string(obj, "revision", where);
    e.subject.file = required_string(obj, "file", where);
    e.subject.function = required_string(obj, "function", where);
    auto label = label_from_string(required_string(obj, "label", where));
    if (!label) schema_error(where, "label must be \"inconsistent\" or \"consistent\"");
    e.label = *label;
    if (auto it = obj.find("pair_id"); it != obj.end() && !it->is_null()) {
      if (!it->is_string() || it->get<std::string>().empty()) {
        schema_error(where, "field 'pair_id' must be a non-empty string or null");
      }
      e.pair_id = it->get<std::string>();
      if (*e.pair_id == e.id) schema_error(where, "entry is paired with itself");
    }
    if (index.count(e.id)) {
      schema_error(where, "duplicate id '" + e.id + "' (first seen at " + where_of[e.id] + ")");
    }
    index[e.id] = entries.size();
    where_of[e.id] = where;
    entries.push_back(std::move(e));
  }

  for (auto& e : entries) {
    if (!e.pair_id) continue;
    auto it = index.find(*e.pair_id);
    if (it == index.end()) {
      throw Error(ErrorCode::DanglingPair, where_of[e.id] + ": pair_id '" + *e.pair_id +
                                               "' of '" + e.id + "' names no entry");
    }
    auto& other = entries[it->second];
    if (other.label == e.label) {
      schema_error(where_of[e.id], "pair '" + e.id + "' / '" + other.id + "' share a label");
    }
  }
  for (auto& e : entries) {
    if (!e.pair_id) continue;
    auto& other = entries[index[*e.pair_id]];
    if (!other.pair_id) {
      other.pair_id = e.id;
    } else if (*other.pair_id != e.id) {
      schema_error(where_of[other.id], "'" + other.id + "' is paired with '" + *other.pair_id +
                                           "' but '" + e.id + "' points to it");
    }
  }
  return entries;
}

std::vector<DatasetEntry> load_dataset(const std::filesystem::path& manifest) {
  return parse_dataset(fsutil::read_file(manifest), manifest.string());
}

std::string dataset_to_jsonl(const std::vector<DatasetEntry>& entries) {
  std::string out;
  for (const auto& e : entries) {
    json obj = {{"id", e.id},
                {"project", e.subject.project},
                {"revision", e.subject.revision},
                {"file", e.subject.file},
                {"function", e.subject.function},
                {"label", std::string(to_string(e.label))}};
    obj["pair_id"] = e.pair_id ? json(*e.pair_id) : json(nullptr);
    out += obj.dump() + "\n";
  }
  return out;
}

}  // namespace docverify
