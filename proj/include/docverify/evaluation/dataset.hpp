#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace docverify {

enum class Label { Inconsistent, Consistent };

std::string_view to_string(Label l);
std::optional<Label> label_from_string(std::string_view s);

struct SubjectRef {
  std::string project;
  std::string revision;
  std::string file;
  std::string function;

  friend bool operator==(const SubjectRef&, const SubjectRef&) = default;
};

struct DatasetEntry {
  std::string id;
  SubjectRef subject;
  Label label = Label::Consistent;
  std::optional<std::string> pair_id;

  friend bool operator==(const DatasetEntry&, const DatasetEntry&) = default;
};

// One JSON object per line:
//   {"id", "project", "revision", "file", "function",
//    "label": "inconsistent"|"consistent", "pair_id": string|null}
// Blank lines are ignored. A one-sided pair link is mirrored onto its target.
// Throws SchemaError (message starts with "<source>:<line>:") or DanglingPair.
std::vector<DatasetEntry> parse_dataset(std::string_view content, const std::string& source);
std::vector<DatasetEntry> load_dataset(const std::filesystem::path& manifest);

std::string dataset_to_jsonl(const std::vector<DatasetEntry>& entries);

}  // namespace docverify
