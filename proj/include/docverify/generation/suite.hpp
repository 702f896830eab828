#pragma once

#include <string>
#include <vector>

namespace docverify {

struct BehaviorItem {
  int index = 1;
  std::string description;

  friend bool operator==(const BehaviorItem&, const BehaviorItem&) = default;
};

struct TestCase {
  std::string name;
  BehaviorItem behavior;
  std::string source_text;

  friend bool operator==(const TestCase&, const TestCase&) = default;
};

struct GeneratedTestSuite {
  std::vector<TestCase> tests;
  int revision = 0;
  // Support code outside the test blocks (helpers, includes).
  std::string preamble;

  std::vector<std::string> names() const;
  const TestCase* find(const std::string& name) const;

  friend bool operator==(const GeneratedTestSuite&, const GeneratedTestSuite&) = default;
};

struct SynthesizedImpl {
  std::string source_text;
  std::string signature;

  friend bool operator==(const SynthesizedImpl&, const SynthesizedImpl&) = default;
};

}  // namespace docverify
