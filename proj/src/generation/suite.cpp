#include "docverify/generation/suite.hpp"

namespace docverify {

std::vector<std::string> GeneratedTestSuite::names() const {
  std::vector<std::string> out;
  out.reserve(tests.size());
  for (const auto& t : tests) out.push_back(t.name);
  return out;
}

const TestCase* GeneratedTestSuite::find(const std::string& name) const {
  for (const auto& t : tests) {
    if (t.name == name) return &t;
  }
  return nullptr;
}

}  // namespace docverify
