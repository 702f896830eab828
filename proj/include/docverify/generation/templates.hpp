#pragma once

#include <string>
#include <string_view>

namespace docverify::templates {

// Prompt templates, embedded from src/generation/templates at build time.
std::string_view behaviors();
std::string_view complete_tests();
std::string_view repair_tests();
std::string_view synthesize_code();

// "t1-<digest>": changes whenever any template text changes.
const std::string& version();

}  // namespace docverify::templates
