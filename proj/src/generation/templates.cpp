#include "docverify/generation/templates.hpp"

#include "docverify/core/hash.hpp"

namespace docverify::templates {

const std::string& version() {
  static const std::string v = [] {
    Sha256 h;
    for (auto t : {behaviors(), complete_tests(), repair_tests(), synthesize_code()}) {
      h.update_field(t);
    }
    return "t1-" + h.hex_digest().substr(0, 12);
  }();
  return v;
}

}  // namespace docverify::templates
