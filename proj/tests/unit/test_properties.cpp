#include <doctest.h>

#include "support/properties.hpp"

TEST_SUITE("properties") {
  TEST_CASE("randomised invariants") {
    for (const props::Outcome& o : props::run_all(1000, 20240611)) {
      INFO(o.name << ": " << o.first_failure);
      CHECK(o.cases >= 1000);
      CHECK(o.failures == 0);
    }
  }
}
