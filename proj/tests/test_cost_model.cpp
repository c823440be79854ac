#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gradreg/cost_model.hpp"

using namespace gradreg;

TEST_CASE("matmul counts match the closed forms") {
  CHECK(matmul_count(1, CostMethod::PlainGrad) == 2);
  CHECK(matmul_count(4, CostMethod::FGR) == 22);
  CHECK(matmul_count(4, CostMethod::BGR) == 22);
  CHECK(matmul_count(4, CostMethod::DB) == 31);
  CHECK_THROWS_AS(matmul_count(0, CostMethod::DB), std::invalid_argument);
}

TEST_CASE("cost report ratios") {
  const auto reports = cost_report({1, 34, 100});
  CHECK(reports.size() == 3);

  CHECK(reports[0].plain_grad == 2);
  CHECK(reports[0].fgr == 4);
  CHECK(reports[0].db == 4);

  CHECK(reports[2].db == 895);
  CHECK(reports[2].fgr == 598);
  CHECK(reports[2].db_over_fgr == doctest::Approx(895.0 / 598.0).epsilon(1e-15));

  // ratio within 1% of 3/2 from L = 34 onwards
  for (int depth : {34, 50, 100, 200}) {
    const double ratio = static_cast<double>(matmul_count(depth, CostMethod::DB)) /
                         static_cast<double>(matmul_count(depth, CostMethod::FGR));
    CHECK(std::abs(ratio - 1.5) <= 0.01 * 1.5);
  }

  CHECK_THROWS_AS(cost_report({}), std::invalid_argument);
}

TEST_CASE("structural count identities") {
  for (int depth = 1; depth <= 200; ++depth) {
    const long plain = matmul_count(depth, CostMethod::PlainGrad);
    const long fgr = matmul_count(depth, CostMethod::FGR);
    const long db = matmul_count(depth, CostMethod::DB);
    CHECK(fgr == 2 * plain);
    CHECK(db - fgr == 3L * depth - 3);
  }
}
