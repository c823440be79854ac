#pragma once

#include <vector>

namespace gradreg {

enum class CostMethod { PlainGrad, FGR, BGR, DB };

/// Matrix-multiplication count for computing the update direction of an
/// L-layer fully connected network (no bias terms):
///   plain gradient 3L - 1, finite-difference GR 6L - 2, double backprop 9L - 5.
long matmul_count(int depth, CostMethod method);

struct CostReport {
  int depth = 0;
  long plain_grad = 0;
  long fgr = 0;
  long bgr = 0;
  long db = 0;
  double db_over_fgr = 0.0;
};

std::vector<CostReport> cost_report(const std::vector<int>& depths);

}  // namespace gradreg
