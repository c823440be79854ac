#include "gradreg/cost_model.hpp"

#include <stdexcept>

namespace gradreg {

long matmul_count(int depth, CostMethod method) {
  if (depth < 1) {
    throw std::invalid_argument("matmul_count: depth must be >= 1");
  }
  const long l = depth;
  switch (method) {
    case CostMethod::PlainGrad:
      return 3 * l - 1;
    case CostMethod::FGR:
    case CostMethod::BGR:
      return 6 * l - 2;
    case CostMethod::DB:
      return 9 * l - 5;
  }
  throw std::invalid_argument("matmul_count: unknown method");
}

std::vector<CostReport> cost_report(const std::vector<int>& depths) {
  if (depths.empty()) {
    throw std::invalid_argument("cost_report: empty depth list");
  }
  std::vector<CostReport> out;
  out.reserve(depths.size());
  for (const int depth : depths) {
    CostReport rep;
    rep.depth = depth;
    rep.plain_grad = matmul_count(depth, CostMethod::PlainGrad);
    rep.fgr = matmul_count(depth, CostMethod::FGR);
    rep.bgr = matmul_count(depth, CostMethod::BGR);
    rep.db = matmul_count(depth, CostMethod::DB);
    rep.db_over_fgr = static_cast<double>(rep.db) / static_cast<double>(rep.fgr);
    out.push_back(rep);
  }
  return out;
}

}  // namespace gradreg
