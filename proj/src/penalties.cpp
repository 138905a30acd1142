#include "blockprec/penalties.hpp"

#include "blockprec/errors.hpp"

namespace blockprec {

void PenaltyConfig::validate() const {
  if (!(lambda_d > 0.0) || !(lambda_1 > 0.0) || !(lambda_0 > 0.0) || !(alpha_0 > 0.0)) {
    throw InvalidInputError("PenaltyConfig: all parameters must be positive");
  }
  if (lambda_0 < lambda_1) {
    throw InvalidInputError("PenaltyConfig: lambda_0 must be >= lambda_1");
  }
}

SymMatrix entry_penalties(const Partition& p, const PenaltyConfig& c) {
  c.validate();
  const int d = p.dim();
  SymMatrix out(d);
  for (int i = 0; i < d; ++i) {
    out.set(i, i, c.lambda_d);
    for (int j = i + 1; j < d; ++j) {
      out.set(i, j, p.same_group(i, j) ? c.lambda_1 : c.lambda_0);
    }
  }
  return out;
}

}  // namespace blockprec
