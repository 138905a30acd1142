#pragma once

#include "blockprec/partition.hpp"
#include "blockprec/sym_matrix.hpp"

namespace blockprec {

// The three penalty levels plus the Dirichlet strength. lambda_1 applies
// within groups, lambda_0 between groups (lambda_0 >= lambda_1), lambda_d to
// the diagonal. Values are on the prior scale: they are the rates of the
// matrix distributions, counting each upper-triangle entry once.
//
// Equality lambda_0 == lambda_1 is allowed here (it is the regime where the
// two partitions of a pair are distributionally identical, which several
// diagnostics rely on); grid construction enforces the strict chain
// lambda_0 > lambda_1 > 0.5 * lambda_d.
struct PenaltyConfig {
  double lambda_d = 1.0;
  double lambda_1 = 1.0;
  double lambda_0 = 1.0;
  double alpha_0 = 1.0;

  void validate() const;
  bool satisfies_grid_constraint() const {
    return lambda_0 > lambda_1 && lambda_1 > 0.5 * lambda_d;
  }
};

// Per-entry rate matrix: lambda_d on the diagonal, lambda_1 for same-group
// pairs, lambda_0 otherwise.
SymMatrix entry_penalties(const Partition& p, const PenaltyConfig& c);

}  // namespace blockprec
