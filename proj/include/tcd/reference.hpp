#pragma once

#include <string>
#include <vector>

#include "tcd/linalg.hpp"
#include "tcd/rng.hpp"

// Brute-force reference implementations used as independent oracles by the
// test and validation suites.  These deliberately avoid the stride/offset
// machinery of the main library: everything works on explicit digit tuples.

namespace tcd::reference {

// Partial trace by raw index summation: iterate every (row, col) pair of the
// full space, keep terms whose traced digits coincide on both sides, and
// accumulate into the reduced entry addressed by the kept digits.
DensityOperator partial_trace(const DensityOperator& rho, const std::vector<std::string>& keep);

// Random normalized state on the given layout.
StateVector random_state(HilbertLayout layout, SplitMix64& rng);

// Random product state across the given label groups (one normalized factor
// state per group, joined with kron).
StateVector random_product_state(const std::vector<HilbertLayout>& parts, SplitMix64& rng);

// Random full-rank density operator: mixture of `terms` random pure states.
DensityOperator random_density(HilbertLayout layout, SplitMix64& rng, std::size_t terms = 3);

}  // namespace tcd::reference
