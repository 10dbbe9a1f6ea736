#pragma once

// Brute-force reference computations and random instance generators used by
// the unit and acceptance tests. Nothing here calls the library's search or
// bounding code.

#include <cstdint>
#include <random>
#include <vector>

#include "qapbb/instance.hpp"
#include "qapbb/subproblem.hpp"

namespace oracle {

using qapbb::BinaryVector;
using qapbb::CardBqop;
using qapbb::Permutation;
using qapbb::QapInstance;
using qapbb::SymMatrix;
using qapbb::Value;

/// sum_{i,j} b_ij x_i x_j written out directly.
Value form(const SymMatrix& b, const std::vector<int>& support);

/// Minimum of the QAP over all n! permutations.
Value qap_minimum(const QapInstance& inst);

struct SubsetMinimum {
  Value value = 0;
  std::vector<std::vector<int>> minimizers;  // supports, lexicographic order
};

/// Minimum of scale * x^T B x over all x with sum(x) == m.
SubsetMinimum bqop_minimum(const CardBqop& bqop);

/// Minimum of the reduced problem over all y with sum(y) == residual.
Value reduced_minimum(const qapbb::ReducedBqop& r);

/// Minimum of offset + y^T Q y over all 2^f binary y.
double qubo_minimum(const qapbb::QuboInstance& q);

/// Automorphisms of b found by checking all n! permutations.
std::vector<Permutation> automorphisms(const SymMatrix& b);

/// Minimum over all ways of placing class u on class_sizes[u] locations,
/// evaluated as sum a~_uv b_ij over ordered pairs of distinct facilities.
Value clone_class_minimum(const SymMatrix& reduced_flows, const std::vector<int>& class_sizes,
                          const SymMatrix& distances);

// Generators --------------------------------------------------------------------

SymMatrix random_symmetric(std::mt19937_64& rng, int n, Value lo, Value hi, bool zero_diagonal);

/// Distances that are invariant under rotation of a cycle: b_ij = w[min(d, n-d)].
SymMatrix circulant(std::mt19937_64& rng, int n, Value lo, Value hi);

/// Torus distances on rows x cols cells with random weights per offset class.
SymMatrix torus(std::mt19937_64& rng, int rows, int cols, Value lo, Value hi);

/// Selector QAP: clique of m clones with flow `flow` placed at a random
/// subset of facilities, the given distances.
QapInstance selector_qap(std::mt19937_64& rng, const SymMatrix& distances, int m, Value flow);

int uniform_int(std::mt19937_64& rng, int lo, int hi);

}  // namespace oracle
