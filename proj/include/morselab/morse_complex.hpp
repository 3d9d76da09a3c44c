#pragma once

// Z/2 chain complex generated by critical points graded by Morse index, with
// boundary coefficients given by mod-2 connection counts.

#include <cstdint>
#include <json.hpp>
#include <string>
#include <vector>

#include "morselab/critical_search.hpp"
#include "morselab/flow.hpp"

namespace morselab {

/// Dense matrix over GF(2) with bit-packed rows.
class Gf2Matrix {
 public:
  Gf2Matrix() = default;
  Gf2Matrix(int rows, int cols);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  bool get(int r, int c) const;
  void set(int r, int c, bool v);

  Gf2Matrix operator*(const Gf2Matrix& rhs) const;
  bool is_zero() const;
  /// Gaussian elimination over GF(2).
  int rank() const;
  /// Rows as "0101..." strings.
  std::vector<std::string> row_strings() const;

 private:
  int rows_ = 0;
  int cols_ = 0;
  int words_ = 0;
  std::vector<std::uint64_t> bits_;
};

struct ChainComplex {
  /// generators[k] = critical-point ids of index k, ascending.
  std::vector<std::vector<int>> generators;
  /// boundaries[k] maps degree k to degree k-1 (rows: degree k-1, cols: degree k);
  /// boundaries[0] is the empty map.
  std::vector<Gf2Matrix> boundaries;

  int top_degree() const { return static_cast<int>(generators.size()) - 1; }
  int rank_of_chain_group(int k) const;
};

struct HomologyResult {
  std::vector<int> betti;
  std::vector<int> ranks;  ///< ranks[k] = rank of boundaries[k]
  int euler_chain = 0;
  int euler_homology = 0;
};

/// Refuses (DegenerateError) on a degenerate point, (PreconditionError) on an
/// empty critical set or an unresolved count between consecutive degrees.
/// Pairs of consecutive index absent from `counts` default to 0.
ChainComplex assemble(const std::vector<CriticalPoint>& crit,
                      const std::vector<ConnectionCount>& counts);

/// True iff boundaries[k] * boundaries[k+1] == 0 for every k.
bool check_boundary_square(const ChainComplex& cc);

/// PreconditionError when the boundary does not square to zero.
HomologyResult betti_numbers(const ChainComplex& cc);

nlohmann::json to_json(const ChainComplex& cc);
nlohmann::json to_json(const HomologyResult& h);

}  // namespace morselab
