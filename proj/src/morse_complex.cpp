#include "morselab/morse_complex.hpp"

#include <algorithm>
#include <bit>
#include <map>

#include "morselab/error.hpp"

namespace morselab {

Gf2Matrix::Gf2Matrix(int rows, int cols)
    : rows_(rows), cols_(cols), words_((cols + 63) / 64),
      bits_(static_cast<std::size_t>(rows) * static_cast<std::size_t>((cols + 63) / 64), 0) {
  if (rows < 0 || cols < 0) throw ShapeError("GF(2) matrix dimensions must be >= 0");
}

bool Gf2Matrix::get(int r, int c) const {
  return (bits_[static_cast<std::size_t>(r) * words_ + c / 64] >> (c % 64)) & 1u;
}

void Gf2Matrix::set(int r, int c, bool v) {
  auto& w = bits_[static_cast<std::size_t>(r) * words_ + c / 64];
  const std::uint64_t mask = std::uint64_t{1} << (c % 64);
  w = v ? (w | mask) : (w & ~mask);
}

Gf2Matrix Gf2Matrix::operator*(const Gf2Matrix& rhs) const {
  if (cols_ != rhs.rows_) throw ShapeError("GF(2) product shape mismatch");
  Gf2Matrix out(rows_, rhs.cols_);
  for (int r = 0; r < rows_; ++r) {
    for (int k = 0; k < cols_; ++k) {
      if (!get(r, k)) continue;
      for (int w = 0; w < rhs.words_; ++w) {
        out.bits_[static_cast<std::size_t>(r) * out.words_ + w] ^=
            rhs.bits_[static_cast<std::size_t>(k) * rhs.words_ + w];
      }
    }
  }
  return out;
}

bool Gf2Matrix::is_zero() const {
  return std::all_of(bits_.begin(), bits_.end(), [](std::uint64_t w) { return w == 0; });
}

int Gf2Matrix::rank() const {
  auto rows = bits_;
  int rank = 0;
  for (int c = 0; c < cols_ && rank < rows_; ++c) {
    const int word = c / 64;
    const std::uint64_t mask = std::uint64_t{1} << (c % 64);
    int pivot = -1;
    for (int r = rank; r < rows_; ++r) {
      if (rows[static_cast<std::size_t>(r) * words_ + word] & mask) {
        pivot = r;
        break;
      }
    }
    if (pivot < 0) continue;
    if (pivot != rank) {
      std::swap_ranges(rows.begin() + static_cast<std::ptrdiff_t>(pivot) * words_,
                       rows.begin() + static_cast<std::ptrdiff_t>(pivot + 1) * words_,
                       rows.begin() + static_cast<std::ptrdiff_t>(rank) * words_);
    }
    for (int r = 0; r < rows_; ++r) {
      if (r == rank || !(rows[static_cast<std::size_t>(r) * words_ + word] & mask)) continue;
      for (int w = 0; w < words_; ++w) {
        rows[static_cast<std::size_t>(r) * words_ + w] ^=
            rows[static_cast<std::size_t>(rank) * words_ + w];
      }
    }
    ++rank;
  }
  return rank;
}

std::vector<std::string> Gf2Matrix::row_strings() const {
  std::vector<std::string> out;
  for (int r = 0; r < rows_; ++r) {
    std::string s;
    for (int c = 0; c < cols_; ++c) s.push_back(get(r, c) ? '1' : '0');
    out.push_back(std::move(s));
  }
  return out;
}

int ChainComplex::rank_of_chain_group(int k) const {
  if (k < 0 || k > top_degree()) return 0;
  return static_cast<int>(generators[static_cast<std::size_t>(k)].size());
}

ChainComplex assemble(const std::vector<CriticalPoint>& crit,
                      const std::vector<ConnectionCount>& counts) {
  if (crit.empty()) {
    throw PreconditionError("empty critical set: f is bounded below and satisfies Palais-Smale, "
                            "so the search must have failed");
  }
  int top = 0;
  std::map<int, int> degree_of;
  for (const auto& cp : crit) {
    if (!cp.nondegenerate) {
      throw DegenerateError("critical point " + std::to_string(cp.id) + " is degenerate");
    }
    top = std::max(top, cp.index());
    degree_of[cp.id] = cp.index();
  }

  ChainComplex cc;
  cc.generators.resize(static_cast<std::size_t>(top) + 1);
  for (const auto& cp : crit) cc.generators[static_cast<std::size_t>(cp.index())].push_back(cp.id);
  for (auto& g : cc.generators) std::sort(g.begin(), g.end());

  cc.boundaries.emplace_back(0, cc.rank_of_chain_group(0));
  for (int k = 1; k <= top; ++k) {
    cc.boundaries.emplace_back(cc.rank_of_chain_group(k - 1), cc.rank_of_chain_group(k));
  }

  auto position = [&](int degree, int id) {
    const auto& g = cc.generators[static_cast<std::size_t>(degree)];
    return static_cast<int>(std::lower_bound(g.begin(), g.end(), id) - g.begin());
  };

  for (const auto& c : counts) {
    if (!degree_of.count(c.hi_id) || !degree_of.count(c.lo_id)) {
      throw PreconditionError("connection count refers to unknown point");
    }
    const int k = degree_of[c.hi_id];
    if (degree_of[c.lo_id] != k - 1) {
      throw PreconditionError("connection count between points " + std::to_string(c.hi_id) +
                              " and " + std::to_string(c.lo_id) + " is not of index difference 1");
    }
    if (!c.resolved) {
      throw PreconditionError("unresolved connection count between points " +
                              std::to_string(c.hi_id) + " and " + std::to_string(c.lo_id) +
                              (c.diagnostic.empty() ? "" : ": " + c.diagnostic));
    }
    cc.boundaries[static_cast<std::size_t>(k)].set(position(k - 1, c.lo_id), position(k, c.hi_id),
                                                   (c.mod2 & 1) != 0);
  }
  return cc;
}

bool check_boundary_square(const ChainComplex& cc) {
  for (int k = 1; k < cc.top_degree(); ++k) {
    const auto prod = cc.boundaries[static_cast<std::size_t>(k)] *
                      cc.boundaries[static_cast<std::size_t>(k + 1)];
    if (!prod.is_zero()) return false;
  }
  return true;
}

HomologyResult betti_numbers(const ChainComplex& cc) {
  if (!check_boundary_square(cc)) {
    throw PreconditionError("boundary operator does not square to zero");
  }
  HomologyResult h;
  const int top = cc.top_degree();
  for (int k = 0; k <= top; ++k) h.ranks.push_back(cc.boundaries[static_cast<std::size_t>(k)].rank());
  for (int k = 0; k <= top; ++k) {
    const int next = k + 1 <= top ? h.ranks[static_cast<std::size_t>(k + 1)] : 0;
    const int b = cc.rank_of_chain_group(k) - h.ranks[static_cast<std::size_t>(k)] - next;
    h.betti.push_back(b);
    const int sign = (k % 2 == 0) ? 1 : -1;
    h.euler_chain += sign * cc.rank_of_chain_group(k);
    h.euler_homology += sign * b;
  }
  return h;
}

nlohmann::json to_json(const ChainComplex& cc) {
  auto boundaries = nlohmann::json::array();
  for (std::size_t k = 1; k < cc.boundaries.size(); ++k) {
    boundaries.push_back({{"degree", k}, {"rows", cc.boundaries[k].row_strings()}});
  }
  return {{"generators_by_degree", cc.generators}, {"boundary_matrices", boundaries}};
}

nlohmann::json to_json(const HomologyResult& h) {
  return {{"betti", h.betti},
          {"ranks", h.ranks},
          {"euler_chain", h.euler_chain},
          {"euler_homology", h.euler_homology}};
}

}  // namespace morselab
