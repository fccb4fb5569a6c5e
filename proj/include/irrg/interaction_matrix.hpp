#pragma once

#include <cstdint>
#include <numeric>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "irrg/common.hpp"

namespace irrg {

/// Symmetric boolean n x n matrix of pairwise variable dependencies with a
/// true diagonal. Connected components of the induced graph are the groups.
class InteractionMatrix {
 public:
  InteractionMatrix() = default;

  static InteractionMatrix identity(std::size_t n) {
    InteractionMatrix m;
    m.n_ = n;
    m.bits_.assign(n * n, 0);
    for (std::size_t i = 0; i < n; ++i) m.bits_[i * n + i] = 1;
    return m;
  }

  std::size_t size() const { return n_; }

  bool operator()(Index i, Index j) const {
    check(i);
    check(j);
    return bits_[i * n_ + j] != 0;
  }

  /// Sets (i, j) and (j, i). Returns true when the entry changed.
  bool link(Index i, Index j) {
    check(i);
    check(j);
    if (bits_[i * n_ + j]) return false;
    bits_[i * n_ + j] = 1;
    bits_[j * n_ + i] = 1;
    return true;
  }

  /// Number of true entries strictly above the diagonal.
  std::size_t link_count() const {
    std::size_t c = 0;
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = i + 1; j < n_; ++j) c += bits_[i * n_ + j];
    return c;
  }

  /// Variables directly linked to v (v included), ascending.
  VarSet row(Index v) const {
    check(v);
    VarSet out;
    for (std::size_t j = 0; j < n_; ++j)
      if (bits_[v * n_ + j]) out.push_back(j);
    return out;
  }

  /// Connected components ordered by smallest member; members ascending.
  Groups components() const {
    std::vector<std::size_t> parent(n_);
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    auto find = [&](std::size_t x) {
      while (parent[x] != x) x = parent[x] = parent[parent[x]];
      return x;
    };
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = i + 1; j < n_; ++j)
        if (bits_[i * n_ + j]) {
          auto a = find(i), b = find(j);
          if (a != b) parent[std::max(a, b)] = std::min(a, b);
        }
    Groups out;
    std::vector<std::size_t> slot(n_, n_);
    for (std::size_t i = 0; i < n_; ++i) {
      auto r = find(i);
      if (slot[r] == n_) {
        slot[r] = out.size();
        out.emplace_back();
      }
      out[slot[r]].push_back(i);
    }
    return out;
  }

  /// Matrix whose entries are true iff both indices lie in one component.
  InteractionMatrix closure() const {
    auto m = identity(n_);
    for (const auto& c : components())
      for (std::size_t a = 0; a < c.size(); ++a)
        for (std::size_t b = a + 1; b < c.size(); ++b) m.link(c[a], c[b]);
    return m;
  }

  bool is_symmetric() const {
    for (std::size_t i = 0; i < n_; ++i) {
      if (!bits_[i * n_ + i]) return false;
      for (std::size_t j = i + 1; j < n_; ++j)
        if (bits_[i * n_ + j] != bits_[j * n_ + i]) return false;
    }
    return true;
  }

  bool operator==(const InteractionMatrix&) const = default;

  /// Lower-triangular text form: line i holds entries (i, 0..i) as 0/1.
  std::string to_text() const {
    std::string s;
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t j = 0; j <= i; ++j) s.push_back(bits_[i * n_ + j] ? '1' : '0');
      s.push_back('\n');
    }
    return s;
  }

  static InteractionMatrix from_text(const std::string& text) {
    std::istringstream in(text);
    std::vector<std::string> lines;
    for (std::string line; std::getline(in, line);)
      if (!line.empty()) lines.push_back(line);
    auto m = identity(lines.size());
    for (std::size_t i = 0; i < lines.size(); ++i) {
      if (lines[i].size() != i + 1)
        throw ValidationError("triangular matrix line " + std::to_string(i) + " has wrong length");
      for (std::size_t j = 0; j <= i; ++j) {
        const char c = lines[i][j];
        if (c != '0' && c != '1') throw ValidationError("triangular matrix holds non 0/1 character");
        if (i == j && c != '1') throw ValidationError("diagonal entries must be 1");
        if (c == '1') m.link(i, j);
      }
    }
    return m;
  }

  static InteractionMatrix from_groups(std::size_t n, const Groups& groups) {
    auto m = identity(n);
    for (const auto& g : groups)
      for (std::size_t a = 0; a < g.size(); ++a)
        for (std::size_t b = a + 1; b < g.size(); ++b) m.link(g[a], g[b]);
    return m;
  }

 private:
  void check(Index i) const {
    if (i >= n_) throw ValidationError("variable index " + std::to_string(i) + " out of range");
  }

  std::size_t n_ = 0;
  std::vector<std::uint8_t> bits_;
};

/// Merges each group, together with every component it touches, into one
/// fully linked block. Returns the number of pairs flipped false -> true.
inline std::pair<InteractionMatrix, std::size_t> update_matrix(InteractionMatrix theta,
                                                               const Groups& groups) {
  std::size_t new_links = 0;
  for (const auto& g : groups) {
    if (g.empty()) continue;
    VarSet block;
    std::vector<std::uint8_t> in_block(theta.size(), 0);
    for (Index v : g)
      for (Index u : theta.row(v))
        if (!in_block[u]) {
          in_block[u] = 1;
          block.push_back(u);
        }
    // Rows only list direct links; expand until the block is closed.
    for (std::size_t k = 0; k < block.size(); ++k)
      for (Index u : theta.row(block[k]))
        if (!in_block[u]) {
          in_block[u] = 1;
          block.push_back(u);
        }
    for (std::size_t a = 0; a < block.size(); ++a)
      for (std::size_t b = a + 1; b < block.size(); ++b) new_links += theta.link(block[a], block[b]);
  }
  return {std::move(theta), new_links};
}

}  // namespace irrg
