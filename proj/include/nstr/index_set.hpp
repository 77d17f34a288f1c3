#pragma once

#include <algorithm>
#include <initializer_list>
#include <vector>

#include "nstr/common.hpp"

namespace nstr {

/// Sorted, duplicate-free set of indices in [0, n). Small-vector semantics:
/// set algebra is done by linear merges, membership by binary search.
class IndexSet {
public:
  IndexSet() = default;
  IndexSet(std::initializer_list<int> idx) : idx_(idx) { normalize(); }
  explicit IndexSet(std::vector<int> idx) : idx_(std::move(idx)) { normalize(); }

  static IndexSet full(int n) {
    std::vector<int> v(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = i;
    return IndexSet(std::move(v));
  }

  int size() const { return static_cast<int>(idx_.size()); }
  bool empty() const { return idx_.empty(); }

  bool contains(int i) const {
    return std::binary_search(idx_.begin(), idx_.end(), i);
  }

  IndexSet set_union(const IndexSet& other) const {
    std::vector<int> out;
    out.reserve(idx_.size() + other.idx_.size());
    std::set_union(idx_.begin(), idx_.end(), other.idx_.begin(), other.idx_.end(),
                   std::back_inserter(out));
    return IndexSet(std::move(out));
  }

  IndexSet set_difference(const IndexSet& other) const {
    std::vector<int> out;
    out.reserve(idx_.size());
    std::set_difference(idx_.begin(), idx_.end(), other.idx_.begin(),
                        other.idx_.end(), std::back_inserter(out));
    return IndexSet(std::move(out));
  }

  /// Indices in [0, n) not contained in this set.
  IndexSet complement(int n) const {
    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(n) - idx_.size());
    std::size_t p = 0;
    for (int i = 0; i < n; ++i) {
      if (p < idx_.size() && idx_[p] == i) {
        ++p;
      } else {
        out.push_back(i);
      }
    }
    return IndexSet(std::move(out));
  }

  bool is_subset_of(const IndexSet& other) const {
    return std::includes(other.idx_.begin(), other.idx_.end(), idx_.begin(),
                         idx_.end());
  }

  bool operator==(const IndexSet& other) const { return idx_ == other.idx_; }
  bool operator!=(const IndexSet& other) const { return idx_ != other.idx_; }

  const std::vector<int>& indices() const { return idx_; }
  int operator[](int k) const { return idx_[static_cast<std::size_t>(k)]; }

  auto begin() const { return idx_.begin(); }
  auto end() const { return idx_.end(); }

private:
  void normalize() {
    std::sort(idx_.begin(), idx_.end());
    idx_.erase(std::unique(idx_.begin(), idx_.end()), idx_.end());
    if (!idx_.empty() && idx_.front() < 0)
      throw PreconditionViolated("IndexSet: negative index");
  }

  std::vector<int> idx_;
};

}  // namespace nstr
