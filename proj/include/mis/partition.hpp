#pragma once

#include <cstddef>
#include <vector>

namespace mis {

/// A-priori grouping of proposal indexes into disjoint, nonempty subsets
/// covering {0..N-1}. Subsets may differ in size.
struct Partition {
  std::vector<std::vector<std::size_t>> subsets;

  std::size_t size() const noexcept { return subsets.size(); }
};

/// Throws InputError if the subsets are empty, overlap, or miss an index.
void validate(const Partition& partition, std::size_t pool_size);

/// owner[n] = index of the subset containing proposal n.
std::vector<std::size_t> subset_owner(const Partition& partition, std::size_t pool_size);

Partition singleton_partition(std::size_t pool_size);
Partition whole_partition(std::size_t pool_size);
/// Consecutive blocks of `group` indexes; the last block takes the remainder.
Partition contiguous_partition(std::size_t pool_size, std::size_t group);

}  // namespace mis
