#pragma once

#include <vector>

#include "anykernel/graph.hpp"
#include "anykernel/kernel.hpp"

namespace anykernel {

// Wraps a kernel under a different description; evaluation and expansion are the inner kernel's.
Kernel named_kernel(Kernel inner, std::string description);

// (sum_g g(z_i) g(z_i')) * (sum_g' g'(z_j) g'(z_j')): ordered group pairs shared by both pairs.
Kernel group_pair_count_kernel(GroupFamily groups);

// Grid bin indicator times the group-pair count.
Kernel pair_groups_kernel(GroupFamily groups, int n_bins);

// 1{Em(u) = Em(u')} times the grid bin indicator.
Kernel embeddedness_kernel(int n_bins);

// 1{neighborhood structures isomorphic, pair marked} times the grid bin indicator.
Kernel isomorphism_kernel(int n_bins, int max_nodes = 10);

// Sum of node_kernel over all node pairs drawn from the two neighborhood unions.
// node_kernel sees Points whose features are the node feature vectors and p = 0.
Kernel r_convolution_kernel(Kernel node_kernel, int size_cap = 10);

double r_convolution(const std::vector<DenseVector>& a, const std::vector<DenseVector>& b,
                     const Kernel& node_kernel);

}  // namespace anykernel
