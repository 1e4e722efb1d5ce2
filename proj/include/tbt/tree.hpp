#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace tbt {

/// Complete binary tree of depth d in heap order: the root is node 1 and
/// the children of node j are 2j and 2j+1.  Nodes are indexed 1..node_count.
struct TreeTopology {
    int depth = 0;

    explicit TreeTopology(int d);

    int node_count() const { return (1 << (depth + 1)) - 1; }
    int internal_count() const { return (1 << depth) - 1; }
    bool is_leaf(int j) const { return j >= (1 << depth); }
    static int parent(int j) { return j / 2; }
    static int left(int j) { return 2 * j; }
    static int right(int j) { return 2 * j + 1; }
    static int node_depth(int j);
};

/// A pruned subtree rooted at node 1, stored as its ordered leaf set.
/// The leaves tile the root region.
struct SubtreeModel {
    std::vector<int> leaf_set;
};

/// Number of pruned subtrees of a depth-d tree: alpha_0 = 1,
/// alpha_{d+1} = alpha_d^2 + 1.  Guarded at d <= 5 (alpha_5 = 458330).
std::int64_t alpha(int d);

/// Number of models of a depth-d tree in which a node at depth node_depth
/// is a leaf: the product of alpha(d-l) for l = 1..node_depth.
std::int64_t theta(int d, int node_depth);

/// Deepest node that is an ancestor of (or equal to) both j and k,
/// together with its depth.  Heap-index halving.
std::pair<int, int> nearest_common_ancestor(int j, int k);

/// All pruned subtrees of a depth-d tree, as leaf sets.  Brute force,
/// guarded at d <= 4 (677 models).
std::vector<SubtreeModel> enumerate_models(int d);

/// Counts models of enumerate_models(d) whose leaf set contains both
/// j and k.  Ground-truth oracle for rho.
std::int64_t rho_oracle(int j, int k, int d);

/// Number of models of a depth-d tree in which j and k are simultaneously
/// leaves, by closed form.  Ancestor pairs give 0; rho(j,j) = theta(d, depth(j)).
std::int64_t rho(int j, int k, int d);

/// Symmetric node_count x node_count table of rho values, immutable after
/// construction.
class RhoTable {
public:
    explicit RhoTable(int d);

    int depth() const { return depth_; }
    int size() const { return size_; }
    std::int64_t at(int j, int k) const { return values_[(j - 1) * size_ + (k - 1)]; }

    /// beta = RhoTable * u over nodes 1..N.
    std::vector<double> apply(const std::vector<double>& u) const;

private:
    int depth_;
    int size_;
    std::vector<std::int64_t> values_;
};

}  // namespace tbt
