#include "tbt/tree.hpp"

#include <bit>
#include <stdexcept>
#include <string>

namespace tbt {

namespace {

void check_node(int j, int node_count, const char* who) {
    if (j < 1 || j > node_count) {
        throw std::domain_error(std::string(who) + ": node index " + std::to_string(j) +
                                " out of range 1.." + std::to_string(node_count));
    }
}

bool is_strict_ancestor(int a, int b) {
    while (b > a) b /= 2;
    return b == a;
}

}  // namespace

TreeTopology::TreeTopology(int d) : depth(d) {
    if (d < 0) throw std::domain_error("TreeTopology: negative depth");
}

int TreeTopology::node_depth(int j) {
    if (j < 1) throw std::domain_error("node_depth: index must be positive");
    return std::bit_width(static_cast<unsigned>(j)) - 1;
}

std::int64_t alpha(int d) {
    if (d < 0) throw std::domain_error("alpha: negative depth");
    if (d > 5) throw std::length_error("alpha: depth > 5 exceeds capacity guard");
    std::int64_t a = 1;
    for (int i = 0; i < d; ++i) a = a * a + 1;
    return a;
}

std::int64_t theta(int d, int node_depth) {
    if (node_depth < 0 || node_depth > d) {
        throw std::domain_error("theta: node_depth outside [0, d]");
    }
    std::int64_t p = 1;
    for (int l = 1; l <= node_depth; ++l) p *= alpha(d - l);
    return p;
}

std::pair<int, int> nearest_common_ancestor(int j, int k) {
    if (j < 1 || k < 1) throw std::domain_error("nearest_common_ancestor: indices must be positive");
    while (j != k) {
        if (j > k)
            j /= 2;
        else
            k /= 2;
    }
    return {j, TreeTopology::node_depth(j)};
}

namespace {

// Models of the subtree rooted at `node` with `r` levels remaining below it.
std::vector<std::vector<int>> models_below(int node, int r) {
    std::vector<std::vector<int>> out;
    out.push_back({node});
    if (r > 0) {
        auto lhs = models_below(2 * node, r - 1);
        auto rhs = models_below(2 * node + 1, r - 1);
        for (const auto& l : lhs) {
            for (const auto& h : rhs) {
                std::vector<int> m = l;
                m.insert(m.end(), h.begin(), h.end());
                out.push_back(std::move(m));
            }
        }
    }
    return out;
}

}  // namespace

std::vector<SubtreeModel> enumerate_models(int d) {
    if (d < 0) throw std::domain_error("enumerate_models: negative depth");
    if (d > 4) throw std::length_error("enumerate_models: depth > 4 exceeds capacity guard");
    std::vector<SubtreeModel> out;
    for (auto& leaves : models_below(1, d)) out.push_back(SubtreeModel{std::move(leaves)});
    return out;
}

std::int64_t rho_oracle(int j, int k, int d) {
    std::int64_t count = 0;
    for (const auto& model : enumerate_models(d)) {
        bool has_j = false;
        bool has_k = false;
        for (int leaf : model.leaf_set) {
            has_j |= (leaf == j);
            has_k |= (leaf == k);
        }
        if (has_j && has_k) ++count;
    }
    return count;
}

std::int64_t rho(int j, int k, int d) {
    const int n = (1 << (d + 1)) - 1;
    check_node(j, n, "rho");
    check_node(k, n, "rho");
    const int dj = TreeTopology::node_depth(j);
    const int dk = TreeTopology::node_depth(k);
    if (j == k) return theta(d, dj);
    if (is_strict_ancestor(j, k) || is_strict_ancestor(k, j)) return 0;
    const int l = nearest_common_ancestor(j, k).second;
    const int deep = std::max(dj, dk);
    const int shallow = std::min(dj, dk);
    // theta(d, shallow) contains the factor alpha(d-l-1) since l < shallow,
    // so the quotient is exact.
    const std::int64_t num = theta(d - l - 1, deep - l - 1) * theta(d, shallow);
    const std::int64_t den = alpha(d - l - 1);
    if (num % den != 0) throw std::logic_error("rho: non-exact division, formula misapplied");
    return num / den;
}

RhoTable::RhoTable(int d) : depth_(d), size_((1 << (d + 1)) - 1) {
    if (d < 0) throw std::domain_error("RhoTable: negative depth");
    values_.resize(static_cast<std::size_t>(size_) * size_);
    for (int j = 1; j <= size_; ++j) {
        for (int k = j; k <= size_; ++k) {
            const std::int64_t v = rho(j, k, d);
            values_[(j - 1) * size_ + (k - 1)] = v;
            values_[(k - 1) * size_ + (j - 1)] = v;
        }
    }
}

std::vector<double> RhoTable::apply(const std::vector<double>& u) const {
    if (static_cast<int>(u.size()) != size_) {
        throw std::invalid_argument("RhoTable::apply: size mismatch");
    }
    std::vector<double> beta(size_, 0.0);
    for (int k = 0; k < size_; ++k) {
        double acc = 0.0;
        const std::int64_t* row = &values_[static_cast<std::size_t>(k) * size_];
        for (int j = 0; j < size_; ++j) acc += static_cast<double>(row[j]) * u[j];
        beta[k] = acc;
    }
    return beta;
}

}  // namespace tbt
