#pragma once

// Primal network simplex for uncapacitated min-cost flow.
//
// The spanning tree is kept in the parent/thread/successor-count form:
// thread_ is a preorder traversal, succ_num_ the subtree sizes and
// last_succ_ the last node of each subtree in thread order. An artificial
// root is attached to every node; supply nodes point to it with cost 0 and
// the root points to demand nodes with a cost large enough to price out.
// Entering arcs are chosen by block search, leaving arcs by the strongly
// feasible rule (ties broken towards the root on the second path).

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <type_traits>
#include <vector>

#include "wass1/solution.hpp"

namespace wass1 {

struct SimplexOptions {
  /// Block size for pricing; 0 selects ceil(sqrt(#arcs)).
  std::int64_t block_size = 0;
  /// Abort with numeric-limit after this many pivots; 0 means unlimited.
  std::int64_t max_iterations = 0;
  /// Verify the tree data structure after every pivot (tests only; slow).
  bool check_tree = false;
};

template <class Cost>
class NetworkSimplex {
  static_assert(std::is_same_v<Cost, std::int64_t> || std::is_same_v<Cost, double>);

  static constexpr int kUp = 1;     // pred arc points from node to parent
  static constexpr int kDown = -1;  // pred arc points from parent to node
  static constexpr signed char kTree = 0;
  static constexpr signed char kLower = 1;
  static constexpr Mass kInf = std::numeric_limits<Mass>::max();

 public:
  NetworkSimplex(const FlowNetwork& net, std::span<const Mass> supply, SimplexOptions options = {})
      : net_(net), options_(options) {
    detail::check_supply(net, supply);
    node_num_ = net.node_count();
    arc_num_ = net.arc_count();
    init(supply);
  }

  SolveStatus run() {
    if (node_num_ == 0) return SolveStatus::optimal;
    while (find_entering_arc()) {
      if (options_.max_iterations > 0 && iterations_ >= options_.max_iterations) return SolveStatus::numeric_limit;
      find_join_node();
      if (!find_leaving_arc() || delta_ >= kInf) {
        // A cycle without a blocking arc has negative cost, impossible with
        // non-negative costs unless round-off misprices an arc.
        return SolveStatus::numeric_limit;
      }
      change_flow();
      update_tree_structure();
      update_potential();
      ++iterations_;
      if (options_.check_tree && !tree_is_consistent()) return SolveStatus::numeric_limit;
    }
    for (ArcId e = arc_num_; e < all_arc_num_; ++e)
      if (flow_[e] != 0) return SolveStatus::infeasible;
    return SolveStatus::optimal;
  }

  std::int64_t iterations() const { return iterations_; }

  std::vector<Mass> flows() const { return {flow_.begin(), flow_.begin() + arc_num_}; }

  /// phi = -pi so that reduced costs read cost - phi(tail) + phi(head).
  std::vector<double> potentials() const {
    std::vector<double> phi(static_cast<std::size_t>(node_num_));
    for (NodeId u = 0; u < node_num_; ++u) phi[u] = -static_cast<double>(pi_[u]);
    return phi;
  }

  /// Full structural check of the spanning tree (O(n^2) worst case).
  bool tree_is_consistent() const {
    const NodeId total = node_num_ + 1;
    std::vector<char> seen(static_cast<std::size_t>(total), 0);
    NodeId u = root_;
    for (NodeId k = 0; k < total; ++k) {
      if (seen[u]) return false;
      seen[u] = 1;
      if (rev_thread_[thread_[u]] != u) return false;
      u = thread_[u];
    }
    if (u != root_) return false;
    std::vector<NodeId> size(static_cast<std::size_t>(total), 1);
    // Reverse preorder visits children before parents.
    for (NodeId v = rev_thread_[root_]; v != root_; v = rev_thread_[v]) size[parent_[v]] += size[v];
    for (NodeId v = 0; v < total; ++v) {
      if (size[v] != succ_num_[v]) return false;
      NodeId last = v;
      for (NodeId k = 1; k < size[v]; ++k) last = thread_[last];
      if (last != last_succ_[v]) return false;
      if (v == root_) continue;
      const ArcId e = pred_[v];
      if (state_[e] != kTree) return false;
      const bool up = source_[e] == v && target_[e] == parent_[v];
      const bool down = target_[e] == v && source_[e] == parent_[v];
      if (!(up && pred_dir_[v] == kUp) && !(down && pred_dir_[v] == kDown)) return false;
    }
    return true;
  }

 private:
  void init(std::span<const Mass> supply) {
    all_arc_num_ = arc_num_ + node_num_;
    root_ = node_num_;
    const std::size_t all = static_cast<std::size_t>(all_arc_num_);
    const std::size_t nodes = static_cast<std::size_t>(node_num_) + 1;
    source_.resize(all);
    target_.resize(all);
    cost_.resize(all);
    flow_.assign(all, 0);
    state_.assign(all, kLower);
    parent_.resize(nodes);
    pred_.resize(nodes);
    thread_.resize(nodes);
    rev_thread_.resize(nodes);
    succ_num_.resize(nodes);
    last_succ_.resize(nodes);
    pred_dir_.resize(nodes);
    pi_.resize(nodes);

    Cost max_cost = 0;
    for (ArcId e = 0; e < arc_num_; ++e) {
      source_[e] = net_.tail(e);
      target_[e] = net_.head(e);
      cost_[e] = static_cast<Cost>(net_.cost(e));
      if (cost_[e] > max_cost) max_cost = cost_[e];
    }
    const Cost art_cost = Cost{1} + max_cost * static_cast<Cost>(node_num_);
    if constexpr (std::is_same_v<Cost, double>) eps_ = 1e-12 * (1.0 + static_cast<double>(max_cost));

    block_size_ = options_.block_size > 0
                      ? options_.block_size
                      : std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(std::sqrt(double(arc_num_)))));
    next_arc_ = 0;

    if (node_num_ == 0) return;
    parent_[root_] = -1;
    pred_[root_] = -1;
    thread_[root_] = 0;
    rev_thread_[0] = root_;
    succ_num_[root_] = node_num_ + 1;
    last_succ_[root_] = root_ - 1;
    pi_[root_] = 0;
    for (NodeId u = 0; u < node_num_; ++u) {
      const ArcId e = arc_num_ + u;
      parent_[u] = root_;
      pred_[u] = e;
      thread_[u] = u + 1;
      rev_thread_[u + 1] = u;
      succ_num_[u] = 1;
      last_succ_[u] = u;
      state_[e] = kTree;
      if (supply[u] >= 0) {
        pred_dir_[u] = kUp;
        pi_[u] = 0;
        source_[e] = u;
        target_[e] = root_;
        flow_[e] = supply[u];
        cost_[e] = 0;
      } else {
        pred_dir_[u] = kDown;
        pi_[u] = art_cost;
        source_[e] = root_;
        target_[e] = u;
        flow_[e] = -supply[u];
        cost_[e] = art_cost;
      }
    }
  }

  Cost reduced_cost(ArcId e) const { return cost_[e] + pi_[source_[e]] - pi_[target_[e]]; }

  bool find_entering_arc() {
    Cost best = 0;
    if constexpr (std::is_same_v<Cost, double>) best = -eps_;
    const Cost threshold = best;
    std::int64_t cnt = block_size_;
    ArcId e = next_arc_;
    ArcId chosen = -1;
    for (ArcId scanned = 0; scanned < arc_num_; ++scanned) {
      if (state_[e] != kTree) {
        const Cost c = reduced_cost(e);
        if (c < best) {
          best = c;
          chosen = e;
        }
      }
      if (++e == arc_num_) e = 0;
      if (--cnt == 0) {
        if (best < threshold) break;
        cnt = block_size_;
      }
    }
    if (chosen < 0) return false;
    in_arc_ = chosen;
    next_arc_ = e;
    return true;
  }

  void find_join_node() {
    NodeId u = source_[in_arc_];
    NodeId v = target_[in_arc_];
    while (u != v) {
      if (succ_num_[u] < succ_num_[v])
        u = parent_[u];
      else
        v = parent_[v];
    }
    join_ = u;
  }

  bool find_leaving_arc() {
    const NodeId first = source_[in_arc_];
    const NodeId second = target_[in_arc_];
    delta_ = kInf;
    int result = 0;
    for (NodeId u = first; u != join_; u = parent_[u]) {
      const Mass d = pred_dir_[u] == kUp ? flow_[pred_[u]] : kInf;
      if (d < delta_) {
        delta_ = d;
        u_out_ = u;
        result = 1;
      }
    }
    for (NodeId u = second; u != join_; u = parent_[u]) {
      const Mass d = pred_dir_[u] == kDown ? flow_[pred_[u]] : kInf;
      if (d <= delta_ && d < kInf) {
        delta_ = d;
        u_out_ = u;
        result = 2;
      }
    }
    if (result == 1) {
      u_in_ = first;
      v_in_ = second;
    } else {
      u_in_ = second;
      v_in_ = first;
    }
    return result != 0;
  }

  void change_flow() {
    if (delta_ > 0) {
      flow_[in_arc_] += delta_;
      for (NodeId u = source_[in_arc_]; u != join_; u = parent_[u]) flow_[pred_[u]] -= pred_dir_[u] * delta_;
      for (NodeId u = target_[in_arc_]; u != join_; u = parent_[u]) flow_[pred_[u]] += pred_dir_[u] * delta_;
    }
    state_[in_arc_] = kTree;
    state_[pred_[u_out_]] = kLower;
  }

  void update_tree_structure() {
    const NodeId old_rev_thread = rev_thread_[u_out_];
    const NodeId old_succ_num = succ_num_[u_out_];
    const NodeId old_last_succ = last_succ_[u_out_];
    v_out_ = parent_[u_out_];

    if (u_in_ == u_out_) {
      parent_[u_in_] = v_in_;
      pred_[u_in_] = in_arc_;
      pred_dir_[u_in_] = u_in_ == source_[in_arc_] ? kUp : kDown;

      // Move the subtree of u_out right after v_in in the thread.
      if (thread_[v_in_] != u_out_) {
        NodeId after = thread_[old_last_succ];
        thread_[old_rev_thread] = after;
        rev_thread_[after] = old_rev_thread;
        after = thread_[v_in_];
        thread_[v_in_] = u_out_;
        rev_thread_[u_out_] = v_in_;
        thread_[old_last_succ] = after;
        rev_thread_[after] = old_last_succ;
      }
    } else {
      // When old_rev_thread == v_in, join and v_out coincide.
      const NodeId thread_continue = old_rev_thread == v_in_ ? thread_[old_last_succ] : thread_[v_in_];

      // Reverse the stem u_in ... u_out, splicing each stem node's
      // remaining subtree into the thread after its new parent.
      NodeId stem = u_in_;
      NodeId par_stem = v_in_;
      NodeId next_stem;
      NodeId last = last_succ_[u_in_];
      NodeId before;
      NodeId after = thread_[last];
      thread_[v_in_] = u_in_;
      dirty_revs_.clear();
      dirty_revs_.push_back(v_in_);
      while (stem != u_out_) {
        next_stem = parent_[stem];
        thread_[last] = next_stem;
        dirty_revs_.push_back(last);

        before = rev_thread_[stem];
        thread_[before] = after;
        rev_thread_[after] = before;

        parent_[stem] = par_stem;
        par_stem = stem;
        stem = next_stem;

        last = last_succ_[stem] == last_succ_[par_stem] ? rev_thread_[par_stem] : last_succ_[stem];
        after = thread_[last];
      }
      parent_[u_out_] = par_stem;
      thread_[last] = thread_continue;
      rev_thread_[thread_continue] = last;
      last_succ_[u_out_] = last;

      if (old_rev_thread != v_in_) {
        thread_[old_rev_thread] = after;
        rev_thread_[after] = old_rev_thread;
      }

      for (NodeId u : dirty_revs_) rev_thread_[thread_[u]] = u;

      // Stem nodes from u_out back to u_in inherit their old parent's pred
      // arc with reversed direction; subtree sizes shift accordingly.
      NodeId tmp_sc = 0;
      const NodeId tmp_ls = last_succ_[u_out_];
      for (NodeId u = u_out_, p = parent_[u]; u != u_in_; u = p, p = parent_[u]) {
        pred_[u] = pred_[p];
        pred_dir_[u] = static_cast<signed char>(-pred_dir_[p]);
        tmp_sc += succ_num_[u] - succ_num_[p];
        succ_num_[u] = tmp_sc;
        last_succ_[p] = tmp_ls;
      }
      pred_[u_in_] = in_arc_;
      pred_dir_[u_in_] = u_in_ == source_[in_arc_] ? kUp : kDown;
      succ_num_[u_in_] = old_succ_num;
    }

    const NodeId up_limit_out = last_succ_[join_] == v_in_ ? join_ : -1;
    const NodeId last_succ_out = last_succ_[u_out_];
    for (NodeId u = v_in_; u != -1 && last_succ_[u] == v_in_; u = parent_[u]) last_succ_[u] = last_succ_out;

    if (join_ != old_rev_thread && v_in_ != old_rev_thread) {
      for (NodeId u = v_out_; u != up_limit_out && last_succ_[u] == old_last_succ; u = parent_[u])
        last_succ_[u] = old_rev_thread;
    } else if (last_succ_out != old_last_succ) {
      for (NodeId u = v_out_; u != up_limit_out && last_succ_[u] == old_last_succ; u = parent_[u])
        last_succ_[u] = last_succ_out;
    }

    for (NodeId u = v_in_; u != join_; u = parent_[u]) succ_num_[u] += old_succ_num;
    for (NodeId u = v_out_; u != join_; u = parent_[u]) succ_num_[u] -= old_succ_num;
  }

  // Recomputed from the parent rather than shifted, so round-off in the
  // real-cost case does not accumulate across pivots.
  void update_potential() {
    const NodeId end = thread_[last_succ_[u_in_]];
    for (NodeId u = u_in_; u != end; u = thread_[u]) {
      const ArcId e = pred_[u];
      pi_[u] = pred_dir_[u] == kUp ? pi_[parent_[u]] - cost_[e] : pi_[parent_[u]] + cost_[e];
    }
  }

  const FlowNetwork& net_;
  SimplexOptions options_;

  NodeId node_num_ = 0;
  NodeId root_ = 0;
  ArcId arc_num_ = 0;
  ArcId all_arc_num_ = 0;

  std::vector<NodeId> source_;
  std::vector<NodeId> target_;
  std::vector<Cost> cost_;
  std::vector<Mass> flow_;
  std::vector<signed char> state_;

  std::vector<NodeId> parent_;
  std::vector<ArcId> pred_;
  std::vector<NodeId> thread_;
  std::vector<NodeId> rev_thread_;
  std::vector<NodeId> succ_num_;
  std::vector<NodeId> last_succ_;
  std::vector<signed char> pred_dir_;
  std::vector<Cost> pi_;
  std::vector<NodeId> dirty_revs_;

  std::int64_t block_size_ = 1;
  ArcId next_arc_ = 0;
  Cost eps_ = 0;

  ArcId in_arc_ = -1;
  NodeId join_ = 0, u_in_ = 0, v_in_ = 0, u_out_ = 0, v_out_ = 0;
  Mass delta_ = 0;
  std::int64_t iterations_ = 0;
};

namespace detail {

template <class Cost>
FlowSolution run_simplex(const FlowNetwork& net, std::span<const Mass> supply, const SimplexOptions& options) {
  NetworkSimplex<Cost> simplex(net, supply, options);
  FlowSolution sol;
  sol.status = simplex.run();
  sol.iterations = simplex.iterations();
  sol.flows = simplex.flows();
  sol.potentials = simplex.potentials();
  if (sol.status == SolveStatus::optimal) evaluate_objective(net, sol);
  return sol;
}

}  // namespace detail

/// Integer costs run in exact 64-bit arithmetic when the potential and
/// objective bounds fit; real costs run in double precision.
inline FlowSolution solve_network_simplex(const FlowNetwork& net, std::span<const Mass> supply,
                                          const SimplexOptions& options = {}) {
  detail::check_supply(net, supply);
  if (net.has_integral_costs()) {
    // |pi| <= 2 * (1 + max_cost * n) and objective <= supply * max_cost * n.
    const double n = static_cast<double>(net.node_count()) + 1.0;
    const double bound_pi = 2.0 * (1.0 + net.max_cost() * n);
    const double bound_obj = static_cast<double>(detail::positive_supply(supply)) * (1.0 + net.max_cost()) * n;
    constexpr double limit = 0x1p62;
    if (bound_pi >= limit || bound_obj >= limit) {
      FlowSolution sol;
      sol.status = SolveStatus::numeric_limit;
      return sol;
    }
    return detail::run_simplex<std::int64_t>(net, supply, options);
  }
  return detail::run_simplex<double>(net, supply, options);
}

}  // namespace wass1
