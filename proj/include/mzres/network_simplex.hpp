#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

namespace mzres::flow {

/// Primal network simplex for the uncapacitated transportation problem on
/// the complete bipartite graph between n1 sources and n2 sinks. Costs are
/// supplied implicitly by a callback and cached; supplies are integers and
/// must balance.
///
/// The spanning-tree bookkeeping (thread / reverse thread / successor count
/// / last successor) and block-search pricing follow the classical
/// formulation used by LEMON.
class TransportSimplex {
 public:
  using CostFn = std::function<double(int, int)>;

  TransportSimplex(std::vector<std::int64_t> supply, std::vector<std::int64_t> demand,
                   const CostFn& cost)
      : n1_(static_cast<int>(supply.size())), n2_(static_cast<int>(demand.size())) {
    std::int64_t s1 = 0, s2 = 0;
    for (auto s : supply) {
      if (s < 0) throw std::invalid_argument("negative supply");
      s1 += s;
    }
    for (auto s : demand) {
      if (s < 0) throw std::invalid_argument("negative demand");
      s2 += s;
    }
    if (s1 != s2) throw std::invalid_argument("unbalanced transportation problem");
    node_num_ = n1_ + n2_;
    arc_num_ = static_cast<std::int64_t>(n1_) * n2_;
    cost_.resize(arc_num_ + node_num_);
    double max_cost = 0.0;
    for (int i = 0; i < n1_; ++i)
      for (int j = 0; j < n2_; ++j) {
        const double c = cost(i, j);
        if (!(c >= 0.0) || !std::isfinite(c)) throw std::invalid_argument("invalid arc cost");
        cost_[static_cast<std::int64_t>(i) * n2_ + j] = c;
        max_cost = std::max(max_cost, c);
      }
    supply_.resize(node_num_);
    for (int i = 0; i < n1_; ++i) supply_[i] = supply[i];
    for (int j = 0; j < n2_; ++j) supply_[n1_ + j] = -demand[j];
    eps_ = 1e-13 * (1.0 + max_cost);
    init(max_cost);
  }

  /// Run to optimality; returns the number of pivots.
  std::int64_t solve() {
    std::int64_t pivots = 0;
    while (find_entering_arc()) {
      find_join_node();
      if (!find_leaving_arc()) throw std::runtime_error("unbounded transportation problem");
      change_flow();
      update_tree_structure();
      update_potential();
      ++pivots;
    }
    for (int u = 0; u < node_num_; ++u)
      if (flow_[arc_num_ + u] != 0) throw std::runtime_error("infeasible transportation problem");
    return pivots;
  }

  std::int64_t flow(int i, int j) const { return flow_[static_cast<std::int64_t>(i) * n2_ + j]; }
  double cost(int i, int j) const { return cost_[static_cast<std::int64_t>(i) * n2_ + j]; }

  /// Dual variables y with y_i - y_j <= c_ij at optimality (y = -pi).
  double source_potential(int i) const { return -(pi_[i] - pi_[root_]); }
  double sink_potential(int j) const { return -(pi_[n1_ + j] - pi_[root_]); }

  /// Total primal cost sum c_ij f_ij.
  double primal_cost() const {
    long double s = 0.0;
    for (std::int64_t e = 0; e < arc_num_; ++e)
      if (flow_[e] != 0) s += static_cast<long double>(cost_[e]) * flow_[e];
    return static_cast<double>(s);
  }

  /// Largest violation of dual feasibility over all real arcs.
  double dual_violation() const {
    double v = 0.0;
    for (std::int64_t e = 0; e < arc_num_; ++e)
      v = std::max(v, -(cost_[e] + pi_[source(e)] - pi_[target(e)]));
    return v;
  }

 private:
  static constexpr int DIR_UP = 1, DIR_DOWN = -1;
  static constexpr signed char STATE_TREE = 0, STATE_LOWER = 1;
  static constexpr std::int64_t INF = std::numeric_limits<std::int64_t>::max();

  int source(std::int64_t e) const {
    if (e < arc_num_) return static_cast<int>(e / n2_);
    const int u = static_cast<int>(e - arc_num_);
    return supply_[u] >= 0 ? u : root_;
  }
  int target(std::int64_t e) const {
    if (e < arc_num_) return n1_ + static_cast<int>(e % n2_);
    const int u = static_cast<int>(e - arc_num_);
    return supply_[u] >= 0 ? root_ : u;
  }

  void init(double max_cost) {
    root_ = node_num_;
    const int all = node_num_ + 1;
    parent_.assign(all, -1);
    pred_.assign(all, -1);
    thread_.assign(all, 0);
    rev_thread_.assign(all, 0);
    succ_num_.assign(all, 1);
    last_succ_.assign(all, 0);
    pred_dir_.assign(all, DIR_UP);
    pi_.assign(all, 0.0);
    flow_.assign(arc_num_ + node_num_, 0);
    state_.assign(arc_num_ + node_num_, STATE_LOWER);

    const double art = (max_cost + 1.0) * (node_num_ + 1);
    parent_[root_] = -1;
    pred_[root_] = -1;
    thread_[root_] = 0;
    rev_thread_[0] = root_;
    succ_num_[root_] = all;
    last_succ_[root_] = root_ - 1;
    for (int u = 0; u < node_num_; ++u) {
      const std::int64_t e = arc_num_ + u;
      parent_[u] = root_;
      pred_[u] = e;
      thread_[u] = u + 1;
      rev_thread_[u + 1] = u;
      succ_num_[u] = 1;
      last_succ_[u] = u;
      state_[e] = STATE_TREE;
      cost_[e] = art;
      if (supply_[u] >= 0) {
        pred_dir_[u] = DIR_UP;
        pi_[u] = -art;
        flow_[e] = supply_[u];
      } else {
        pred_dir_[u] = DIR_DOWN;
        pi_[u] = art;
        flow_[e] = -supply_[u];
      }
    }
    block_size_ = std::max<std::int64_t>(
        10, static_cast<std::int64_t>(std::sqrt(static_cast<double>(arc_num_))));
    next_arc_ = 0;
  }

  double reduced(std::int64_t e) const { return cost_[e] + pi_[source(e)] - pi_[target(e)]; }

  bool find_entering_arc() {
    double min = -eps_;
    std::int64_t cnt = block_size_;
    std::int64_t e;
    bool found = false;
    for (e = next_arc_; e != arc_num_; ++e) {
      if (state_[e] == STATE_LOWER) {
        const double c = reduced(e);
        if (c < min) min = c, in_arc_ = e, found = true;
      }
      if (--cnt == 0) {
        if (found) goto search_end;
        cnt = block_size_;
      }
    }
    for (e = 0; e != next_arc_; ++e) {
      if (state_[e] == STATE_LOWER) {
        const double c = reduced(e);
        if (c < min) min = c, in_arc_ = e, found = true;
      }
      if (--cnt == 0) {
        if (found) goto search_end;
        cnt = block_size_;
      }
    }
    if (!found) return false;
  search_end:
    next_arc_ = e;
    return true;
  }

  void find_join_node() {
    int u = source(in_arc_), v = target(in_arc_);
    while (u != v) {
      if (succ_num_[u] < succ_num_[v])
        u = parent_[u];
      else
        v = parent_[v];
    }
    join_ = u;
  }

  bool find_leaving_arc() {
    // The entering arc is at its lower bound: flow is pushed source -> target.
    const int first = source(in_arc_), second = target(in_arc_);
    delta_ = INF;
    int result = 0;
    for (int u = first; u != join_; u = parent_[u]) {
      const std::int64_t d = pred_dir_[u] == DIR_UP ? flow_[pred_[u]] : INF;
      if (d < delta_) delta_ = d, u_out_ = u, result = 1;
    }
    for (int u = second; u != join_; u = parent_[u]) {
      const std::int64_t d = pred_dir_[u] == DIR_DOWN ? flow_[pred_[u]] : INF;
      if (d <= delta_) delta_ = d, u_out_ = u, result = 2;
    }
    if (result == 1)
      u_in_ = first, v_in_ = second;
    else
      u_in_ = second, v_in_ = first;
    return result != 0 && delta_ != INF;
  }

  void change_flow() {
    if (delta_ > 0) {
      flow_[in_arc_] += delta_;
      for (int u = source(in_arc_); u != join_; u = parent_[u])
        flow_[pred_[u]] -= pred_dir_[u] * delta_;
      for (int u = target(in_arc_); u != join_; u = parent_[u])
        flow_[pred_[u]] += pred_dir_[u] * delta_;
    }
    state_[in_arc_] = STATE_TREE;
    state_[pred_[u_out_]] = STATE_LOWER;
  }

  void update_tree_structure() {
    const int old_rev_thread = rev_thread_[u_out_];
    const int old_succ_num = succ_num_[u_out_];
    const int old_last_succ = last_succ_[u_out_];
    v_out_ = parent_[u_out_];

    if (u_in_ == u_out_) {
      parent_[u_in_] = v_in_;
      pred_[u_in_] = in_arc_;
      pred_dir_[u_in_] = u_in_ == source(in_arc_) ? DIR_UP : DIR_DOWN;
      if (thread_[v_in_] != u_out_) {
        int after = thread_[old_last_succ];
        thread_[old_rev_thread] = after;
        rev_thread_[after] = old_rev_thread;
        after = thread_[v_in_];
        thread_[v_in_] = u_out_;
        rev_thread_[u_out_] = v_in_;
        thread_[old_last_succ] = after;
        rev_thread_[after] = old_last_succ;
      }
    } else {
      const int thread_continue =
          old_rev_thread == v_in_ ? thread_[old_last_succ] : thread_[v_in_];
      int stem = u_in_, par_stem = v_in_, next_stem;
      int last = last_succ_[u_in_];
      int before, after = thread_[last];
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
        last = last_succ_[stem] == last_succ_[par_stem] ? rev_thread_[par_stem]
                                                          : last_succ_[stem];
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
      for (int u : dirty_revs_) rev_thread_[thread_[u]] = u;

      int tmp_sc = 0;
      const int tmp_ls = last_succ_[u_out_];
      for (int u = u_out_, p = parent_[u]; u != u_in_; u = p, p = parent_[u]) {
        pred_[u] = pred_[p];
        pred_dir_[u] = -pred_dir_[p];
        tmp_sc += succ_num_[u] - succ_num_[p];
        succ_num_[u] = tmp_sc;
        last_succ_[p] = tmp_ls;
      }
      pred_[u_in_] = in_arc_;
      pred_dir_[u_in_] = u_in_ == source(in_arc_) ? DIR_UP : DIR_DOWN;
      succ_num_[u_in_] = old_succ_num;
    }

    const int up_limit_out = last_succ_[join_] == v_in_ ? join_ : -1;
    const int last_succ_out = last_succ_[u_out_];
    for (int u = v_in_; u != -1 && last_succ_[u] == v_in_; u = parent_[u])
      last_succ_[u] = last_succ_out;
    if (join_ != old_rev_thread && v_in_ != old_rev_thread) {
      for (int u = v_out_; u != up_limit_out && last_succ_[u] == old_last_succ; u = parent_[u])
        last_succ_[u] = old_rev_thread;
    } else if (last_succ_out != old_last_succ) {
      for (int u = v_out_; u != up_limit_out && last_succ_[u] == old_last_succ; u = parent_[u])
        last_succ_[u] = last_succ_out;
    }
    for (int u = v_in_; u != join_; u = parent_[u]) succ_num_[u] += old_succ_num;
    for (int u = v_out_; u != join_; u = parent_[u]) succ_num_[u] -= old_succ_num;
  }

  void update_potential() {
    const double sigma = pi_[v_in_] - pi_[u_in_] - pred_dir_[u_in_] * cost_[in_arc_];
    const int end = thread_[last_succ_[u_in_]];
    for (int u = u_in_; u != end; u = thread_[u]) pi_[u] += sigma;
  }

  int n1_, n2_, node_num_ = 0, root_ = 0;
  std::int64_t arc_num_ = 0;
  std::vector<double> cost_;
  std::vector<std::int64_t> supply_;
  std::vector<std::int64_t> flow_;
  std::vector<signed char> state_;
  std::vector<int> parent_, thread_, rev_thread_, succ_num_, last_succ_, pred_dir_;
  std::vector<std::int64_t> pred_;
  std::vector<double> pi_;
  std::vector<int> dirty_revs_;
  double eps_ = 0.0;
  std::int64_t block_size_ = 10, next_arc_ = 0;
  std::int64_t in_arc_ = 0, delta_ = 0;
  int join_ = 0, u_in_ = 0, v_in_ = 0, u_out_ = 0, v_out_ = 0;
};

}  // namespace mzres::flow
