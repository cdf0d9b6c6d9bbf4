#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <queue>
#include <string>
#include <vector>

#include "xlayer/milp.hpp"

// solve_tiny: exact implicit enumeration for the model shapes this project
// emits. Binaries are branched in declaration order; continuous variables are
// only accepted in two roles, both checkable without simplex:
//   - bound rows: an inequality with exactly one continuous term, which turns
//     into a (binary-dependent) interval for that variable;
//   - flow rows: equality rows where every continuous coefficient is +-1 and
//     each continuous variable appears in exactly two of them, which makes the
//     rows a flow-conservation system solvable by max-flow.
// Anything else is rejected up front as unsupported.

namespace xlayer {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kFeasTol = 1e-7;
constexpr double kFlowTol = 1e-9;
constexpr double kTieEps = 1e-12;

struct CombRow {
  std::vector<LinTerm> terms;
  bool eq;
  double rhs;
};

struct BoundRow {
  std::vector<LinTerm> bins;
  int cvar;
  double ccoef;
  double rhs;
};

struct FlowRow {
  std::vector<LinTerm> bins;
  std::vector<LinTerm> all;   // original normalized terms, for the leaf check
  double rhs;
};

struct Arc {
  int var;
  int from, to;   // local row indices within the block
};

struct Block {
  std::vector<int> rows;   // flow-row indices, ascending
  std::vector<Arc> arcs;
  std::vector<int> bins;   // binary vars in the member rows, sorted unique
};

struct Dsu {
  std::vector<int> p;
  explicit Dsu(int n) : p(n) {
    for (int i = 0; i < n; ++i) p[i] = i;
  }
  int find(int a) {
    while (p[a] != a) a = p[a] = p[p[a]];
    return a;
  }
  void join(int a, int b) { p[find(a)] = find(b); }
};

// Dense Edmonds-Karp; block graphs have a handful of nodes.
struct MaxFlow {
  int n;
  std::vector<std::vector<double>> orig, res;
  explicit MaxFlow(int nodes)
      : n(nodes), orig(nodes, std::vector<double>(nodes, 0.0)), res(orig) {}
  void add(int u, int v, double c) {
    orig[u][v] += c;
    res[u][v] += c;
  }
  double run(int s, int t) {
    double total = 0.0;
    for (;;) {
      std::vector<int> prev(n, -1);
      prev[s] = s;
      std::queue<int> q;
      q.push(s);
      while (!q.empty() && prev[t] < 0) {
        int u = q.front();
        q.pop();
        for (int v = 0; v < n; ++v)
          if (prev[v] < 0 && res[u][v] > kFlowTol) {
            prev[v] = u;
            q.push(v);
          }
      }
      if (prev[t] < 0) break;
      double aug = kInf;
      for (int v = t; v != s; v = prev[v]) aug = std::min(aug, res[prev[v]][v]);
      for (int v = t; v != s; v = prev[v]) {
        res[prev[v]][v] -= aug;
        res[v][prev[v]] += aug;
      }
      total += aug;
    }
    return total;
  }
  double net(int u, int v) const { return orig[u][v] - res[u][v]; }
};

struct Prep {
  const MilpModel* m = nullptr;
  int n = 0;
  bool maximize = false;
  std::vector<double> obj;   // minimize orientation
  std::vector<char> is_bin;
  std::vector<int> bin_order;
  std::vector<CombRow> comb;
  std::vector<BoundRow> bounds;
  std::vector<std::vector<int>> bounds_of;   // per var
  std::vector<FlowRow> frows;
  std::vector<Block> blocks;
  std::vector<char> in_flow;   // continuous var appears in some flow row
};

Error unsupported(const std::string& what) {
  return Error("unsupported model structure for solve_tiny: " + what);
}

Prep prepare(const MilpModel& m, const SolveLimits& limits) {
  m.validate();
  Prep p;
  p.m = &m;
  p.n = static_cast<int>(m.vars.size());
  p.maximize = m.sense == ObjectiveSense::Maximize;
  p.is_bin.assign(p.n, 0);
  p.in_flow.assign(p.n, 0);
  p.bounds_of.assign(p.n, {});
  p.obj = m.objective;
  for (int v = 0; v < p.n; ++v) {
    if (m.vars[v].kind == VarKind::Binary) {
      p.is_bin[v] = 1;
      p.bin_order.push_back(v);
    } else if (p.obj[v] != 0.0) {
      throw unsupported("objective touches continuous variable " + m.vars[v].name);
    }
    if (p.maximize) p.obj[v] = -p.obj[v];
  }
  if (static_cast<int>(p.bin_order.size()) > limits.max_binaries)
    throw Error("model has " + std::to_string(p.bin_order.size()) +
                " binary variables; solve_tiny handles at most " +
                std::to_string(limits.max_binaries));

  std::vector<std::vector<std::pair<int, double>>> occ(p.n);   // cont var -> (flow row, sign)
  for (const auto& c : m.constraints) {
    std::vector<LinTerm> terms = c.terms;
    double rhs = c.rhs;
    bool eq = c.sense == ConstraintSense::EQ;
    if (c.sense == ConstraintSense::GE) {
      for (auto& t : terms) t.coef = -t.coef;
      rhs = -rhs;
    }
    std::vector<LinTerm> bins, conts;
    for (const auto& t : terms)
      (p.is_bin[t.var] ? bins : conts).push_back(t);
    if (conts.empty()) {
      p.comb.push_back({std::move(terms), eq, rhs});
    } else if (eq) {
      int row = static_cast<int>(p.frows.size());
      for (const auto& t : conts) {
        if (std::abs(std::abs(t.coef) - 1.0) > 1e-12)
          throw unsupported("equality row " + c.name + " has a continuous coefficient other than +-1");
        occ[t.var].push_back({row, t.coef});
      }
      p.frows.push_back({std::move(bins), std::move(terms), rhs});
    } else {
      if (conts.size() != 1)
        throw unsupported("inequality " + c.name + " involves several continuous variables");
      p.bounds_of[conts[0].var].push_back(static_cast<int>(p.bounds.size()));
      p.bounds.push_back({std::move(bins), conts[0].var, conts[0].coef, rhs});
    }
  }

  // Pair each flow variable's two rows into a directed arc, then group rows
  // into blocks (connected components of the row/arc graph).
  Dsu dsu(static_cast<int>(p.frows.size()));
  struct RawArc {
    int var, from, to;
  };
  std::vector<RawArc> raw;
  for (int v = 0; v < p.n; ++v) {
    if (occ[v].empty()) continue;
    if (occ[v].size() != 2)
      throw unsupported("continuous variable " + m.vars[v].name +
                        " appears in " + std::to_string(occ[v].size()) +
                        " equality rows (need exactly 2)");
    auto [r0, s0] = occ[v][0];
    auto [r1, s1] = occ[v][1];
    if (s0 * s1 >= 0)
      throw unsupported("continuous variable " + m.vars[v].name +
                        " does not enter its equality rows with opposite signs");
    raw.push_back(s0 > 0 ? RawArc{v, r0, r1} : RawArc{v, r1, r0});
    dsu.join(r0, r1);
    p.in_flow[v] = 1;
  }
  std::vector<int> block_of(p.frows.size(), -1);
  std::vector<std::vector<int>> local(p.frows.size());
  for (int r = 0; r < static_cast<int>(p.frows.size()); ++r) {
    int root = dsu.find(r);
    if (block_of[root] < 0) {
      block_of[root] = static_cast<int>(p.blocks.size());
      p.blocks.push_back({});
    }
    Block& b = p.blocks[block_of[root]];
    local[r] = {block_of[root], static_cast<int>(b.rows.size())};
    b.rows.push_back(r);
  }
  for (const auto& a : raw)
    p.blocks[local[a.from][0]].arcs.push_back({a.var, local[a.from][1], local[a.to][1]});
  for (Block& b : p.blocks) {
    for (int r : b.rows)
      for (const auto& t : p.frows[r].bins) b.bins.push_back(t.var);
    std::sort(b.bins.begin(), b.bins.end());
    b.bins.erase(std::unique(b.bins.begin(), b.bins.end()), b.bins.end());
  }
  return p;
}

struct Searcher {
  const Prep& P;
  const SolveLimits& lim;
  long long nodes = 0;
  bool limit_hit = false;
  bool has_best = false;
  double best = kInf;
  std::vector<double> best_x;

  Searcher(const Prep& prep, const SolveLimits& limits) : P(prep), lim(limits) {}

  // Interval a continuous variable can still reach: static bounds tightened
  // by every bound row, with unfixed binaries taken at their loosest value.
  std::pair<double, double> interval(int c, const std::vector<int8_t>& a) const {
    double lo = P.m->vars[c].lo, hi = P.m->vars[c].hi;
    for (int bi : P.bounds_of[c]) {
      const BoundRow& r = P.bounds[bi];
      double smin = 0.0;
      for (const auto& t : r.bins)
        smin += a[t.var] < 0 ? std::min(0.0, t.coef) : t.coef * a[t.var];
      double rel = (r.rhs - smin) / r.ccoef;
      if (r.ccoef > 0) hi = std::min(hi, rel);
      else lo = std::max(lo, rel);
    }
    return {lo, hi};
  }

  // Feasibility of one flow block under the current assignment (all block
  // binaries fixed). With `out`, also writes a concrete flow into it.
  bool block_solve(const Block& b, const std::vector<int8_t>& a, std::vector<double>* out) const {
    int k = static_cast<int>(b.rows.size());
    std::vector<double> bal(k);
    for (int i = 0; i < k; ++i) {
      const FlowRow& fr = P.frows[b.rows[i]];
      double s = fr.rhs;
      for (const auto& t : fr.bins) {
        if (a[t.var] < 0) return true;   // caller keeps >=2-unfixed blocks away
        s -= t.coef * a[t.var];
      }
      bal[i] = s;
    }
    std::vector<double> alo(b.arcs.size()), acap(b.arcs.size());
    for (size_t j = 0; j < b.arcs.size(); ++j) {
      auto [lo, hi] = interval(b.arcs[j].var, a);
      if (lo > hi + kFeasTol) return false;
      alo[j] = lo;
      acap[j] = std::max(0.0, hi - lo);
      bal[b.arcs[j].from] -= lo;
      bal[b.arcs[j].to] += lo;
    }
    double tot = 0.0;
    for (double v : bal) tot += v;
    if (std::abs(tot) > kFeasTol) return false;
    MaxFlow mf(k + 2);
    int S = k, T = k + 1;
    double need = 0.0;
    for (int i = 0; i < k; ++i) {
      if (bal[i] > 0) {
        mf.add(S, i, bal[i]);
        need += bal[i];
      } else if (bal[i] < 0) {
        mf.add(i, T, -bal[i]);
      }
    }
    for (size_t j = 0; j < b.arcs.size(); ++j) mf.add(b.arcs[j].from, b.arcs[j].to, acap[j]);
    double got = mf.run(S, T);
    if (got + kFeasTol < need) return false;
    if (out) {
      // Net flow per node pair, split across same-direction arcs up to caps.
      std::vector<double> assigned(b.arcs.size(), 0.0);
      std::vector<char> done(b.arcs.size(), 0);
      for (size_t j = 0; j < b.arcs.size(); ++j) {
        if (done[j]) continue;
        int u = b.arcs[j].from, v = b.arcs[j].to;
        double d = mf.net(u, v);
        double fwd = std::max(0.0, d), rev = std::max(0.0, -d);
        for (size_t l = j; l < b.arcs.size(); ++l) {
          if (done[l]) continue;
          if (b.arcs[l].from == u && b.arcs[l].to == v) {
            double take = std::min(fwd, acap[l]);
            assigned[l] = take;
            fwd -= take;
            done[l] = 1;
          } else if (b.arcs[l].from == v && b.arcs[l].to == u) {
            double take = std::min(rev, acap[l]);
            assigned[l] = take;
            rev -= take;
            done[l] = 1;
          }
        }
      }
      for (size_t j = 0; j < b.arcs.size(); ++j)
        (*out)[b.arcs[j].var] = alo[j] + assigned[j];
    }
    return true;
  }

  bool propagate(std::vector<int8_t>& a) {
    for (;;) {
      bool changed = false;
      for (const CombRow& r : P.comb) {
        double lmin = 0.0, lmax = 0.0;
        for (const auto& t : r.terms) {
          if (a[t.var] < 0) {
            lmin += std::min(0.0, t.coef);
            lmax += std::max(0.0, t.coef);
          } else {
            lmin += t.coef * a[t.var];
            lmax += t.coef * a[t.var];
          }
        }
        if (lmin > r.rhs + kFeasTol) return false;
        if (r.eq && lmax < r.rhs - kFeasTol) return false;
        for (const auto& t : r.terms) {
          if (a[t.var] >= 0) continue;
          bool bad[2];
          for (int v = 0; v < 2; ++v) {
            double lv = lmin - std::min(0.0, t.coef) + t.coef * v;
            bad[v] = lv > r.rhs + kFeasTol;
            if (r.eq) {
              double uv = lmax - std::max(0.0, t.coef) + t.coef * v;
              bad[v] = bad[v] || uv < r.rhs - kFeasTol;
            }
          }
          if (bad[0] && bad[1]) return false;
          if (bad[0] != bad[1]) {
            int v = bad[0] ? 1 : 0;
            a[t.var] = static_cast<int8_t>(v);
            changed = true;
            lmin += t.coef * v - std::min(0.0, t.coef);
            lmax += t.coef * v - std::max(0.0, t.coef);
            if (lmin > r.rhs + kFeasTol) return false;
            if (r.eq && lmax < r.rhs - kFeasTol) return false;
          }
        }
      }
      for (int c = 0; c < P.n; ++c) {
        if (P.is_bin[c] || P.bounds_of[c].empty()) continue;
        auto [lo, hi] = interval(c, a);
        if (lo > hi + kFeasTol) return false;
      }
      for (const BoundRow& r : P.bounds) {
        for (const auto& t : r.bins) {
          if (a[t.var] >= 0) continue;
          bool bad[2];
          for (int v = 0; v < 2; ++v) {
            a[t.var] = static_cast<int8_t>(v);
            auto [lo, hi] = interval(r.cvar, a);
            bad[v] = lo > hi + kFeasTol;
          }
          a[t.var] = -1;
          if (bad[0] && bad[1]) return false;
          if (bad[0] != bad[1]) {
            a[t.var] = bad[0] ? 1 : 0;
            changed = true;
          }
        }
      }
      for (const Block& b : P.blocks) {
        int unfixed = -1, cnt = 0;
        for (int bv : b.bins)
          if (a[bv] < 0) {
            unfixed = bv;
            if (++cnt > 1) break;
          }
        if (cnt > 1) continue;   // too loose to decide anything yet
        if (cnt == 0) {
          if (!block_solve(b, a, nullptr)) return false;
        } else {
          bool ok[2];
          for (int v = 0; v < 2; ++v) {
            a[unfixed] = static_cast<int8_t>(v);
            ok[v] = block_solve(b, a, nullptr);
          }
          a[unfixed] = -1;
          if (!ok[0] && !ok[1]) return false;
          if (ok[0] != ok[1]) {
            a[unfixed] = ok[1] ? 1 : 0;
            changed = true;
          }
        }
      }
      if (!changed) return true;
    }
  }

  double node_bound(const std::vector<int8_t>& a) const {
    double s = 0.0;
    for (int v : P.bin_order)
      s += a[v] < 0 ? std::min(0.0, P.obj[v]) : P.obj[v] * a[v];
    return s;
  }

  void leaf(const std::vector<int8_t>& a) {
    std::vector<double> x(P.n, 0.0);
    for (int v : P.bin_order) x[v] = a[v];
    for (int c = 0; c < P.n; ++c) {
      if (P.is_bin[c] || P.in_flow[c]) continue;
      auto [lo, hi] = interval(c, a);
      if (lo > hi + kFeasTol) return;
      x[c] = std::isfinite(lo) ? lo : std::min(0.0, hi);
    }
    for (const Block& b : P.blocks)
      if (!block_solve(b, a, &x)) return;
    for (const CombRow& r : P.comb) {
      double s = 0.0;
      for (const auto& t : r.terms) s += t.coef * x[t.var];
      if (s > r.rhs + kFeasTol) return;
      if (r.eq && s < r.rhs - kFeasTol) return;
    }
    for (const BoundRow& r : P.bounds) {
      double s = r.ccoef * x[r.cvar];
      for (const auto& t : r.bins) s += t.coef * x[t.var];
      if (s > r.rhs + kFeasTol) return;
    }
    for (const FlowRow& r : P.frows) {
      double s = 0.0;
      for (const auto& t : r.all) s += t.coef * x[t.var];
      if (std::abs(s - r.rhs) > kFeasTol) return;
    }
    double val = 0.0;
    for (int v : P.bin_order) val += P.obj[v] * x[v];
    if (!has_best || val < best - kTieEps) {
      has_best = true;
      best = val;
      best_x = x;
    }
  }

  void dfs(std::vector<int8_t> a) {
    if (limit_hit) return;
    if (nodes >= lim.max_nodes) {
      limit_hit = true;
      return;
    }
    ++nodes;
    if (!propagate(a)) return;
    if (has_best && node_bound(a) >= best - kTieEps) return;
    int branch = -1;
    for (int v : P.bin_order)
      if (a[v] < 0) {
        branch = v;
        break;
      }
    if (branch < 0) {
      leaf(a);
      return;
    }
    int first = P.obj[branch] < 0 ? 1 : 0;
    for (int k = 0; k < 2; ++k) {
      std::vector<int8_t> child = a;
      child[branch] = static_cast<int8_t>(k == 0 ? first : 1 - first);
      dfs(std::move(child));
      if (limit_hit) return;
    }
  }
};

}  // namespace

SolveResult solve_tiny(const MilpModel& m, const SolveLimits& limits) {
  Prep prep = prepare(m, limits);
  Searcher s(prep, limits);
  s.dfs(std::vector<int8_t>(prep.n, -1));
  SolveResult r;
  r.nodes = s.nodes;
  r.status = s.limit_hit          ? SolveResult::Status::LimitExceeded
             : s.has_best         ? SolveResult::Status::Optimal
                                  : SolveResult::Status::Infeasible;
  if (s.has_best) {
    r.has_incumbent = true;
    r.objective = prep.maximize ? -s.best : s.best;
    r.assignment = std::move(s.best_x);
  }
  return r;
}

}  // namespace xlayer
