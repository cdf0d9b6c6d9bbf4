#include <algorithm>
#include <cmath>
#include <set>

#include "xlayer/milp.hpp"

namespace xlayer {

int MilpModel::add_var(const std::string& vname, VarKind kind, double lo, double hi,
                       double obj_coef) {
  vars.push_back({vname, kind, lo, hi});
  objective.push_back(obj_coef);
  return static_cast<int>(vars.size()) - 1;
}

int MilpModel::var_index(const std::string& vname) const {
  for (int i = 0; i < static_cast<int>(vars.size()); ++i)
    if (vars[i].name == vname) return i;
  return -1;
}

void MilpModel::validate() const {
  if (vars.empty()) throw Error("model has no variables");
  if (constraints.empty()) throw Error("model has no constraints");
  if (objective.size() != vars.size()) throw Error("objective size mismatch");
  std::set<std::string> names;
  for (const auto& v : vars) {
    if (v.name.empty()) throw Error("unnamed variable");
    if (!names.insert(v.name).second) throw Error("duplicate variable name: " + v.name);
    if (!(v.lo <= v.hi)) throw Error("variable with empty domain: " + v.name);
  }
  std::set<std::string> rows;
  for (const auto& c : constraints) {
    if (c.name.empty()) throw Error("unnamed constraint");
    if (!rows.insert(c.name).second) throw Error("duplicate constraint name: " + c.name);
    if (names.count(c.name)) throw Error("constraint name collides with a variable: " + c.name);
    if (c.terms.empty()) throw Error("empty constraint: " + c.name);
    int last = -1;
    for (const auto& t : c.terms) {
      if (t.var < 0 || t.var >= static_cast<int>(vars.size()))
        throw Error("constraint references an undeclared variable: " + c.name);
      if (t.var <= last) throw Error("constraint terms out of order: " + c.name);
      last = t.var;
      if (!std::isfinite(t.coef)) throw Error("non-finite coefficient in " + c.name);
    }
    if (!std::isfinite(c.rhs)) throw Error("non-finite right-hand side in " + c.name);
  }
}

namespace {

std::string sanitize(const std::string& id) {
  std::string out;
  for (char ch : id)
    out += (std::isalnum(static_cast<unsigned char>(ch)) || ch == '_') ? ch : '_';
  return out.empty() ? "_" : out;
}

// Bookkeeping shared by the three builders. Physical arcs are the two
// orientations of every physical edge; logical arcs likewise.
struct NetIndex {
  const CrossLayerInstance* inst;
  std::vector<std::string> pid;   // sanitized physical node ids
  std::vector<std::string> lid;   // sanitized logical node ids
  int np, nl, mp, ml;
  int root = 0;                   // logical node index of s0 (smallest id)

  explicit NetIndex(const CrossLayerInstance& instance) : inst(&instance) {
    np = instance.physical().node_count();
    nl = instance.logical().node_count();
    mp = instance.physical().edge_count();
    ml = instance.logical().edge_count();
    for (int i = 0; i < np; ++i) pid.push_back(sanitize(instance.physical().graph().node_id(i)));
    for (int i = 0; i < nl; ++i) lid.push_back(sanitize(instance.logical().graph().node_id(i)));
  }

  std::string y_name(int mu, int i, int j) const {
    const Edge& le = inst->logical().graph().edge(mu);
    return "y_" + lid[le.u] + "_" + lid[le.v] + "_" + pid[i] + "_" + pid[j];
  }
  std::string w_name(int pe, int s, int t) const {
    const Edge& ed = inst->physical().graph().edge(pe);
    return "w_" + pid[ed.u] + "_" + pid[ed.v] + "_" + lid[s] + "_" + lid[t];
  }
  std::string x_name(int pe) const {
    const Edge& ed = inst->physical().graph().edge(pe);
    return "x_" + pid[ed.u] + "_" + pid[ed.v];
  }
  std::string g_name(int pe) const {
    const Edge& ed = inst->physical().graph().edge(pe);
    return "g_" + pid[ed.u] + "_" + pid[ed.v];
  }
  std::string z_name(int mu) const {
    const Edge& le = inst->logical().graph().edge(mu);
    return "z_" + lid[le.u] + "_" + lid[le.v];
  }
  std::string f_name(int s, int t) const { return "f_" + lid[s] + "_" + lid[t]; }

  std::string edge_tag(int mu) const {
    const Edge& le = inst->logical().graph().edge(mu);
    return lid[le.u] + "_" + lid[le.v];
  }
  std::string pedge_tag(int pe) const {
    const Edge& ed = inst->physical().graph().edge(pe);
    return pid[ed.u] + "_" + pid[ed.v];
  }
};

void sort_terms(MilpConstraint& c) {
  std::sort(c.terms.begin(), c.terms.end(),
            [](const LinTerm& a, const LinTerm& b) { return a.var < b.var; });
}

// Routing rows shared by all three formulations: flow conservation of the
// binary y variables per logical edge and physical node. With z present the
// endpoint rows carry -z/+z (routing active only for selected tree branches);
// otherwise the right-hand side is +-rhs_unit.
void add_route_rows(MilpModel& m, const NetIndex& ix,
                    const std::vector<std::vector<int>>& y_out,
                    const std::vector<std::vector<int>>& y_in,
                    const std::vector<int>& z_var, double rhs_unit) {
  for (int mu = 0; mu < ix.ml; ++mu) {
    const Edge& le = ix.inst->logical().graph().edge(mu);
    int src = ix.inst->mapped_node(le.u);
    int dst = ix.inst->mapped_node(le.v);
    for (int i = 0; i < ix.np; ++i) {
      MilpConstraint c;
      c.name = "route_" + ix.edge_tag(mu) + "_" + ix.pid[i];
      c.sense = ConstraintSense::EQ;
      for (int a : y_out[mu * ix.np + i]) c.terms.push_back({a, 1.0});
      for (int a : y_in[mu * ix.np + i]) c.terms.push_back({a, -1.0});
      c.rhs = 0.0;
      if (i == src) {
        if (!z_var.empty()) c.terms.push_back({z_var[mu], -1.0});
        else c.rhs = rhs_unit;
      } else if (i == dst) {
        if (!z_var.empty()) c.terms.push_back({z_var[mu], 1.0});
        else c.rhs = -rhs_unit;
      }
      sort_terms(c);
      m.constraints.push_back(std::move(c));
    }
  }
}

}  // namespace

MilpModel build_max_tree_model(const CrossLayerInstance& inst, const FailureModel& model) {
  inst.require_valid();
  NetIndex ix(inst);
  MilpModel m;
  m.name = "max_tree";
  m.root_node = inst.logical().graph().node_id(ix.root);

  std::vector<int> x_var(ix.mp);
  for (int pe = 0; pe < ix.mp; ++pe)
    x_var[pe] = m.add_var(ix.x_name(pe), VarKind::Binary, 0, 1,
                          edge_weight(inst.physical(), pe, model));

  // y arcs, indexed (mu, physical arc); y_out/y_in collect them per node.
  std::vector<std::vector<int>> y_out(ix.ml * ix.np), y_in(ix.ml * ix.np);
  std::vector<std::vector<std::pair<int, int>>> y_pair(ix.ml);   // per pe: (ij, ji)
  for (int mu = 0; mu < ix.ml; ++mu) {
    y_pair[mu].resize(ix.mp);
    for (int pe = 0; pe < ix.mp; ++pe) {
      const Edge& ed = inst.physical().graph().edge(pe);
      int fwd = m.add_var(ix.y_name(mu, ed.u, ed.v), VarKind::Binary, 0, 1, 0.0);
      int rev = m.add_var(ix.y_name(mu, ed.v, ed.u), VarKind::Binary, 0, 1, 0.0);
      y_pair[mu][pe] = {fwd, rev};
      y_out[mu * ix.np + ed.u].push_back(fwd);
      y_in[mu * ix.np + ed.v].push_back(fwd);
      y_out[mu * ix.np + ed.v].push_back(rev);
      y_in[mu * ix.np + ed.u].push_back(rev);
    }
  }

  std::vector<int> z_var(ix.ml);
  for (int mu = 0; mu < ix.ml; ++mu)
    z_var[mu] = m.add_var(ix.z_name(mu), VarKind::Binary, 0, 1, 0.0);

  // Tree-connectivity flow on directed logical arcs, capped by z.
  double cap = ix.nl - 1;
  std::vector<std::vector<std::pair<int, int>>> f_at(ix.nl);   // (arc var, +1 out / -1 in)
  std::vector<std::pair<int, int>> f_arcs;                     // (var, mu)
  for (int mu = 0; mu < ix.ml; ++mu) {
    const Edge& le = inst.logical().graph().edge(mu);
    int fwd = m.add_var(ix.f_name(le.u, le.v), VarKind::Continuous, 0, cap, 0.0);
    int rev = m.add_var(ix.f_name(le.v, le.u), VarKind::Continuous, 0, cap, 0.0);
    f_at[le.u].push_back({fwd, 1});
    f_at[le.v].push_back({fwd, -1});
    f_at[le.v].push_back({rev, 1});
    f_at[le.u].push_back({rev, -1});
    f_arcs.push_back({fwd, mu});
    f_arcs.push_back({rev, mu});
  }

  add_route_rows(m, ix, y_out, y_in, z_var, 0.0);

  for (int mu = 0; mu < ix.ml; ++mu)
    for (int pe = 0; pe < ix.mp; ++pe) {
      MilpConstraint c;
      c.name = "use_" + ix.edge_tag(mu) + "_" + ix.pedge_tag(pe);
      c.sense = ConstraintSense::LE;
      c.terms = {{y_pair[mu][pe].first, 1.0}, {y_pair[mu][pe].second, 1.0}, {x_var[pe], -1.0}};
      c.rhs = 0.0;
      sort_terms(c);
      m.constraints.push_back(std::move(c));
    }

  for (int s = 0; s < ix.nl; ++s) {
    MilpConstraint c;
    c.name = "treeflow_" + ix.lid[s];
    c.sense = ConstraintSense::EQ;
    for (auto [var, sign] : f_at[s]) c.terms.push_back({var, static_cast<double>(sign)});
    c.rhs = (s == ix.root) ? cap : -1.0;
    sort_terms(c);
    m.constraints.push_back(std::move(c));
  }

  for (auto [fvar, mu] : f_arcs) {
    MilpConstraint c;
    c.name = "treecap_" + m.vars[fvar].name.substr(2);
    c.sense = ConstraintSense::LE;
    c.terms = {{fvar, 1.0}, {z_var[mu], -cap}};
    c.rhs = 0.0;
    sort_terms(c);
    m.constraints.push_back(std::move(c));
  }

  {
    MilpConstraint c;
    c.name = "treesize";
    c.sense = ConstraintSense::EQ;
    for (int mu = 0; mu < ix.ml; ++mu) c.terms.push_back({z_var[mu], 1.0});
    c.rhs = cap;
    sort_terms(c);
    m.constraints.push_back(std::move(c));
  }

  m.validate();
  return m;
}

namespace {

// Shared by base_set and surtest: same variable/constraint skeleton, with g
// present (base_set) or pinned out of existence (surtest).
MilpModel build_failure_flow_model(const CrossLayerInstance& inst, const FailureModel* model) {
  NetIndex ix(inst);
  bool with_g = model != nullptr;
  MilpModel m;
  m.name = with_g ? "base_set" : "surtest";
  m.root_node = inst.logical().graph().node_id(ix.root);

  std::vector<std::vector<int>> y_out(ix.ml * ix.np), y_in(ix.ml * ix.np);
  std::vector<std::vector<std::pair<int, int>>> y_pair(ix.ml);
  for (int mu = 0; mu < ix.ml; ++mu) {
    y_pair[mu].resize(ix.mp);
    for (int pe = 0; pe < ix.mp; ++pe) {
      const Edge& ed = inst.physical().graph().edge(pe);
      double obj = with_g ? 0.0 : 1.0;   // surtest minimizes total routing length
      int fwd = m.add_var(ix.y_name(mu, ed.u, ed.v), VarKind::Binary, 0, 1, obj);
      int rev = m.add_var(ix.y_name(mu, ed.v, ed.u), VarKind::Binary, 0, 1, obj);
      y_pair[mu][pe] = {fwd, rev};
      y_out[mu * ix.np + ed.u].push_back(fwd);
      y_in[mu * ix.np + ed.v].push_back(fwd);
      y_out[mu * ix.np + ed.v].push_back(rev);
      y_in[mu * ix.np + ed.u].push_back(rev);
    }
  }

  // Post-failure tree flows: per physical edge, one continuous variable per
  // directed logical arc.
  double k = ix.nl - 1;
  std::vector<std::vector<std::pair<int, int>>> w_arcs(ix.mp);   // (var, logical arc id)
  std::vector<std::vector<std::vector<std::pair<int, int>>>> w_at(ix.mp);
  for (int pe = 0; pe < ix.mp; ++pe) {
    w_at[pe].assign(ix.nl, {});
    for (int mu = 0; mu < ix.ml; ++mu) {
      const Edge& le = inst.logical().graph().edge(mu);
      int fwd = m.add_var(ix.w_name(pe, le.u, le.v), VarKind::Continuous, 0, 1, 0.0);
      int rev = m.add_var(ix.w_name(pe, le.v, le.u), VarKind::Continuous, 0, 1, 0.0);
      w_arcs[pe].push_back({fwd, mu});
      w_arcs[pe].push_back({rev, mu});
      w_at[pe][le.u].push_back({fwd, 1});
      w_at[pe][le.v].push_back({fwd, -1});
      w_at[pe][le.v].push_back({rev, 1});
      w_at[pe][le.u].push_back({rev, -1});
    }
  }

  std::vector<int> g_var;
  if (with_g) {
    g_var.resize(ix.mp);
    for (int pe = 0; pe < ix.mp; ++pe)
      g_var[pe] = m.add_var(ix.g_name(pe), VarKind::Binary, 0, 1,
                            edge_weight(inst.physical(), pe, *model));
  }

  add_route_rows(m, ix, y_out, y_in, {}, 1.0);

  for (int pe = 0; pe < ix.mp; ++pe)
    for (auto [wvar, mu] : w_arcs[pe]) {
      MilpConstraint c;
      c.name = "avail_" + m.vars[wvar].name.substr(2);
      c.sense = ConstraintSense::LE;
      c.terms = {{wvar, 1.0}, {y_pair[mu][pe].first, 1.0}, {y_pair[mu][pe].second, 1.0}};
      c.rhs = 1.0;
      sort_terms(c);
      m.constraints.push_back(std::move(c));
    }

  // Tree flow after the failure of each physical edge. With g: the root
  // emits 1-g and every other node absorbs (1-g)/(|V_L|-1); g on the left.
  for (int pe = 0; pe < ix.mp; ++pe) {
    for (int s = 0; s < ix.nl; ++s) {
      MilpConstraint c;
      c.name = "failflow_" + ix.pedge_tag(pe) + "_" + ix.lid[s];
      c.sense = ConstraintSense::EQ;
      for (auto [var, sign] : w_at[pe][s]) c.terms.push_back({var, static_cast<double>(sign)});
      if (s == ix.root) {
        if (with_g) c.terms.push_back({g_var[pe], 1.0});
        c.rhs = 1.0;
      } else {
        if (with_g) c.terms.push_back({g_var[pe], -1.0 / k});
        c.rhs = -1.0 / k;
      }
      sort_terms(c);
      m.constraints.push_back(std::move(c));
    }
  }

  m.validate();
  return m;
}

}  // namespace

MilpModel build_base_set_model(const CrossLayerInstance& inst, const FailureModel& model) {
  inst.require_valid();
  return build_failure_flow_model(inst, &model);
}

MilpModel build_surtest_model(const CrossLayerInstance& inst) {
  inst.require_valid();
  return build_failure_flow_model(inst, nullptr);
}

}  // namespace xlayer
