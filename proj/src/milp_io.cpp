#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>

#include "num_text.hpp"
#include "xlayer/milp.hpp"

namespace xlayer {

ModelFormat model_format_of(const std::string& text) {
  if (text == "lp") return ModelFormat::Lp;
  if (text == "mps") return ModelFormat::Mps;
  throw Error("unknown model format: " + text + " (expected lp or mps)");
}

namespace {

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream is(line);
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

// ---------------------------------------------------------------- LP format

void append_terms(std::string& out, const std::vector<LinTerm>& terms,
                  const std::vector<MilpVar>& vars, size_t indent) {
  bool first = true;
  size_t line_len = out.size() - out.rfind('\n') - 1;
  for (const auto& t : terms) {
    std::string piece;
    double mag = std::abs(t.coef);
    bool neg = t.coef < 0;
    if (first) {
      piece = (neg ? "- " : "") + format_double(mag) + " " + vars[t.var].name;
      first = false;
    } else {
      piece = (neg ? " - " : " + ") + format_double(mag) + " " + vars[t.var].name;
    }
    if (line_len + piece.size() > 78) {
      out += "\n" + std::string(indent, ' ');
      line_len = indent;
      if (!first && piece[0] == ' ') piece.erase(0, 1);
    }
    out += piece;
    line_len += piece.size();
  }
}

std::string write_lp(const MilpModel& m) {
  std::string out;
  out += "\\ model " + m.name + "\n";
  if (!m.root_node.empty()) out += "\\ root " + m.root_node + "\n";
  out += m.sense == ObjectiveSense::Minimize ? "Minimize\n" : "Maximize\n";
  out += " obj:";
  {
    std::vector<LinTerm> terms;
    for (int i = 0; i < static_cast<int>(m.vars.size()); ++i)
      if (m.objective[i] != 0.0) terms.push_back({i, m.objective[i]});
    if (!terms.empty()) {
      out += " ";
      append_terms(out, terms, m.vars, 6);
    }
  }
  out += "\nSubject To\n";
  for (const auto& c : m.constraints) {
    out += " " + c.name + ": ";
    append_terms(out, c.terms, m.vars, 6);
    switch (c.sense) {
      case ConstraintSense::LE: out += " <= "; break;
      case ConstraintSense::GE: out += " >= "; break;
      case ConstraintSense::EQ: out += " = "; break;
    }
    out += format_double(c.rhs) + "\n";
  }
  out += "Bounds\n";
  for (const auto& v : m.vars)
    out += " " + format_double(v.lo) + " <= " + v.name + " <= " + format_double(v.hi) + "\n";
  bool any_binary = std::any_of(m.vars.begin(), m.vars.end(),
                                [](const MilpVar& v) { return v.kind == VarKind::Binary; });
  if (any_binary) {
    out += "Binaries\n";
    std::string line;
    for (const auto& v : m.vars) {
      if (v.kind != VarKind::Binary) continue;
      if (line.size() + v.name.size() + 1 > 78) {
        out += line + "\n";
        line.clear();
      }
      line += " " + v.name;
    }
    if (!line.empty()) out += line + "\n";
  }
  out += "End\n";
  return out;
}

// Pulls "name: 3 x + 2 y <= 1"-style token streams apart.
struct TermReader {
  std::map<std::string, int>* index;
  std::vector<LinTerm> terms;
  double pending_sign = 1.0;
  bool have_coef = false;
  double coef = 1.0;

  void feed(const std::string& tok) {
    if (tok == "+") {
      pending_sign = 1.0;
      return;
    }
    if (tok == "-") {
      pending_sign = -pending_sign;
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(tok[0])) || tok[0] == '.' || tok[0] == '-' ||
        tok[0] == '+') {
      double v = parse_double(tok);
      if (have_coef) throw ParseError("two numbers in a row near " + tok);
      coef = v;
      have_coef = true;
      return;
    }
    auto it = index->find(tok);
    if (it == index->end()) throw ParseError("undeclared variable in expression: " + tok);
    terms.push_back({it->second, pending_sign * (have_coef ? coef : 1.0)});
    pending_sign = 1.0;
    have_coef = false;
  }

  std::vector<LinTerm> take() {
    if (have_coef) throw ParseError("dangling coefficient in expression");
    std::sort(terms.begin(), terms.end(),
              [](const LinTerm& a, const LinTerm& b) { return a.var < b.var; });
    return std::move(terms);
  }
};

MilpModel parse_lp(const std::string& text) {
  MilpModel m;
  std::vector<std::string> lines;
  {
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) lines.push_back(line);
  }

  // First pass: find the Bounds section — it declares every variable in
  // order; Binaries then marks kinds.
  size_t i = 0;
  std::map<std::string, int> index;
  enum Section { None, Objective, Constraints, BoundsSec, BinariesSec, Done };
  Section sec = None;
  std::vector<std::pair<std::string, std::pair<double, double>>> bound_lines;
  std::vector<std::string> binary_names;
  for (const auto& raw : lines) {
    if (!raw.empty() && raw[0] == '\\') continue;
    auto toks = split_ws(raw);
    if (toks.empty()) continue;
    std::string head = lower(toks[0]);
    if (head == "bounds") {
      sec = BoundsSec;
      continue;
    }
    if (head == "binaries" || head == "binary" || head == "bin") {
      sec = BinariesSec;
      continue;
    }
    if (head == "end") sec = Done;
    if (head == "minimize" || head == "maximize" || head == "subject" || head == "st") {
      sec = None;
      continue;
    }
    if (sec == BoundsSec) {
      // "<lo> <= <name> <= <hi>"
      if (toks.size() != 5 || toks[1] != "<=" || toks[3] != "<=")
        throw ParseError("malformed bounds line: " + raw);
      bound_lines.push_back({toks[2], {parse_double(toks[0]), parse_double(toks[4])}});
    } else if (sec == BinariesSec) {
      for (const auto& t : toks) binary_names.push_back(t);
    }
  }
  for (const auto& [name, lohi] : bound_lines) {
    if (index.count(name)) throw ParseError("variable bounded twice: " + name);
    index[name] = static_cast<int>(m.vars.size());
    m.vars.push_back({name, VarKind::Continuous, lohi.first, lohi.second});
  }
  for (const auto& name : binary_names) {
    auto it = index.find(name);
    if (it == index.end()) throw ParseError("binary variable missing from bounds: " + name);
    m.vars[it->second].kind = VarKind::Binary;
  }
  m.objective.assign(m.vars.size(), 0.0);

  // Second pass: metadata, objective, constraints.
  sec = None;
  TermReader obj_reader{&index};
  bool seen_obj_name = false;
  std::string cur_name;
  TermReader cur{&index};
  bool in_row = false;
  auto finish_row = [&](ConstraintSense sense, double rhs) {
    MilpConstraint c;
    c.name = cur_name;
    c.terms = cur.take();
    c.sense = sense;
    c.rhs = rhs;
    m.constraints.push_back(std::move(c));
    cur = TermReader{&index};
    in_row = false;
  };

  for (i = 0; i < lines.size(); ++i) {
    const std::string& raw = lines[i];
    if (!raw.empty() && raw[0] == '\\') {
      auto toks = split_ws(raw.substr(1));
      if (toks.size() >= 2 && toks[0] == "model")
        m.name = raw.substr(raw.find("model") + 6);
      else if (toks.size() >= 2 && toks[0] == "root")
        m.root_node = raw.substr(raw.find("root") + 5);
      continue;
    }
    auto toks = split_ws(raw);
    if (toks.empty()) continue;
    std::string head = lower(toks[0]);
    if (head == "minimize" || head == "maximize") {
      m.sense = head == "minimize" ? ObjectiveSense::Minimize : ObjectiveSense::Maximize;
      sec = Objective;
      continue;
    }
    if (head == "subject" || head == "st") {
      sec = Constraints;
      continue;
    }
    if (head == "bounds" || head == "binaries" || head == "binary" || head == "bin" ||
        head == "end") {
      if (in_row) throw ParseError("constraint ends without a relation: " + cur_name);
      sec = None;
      continue;
    }
    if (sec == Objective) {
      size_t start = 0;
      if (!seen_obj_name && !toks.empty() && toks[0].back() == ':') {
        seen_obj_name = true;
        start = 1;
      }
      for (size_t t = start; t < toks.size(); ++t) obj_reader.feed(toks[t]);
    } else if (sec == Constraints) {
      size_t start = 0;
      if (!toks[0].empty() && toks[0].back() == ':') {
        if (in_row) throw ParseError("constraint ends without a relation: " + cur_name);
        cur_name = toks[0].substr(0, toks[0].size() - 1);
        in_row = true;
        start = 1;
      } else if (!in_row) {
        throw ParseError("constraint line without a name: " + raw);
      }
      for (size_t t = start; t < toks.size(); ++t) {
        const std::string& tok = toks[t];
        if (tok == "<=" || tok == ">=" || tok == "=" || tok == "=<" || tok == "=>") {
          if (t + 1 >= toks.size()) throw ParseError("missing right-hand side: " + cur_name);
          ConstraintSense sense = tok == "=" ? ConstraintSense::EQ
                                 : (tok[0] == '<' || tok[1] == '<') ? ConstraintSense::LE
                                                                    : ConstraintSense::GE;
          finish_row(sense, parse_double(toks[t + 1]));
          if (t + 2 != toks.size()) throw ParseError("trailing tokens after " + cur_name);
          break;
        }
        cur.feed(tok);
      }
    }
  }
  for (const auto& t : obj_reader.take()) m.objective[t.var] = t.coef;
  try {
    m.validate();
  } catch (const Error& ex) {
    throw ParseError(ex.what());
  }
  return m;
}

// --------------------------------------------------------------- MPS format

std::string write_mps(const MilpModel& m) {
  std::string out;
  out += "* model " + m.name + "\n";
  if (!m.root_node.empty()) out += "* root " + m.root_node + "\n";
  out += "NAME " + m.name + "\n";
  out += "OBJSENSE\n    " + std::string(m.sense == ObjectiveSense::Minimize ? "MIN" : "MAX") +
         "\n";
  out += "ROWS\n N obj\n";
  for (const auto& c : m.constraints) {
    char s = c.sense == ConstraintSense::LE ? 'L' : c.sense == ConstraintSense::GE ? 'G' : 'E';
    out += std::string(" ") + s + " " + c.name + "\n";
  }

  // column-major coefficients; every variable appears (objective entry kept
  // even when zero so declaration order survives the round trip)
  std::vector<std::vector<std::pair<const std::string*, double>>> cols(m.vars.size());
  for (int v = 0; v < static_cast<int>(m.vars.size()); ++v) cols[v].push_back({nullptr, m.objective[v]});
  for (const auto& c : m.constraints)
    for (const auto& t : c.terms) cols[t.var].push_back({&c.name, t.coef});

  out += "COLUMNS\n";
  bool in_int = false;
  int marker = 0;
  static const std::string kObj = "obj";
  for (int v = 0; v < static_cast<int>(m.vars.size()); ++v) {
    bool want_int = m.vars[v].kind == VarKind::Binary;
    if (want_int != in_int) {
      out += "    M" + std::to_string(marker++) + " 'MARKER' " +
             (want_int ? "'INTORG'" : "'INTEND'") + "\n";
      in_int = want_int;
    }
    for (const auto& [row, coef] : cols[v])
      out += "    " + m.vars[v].name + " " + (row ? *row : kObj) + " " + format_double(coef) +
             "\n";
  }
  if (in_int) out += "    M" + std::to_string(marker++) + " 'MARKER' 'INTEND'\n";

  out += "RHS\n";
  for (const auto& c : m.constraints)
    if (c.rhs != 0.0) out += "    rhs " + c.name + " " + format_double(c.rhs) + "\n";

  out += "BOUNDS\n";
  for (const auto& v : m.vars) {
    if (v.kind == VarKind::Binary) {
      out += " BV bnd " + v.name + "\n";
    } else {
      if (v.lo != 0.0) out += " LO bnd " + v.name + " " + format_double(v.lo) + "\n";
      if (!std::isinf(v.hi)) out += " UP bnd " + v.name + " " + format_double(v.hi) + "\n";
    }
  }
  out += "ENDATA\n";
  return out;
}

MilpModel parse_mps(const std::string& text) {
  MilpModel m;
  std::istringstream is(text);
  std::string line;
  enum Section { None, Objsense, Rows, Columns, Rhs, Bounds, Done };
  Section sec = None;
  std::map<std::string, int> row_index;   // constraint name -> index; obj = -1
  std::map<std::string, int> var_index;
  bool in_int = false;

  while (std::getline(is, line)) {
    if (!line.empty() && line[0] == '*') {
      auto rest = line.substr(1);
      auto toks = split_ws(rest);
      if (toks.size() >= 2 && toks[0] == "model")
        m.name = rest.substr(rest.find("model") + 6);
      else if (toks.size() >= 2 && toks[0] == "root")
        m.root_node = rest.substr(rest.find("root") + 5);
      continue;
    }
    auto toks = split_ws(line);
    if (toks.empty()) continue;
    std::string head = toks[0];
    if (head == "NAME") {
      if (m.name.empty() && toks.size() >= 2) m.name = line.substr(line.find("NAME") + 5);
      continue;
    }
    if (head == "OBJSENSE") { sec = Objsense; continue; }
    if (head == "ROWS") { sec = Rows; continue; }
    if (head == "COLUMNS") { sec = Columns; continue; }
    if (head == "RHS") { sec = Rhs; continue; }
    if (head == "RANGES") { sec = None; continue; }
    if (head == "BOUNDS") { sec = Bounds; continue; }
    if (head == "ENDATA") { sec = Done; break; }

    switch (sec) {
      case Objsense:
        if (head == "MIN" || head == "MINIMIZE") m.sense = ObjectiveSense::Minimize;
        else if (head == "MAX" || head == "MAXIMIZE") m.sense = ObjectiveSense::Maximize;
        else throw ParseError("unknown objective sense: " + head);
        break;
      case Rows: {
        if (toks.size() != 2) throw ParseError("malformed row line: " + line);
        if (toks[0] == "N") {
          row_index[toks[1]] = -1;
        } else {
          ConstraintSense s = toks[0] == "L"   ? ConstraintSense::LE
                              : toks[0] == "G" ? ConstraintSense::GE
                              : toks[0] == "E" ? ConstraintSense::EQ
                                               : throw ParseError("bad row sense: " + toks[0]);
          row_index[toks[1]] = static_cast<int>(m.constraints.size());
          m.constraints.push_back({toks[1], {}, s, 0.0});
        }
        break;
      }
      case Columns: {
        if (toks.size() >= 3 && toks[1] == "'MARKER'") {
          if (toks[2] == "'INTORG'") in_int = true;
          else if (toks[2] == "'INTEND'") in_int = false;
          else throw ParseError("unknown marker: " + line);
          break;
        }
        if (toks.size() != 3) throw ParseError("malformed column line: " + line);
        auto [it, fresh] = var_index.try_emplace(toks[0], static_cast<int>(m.vars.size()));
        if (fresh) {
          m.vars.push_back({toks[0],
                            in_int ? VarKind::Binary : VarKind::Continuous,
                            0.0,
                            in_int ? 1.0 : std::numeric_limits<double>::infinity()});
          m.objective.push_back(0.0);
        }
        auto row = row_index.find(toks[1]);
        if (row == row_index.end()) throw ParseError("column names unknown row: " + toks[1]);
        double coef = parse_double(toks[2]);
        if (row->second < 0) m.objective[it->second] = coef;
        else m.constraints[row->second].terms.push_back({it->second, coef});
        break;
      }
      case Rhs: {
        if (toks.size() != 3) throw ParseError("malformed rhs line: " + line);
        auto row = row_index.find(toks[1]);
        if (row == row_index.end() || row->second < 0)
          throw ParseError("rhs names unknown row: " + toks[1]);
        m.constraints[row->second].rhs = parse_double(toks[2]);
        break;
      }
      case Bounds: {
        if (toks.size() < 3) throw ParseError("malformed bounds line: " + line);
        auto it = var_index.find(toks[2]);
        if (it == var_index.end()) throw ParseError("bounds name unknown variable: " + toks[2]);
        MilpVar& v = m.vars[it->second];
        if (toks[0] == "BV") {
          v.kind = VarKind::Binary;
          v.lo = 0.0;
          v.hi = 1.0;
        } else if (toks[0] == "UP") {
          v.hi = parse_double(toks.at(3));
        } else if (toks[0] == "LO") {
          v.lo = parse_double(toks.at(3));
        } else if (toks[0] == "FX") {
          v.lo = v.hi = parse_double(toks.at(3));
        } else {
          throw ParseError("unsupported bound type: " + toks[0]);
        }
        break;
      }
      default:
        throw ParseError("unexpected line outside any section: " + line);
    }
  }
  for (auto& c : m.constraints)
    std::sort(c.terms.begin(), c.terms.end(),
              [](const LinTerm& a, const LinTerm& b) { return a.var < b.var; });
  try {
    m.validate();
  } catch (const Error& ex) {
    throw ParseError(ex.what());
  }
  return m;
}

}  // namespace

std::string write_model(const MilpModel& m, ModelFormat format) {
  m.validate();
  return format == ModelFormat::Lp ? write_lp(m) : write_mps(m);
}

MilpModel parse_model(const std::string& text, ModelFormat format) {
  return format == ModelFormat::Lp ? parse_lp(text) : parse_mps(text);
}

}  // namespace xlayer
