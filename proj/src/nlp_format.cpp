#include "arcsearch/nlp_format.hpp"

#include <fstream>
#include <sstream>

#include "arcsearch/errors.hpp"
#include "arcsearch/expr.hpp"

namespace arcsearch {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_number(const std::string& tok, int line) {
  if (tok == "inf" || tok == "+inf") return std::numeric_limits<double>::infinity();
  if (tok == "-inf") return -std::numeric_limits<double>::infinity();
  size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(tok, &used);
  } catch (const std::exception&) {
    throw ParseError("expected a number, got '" + tok + "'", line);
  }
  if (used != tok.size()) throw ParseError("expected a number, got '" + tok + "'", line);
  return v;
}

Vec parse_vector(std::istringstream& in, int line) {
  std::vector<double> vals;
  std::string tok;
  while (in >> tok) vals.push_back(parse_number(tok, line));
  return Eigen::Map<Vec>(vals.data(), static_cast<Eigen::Index>(vals.size()));
}

// "a >= b" -> "(a) - (b)", "a <= b" -> "(b) - (a)", "a = b" -> "(a) - (b)".
std::string normalize(const std::string& body, bool equality, int line) {
  const char* ops[] = {">=", "<=", "="};
  for (const char* op : ops) {
    const auto pos = body.find(op);
    if (pos == std::string::npos) continue;
    const std::string lhs = trim(body.substr(0, pos));
    const std::string rhs = trim(body.substr(pos + std::string(op).size()));
    if (lhs.empty() || rhs.empty()) throw ParseError("incomplete relation", line);
    const std::string sop(op);
    if (equality && sop != "=") throw ParseError("equality rows take '='", line);
    if (!equality && sop == "=") throw ParseError("inequality rows take '>=' or '<='", line);
    if (sop == "<=") return "(" + rhs + ") - (" + lhs + ")";
    return "(" + lhs + ") - (" + rhs + ")";
  }
  return body;
}

}  // namespace

NlpSpec parse_nlp(const std::string& text) {
  NlpSpec spec;
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  std::string pending;
  int pending_line = 0;

  auto handle = [&](const std::string& line, int ln) {
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    std::string rest;
    std::getline(ls, rest);
    rest = trim(rest);
    auto need_n = [&] {
      if (spec.n <= 0) throw ParseError("'n' must come before '" + key + "'", ln);
    };
    auto check_len = [&](const Vec& v) {
      if (v.size() != spec.n)
        throw ParseError(key + " needs " + std::to_string(spec.n) + " values", ln);
      return v;
    };
    if (key == "name") {
      if (rest.empty()) throw ParseError("empty name", ln);
      spec.name = rest;
    } else if (key == "n") {
      const double v = parse_number(rest, ln);
      if (v < 1 || v != static_cast<int>(v)) throw ParseError("n must be a positive integer", ln);
      spec.n = static_cast<int>(v);
    } else if (key == "minimize") {
      need_n();
      if (!spec.objective.empty()) throw ParseError("duplicate objective", ln);
      spec.objective = rest;
    } else if (key == "eq") {
      need_n();
      spec.equalities.push_back(normalize(rest, true, ln));
    } else if (key == "ineq") {
      need_n();
      spec.inequalities.push_back(normalize(rest, false, ln));
    } else if (key == "bound") {
      need_n();
      std::istringstream bs(rest);
      std::string i, lo, hi, extra;
      if (!(bs >> i >> lo >> hi) || (bs >> extra))
        throw ParseError("bound takes: index lo hi", ln);
      NlpSpec::Bound b;
      const double idx = parse_number(i, ln);
      if (idx < 1 || idx > spec.n || idx != static_cast<int>(idx))
        throw ParseError("bound index out of range", ln);
      b.index = static_cast<int>(idx) - 1;
      b.lo = parse_number(lo, ln);
      b.hi = parse_number(hi, ln);
      if (!(b.lo < b.hi)) throw ParseError("bound needs lo < hi", ln);
      spec.bounds.push_back(b);
    } else if (key == "start" || key == "interior" || key == "solution") {
      need_n();
      std::istringstream vs(rest);
      const Vec v = check_len(parse_vector(vs, ln));
      (key == "start" ? spec.start : key == "interior" ? spec.interior : spec.solution) = v;
    } else if (key == "objective_ref") {
      spec.reference_objective = parse_number(rest, ln);
    } else {
      throw ParseError("unknown key '" + key + "'", ln);
    }
    // Expressions are checked eagerly so errors carry the line number.
    if (key == "minimize" || key == "eq" || key == "ineq") {
      try {
        expr::parse(key == "minimize" ? spec.objective
                    : key == "eq"     ? spec.equalities.back()
                                      : spec.inequalities.back(),
                    spec.n);
      } catch (const ParseError& e) {
        throw ParseError(e.what(), ln);
      }
    }
  };

  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = raw.substr(0, raw.find('#'));
    line = trim(line);
    const bool cont = !line.empty() && line.back() == '\\';
    if (cont) line.pop_back();
    if (pending.empty()) pending_line = lineno;
    pending += (pending.empty() ? "" : " ") + trim(line);
    if (cont) continue;
    if (!trim(pending).empty()) handle(trim(pending), pending_line);
    pending.clear();
  }
  if (!trim(pending).empty()) handle(trim(pending), pending_line);

  if (spec.n <= 0) throw ParseError("missing 'n'", lineno);
  if (spec.objective.empty()) throw ParseError("missing 'minimize'", lineno);
  if (spec.name.empty()) spec.name = "unnamed";
  return spec;
}

NlpSpec load_nlp_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ParseError("cannot open " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  try {
    return parse_nlp(ss.str());
  } catch (const ParseError& e) {
    throw ParseError(path + ":" + std::to_string(e.line()) + ": " + e.what(), e.line());
  }
}

NlpProblem build_problem(const NlpSpec& spec) {
  const int n = spec.n;
  ProblemBuilder b(spec.name, n);
  b.objective(expr::compile(expr::parse(spec.objective, n), n));
  for (const auto& e : spec.equalities) b.equality(expr::compile(expr::parse(e, n), n));
  for (const auto& e : spec.inequalities) b.inequality(expr::compile(expr::parse(e, n), n));
  for (const auto& bd : spec.bounds) {
    if (std::isfinite(bd.lo)) b.lower_bound(bd.index, bd.lo);
    if (std::isfinite(bd.hi)) b.upper_bound(bd.index, bd.hi);
  }
  return b.build();
}

}  // namespace arcsearch
