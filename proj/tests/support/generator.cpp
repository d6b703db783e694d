#include "generator.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace clonevet::testkit {

namespace {

Tok P(std::string s) { return {std::move(s), Tag::Plain}; }
Tok V(std::string s) { return {std::move(s), Tag::Variable}; }
Tok I(int v) { return {std::to_string(v), Tag::IntLiteral}; }
Tok S(const std::string& s) { return {"\"" + s + "\"", Tag::StringLiteral}; }

std::vector<Tok> split_plain(const std::string& s) {
  std::vector<Tok> out;
  std::istringstream in(s);
  std::string w;
  while (in >> w) out.push_back(P(w));
  return out;
}

void append(std::vector<Tok>& out, const std::vector<Tok>& more) {
  out.insert(out.end(), more.begin(), more.end());
}

}  // namespace

std::vector<Tok> GenMethod::tokens() const {
  std::vector<Tok> out = header;
  for (const auto& s : body) append(out, s.toks);
  out.push_back(P("}"));
  return out;
}

std::string GenMethod::text() const {
  std::string out;
  for (const Tok& t : tokens()) {
    if (!out.empty()) out += ' ';
    out += t.text;
  }
  return out;
}

std::vector<std::string> GenMethod::expected_actions() const {
  std::vector<std::string> out;
  for (const auto& s : body) out.insert(out.end(), s.calls.begin(), s.calls.end());
  return out;
}

std::string Generator::fresh_var() { return "v" + std::to_string(var_counter_++); }

Statement Generator::random_statement(std::vector<std::string>& ints) {
  Statement s;
  auto some_int = [&] { return ints[pick(ints.size())]; };
  auto lit = [&] { return I(static_cast<int>(2 + literal_counter_++ % 97)); };
  switch (pick(9)) {
    case 0: {
      const std::string n = fresh_var();
      s.toks = {P("int"), V(n), P("="), V(some_int()), P("+"), lit(), P(";")};
      ints.push_back(n);
      break;
    }
    case 1:
      s.toks = {V(some_int()), P("="), V(some_int()), P("*"), lit(), P(";")};
      break;
    case 2: {
      const std::string a = some_int();
      s.toks = {P("if"), P("("), V(a), P(">"), lit(), P(")"), P("{"),
                V(a), P("="), V(a), P("-"), lit(), P(";"), P("}")};
      break;
    }
    case 3: {
      const std::string i = fresh_var();
      s.toks = {P("for"), P("("), P("int"), V(i), P("="), I(0), P(";"), V(i), P("<"),
                V(some_int()), P(";"), V(i), P("++"), P(")"), P("{"), P("total"), P("+="),
                P("weigh"), P("("), V(i), P(")"), P(";"), P("}")};
      s.calls = {"weigh"};
      break;
    }
    case 4: {
      const std::string n = fresh_var();
      s.toks = {P("String"), V(n), P("="), S("k" + std::to_string(literal_counter_++)), P("+"),
                V(some_int()), P(";")};
      break;
    }
    case 5:
      s.toks = {V(some_int()), P("="), P("Math"), P("."), P("max"), P("("), V(some_int()), P(","),
                lit(), P(")"), P(";")};
      s.calls = {"max"};
      break;
    case 6:
      s.toks = {P("this"), P("."), P("count"), P("+="), V(some_int()), P(";")};
      s.calls = {"count"};
      break;
    case 7: {
      const std::string n = fresh_var();
      s.toks = {P("int"), V(n), P("="), V("arr"), P("["), V(some_int()), P("]"), P(";")};
      s.calls = {"ArrayAccess"};
      ints.push_back(n);
      break;
    }
    default: {
      const std::string n = fresh_var();
      s.toks = {P("int"), V(n), P("="), V("arr"), P("["), V(some_int()), P("+"), I(1), P("]"), P(";")};
      s.calls = {"ArrayAccessBinary"};
      ints.push_back(n);
      break;
    }
  }
  return s;
}

GenMethod Generator::base_method(const std::string& name) {
  GenMethod m;
  m.header = {P("public"), P("int"), P(name), P("("), P("int"), V("p0"), P(","), P("int"), V("p1"),
              P(","), P("int"), P("["), P("]"), V("arr"), P(","), P("StringBuilder"), V("sb"), P(",")};
  append(m.header, split_plain("java . util . List < Integer >"));
  append(m.header, {V("list"), P(")"), P("{")});
  std::vector<std::string> ints = {"p0", "p1"};
  Statement total;
  total.toks = {P("int"), P("total"), P("="), I(0), P(";")};
  m.body.push_back(total);

  const std::vector<std::pair<std::string, std::vector<Tok>>> movable = {
      {"append", {V("sb"), P("."), P("append"), P("("), S("a" + std::to_string(literal_counter_++)), P(")"), P(";")}},
      {"add", {V("list"), P("."), P("add"), P("("), V("p0"), P(")"), P(";")}},
      {"log", {P("log"), P("("), S("m" + std::to_string(literal_counter_++)), P(")"), P(";")}},
      {"notifyAll", {P("this"), P("."), P("notifyAll"), P("("), P(")"), P(";")}},
      {"ensureCapacity", {V("sb"), P("."), P("ensureCapacity"), P("("), V("p1"), P(")"), P(";")}},
  };
  std::vector<std::size_t> order(movable.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), rng_);
  const std::size_t n_movable = 2 + pick(2);
  const std::size_t n_other = 4 + pick(5);
  std::vector<Statement> stmts;
  for (std::size_t i = 0; i < n_other; ++i) stmts.push_back(random_statement(ints));
  for (std::size_t i = 0; i < n_movable; ++i) {
    Statement s;
    s.toks = movable[order[i]].second;
    s.calls = {movable[order[i]].first};
    s.movable_call = true;
    const std::size_t at = pick(stmts.size() + 1);
    stmts.insert(stmts.begin() + static_cast<std::ptrdiff_t>(at), s);
  }
  for (auto& s : stmts) m.body.push_back(std::move(s));
  Statement ret;
  ret.toks = {P("return"), P("total"), P("+"), V(ints.back()), P(";")};
  m.body.push_back(ret);
  return m;
}

std::string Generator::layout_variant(const GenMethod& m) {
  static const char* comments[] = {"/* note */", "// trailing\n", "/** doc\n * more */", "/*x*/"};
  static const char* spaces[] = {" ", "  ", "\t", "\n", "\n    ", "\r\n\t"};
  std::string out;
  if (pick(2)) out += "// leading comment\n";
  bool first = true;
  for (const Tok& t : m.tokens()) {
    if (!first) {
      out += spaces[pick(6)];
      if (pick(6) == 0) {
        out += comments[pick(4)];
        out += spaces[pick(6)];
      }
    }
    first = false;
    out += t.text;
  }
  if (pick(2)) out += "  // end";
  return out;
}

GenMethod Generator::alpha_rename(const GenMethod& m) {
  std::map<std::string, std::string> names, ints, strs;
  const int salt = static_cast<int>(pick(1000));
  auto rename = [&](std::vector<Tok>& toks) {
    for (Tok& t : toks) {
      switch (t.tag) {
        case Tag::Variable: {
          auto [it, fresh] = names.try_emplace(t.text, "");
          if (fresh) it->second = "r" + std::to_string(salt) + "_" + std::to_string(names.size());
          t.text = it->second;
          break;
        }
        case Tag::IntLiteral: {
          auto [it, fresh] = ints.try_emplace(t.text, "");
          if (fresh) it->second = std::to_string(100000 + salt * 1000 + static_cast<int>(ints.size()));
          t.text = it->second;
          break;
        }
        case Tag::StringLiteral: {
          auto [it, fresh] = strs.try_emplace(t.text, "");
          if (fresh) it->second = "\"z" + std::to_string(salt) + "_" + std::to_string(strs.size()) + "\"";
          t.text = it->second;
          break;
        }
        case Tag::Plain: break;
      }
    }
  };
  GenMethod out = m;
  rename(out.header);
  for (auto& s : out.body) rename(s.toks);
  return out;
}

GenMethod Generator::swap_calls(const GenMethod& m) {
  GenMethod out = m;
  for (std::size_t i = 0; i < out.body.size(); ++i) {
    if (!out.body[i].movable_call) continue;
    for (std::size_t j = i + 1; j < out.body.size(); ++j) {
      if (out.body[j].movable_call && out.body[j].calls != out.body[i].calls) {
        std::swap(out.body[i], out.body[j]);
        return out;
      }
    }
  }
  return out;
}

GenMethod Generator::add_statement(const GenMethod& m) {
  GenMethod out = m;
  Statement s;
  s.toks = {P("int"), V(fresh_var()), P("="), I(7), P(";")};
  // Never after the return statement.
  const std::size_t at = 1 + pick(out.body.size() - 1);
  out.body.insert(out.body.begin() + static_cast<std::ptrdiff_t>(at), s);
  return out;
}

ClassFile make_class(const std::string& class_name, const std::vector<std::string>& methods) {
  ClassFile f;
  f.content = "package fixture;\n\npublic class " + class_name + " {\n";
  int line = 4;
  for (const std::string& m : methods) {
    f.content += "\n";
    ++line;
    const int start = line;
    f.content += m;
    f.content += "\n";
    line += static_cast<int>(std::count(m.begin(), m.end(), '\n')) + 1;
    f.spans.emplace_back(start, line - 1);
  }
  f.content += "}\n";
  return f;
}

}  // namespace clonevet::testkit
