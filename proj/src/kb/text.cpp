#include <cctype>
#include <charconv>
#include <unordered_map>

#include "eois/kb.hpp"

namespace eois::kb {

std::string variable_name(VarId v) {
  std::string name(1, static_cast<char>('A' + v % 26));
  if (v >= 26) name += std::to_string(v / 26);
  return name;
}

std::string to_text(const Literal& lit, const BackgroundKB& kb) {
  std::string out = kb.predicate(lit.pred).sig.name;
  if (lit.args.empty()) return out;
  out += '(';
  for (std::size_t k = 0; k < lit.args.size(); ++k) {
    if (k) out += ',';
    const Term& t = lit.args[k];
    out += t.is_var ? variable_name(t.var_id()) : std::to_string(t.value);
  }
  out += ')';
  return out;
}

std::string to_text(const Clause& clause, const BackgroundKB& kb) {
  const Clause c = normalize_variables(clause);
  std::string out = to_text(c.head, kb);
  for (std::size_t i = 0; i < c.body.size(); ++i) {
    out += i == 0 ? " :- " : ", ";
    out += to_text(c.body[i], kb);
  }
  out += '.';
  return out;
}

std::string to_text(const Theory& theory, const BackgroundKB& kb) {
  std::string out;
  for (const Clause& c : theory.clauses) {
    out += to_text(c, kb);
    out += '\n';
  }
  return out;
}

namespace {

class Parser {
 public:
  Parser(std::string_view text, const BackgroundKB& kb) : s_(text), kb_(kb) {}

  Clause clause() {
    Clause c;
    c.head = literal();
    if (c.head.pred != kb_.target())
      fail("clause head must be the target predicate '" + kb_.predicate(kb_.target()).sig.name + "'");
    skip_ws();
    if (consume(":-")) {
      do {
        Literal l = literal();
        if (l.pred == kb_.target()) fail("target predicate in clause body");
        c.body.push_back(std::move(l));
        skip_ws();
      } while (consume(","));
    }
    skip_ws();
    if (!consume(".")) fail("expected '.'");
    skip_ws();
    if (pos_ != s_.size()) fail("trailing characters");
    return c;
  }

 private:
  Literal literal() {
    skip_ws();
    const std::string name = identifier();
    if (name.empty() || !std::islower(static_cast<unsigned char>(name[0])))
      fail("expected predicate name");
    const auto pred = kb_.find_predicate(name);
    if (!pred) fail("unknown predicate '" + name + "'");
    Literal lit;
    lit.pred = *pred;
    skip_ws();
    if (consume("(")) {
      do {
        skip_ws();
        lit.args.push_back(term());
        skip_ws();
      } while (consume(","));
      if (!consume(")")) fail("expected ')'");
    }
    if (lit.args.size() != kb_.predicate(lit.pred).sig.arity())
      fail("wrong number of arguments for '" + name + "'");
    if (!well_sorted(lit, kb_)) fail("constant outside its sort in '" + name + "'");
    return lit;
  }

  Term term() {
    if (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '-')) {
      Value v = 0;
      auto [ptr, ec] = std::from_chars(s_.data() + pos_, s_.data() + s_.size(), v);
      if (ec != std::errc()) fail("bad integer constant");
      pos_ = static_cast<std::size_t>(ptr - s_.data());
      return Term::constant(v);
    }
    const std::string name = identifier();
    if (name.empty() || !(std::isupper(static_cast<unsigned char>(name[0])) || name[0] == '_'))
      fail("expected variable or integer constant");
    auto [it, inserted] = vars_.emplace(name, static_cast<VarId>(vars_.size()));
    return Term::var(it->second);
  }

  std::string identifier() {
    const std::size_t start = pos_;
    while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
      ++pos_;
    return std::string(s_.substr(start, pos_ - start));
  }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool consume(std::string_view tok) {
    if (s_.substr(pos_, tok.size()) != tok) return false;
    pos_ += tok.size();
    return true;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(msg + " at column " + std::to_string(pos_ + 1) + " in '" + std::string(s_) + "'");
  }

  std::string_view s_;
  const BackgroundKB& kb_;
  std::size_t pos_ = 0;
  std::unordered_map<std::string, VarId> vars_;
};

}  // namespace

Clause parse_clause(std::string_view text, const BackgroundKB& kb) {
  return Parser(text, kb).clause();
}

Theory parse_theory(std::string_view text, const BackgroundKB& kb) {
  Theory t;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    const std::size_t first = line.find_first_not_of(" \t\r");
    if (first != std::string_view::npos && line[first] != '%') {
      const std::size_t last = line.find_last_not_of(" \t\r");
      t.clauses.push_back(parse_clause(line.substr(first, last - first + 1), kb));
    }
    start = end + 1;
  }
  return t;
}

}  // namespace eois::kb
