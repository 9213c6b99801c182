#include "agentcheck/parser.hpp"

#include <cctype>
#include <charconv>
#include <functional>
#include <set>
#include <unordered_map>

#include "agentcheck/rewrite.hpp"

namespace agentcheck {

std::string to_string(const Diagnostic& d) {
  return std::to_string(d.pos.line) + ":" + std::to_string(d.pos.column) +
         (d.kind == Diagnostic::Kind::Syntax ? ": syntax error: "
                                             : ": semantic error: ") +
         d.message;
}

namespace {

enum class Tok {
  Ident,
  Int,
  Decimal,
  String,
  LAngle2,   // <<
  RAngle2,   // >>
  Less,
  LessEq,
  Equal,
  GreaterEq,
  Greater,
  Arrow,
  Bang,
  Amp,
  Pipe,
  LParen,
  RParen,
  LBracket,
  RBracket,
  Comma,
  Colon,
  Dot,
  DotDot,
  End
};

struct Token {
  Tok kind;
  std::string text;
  SourcePos pos;
  std::vector<std::string> notes;  // `# note:` comments directly before it
};

std::string describe(const Token& t) {
  if (t.kind == Tok::End) return "end of input";
  return "'" + t.text + "'";
}

bool ident_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}
bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run(std::vector<Diagnostic>& errors) {
    std::vector<Token> out;
    std::vector<std::string> notes;
    while (true) {
      skip_space(notes);
      SourcePos pos = pos_;
      if (i_ >= src_.size()) {
        out.push_back({Tok::End, "", pos, std::move(notes)});
        return out;
      }
      Token t{Tok::End, "", pos, {}};
      if (!lex_one(t)) {
        errors.push_back({Diagnostic::Kind::Syntax, pos,
                          std::string("unexpected character '") + src_[i_] + "'"});
        advance(1);
        continue;
      }
      t.notes = std::move(notes);
      notes.clear();
      out.push_back(std::move(t));
    }
  }

 private:
  char at(std::size_t k) const { return k < src_.size() ? src_[k] : '\0'; }

  void advance(std::size_t n) {
    for (std::size_t k = 0; k < n && i_ < src_.size(); ++k, ++i_) {
      if (src_[i_] == '\n') {
        ++pos_.line;
        pos_.column = 1;
      } else {
        ++pos_.column;
      }
    }
  }

  void skip_space(std::vector<std::string>& notes) {
    while (i_ < src_.size()) {
      char c = src_[i_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        advance(1);
      } else if (c == '#') {
        std::size_t end = src_.find('\n', i_);
        if (end == std::string_view::npos) end = src_.size();
        std::string_view body = src_.substr(i_ + 1, end - i_ - 1);
        while (!body.empty() && body.front() == ' ') body.remove_prefix(1);
        if (body.starts_with("note:")) {
          body.remove_prefix(5);
          while (!body.empty() && body.front() == ' ') body.remove_prefix(1);
          notes.emplace_back(body);
        }
        advance(end - i_);
      } else {
        return;
      }
    }
  }

  bool lex_one(Token& t) {
    char c = src_[i_];
    auto sym = [&](Tok k, std::size_t n) {
      t.kind = k;
      t.text = std::string(src_.substr(i_, n));
      advance(n);
      return true;
    };
    if (ident_start(c)) {
      std::size_t j = i_ + 1;
      // Dashes are allowed inside identifiers (requirement ids, hyphenated
      // atom names) but never at the end, so `p->q` still lexes as p, ->, q.
      while (ident_char(at(j)) || (at(j) == '-' && ident_char(at(j + 1)))) ++j;
      return sym(Tok::Ident, j - i_);
    }
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '-' && std::isdigit(static_cast<unsigned char>(at(i_ + 1))))) {
      std::size_t j = i_ + 1;
      while (std::isdigit(static_cast<unsigned char>(at(j)))) ++j;
      bool decimal = false;
      if (at(j) == '.' && std::isdigit(static_cast<unsigned char>(at(j + 1)))) {
        decimal = true;
        ++j;
        while (std::isdigit(static_cast<unsigned char>(at(j)))) ++j;
      }
      if ((at(j) == 'e' || at(j) == 'E') &&
          (std::isdigit(static_cast<unsigned char>(at(j + 1))) ||
           ((at(j + 1) == '-' || at(j + 1) == '+') &&
            std::isdigit(static_cast<unsigned char>(at(j + 2)))))) {
        decimal = true;
        j += 2;
        while (std::isdigit(static_cast<unsigned char>(at(j)))) ++j;
      }
      return sym(decimal ? Tok::Decimal : Tok::Int, j - i_);
    }
    if (c == '"') {
      std::string text;
      std::size_t j = i_ + 1;
      while (j < src_.size() && src_[j] != '"' && src_[j] != '\n') {
        if (src_[j] == '\\' && j + 1 < src_.size()) ++j;
        text += src_[j++];
      }
      if (at(j) != '"') return false;
      t.kind = Tok::String;
      t.text = std::move(text);
      advance(j + 1 - i_);
      return true;
    }
    switch (c) {
      case '<':
        if (at(i_ + 1) == '<') return sym(Tok::LAngle2, 2);
        if (at(i_ + 1) == '=') return sym(Tok::LessEq, 2);
        return sym(Tok::Less, 1);
      case '>':
        if (at(i_ + 1) == '>') return sym(Tok::RAngle2, 2);
        if (at(i_ + 1) == '=') return sym(Tok::GreaterEq, 2);
        return sym(Tok::Greater, 1);
      case '=': return sym(Tok::Equal, 1);
      case '-':
        if (at(i_ + 1) == '>') return sym(Tok::Arrow, 2);
        return false;
      case '!': return sym(Tok::Bang, 1);
      case '&': return sym(Tok::Amp, 1);
      case '|': return sym(Tok::Pipe, 1);
      case '(': return sym(Tok::LParen, 1);
      case ')': return sym(Tok::RParen, 1);
      case '[': return sym(Tok::LBracket, 1);
      case ']': return sym(Tok::RBracket, 1);
      case ',': return sym(Tok::Comma, 1);
      case ':': return sym(Tok::Colon, 1);
      case '.':
        if (at(i_ + 1) == '.') return sym(Tok::DotDot, 2);
        return sym(Tok::Dot, 1);
      default: return false;
    }
  }

  std::string_view src_;
  std::size_t i_ = 0;
  SourcePos pos_;
};

const std::set<std::string, std::less<>> kReserved = {
    "A",      "E",      "X",    "F",     "G",           "U",
    "K",      "ONCE",   "supp", "forall", "exists",     "in",
    "true",   "false",  "DIAG", "RESIL", "requirement", "informal"};

bool is_macro_name(std::string_view s) {
  if (s.size() < 2) return false;
  for (char c : s)
    if (!std::isupper(static_cast<unsigned char>(c))) return false;
  return true;
}

struct Backtrack {};

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

  const Token& peek(std::size_t k = 0) const {
    return toks_[std::min(i_ + k, toks_.size() - 1)];
  }
  bool at_end() const { return peek().kind == Tok::End; }
  std::size_t mark() const { return i_; }
  void reset(std::size_t m) { i_ = m; }

  const Token& take() {
    const Token& t = peek();
    if (t.kind != Tok::End) ++i_;
    return t;
  }

  bool is_word(std::string_view w, std::size_t k = 0) const {
    return peek(k).kind == Tok::Ident && peek(k).text == w;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError({Diagnostic::Kind::Syntax, peek().pos, msg});
  }

  const Token& expect(Tok kind, std::string_view what) {
    if (peek().kind != kind)
      fail("expected " + std::string(what) + ", found " + describe(peek()));
    return take();
  }

  void expect_word(std::string_view w) {
    if (!is_word(w))
      fail("expected '" + std::string(w) + "', found " + describe(peek()));
    take();
  }

  // Identifier or non-negative integer (agent ids may be numeric).
  std::string name(std::string_view what) {
    const Token& t = peek();
    if ((t.kind == Tok::Ident && !kReserved.contains(t.text)) ||
        (t.kind == Tok::Int && t.text.front() != '-'))
      return take().text;
    fail("expected " + std::string(what) + ", found " + describe(t));
  }

  std::int64_t integer(std::string_view what) {
    const Token& t = expect(Tok::Int, what);
    std::int64_t v = 0;
    auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
    if (ec != std::errc{})
      throw ParseError({Diagnostic::Kind::Syntax, t.pos, "integer out of range"});
    return v;
  }

  Formula formula() { return implication(); }

  Formula implication() {
    SourcePos pos = peek().pos;
    Formula lhs = disjunction();
    if (peek().kind == Tok::Arrow) {
      take();
      return record(make_implies(lhs, implication()), pos);
    }
    return lhs;
  }

  Formula disjunction() {
    SourcePos pos = peek().pos;
    Formula f = conjunction();
    while (peek().kind == Tok::Pipe) {
      take();
      f = record(make_or(f, conjunction()), pos);
    }
    return f;
  }

  Formula conjunction() {
    SourcePos pos = peek().pos;
    Formula f = unary();
    while (peek().kind == Tok::Amp) {
      take();
      f = record(make_and(f, unary()), pos);
    }
    return f;
  }

  Formula unary() {
    const Token& t = peek();
    SourcePos pos = t.pos;
    switch (t.kind) {
      case Tok::Bang:
        take();
        return record(make_not(unary()), pos);
      case Tok::LParen: {
        take();
        Formula f = formula();
        expect(Tok::RParen, "')'");
        return f;
      }
      case Tok::LAngle2: return coalition();
      case Tok::Int:
        fail("expected a formula, found " + describe(t));
      case Tok::Ident: break;
      default: fail("expected a formula, found " + describe(t));
    }
    const std::string& w = t.text;
    if (w == "true") {
      take();
      return record(make_true(), pos);
    }
    if (w == "false") {
      take();
      return record(make_false(), pos);
    }
    if (w == "A" || w == "E") {
      take();
      PathBody body = path();
      return record(w == "A" ? make_all(std::move(body))
                             : make_exists(std::move(body)),
                    pos);
    }
    if (w == "K") {
      take();
      expect(Tok::LBracket, "'[' after K");
      std::string agent = name("agent name");
      expect(Tok::RBracket, "']'");
      return record(make_knows(agent, unary()), pos);
    }
    if (w == "ONCE") {
      take();
      return record(make_once(unary()), pos);
    }
    if (w == "supp") {
      take();
      expect(Tok::LParen, "'(' after supp");
      std::string agent = name("agent name");
      expect(Tok::Colon, "':'");
      std::string strategy = name("strategy name");
      expect(Tok::RParen, "')'");
      return record(make_suppose(agent, strategy, unary()), pos);
    }
    if (w == "forall" || w == "exists") return quantifier();
    if (w == "DIAG" || w == "RESIL") {
      take();
      expect(Tok::LParen, "'('");
      std::string agent = name("agent name");
      expect(Tok::Comma, "','");
      Formula arg = formula();
      expect(Tok::RParen, "')'");
      return record(make_macro(w == "DIAG" ? MacroKind::Diagnosability
                                           : MacroKind::Resilience,
                               agent, arg),
                    pos);
    }
    if (kReserved.contains(w)) fail("unexpected keyword '" + w + "'");
    if (is_macro_name(w) && peek(1).kind == Tok::LParen)
      throw ParseError(
          {Diagnostic::Kind::Semantic, pos, "unknown macro '" + w + "'"});
    std::string id = take().text;
    if (auto op = cmp_op(peek().kind)) {
      take();
      Term rhs;
      if (peek().kind == Tok::Int)
        rhs = integer("integer");
      else if (peek().kind == Tok::Ident && !kReserved.contains(peek().text))
        rhs = take().text;
      else
        fail("expected integer or variable after comparison, found " +
             describe(peek()));
      return record(make_compare(id, *op, rhs), pos);
    }
    std::vector<Term> args;
    if (peek().kind == Tok::LParen) {
      take();
      do {
        if (peek().kind == Tok::Int)
          args.emplace_back(integer("integer"));
        else
          args.emplace_back(name("atom argument"));
      } while (peek().kind == Tok::Comma && (take(), true));
      expect(Tok::RParen, "')'");
    }
    return record(make_atom(id, std::move(args)), pos);
  }

  static std::optional<CmpOp> cmp_op(Tok k) {
    switch (k) {
      case Tok::Less: return CmpOp::Less;
      case Tok::LessEq: return CmpOp::LessEq;
      case Tok::Equal: return CmpOp::Equal;
      case Tok::GreaterEq: return CmpOp::GreaterEq;
      case Tok::Greater: return CmpOp::Greater;
      default: return std::nullopt;
    }
  }

  Formula quantifier() {
    SourcePos pos = peek().pos;
    bool universal = take().text == "forall";
    std::string var = name("variable name");
    expect_word("in");
    std::int64_t lo = 0, hi = 0;
    std::string domain;
    if (peek().kind == Tok::Int) {
      lo = integer("lower bound");
      expect(Tok::DotDot, "'..'");
      hi = integer("upper bound");
    } else if (peek().kind == Tok::Ident && !kReserved.contains(peek().text)) {
      domain = take().text;
    } else {
      fail("expected range 'lo..hi' or feature name, found " + describe(peek()));
    }
    expect(Tok::Dot, "'.'");
    Formula body = formula();
    return record(Formula(FormulaNode{node::Quantifier{universal, var, lo, hi,
                                                       domain, body}}),
                  pos);
  }

  Formula coalition() {
    SourcePos pos = take().pos;
    std::vector<std::string> agents;
    if (peek().kind != Tok::RAngle2) {
      agents.push_back(name("agent name"));
      while (peek().kind == Tok::Comma) {
        take();
        agents.push_back(name("agent name"));
      }
    }
    expect(Tok::RAngle2, "'>>'");
    std::optional<Bound> bound;
    if (peek().kind == Tok::LBracket) {
      take();
      if (is_word("P")) {
        take();
        expect(Tok::GreaterEq, "'>='");
        const Token& t = peek();
        if (t.kind != Tok::Decimal && t.kind != Tok::Int)
          fail("expected probability, found " + describe(t));
        take();
        double p = 0;
        auto [e, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), p);
        if (ec != std::errc{})
          throw ParseError({Diagnostic::Kind::Syntax, t.pos, "bad probability"});
        bound = ProbabilityBound{p};
      } else if (is_word("compl")) {
        take();
        expect(Tok::LessEq, "'<='");
        std::int64_t c = integer("complexity bound");
        if (c < 0)
          throw ParseError({Diagnostic::Kind::Semantic, pos,
                            "complexity bound must be non-negative"});
        bound = ComplexityBound{static_cast<std::uint32_t>(c)};
      } else {
        fail("expected 'P>=' or 'compl<=' bound, found " + describe(peek()));
      }
      expect(Tok::RBracket, "']'");
    }
    PathBody body = path();
    return record(make_coalition(std::move(agents), std::move(body), bound), pos);
  }

  PathBody path() {
    if (peek().kind == Tok::LParen) {
      std::size_t m = mark();
      try {
        take();
        PathBody b = path();
        if (peek().kind != Tok::RParen) throw Backtrack{};
        take();
        return b;
      } catch (const Backtrack&) {
        reset(m);
      } catch (const ParseError&) {
        reset(m);
      }
    }
    if (is_word("X")) {
      take();
      return next(unary());
    }
    if (is_word("F")) {
      take();
      if (peek().kind == Tok::LessEq) {
        take();
        std::int64_t k = integer("step bound");
        if (k < 0)
          throw ParseError({Diagnostic::Kind::Semantic, peek().pos,
                            "step bound must be non-negative"});
        return finally_within(static_cast<std::uint32_t>(k), unary());
      }
      if (is_word("G")) {
        take();
        return finally_globally(unary());
      }
      return finally(unary());
    }
    if (is_word("G")) {
      take();
      if (is_word("F")) {
        take();
        return globally_finally(unary());
      }
      return globally(unary());
    }
    Formula hold = unary();
    if (!is_word("U"))
      fail("expected path operator (X, F, G, F<=k, F G, G F or U), found " +
           describe(peek()));
    take();
    return until(hold, unary());
  }

  Formula record(Formula f, SourcePos pos) {
    positions_.emplace(f.id(), pos);
    return f;
  }

  SourcePos position_of(const void* node, SourcePos fallback) const {
    auto it = positions_.find(node);
    return it == positions_.end() ? fallback : it->second;
  }

  // Parses a complete formula and checks its invariants.
  Formula checked_formula() {
    SourcePos start = peek().pos;
    Formula f = formula();
    try {
      validate(f);
    } catch (const FormulaError& e) {
      throw ParseError({Diagnostic::Kind::Semantic,
                        position_of(e.node(), start), e.what()});
    }
    return f;
  }

  // Skips to the next `requirement` keyword.
  void recover() {
    while (!at_end() && !is_word("requirement")) take();
  }

 private:
  std::vector<Token> toks_;
  std::size_t i_ = 0;
  std::unordered_map<const void*, SourcePos> positions_;
};

}  // namespace

Formula parse_formula(std::string_view source) {
  std::vector<Diagnostic> lex_errors;
  auto tokens = Lexer(source).run(lex_errors);
  if (!lex_errors.empty()) throw ParseError(lex_errors.front());
  Parser p(std::move(tokens));
  Formula f = p.checked_formula();
  if (!p.at_end()) p.fail("unexpected " + describe(p.peek()) + " after formula");
  return f;
}

SpecParseResult parse_spec(std::string_view source) {
  SpecParseResult result;
  auto tokens = Lexer(source).run(result.errors);
  Parser p(std::move(tokens));
  std::unordered_map<std::string, SourcePos> seen;
  while (!p.at_end()) {
    try {
      const Token& kw = p.peek();
      p.expect_word("requirement");
      Requirement r;
      r.pos = kw.pos;
      for (std::size_t k = 0; k < kw.notes.size(); ++k)
        r.note += (k ? "\n" : "") + kw.notes[k];
      SourcePos id_pos = p.peek().pos;
      // Any word may serve as an id here, keywords such as E included.
      if (p.peek().kind == Tok::Ident)
        r.id = p.take().text;
      else
        r.id = p.name("requirement id");
      r.text = p.expect(Tok::String, "quoted requirement text").text;
      p.expect(Tok::Colon, "':'");
      if (p.is_word("informal")) {
        p.take();
        r.status = RequirementStatus::Informal;
      } else {
        r.formula = p.checked_formula();
        r.status = RequirementStatus::Formalized;
      }
      if (!p.at_end() && !p.is_word("requirement"))
        p.fail("unexpected " + describe(p.peek()) + " after requirement body");
      if (auto [it, fresh] = seen.emplace(r.id, id_pos); !fresh) {
        result.errors.push_back(
            {Diagnostic::Kind::Semantic, id_pos,
             "duplicate requirement id '" + r.id + "' (first defined at " +
                 std::to_string(it->second.line) + ":" +
                 std::to_string(it->second.column) + ")"});
        continue;
      }
      result.requirements.push_back(std::move(r));
    } catch (const ParseError& e) {
      result.errors.push_back(e.diagnostic());
      p.recover();
    }
  }
  return result;
}

std::string print_spec(const std::vector<Requirement>& requirements) {
  std::string out;
  for (const auto& r : requirements) {
    if (!out.empty()) out += "\n";
    out += "# status: ";
    out += r.status == RequirementStatus::Formalized ? "formalized" : "informal";
    out += "\n";
    std::size_t start = 0;
    while (!r.note.empty() && start <= r.note.size()) {
      std::size_t end = r.note.find('\n', start);
      if (end == std::string::npos) end = r.note.size();
      out += "# note: " + r.note.substr(start, end - start) + "\n";
      start = end + 1;
    }
    std::string text;
    for (char c : r.text) {
      if (c == '"' || c == '\\') text += '\\';
      text += c;
    }
    out += "requirement " + r.id + " \"" + text + "\":\n  ";
    out += r.formula ? print(*r.formula) : "informal";
    out += "\n";
  }
  return out;
}

}  // namespace agentcheck
