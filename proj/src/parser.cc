#include <cctype>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "losscape/formula.h"

namespace losscape {
namespace {

enum class Tok {
  kIdent, kZero, kOne, kNot, kAnd, kOr, kXor, kImplies, kIff, kLParen,
  kRParen, kEnd
};

struct Token {
  Tok kind;
  std::size_t offset;
  std::string_view text;
};

const char* Spelling(Tok t) {
  switch (t) {
    case Tok::kIdent: return "identifier";
    case Tok::kZero: return "'0'";
    case Tok::kOne: return "'1'";
    case Tok::kNot: return "'!'";
    case Tok::kAnd: return "'&'";
    case Tok::kOr: return "'|'";
    case Tok::kXor: return "'^'";
    case Tok::kImplies: return "'->'";
    case Tok::kIff: return "'<->'";
    case Tok::kLParen: return "'('";
    case Tok::kRParen: return "')'";
    case Tok::kEnd: return "end of input";
  }
  return "?";
}

bool IsIdentStart(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}
bool IsIdentChar(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

std::vector<Token> Lex(std::string_view s) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (true) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    if (i == s.size()) {
      out.push_back({Tok::kEnd, i, {}});
      return out;
    }
    const std::size_t start = i;
    const char c = s[i];
    auto single = [&](Tok t) {
      out.push_back({t, start, s.substr(start, 1)});
      ++i;
    };
    if (IsIdentStart(c)) {
      while (i < s.size() && IsIdentChar(s[i])) ++i;
      out.push_back({Tok::kIdent, start, s.substr(start, i - start)});
    } else if (c == '0' || c == '1') {
      if (i + 1 < s.size() && IsIdentChar(s[i + 1])) {
        throw SyntaxError(start, {"'0'", "'1'"},
                          "malformed constant at offset " +
                              std::to_string(start));
      }
      single(c == '0' ? Tok::kZero : Tok::kOne);
    } else if (c == '!') {
      single(Tok::kNot);
    } else if (c == '&') {
      single(Tok::kAnd);
    } else if (c == '|') {
      single(Tok::kOr);
    } else if (c == '^') {
      single(Tok::kXor);
    } else if (c == '(') {
      single(Tok::kLParen);
    } else if (c == ')') {
      single(Tok::kRParen);
    } else if (s.substr(i, 2) == "->") {
      out.push_back({Tok::kImplies, start, s.substr(start, 2)});
      i += 2;
    } else if (s.substr(i, 3) == "<->") {
      out.push_back({Tok::kIff, start, s.substr(start, 3)});
      i += 3;
    } else {
      throw SyntaxError(start, {},
                        std::string("unexpected character '") + c +
                            "' at offset " + std::to_string(start));
    }
  }
}

class Parser {
 public:
  Parser(std::vector<Token> tokens,
         const std::optional<std::vector<std::string>>& var_order)
      : tokens_(std::move(tokens)) {
    if (var_order) {
      fixed_order_ = true;
      for (const auto& name : *var_order) {
        if (!index_.emplace(name, static_cast<int>(vars_.size())).second) {
          throw InvalidArgument("duplicate variable '" + name +
                                "' in variable order");
        }
        vars_.push_back(name);
      }
    }
  }

  ExprPtr Parse() {
    ExprPtr e = ParseIff();
    Expect(Tok::kEnd, {Tok::kEnd, Tok::kAnd, Tok::kOr, Tok::kXor,
                       Tok::kImplies, Tok::kIff});
    return e;
  }

  std::vector<std::string> TakeVars() { return std::move(vars_); }

 private:
  const Token& Peek() const { return tokens_[pos_]; }

  [[noreturn]] void Fail(std::initializer_list<Tok> expected) const {
    std::vector<std::string> names;
    std::string list;
    for (Tok t : expected) {
      names.emplace_back(Spelling(t));
      if (!list.empty()) list += ", ";
      list += Spelling(t);
    }
    const Token& tok = Peek();
    std::string got = tok.kind == Tok::kEnd ? std::string("end of input")
                                            : "'" + std::string(tok.text) + "'";
    throw SyntaxError(tok.offset, std::move(names),
                      "syntax error at offset " + std::to_string(tok.offset) +
                          ": got " + got + ", expected one of " + list);
  }

  void Expect(Tok kind, std::initializer_list<Tok> expected) {
    if (Peek().kind != kind) Fail(expected);
    ++pos_;
  }

  bool Accept(Tok kind) {
    if (Peek().kind != kind) return false;
    ++pos_;
    return true;
  }

  ExprPtr ParseIff() {
    ExprPtr lhs = ParseImplies();
    while (Accept(Tok::kIff)) lhs = Expr::Binary(Op::kIff, lhs, ParseImplies());
    return lhs;
  }

  // Right-associative.
  ExprPtr ParseImplies() {
    ExprPtr lhs = ParseOr();
    if (Accept(Tok::kImplies)) {
      return Expr::Binary(Op::kImplies, lhs, ParseImplies());
    }
    return lhs;
  }

  ExprPtr ParseOr() {
    ExprPtr lhs = ParseXor();
    while (Accept(Tok::kOr)) lhs = Expr::Binary(Op::kOr, lhs, ParseXor());
    return lhs;
  }

  ExprPtr ParseXor() {
    ExprPtr lhs = ParseAnd();
    while (Accept(Tok::kXor)) lhs = Expr::Binary(Op::kXor, lhs, ParseAnd());
    return lhs;
  }

  ExprPtr ParseAnd() {
    ExprPtr lhs = ParseUnary();
    while (Accept(Tok::kAnd)) lhs = Expr::Binary(Op::kAnd, lhs, ParseUnary());
    return lhs;
  }

  ExprPtr ParseUnary() {
    if (Accept(Tok::kNot)) return Expr::Not(ParseUnary());
    return ParseAtom();
  }

  ExprPtr ParseAtom() {
    const Token& tok = Peek();
    switch (tok.kind) {
      case Tok::kIdent: {
        ++pos_;
        return Expr::Var(Lookup(tok));
      }
      case Tok::kZero:
        ++pos_;
        return Expr::Const(false);
      case Tok::kOne:
        ++pos_;
        return Expr::Const(true);
      case Tok::kLParen: {
        ++pos_;
        ExprPtr inner = ParseIff();
        Expect(Tok::kRParen, {Tok::kRParen, Tok::kAnd, Tok::kOr, Tok::kXor,
                              Tok::kImplies, Tok::kIff});
        return inner;
      }
      default:
        Fail({Tok::kIdent, Tok::kZero, Tok::kOne, Tok::kLParen, Tok::kNot});
    }
  }

  int Lookup(const Token& tok) {
    std::string name(tok.text);
    auto it = index_.find(name);
    if (it != index_.end()) return it->second;
    if (fixed_order_) {
      throw UnknownVariable("variable '" + name + "' at offset " +
                            std::to_string(tok.offset) +
                            " is not in the variable order");
    }
    const int idx = static_cast<int>(vars_.size());
    index_.emplace(name, idx);
    vars_.push_back(std::move(name));
    return idx;
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  bool fixed_order_ = false;
  std::unordered_map<std::string, int> index_;
  std::vector<std::string> vars_;
};

}  // namespace

Formula parse(std::string_view text,
              const std::optional<std::vector<std::string>>& var_order) {
  Parser parser(Lex(text), var_order);
  ExprPtr root = parser.Parse();
  std::vector<std::string> vars = parser.TakeVars();
  if (vars.empty()) {
    throw SyntaxError(0, {"identifier"}, "formula has no variables");
  }
  return Formula(std::move(root), std::move(vars));
}

}  // namespace losscape
