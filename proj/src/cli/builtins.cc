#include "losscape/cli/builtins.h"

#include <charconv>

namespace losscape::cli {
namespace {

struct Builtin {
  const char* name;
  const char* text;
  std::vector<std::string> order;
};

const std::vector<Builtin>& Table() {
  static const std::vector<Builtin> table = {
      {"traffic", "!r | !g", {"r", "g"}},
      {"xor", "(a & !b) | (!a & b)", {"a", "b"}},
      {"hole",
       "(!a & !b) | (!a & c) | (b & c) | (a & b) | (a & !c) | (!b & !c)",
       {"a", "b", "c"}},
      {"appendix-b1", "(b & !c) | (a & c) | (a & b)", {"a", "b", "c"}},
  };
  return table;
}

int ParseInt(std::string_view s, const std::string& whole) {
  int value = 0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || end != s.data() + s.size()) {
    throw InvalidArgument("expected mnist-add:M,S but got '" + whole + "'");
  }
  return value;
}

}  // namespace

Formula builtin_formula(const std::string& name) {
  for (const auto& b : Table()) {
    if (name == b.name) return parse(b.text, b.order);
  }
  const std::string prefix = "mnist-add:";
  if (name.rfind(prefix, 0) == 0) {
    const std::string_view args = std::string_view(name).substr(prefix.size());
    const auto comma = args.find(',');
    if (comma == std::string_view::npos) {
      throw InvalidArgument("expected mnist-add:M,S but got '" + name + "'");
    }
    return mnist_add_formula(ParseInt(args.substr(0, comma), name),
                             ParseInt(args.substr(comma + 1), name));
  }
  throw InvalidArgument("unknown builtin '" + name + "'");
}

std::vector<std::string> builtin_names() {
  std::vector<std::string> names;
  for (const auto& b : Table()) names.emplace_back(b.name);
  names.emplace_back("mnist-add:M,S");
  return names;
}

}  // namespace losscape::cli
