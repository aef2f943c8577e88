#include <doctest.h>

#include <random>
#include <set>

#include "oracles.hpp"
#include "reparse/syntax.hpp"

using namespace reparse;

namespace {

const Node& child(const Ast& a, NodeId id, bool left = true) { return a[left ? a[id].left : a[id].right]; }

}  // namespace

TEST_CASE("parse_pattern: (a|(ba))* from the introduction") {
  Ast a = parse_pattern("(a|(ba))*");
  const Node& root = a[a.root()];
  REQUIRE(root.kind == NodeKind::star);
  NodeId u = root.left;
  REQUIRE(a[u].kind == NodeKind::alt);
  CHECK(child(a, u).kind == NodeKind::literal);
  CHECK(child(a, u).byte == 'a');
  CHECK(child(a, u).position == 1);
  NodeId c = a[u].right;
  REQUIRE(a[c].kind == NodeKind::concat);
  CHECK(child(a, c).byte == 'b');
  CHECK(child(a, c).position == 2);
  CHECK(child(a, c, false).byte == 'a');
  CHECK(child(a, c, false).position == 3);
  CHECK(literal_count(a) == 3);
}

TEST_CASE("parse_pattern: empty pattern is epsilon") {
  Ast a = parse_pattern("");
  CHECK(a[a.root()].kind == NodeKind::epsilon);
  CHECK(literal_count(a) == 0);
  CHECK(literal_count(parse_pattern("abc")) == 3);
}

TEST_CASE("parse_pattern: empty union branch and left-assoc concatenation") {
  Ast a = parse_pattern("a(|b)c");
  const Node& root = a[a.root()];
  REQUIRE(root.kind == NodeKind::concat);
  CHECK(child(a, a.root(), false).kind == NodeKind::literal);
  CHECK(child(a, a.root(), false).position == 3);
  NodeId left = root.left;
  REQUIRE(a[left].kind == NodeKind::concat);
  CHECK(child(a, left).position == 1);
  NodeId u = a[left].right;
  REQUIRE(a[u].kind == NodeKind::alt);
  CHECK(child(a, u).kind == NodeKind::epsilon);
  CHECK(child(a, u, false).position == 2);

  // language over {a,b,c} up to length 4 is exactly {ac, abc}
  oracle::LanguageOracle lang(a);
  std::set<std::string> accepted;
  for (const auto& s : oracle::all_strings("abc", 4))
    if (lang.matches(s)) accepted.insert(s);
  CHECK(accepted == std::set<std::string>{"ac", "abc"});
}

TEST_CASE("parse_pattern: precedence of star, concat, union") {
  Ast a = parse_pattern("ab*|c");
  REQUIRE(a[a.root()].kind == NodeKind::alt);
  NodeId cat = a[a.root()].left;
  REQUIRE(a[cat].kind == NodeKind::concat);
  CHECK(child(a, cat, false).kind == NodeKind::star);
  CHECK(parse_pattern("a**")[parse_pattern("a**").root()].kind == NodeKind::star);
}

TEST_CASE("parse_pattern: escapes produce literal metacharacters") {
  Ast a = parse_pattern("\\(\\*\\\\");
  CHECK(literal_count(a) == 3);
  CHECK(unparse(a) == "((\\(\\*)\\\\)");
}

TEST_CASE("parse_pattern: syntax errors carry offsets") {
  auto offset_of = [](const char* p) -> std::size_t {
    try {
      parse_pattern(p);
    } catch (const SyntaxError& e) {
      return e.offset();
    }
    return 999;
  };
  CHECK(offset_of("(") == 0);
  CHECK(offset_of("ab)") == 2);
  CHECK(offset_of("a(b") == 1);
  CHECK(offset_of("*a") == 0);
  CHECK(offset_of("a|*") == 2);
  CHECK(offset_of("(*)") == 1);
  CHECK(offset_of("a\\") == 1);
  CHECK(offset_of("\\n") == 0);
  CHECK_THROWS_AS(parse_pattern(")"), SyntaxError);
}

TEST_CASE("unparse round-trips structurally on random patterns") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 300; ++i) {
    int lits = static_cast<int>(rng() % 13);
    Ast a = parse_pattern(oracle::random_pattern(rng, lits, "abc"));
    Ast b = parse_pattern(unparse(a));
    CHECK(same_structure(a, b));
    CHECK(literal_count(a) == static_cast<std::size_t>(lits));
  }
}

TEST_CASE("literal positions are 1..m in left-to-right leaf order") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 100; ++i) {
    Ast a = parse_pattern(oracle::random_pattern(rng, 1 + static_cast<int>(rng() % 12), "ab"));
    std::int32_t expect = 1;
    for (NodeId id : preorder(a))
      if (a[id].kind == NodeKind::literal) CHECK(a[id].position == expect++);
  }
}
