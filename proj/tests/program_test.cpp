#include <doctest.h>

#include "pgakit/errors.hpp"
#include "pgakit/extraction.hpp"
#include "pgakit/program.hpp"
#include "support/oracles.hpp"

using namespace pgakit;

namespace {

std::string normal(const char* text) { return to_string(canonicalize(parse_program(text))); }

std::size_t error_column(const char* text) {
  try {
    parse_program(text);
  } catch (const ParseError& e) {
    return e.column();
  }
  return 0;
}

}  // namespace

TEST_SUITE("program") {
  TEST_CASE("actions") {
    const auto a = parse_action("rlc:5.set:1");
    CHECK(a.focus == "rlc:5");
    CHECK(a.method == "set");
    CHECK(a.argument == 1u);
    CHECK(to_string(a) == "rlc:5.set:1");
    CHECK(parse_action("c.inc") == make_action("c", "inc"));
    CHECK_FALSE(is_identifier("Abc"));
    CHECK_FALSE(is_identifier("1a"));
    CHECK(is_identifier("a_1"));
    CHECK_THROWS_AS(parse_action("a."), ParseError);
  }

  TEST_CASE("parse") {
    auto p = parse_program("+a;#2;!");
    REQUIRE(p.parts.size() == 1);
    CHECK(p.parts[0].instructions ==
          Sequence{PosTest{make_action("a")}, Jump{2}, Halt{}});

    p = parse_program("(a;+b;#3;-b;#4)^w");
    REQUIRE(p.parts.size() == 1);
    CHECK(p.parts[0].repeated);
    CHECK(p.parts[0].instructions.size() == 5);

    p = parse_program("3x{;a;}x");
    CHECK(p.parts[0].instructions == Sequence{LoopHeader{3}, Basic{make_action("a")}, LoopClose{}});

    p = parse_program("2}x7;#4(7,3)(9,2);u(b;#2)");
    CHECK(p.parts[0].instructions[0] == Instruction{AnnClose{2, 7}});
    CHECK(p.parts[0].instructions[1] == Instruction{AnnJump{4, {{7, 3}, {9, 2}}}});
    CHECK(p.parts[0].instructions[2].is<Unit>());

    // `u` alone is an ordinary action.
    CHECK(parse_program("u;u.v").parts[0].instructions[0] == Instruction{Basic{make_action("u")}});
  }

  TEST_CASE("parse errors") {
    CHECK_THROWS_AS(parse_program("(a;b"), ParseError);
    CHECK_THROWS_AS(parse_program("a;b)^w"), ParseError);
    CHECK_THROWS_AS(parse_program("0x{;a;}x"), ParseError);
    CHECK_THROWS_AS(parse_program("a;;b"), ParseError);
    CHECK_THROWS_AS(parse_program("u(3x{;a;}x)"), ParseError);
    CHECK_THROWS_AS(parse_program("((a)^w)^w"), ParseError);
    CHECK(error_column("a;0x{;b;}x") == 3);
    CHECK(error_column("a;#;b") == 4);
  }

  TEST_CASE("printing round trips") {
    for (const char* text : {"+a;#2;!", "(a;+b;#3;-b;#4)^w", "a;(b)^w", "3x{;a;b;4x{;+c;#4(7,3)(9,2);3}x2;d;2}x7;+e;#3",
                             "u(+rlc:5.dec;#3;rlc:5.set:1;#2;#5);c", "a;(b)^w;c;(d)^w"}) {
      CAPTURE(text);
      CHECK(to_string(parse_program(text)) == text);
      CHECK(parse_program(to_string(parse_program(text))) == parse_program(text));
    }
  }

  TEST_CASE("dump") {
    CHECK(dump(parse_program("+a;#2;!")) ==
          "program: 1 part\n"
          "part 1 finite\n"
          "  1 pos-test +a\n"
          "  2 jump #2\n"
          "  3 halt !\n");
  }

  TEST_CASE("canonicalize") {
    CHECK(normal("(a;a)^w") == "(a)^w");
    CHECK(normal("(a)^w;b") == "(a)^w");
    CHECK(normal("a;(b;a)^w") == "(a;b)^w");
    CHECK(normal("a;b;c") == "a;b;c");
    CHECK(normal("a;b;(c;d;c;d)^w") == "a;b;(c;d)^w");
    CHECK(normal("c;d;(a;b;c;d)^w") == "(c;d;a;b)^w");
    CHECK(dead_parts(parse_program("(a)^w;b;(c)^w")) == 2);
  }

  TEST_CASE("first canonical form keeps positions") {
    const auto p = first_canonical(parse_program("a;b;(c;a;b;c)^w;d"));
    CHECK(to_string(p) == "a;b;(c;a;b;c)^w");
  }

  TEST_CASE("congruent") {
    CHECK(congruent(parse_program("(a;b)^w"), parse_program("a;b;(a;b)^w")));
    CHECK_FALSE(congruent(parse_program("#0"), parse_program("#1")));
    CHECK_FALSE(congruent(parse_program("(a;b)^w"), parse_program("(b;a)^w")));
    // Same streams, confirmed independently.
    CHECK(testing::same_stream(parse_program("(a;b)^w"), parse_program("a;b;(a;b)^w")));
    CHECK_FALSE(testing::same_stream(parse_program("(a;b)^w"), parse_program("(b;a)^w")));
  }

  TEST_CASE("normalize_jumps") {
    auto jumps = [](Nat length, Nat m) {
      Sequence body(length - 1, Basic{make_action("a")});
      body.insert(body.begin(), Jump{m});
      return normalize_jumps(body).front().as<Jump>().distance;
    };
    CHECK(jumps(3, 7) == 1);
    CHECK(jumps(3, 3) == 3);
    CHECK(jumps(5, 12) == 2);
    CHECK(jumps(5, 0) == 0);
    CHECK_THROWS_AS(normalize_jumps(Sequence{}), std::invalid_argument);

    const auto before = parse_canonical("(#12;a;+b;!;c)^w");
    const auto after = CanonicalProgram{{}, normalize_jumps(*before.body)};
    CHECK(to_string(after) == "(#2;a;+b;!;c)^w");
    CHECK(thread_equal(extract_pga(before), extract_pga(after)));
  }
}
