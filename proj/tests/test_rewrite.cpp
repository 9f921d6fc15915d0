#include <doctest.h>

#include "socel/error.hpp"
#include "socel/rewrite.hpp"
#include "support.hpp"

using namespace socel;
using namespace socel::testing;

namespace {

Formula q(const std::string& text) { return parse(text, small_schema(), {.allow_reserved = true}); }

}  // namespace

TEST_CASE("STRICT pushdown examples") {
  CHECK(print(strict_to_contiguous(q("STRICT(R ; T)"))) == print(q("R : T")));
  CHECK(print(strict_to_contiguous(q("STRICT(R+)"))) == print(q("R(+)")));
  CHECK(print(strict_to_contiguous(q("STRICT(R)"))) == "R");
  CHECK_THROWS_AS(strict_to_contiguous(q("STRICT(PROJECT[R](R))")), Error);
}

TEST_CASE("label pushdown examples") {
  CHECK(print(push_labels_down(q("(R ; T) IN A"))) == print(q("R IN A ; T IN A")));
  CHECK(print(push_labels_down(q("R+ IN A"))) == print(q("(R IN A)+")));
  CHECK(print(push_labels_down(q("R IN A"))) == "R IN A");
  // Nested labels over a PROJECT both stay above it.
  Formula nested = q("(PROJECT[R](R ; T) IN A) IN B");
  CHECK(print(push_labels_down(nested)) == print(nested));
  CHECK(print(push_labels_down(q("((R ; T) IN A) IN B"))) == print(q("(R IN A) IN B ; (T IN A) IN B")));
}

TEST_CASE("contiguous sequence elimination examples") {
  CHECK(print(contiguous_seq_to_strict(q("R : T"))) == print(q("STRICT(R ; T)")));
  CHECK_THROWS_AS(contiguous_seq_to_strict(q("R(+)")), Error);
  for (const char* text : {"(R OR T) : T", "R+ : T", "(R ; T) : (T ; R)", "R : (T FILTER T.v >= 0)+",
                           "(R IN A FILTER A.v = 0) : R IN A", "(R+ ; T)[T -> A] : T IN A", "START(R+) : START(T+)"}) {
    Formula f = q(text);
    Formula g = contiguous_seq_to_strict(f);
    CHECK_FALSE(contains_op(g, Op::StrictSeq));
    CHECK_MESSAGE(oracle_mismatch(f, g, alphabet4(), 5).empty(), text, " => ", print(g));
  }
}

TEST_CASE("unary contiguous iteration elimination examples") {
  CHECK(print(unary_strictplus_eliminate(q("R(+)"))) == print(q("STRICT(R+)")));
  CHECK(print(unary_strictplus_eliminate(q("R+(+)"))) == print(q("R+")));
  for (const char* text : {"(R ; T)(+)", "(R OR R ; T)(+)", "(R OR T+)(+)", "(R IN A OR (T FILTER T.v = 1))(+)",
                           "(R[R -> A] OR T ; T)(+)", "((R ; T) FILTER R.v = 0)(+)", "(R+ ; T+)(+) ; R"}) {
    Formula f = q(text);
    Formula g = unary_strictplus_eliminate(f);
    CHECK_FALSE(contains_op(g, Op::StrictPlus));
    CHECK_FALSE(contains_op(g, Op::StrictSeq));
    CHECK_MESSAGE(oracle_mismatch(f, g, alphabet4(), 5).empty(), text, " => ", print(g));
  }
}
