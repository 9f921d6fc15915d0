#include <doctest.h>

#include <random>

#include "socel/error.hpp"
#include "socel/model.hpp"
#include "support.hpp"

using namespace socel;
using namespace socel::testing;

namespace {

std::vector<double> values(const std::vector<Event>& es) {
  std::vector<double> out;
  for (const auto& e : es) out.push_back(std::get<double>(*e.get("value")));
  return out;
}

ComplexEvent random_ce(std::mt19937_64& rng, Position max_pos) {
  static const std::vector<Label> labels{Label("A"), Label("B"), Label("X")};
  std::vector<Mark> marks;
  std::uniform_int_distribution<int> count(0, 4);
  std::uniform_int_distribution<Position> pos(0, max_pos);
  std::uniform_int_distribution<std::size_t> lab(0, labels.size() - 1);
  for (int k = count(rng); k > 0; --k) marks.push_back({pos(rng), labels[lab(rng)]});
  return ComplexEvent(marks);
}

}  // namespace

TEST_CASE("concat") {
  CHECK(concat(ComplexEvent{{"A", {1}}}, ComplexEvent{{"B", {2}}}) == ComplexEvent{{"A", {1}}, {"B", {2}}});
  CHECK_FALSE(concat(ComplexEvent{{"A", {3}}}, ComplexEvent{{"B", {2}}}).has_value());
  CHECK_FALSE(concat(ComplexEvent{{"A", {2}}}, ComplexEvent{{"B", {2}}}).has_value());
  CHECK(concat(ComplexEvent{}, ComplexEvent{{"H", {4}}}) == ComplexEvent{{"H", {4}}});
  CHECK(concat(ComplexEvent{{"H", {4}}}, ComplexEvent{}) == ComplexEvent{{"H", {4}}});
}

TEST_CASE("extend, rename, project") {
  CHECK(extend(ComplexEvent{{"H", {2, 4}}}, Label("X")) == ComplexEvent{{"H", {2, 4}}, {"X", {2, 4}}});
  CHECK(extend(ComplexEvent{}, Label("X")).empty());
  CHECK(extend(ComplexEvent{{"X", {1}}, {"H", {2}}}, Label("X")) == ComplexEvent{{"X", {1, 2}}, {"H", {2}}});
  CHECK(rename(ComplexEvent{{"H", {4}}}, Label("H"), Label("HS")) == ComplexEvent{{"HS", {4}}});
  CHECK(rename(ComplexEvent{{"A", {1}}, {"B", {2}}}, Label("A"), Label("B")) == ComplexEvent{{"B", {1, 2}}});
  CHECK(rename(ComplexEvent{{"A", {1}}}, Label("A"), Label("A")) == ComplexEvent{{"A", {1}}});
  CHECK(project(ComplexEvent{{"A", {1}}, {"B", {2}}}, {Label("A")}) == ComplexEvent{{"A", {1}}});
  CHECK(ComplexEvent{{"A", {}}} == ComplexEvent{});
}

TEST_CASE("complex event algebra properties") {
  std::mt19937_64 rng(11);
  const Label a("A"), b("B"), x("X");
  for (int k = 0; k < 500; ++k) {
    ComplexEvent c1 = random_ce(rng, 6), c2 = random_ce(rng, 6), c3 = random_ce(rng, 6);
    auto l = concat(c1, c2);
    auto r = concat(c2, c3);
    if (l && r) {
      auto lr = concat(*l, c3);
      auto rl = concat(c1, *r);
      REQUIRE(lr.has_value() == rl.has_value());
      if (lr) CHECK(*lr == *rl);
    }
    CHECK(concat(ComplexEvent{}, c1) == c1);
    CHECK(concat(c1, ComplexEvent{}) == c1);
    CHECK(extend(c1, a).support() == c1.support());
    CHECK(rename(c1, a, b).support() == c1.support());
    CHECK(rename(rename(c1, a, b), a, x) == rename(c1, a, b));
  }
}

TEST_CASE("selection over the sensor stream") {
  const Stream& s = sensor_stream();
  REQUIRE(s.size() == 10);
  CHECK(values(select_tuples(ComplexEvent{{"HS", {4, 6, 7}}}, s, Label("HS"))) == std::vector<double>{27, 45, 50});
  CHECK(select_tuples(ComplexEvent{{"HS", {4}}}, s, Label("T")).empty());
  CHECK(values(select_tuples(ComplexEvent{{"T", {0, 3}}}, s, Label("T"))) == std::vector<double>{-2, -1});

  Stream sub = induced_subsequence(s, ComplexEvent{{"T", {3}}, {"HH", {9}}});
  REQUIRE(sub.size() == 2);
  CHECK(sub[0].to_string() == "T:-1");
  CHECK(sub[1].to_string() == "H:65");
  CHECK(induced_subsequence(s, ComplexEvent{}).empty());
  std::vector<Position> all{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  CHECK(induced_subsequence(s, ComplexEvent{{"A", all}}) == s);
}

TEST_CASE("star relation") {
  Stream s{ev("R", 0), ev("T", 1)};
  ComplexEvent c{{"R", {0}}, {"T", {1}}};
  CHECK(star_related(s, c, s, c));
  Stream padded{ev("R", 0), ev("R", 1), ev("T", 1)};
  CHECK(star_related(s, c, padded, ComplexEvent{{"R", {0}}, {"T", {2}}}));
  Stream changed{ev("R", 1), ev("T", 1)};
  CHECK_FALSE(star_related(s, c, changed, c));
  // Labels travel with the events.
  CHECK_FALSE(star_related(s, c, s, ComplexEvent{{"T", {0}}, {"R", {1}}}));

  // Equivalence on a small family.
  std::vector<std::pair<Stream, ComplexEvent>> family;
  for (const auto& e0 : alphabet2()) {
    for (const auto& e1 : alphabet2()) {
      Stream st{e0, e1};
      for (const auto& ce : {ComplexEvent{{"A", {0}}}, ComplexEvent{{"A", {1}}}, ComplexEvent{{"A", {0, 1}}}}) {
        family.emplace_back(st, ce);
      }
      family.emplace_back(Stream{e0}, ComplexEvent{{"A", {0}}});
    }
  }
  for (const auto& [s1, c1] : family) {
    CHECK(star_related(s1, c1, s1, c1));
    for (const auto& [s2, c2] : family) {
      CHECK(star_related(s1, c1, s2, c2) == star_related(s2, c2, s1, c1));
      for (const auto& [s3, c3] : family) {
        if (star_related(s1, c1, s2, c2) && star_related(s2, c2, s3, c3)) CHECK(star_related(s1, c1, s3, c3));
      }
    }
  }
}

TEST_CASE("serialization") {
  CHECK(ComplexEvent{{"T", {3}}, {"HS", {6, 4}}}.to_json() == R"({"HS":[4,6],"T":[3]})");
  CHECK(output_record(9, ComplexEvent{{"T", {3}}}) == R"({"at":9,"event":{"T":[3]}})");
  Event e = Event::from_json(R"({"type":"H","value":27})");
  CHECK(e.to_string() == "H:27");
  CHECK(Event::from_json(e.to_json()) == e);
  CHECK(Schema::from_json(sensor_schema().to_json()).relation_names() == sensor_schema().relation_names());
}

TEST_CASE("stream ingestion errors name the line") {
  try {
    read_stream("{\"type\":\"T\",\"value\":1}\n{\"type\":\"T\",\"value\":\n", sensor_schema());
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Stream);
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
  CHECK_THROWS_AS(read_stream("{\"type\":\"Q\",\"value\":1}\n", sensor_schema()), Error);
  CHECK_THROWS_AS(read_stream("{\"type\":\"T\",\"value\":\"warm\"}\n", sensor_schema()), Error);
  CHECK(read_stream("", sensor_schema()).empty());
}
