#include <gtest/gtest.h>

#include <sstream>

#include "kgprobe/error.hpp"
#include "kgprobe/kg/triplet.hpp"

using namespace kgprobe;
using namespace kgprobe::kg;
using namespace std::chrono;

namespace {

TripletSet parse(const std::string& text, const ColumnSchema& schema = {}) {
  std::istringstream in(text);
  return parse_triplets(in, schema);
}

std::size_t error_line(const std::string& text) {
  try {
    parse(text);
  } catch (const ParseError& e) {
    return e.line();
  }
  return 0;
}

}  // namespace

TEST(ParseTriplets, PlainLine) {
  auto ts = parse("A\tbornIn\tB\n");
  ASSERT_EQ(ts.size(), 1u);
  EXPECT_EQ(ts[0], (Triplet{"A", "bornIn", "B", std::nullopt}));
}

TEST(ParseTriplets, TimestampedLine) {
  auto ts = parse("Trump\tvisited\tChina\t2017-11-08\n");
  ASSERT_EQ(ts.size(), 1u);
  ASSERT_TRUE(ts[0].timestamp);
  EXPECT_EQ(*ts[0].timestamp, year_month_day{year{2017} / 11 / 8});
}

TEST(ParseTriplets, TwoFieldsIsErrorAtLine1) { EXPECT_EQ(error_line("A\tbornIn"), 1u); }

TEST(ParseTriplets, ErrorLineCountsCommentsAndBlanks) {
  EXPECT_EQ(error_line("# header\n\nA\tr\tB\nA\tr\n"), 4u);
  EXPECT_EQ(error_line("A\tr\tB\tC\tD\n"), 1u);
}

TEST(ParseTriplets, BadDate) {
  EXPECT_EQ(error_line("A\tr\tB\t2017-02-30\n"), 1u);
  EXPECT_EQ(error_line("A\tr\tB\tyesterday\n"), 1u);
  EXPECT_EQ(error_line("A\tr\tB\t2017-1-08\n"), 1u);
}

TEST(ParseTriplets, EmptyFieldRejected) {
  EXPECT_EQ(error_line(" \tr\tB\n"), 1u);
  EXPECT_EQ(error_line("A\t\tB\n"), 1u);
}

TEST(ParseTriplets, TrimsAndKeepsDuplicatesInOrder) {
  auto ts = parse("  A \t r\tB  \nA\tr\tB\nC\ts\tA\n");
  ASSERT_EQ(ts.size(), 3u);
  EXPECT_EQ(ts[0], ts[1]);
  EXPECT_EQ(ts[0].head, "A");
  EXPECT_EQ(ts[0].relation, "r");
  EXPECT_EQ(ts[0].tail, "B");
  EXPECT_EQ(ts[2].head, "C");
}

TEST(ParseTriplets, InternalSpacesSurvive) {
  auto ts = parse("New York\tlocated in\tUnited States\n");
  EXPECT_EQ(ts[0].head, "New York");
  EXPECT_EQ(ts[0].relation, "located in");
}

TEST(ParseTriplets, SchemaPermutation) {
  auto ts = parse("B\tA\tbornIn\n", ColumnSchema::parse("thr"));
  EXPECT_EQ(ts[0], (Triplet{"A", "bornIn", "B", std::nullopt}));
  EXPECT_THROW(ColumnSchema::parse("hhr"), InputError);
  EXPECT_THROW(ColumnSchema::parse("hr"), InputError);
}

TEST(ParseTriplets, CommentOnlyInputIsEmpty) { EXPECT_TRUE(parse("# nothing\n\n#\n").empty()); }

TEST(ParseTriplets, CrlfLineEndings) {
  auto ts = parse("A\tr\tB\t2000-01-01\r\nC\tr\tD\r\n");
  ASSERT_EQ(ts.size(), 2u);
  EXPECT_EQ(format_date(*ts[0].timestamp), "2000-01-01");
  EXPECT_EQ(ts[1].tail, "D");
}

TEST(Dates, RoundTripAndLeapYears) {
  EXPECT_EQ(format_date(*parse_date("2000-02-29")), "2000-02-29");
  EXPECT_FALSE(parse_date("1900-02-29"));
  EXPECT_EQ(format_date(*parse_date("0987-12-31")), "0987-12-31");
}

TEST(WriteTriplets, RoundTrip) {
  TripletSet ts{{"A", "r", "B", std::nullopt}, {"C", "s", "D", parse_date("2010-05-06")}};
  std::ostringstream out;
  write_triplets(out, ts);
  EXPECT_EQ(parse(out.str()), ts);
}
