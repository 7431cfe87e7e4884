#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "signbias/csv.hpp"
#include "signbias/errors.hpp"
#include "signbias/rng.hpp"
#include "test_util.hpp"

using namespace signbias;

TEST(Csv, ParsesQuotedFieldsAndComments) {
  const auto t = parse_csv("# config_hash=abc seed=1\na,b,c\n1,\"x, y\",\"say \"\"hi\"\"\"\r\n\n2,,3\n");
  ASSERT_EQ(t.comments.size(), 1u);
  EXPECT_EQ(t.comments[0], " config_hash=abc seed=1");
  ASSERT_EQ(t.header.size(), 3u);
  ASSERT_EQ(t.rows.size(), 2u);
  EXPECT_EQ(t.rows[0][1], "x, y");
  EXPECT_EQ(t.rows[0][2], "say \"hi\"");
  EXPECT_EQ(t.rows[1][1], "");
}

TEST(Csv, MissingColumnIsNamed) {
  const auto t = parse_csv("a,b\n1,2\n");
  try {
    (void)t.column("video_id");
    FAIL() << "expected SchemaError";
  } catch (const SchemaError& e) {
    EXPECT_NE(std::string(e.what()).find("video_id"), std::string::npos);
  }
}

TEST(Csv, RaggedRowRejected) {
  EXPECT_THROW(parse_csv("a,b\n1,2,3\n"), SchemaError);
  EXPECT_THROW(parse_csv(""), SchemaError);
  EXPECT_THROW(parse_csv("a\n\"open\n"), SchemaError);
}

TEST(Csv, WriterRoundTrip) {
  testutil::TempDir dir("csv");
  const auto path = dir.path() / "t.csv";
  {
    CsvWriter w(path, {"id", "text"}, "signbias seed=3");
    w.write_row({"v1", "plain"});
    w.write_row({"v2", "needs,\"quote\""});
    w.close();
  }
  const auto t = read_csv(path);
  EXPECT_EQ(t.comments.at(0), " signbias seed=3");
  EXPECT_EQ(t.rows.at(1).at(1), "needs,\"quote\"");
}

TEST(Csv, DoubleFormattingRoundTrips) {
  Rng rng(11);
  for (int i = 0; i < 10000; ++i) {
    const double v = std::ldexp(rng.normal(), static_cast<int>(rng.below(80)) - 40);
    ASSERT_EQ(parse_double(format_double(v), "t"), v);
  }
  EXPECT_EQ(format_double(0.0), "0");
  EXPECT_EQ(format_double(-0.0), "0");
  EXPECT_EQ(format_double(0.5), "0.5");
}

TEST(Csv, ScalarParsers) {
  EXPECT_EQ(parse_int(" 42 ", "t"), 42);
  EXPECT_THROW(parse_int("4.2", "t"), SchemaError);
  EXPECT_THROW(parse_double("abc", "t"), SchemaError);
  EXPECT_FALSE(parse_optional_double("", "t").has_value());
  EXPECT_EQ(parse_optional_int("30", "t"), 30);
  EXPECT_TRUE(parse_bool("true", "t"));
  EXPECT_FALSE(parse_bool("0", "t"));
  EXPECT_THROW(parse_bool("maybe", "t"), SchemaError);
}

TEST(Csv, MissingFileIsIoError) {
  EXPECT_THROW(read_csv("/nonexistent/dir/file.csv"), IoError);
}
