#include <gtest/gtest.h>

#include <numeric>
#include <set>
#include <stdexcept>

#include "selbench/common.hpp"
#include "support.hpp"

namespace selbench {
namespace {

TEST(Rng, SameStreamSameDraws) {
  Rng a(7, "split", {1, 2});
  Rng b(7, "split", {1, 2});
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.next(), b.next());
}

TEST(Rng, PurposeAndCoordinatesSeparateStreams) {
  std::set<std::uint64_t> seeds = {derive_seed(7, "split", {1, 2}), derive_seed(7, "split", {2, 1}),
                                   derive_seed(7, "init", {1, 2}), derive_seed(8, "split", {1, 2}),
                                   derive_seed(7, "split", {1}), derive_seed(7, "split")};
  EXPECT_EQ(seeds.size(), 6u);
}

TEST(Rng, MatchesStandardEngine) {
  // the raw stream is mt19937_64 seeded with the derived seed
  std::mt19937_64 reference(derive_seed(3, "x", {4}));
  Rng rng(3, "x", {4});
  for (int i = 0; i < 10; ++i) EXPECT_EQ(rng.next(), reference());
}

TEST(Rng, BelowStaysInRangeAndCoversIt) {
  Rng rng(11);
  std::vector<int> counts(7, 0);
  for (int i = 0; i < 7000; ++i) {
    const auto v = rng.below(7);
    ASSERT_LT(v, 7u);
    ++counts[v];
  }
  for (int c : counts) EXPECT_GT(c, 850);
  EXPECT_THROW(rng.below(0), ConfigError);
  EXPECT_EQ(rng.below(1), 0u);
}

TEST(Rng, Uniform01InUnitInterval) {
  Rng rng(5);
  double sum = 0.0;
  for (int i = 0; i < 20000; ++i) {
    const double u = rng.uniform01();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  EXPECT_NEAR(sum / 20000.0, 0.5, 0.01);
}

TEST(Rng, ShuffleIsAPermutation) {
  Rng rng(9);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<int> v(1 + trial);
    std::iota(v.begin(), v.end(), 0);
    auto shuffled = v;
    rng.shuffle(std::span<int>(shuffled));
    std::sort(shuffled.begin(), shuffled.end());
    EXPECT_EQ(shuffled, v);
  }
}

TEST(ParallelFor, VisitsEveryIndexOnce) {
  for (unsigned threads : {1u, 2u, 8u}) {
    std::vector<int> hits(1000, 0);
    parallel_for(hits.size(), threads, [&](std::size_t i) { ++hits[i]; });
    for (int h : hits) ASSERT_EQ(h, 1);
  }
}

TEST(ParallelFor, RethrowsLowestFailingIndex) {
  for (unsigned threads : {1u, 4u}) {
    try {
      parallel_for(100, threads, [](std::size_t i) {
        if (i == 17 || i == 60) throw std::runtime_error(std::to_string(i));
      });
      FAIL() << "expected an exception";
    } catch (const std::runtime_error& e) {
      EXPECT_STREQ(e.what(), "17");
    }
  }
}

TEST(Text, FormatDoubleRoundTrips) {
  Rng rng(1);
  for (int i = 0; i < 1000; ++i) {
    const double v = (rng.uniform01() - 0.5) * std::pow(10.0, static_cast<double>(rng.below(20)) - 10);
    EXPECT_EQ(parse_double(format_double(v), "v"), v);
  }
  EXPECT_EQ(format_double(0.5), "0.5");
}

TEST(Text, ParseIntAcceptsIntegralDecimals) {
  EXPECT_EQ(parse_int("881250949", "t"), 881250949);
  EXPECT_EQ(parse_int("881250949.0", "t"), 881250949);
  EXPECT_THROW(parse_int("3.5", "t"), InputError);
  EXPECT_THROW(parse_int("abc", "t"), InputError);
  EXPECT_THROW(parse_double("", "t"), InputError);
}

TEST(Text, SplitFieldsWithMultiCharDelimiter) {
  const auto f = split_fields("1::2::5::978300760", "::");
  ASSERT_EQ(f.size(), 4u);
  EXPECT_EQ(f[0], "1");
  EXPECT_EQ(f[3], "978300760");
  EXPECT_EQ(split_fields("a,,b", ",").size(), 3u);
}

TEST(Text, CsvEscapeRoundTrips) {
  const std::vector<std::string> fields = {"plain", "with,comma", "with \"quote\"", ""};
  std::string line;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) line += ',';
    line += csv_escape(fields[i]);
  }
  EXPECT_EQ(parse_csv_line(line), fields);
  EXPECT_THROW(parse_csv_line("\"open"), InputError);
}

TEST(Files, Sha256KnownVector) {
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  EXPECT_EQ(sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST(Files, WriteThenReadBack) {
  testing::TempDir dir("files");
  const auto path = dir.path() / "nested" / "f.txt";
  write_text_file(path, "hello\n");
  EXPECT_EQ(read_text_file(path), "hello\n");
  EXPECT_EQ(sha256_file(path), sha256_hex("hello\n"));
  EXPECT_THROW(read_text_file(dir.path() / "missing"), InputError);
}

}  // namespace
}  // namespace selbench
