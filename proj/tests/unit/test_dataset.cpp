#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <limits>
#include <sstream>
#include <string>

#include "test_support.hpp"
#include "ucompare/dataset.hpp"
#include "ucompare/errors.hpp"
#include "ucompare/random.hpp"

using namespace ucompare;

namespace {

Dataset parse(const std::string& text, const CsvOptions& options = {}) {
  std::istringstream in(text);
  return read_csv(in, options);
}

template <typename Fn>
ParseError expect_parse_error(Fn&& fn) {
  try {
    fn();
  } catch (const ParseError& e) {
    return e;
  }
  ADD_FAILURE() << "expected ParseError";
  return ParseError("none");
}

}  // namespace

TEST(Csv, FourRowFileWithHeader) {
  const Dataset d = parse("x1,x2,y\n0.5,1,0\n-2,3.25,0\n1e-3,4,1\n7,8,1\n");
  ASSERT_EQ(d.size(), 4u);
  EXPECT_EQ(d.feature_dim(), 2u);
  EXPECT_EQ(d.label(0), 0);
  EXPECT_EQ(d.label(1), 0);
  EXPECT_EQ(d.label(2), 1);
  EXPECT_EQ(d.label(3), 1);
  EXPECT_DOUBLE_EQ(d.features(1)[1], 3.25);
  EXPECT_DOUBLE_EQ(d.features(2)[0], 1e-3);
}

TEST(Csv, EmptyFileIsRejected) {
  const ParseError e = expect_parse_error([] { parse(""); });
  EXPECT_NE(std::string(e.what()).find("empty dataset"), std::string::npos);
  const ParseError header_only = expect_parse_error([] { parse("x1,y\n"); });
  EXPECT_NE(std::string(header_only.what()).find("empty dataset"), std::string::npos);
}

TEST(Csv, NonBinaryLabelNamesTheRow) {
  const ParseError e = expect_parse_error([] { parse("x,y\n0,0\n1,1\n2,2\n"); });
  EXPECT_EQ(e.row(), 4u);
  EXPECT_EQ(e.column(), 2u);
  EXPECT_NE(std::string(e.what()).find("row 4"), std::string::npos);
  EXPECT_NE(std::string(e.what()).find("not 0 or 1"), std::string::npos);
}

TEST(Csv, FractionalAndNegativeLabelsAreRejected) {
  EXPECT_THROW(parse("x,y\n0,0.5\n"), ParseError);
  EXPECT_THROW(parse("x,y\n0,-1\n"), ParseError);
}

TEST(Csv, InconsistentColumnCount) {
  const ParseError e = expect_parse_error([] { parse("a,b,y\n1,2,0\n1,0\n"); });
  EXPECT_EQ(e.row(), 3u);
}

TEST(Csv, UnparsableCellReportsRowAndColumn) {
  const ParseError e = expect_parse_error([] { parse("a,b,y\n1,2,0\n1,abc,1\n"); });
  EXPECT_EQ(e.row(), 3u);
  EXPECT_EQ(e.column(), 2u);
}

TEST(Csv, MissingAndNonFiniteValuesAreRejected) {
  EXPECT_THROW(parse("a,y\n,1\n"), ParseError);
  EXPECT_THROW(parse("a,y\nnan,1\n"), ParseError);
  EXPECT_THROW(parse("a,y\ninf,1\n"), ParseError);
  EXPECT_THROW(parse("a,y\n1e999,1\n"), ParseError);
}

TEST(Csv, LabelColumnByNameAndIndex) {
  const std::string text = "y,a,b\n1,0.5,2\n0,1.5,3\n";
  const Dataset by_name = parse(text, {LabelColumn::named("y"), true});
  const Dataset by_index = parse(text, {LabelColumn::index(0), true});
  EXPECT_EQ(by_name, by_index);
  EXPECT_EQ(by_name.feature_dim(), 2u);
  EXPECT_EQ(by_name.label(0), 1);
  EXPECT_DOUBLE_EQ(by_name.features(1)[1], 3.0);
  EXPECT_THROW(parse(text, {LabelColumn::named("label"), true}), ParseError);
  EXPECT_THROW(parse(text, {LabelColumn::index(3), true}), ParseError);
}

TEST(Csv, NoHeaderDefaultsToLastColumn) {
  const Dataset d = parse("1,2,1\n3,4,0\n", {LabelColumn::last(), false});
  ASSERT_EQ(d.size(), 2u);
  EXPECT_EQ(d.label(0), 1);
  EXPECT_DOUBLE_EQ(d.features(1)[0], 3.0);
  EXPECT_THROW(parse("1,1\n", {LabelColumn::named("y"), false}), ParseError);
}

TEST(Csv, ToleratesCrlfBomBlankLinesAndPadding) {
  const Dataset d = parse("\xEF\xBB\xBFx,y\r\n 1.5 ,1\r\n\r\n+2,\t0\r\n");
  ASSERT_EQ(d.size(), 2u);
  EXPECT_DOUBLE_EQ(d.features(0)[0], 1.5);
  EXPECT_DOUBLE_EQ(d.features(1)[0], 2.0);
  EXPECT_EQ(d.label(1), 0);
}

TEST(Csv, MissingFileIsAnError) {
  EXPECT_THROW(load_csv("/nonexistent/ucompare/data.csv"), ParseError);
}

TEST(Csv, RoundTripIsBitwiseExact) {
  RandomStream rng(20240611);
  const double specials[] = {0.0,
                             -0.0,
                             std::numeric_limits<double>::min(),
                             std::numeric_limits<double>::denorm_min(),
                             std::numeric_limits<double>::max(),
                             -std::numeric_limits<double>::max(),
                             0.1,
                             1.0 / 3.0};
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + rng.uniform_below(20);
    const std::size_t dim = 1 + rng.uniform_below(4);
    std::vector<double> features(n * dim);
    for (auto& f : features) {
      const auto pick = rng.uniform_below(4);
      if (pick == 0) {
        f = specials[rng.uniform_below(std::size(specials))];
      } else {
        f = std::ldexp(rng.uniform01() - 0.5, static_cast<int>(rng.uniform_below(200)) - 100);
      }
    }
    std::vector<Label> labels(n);
    for (auto& l : labels) l = static_cast<Label>(rng.uniform_below(2));
    const Dataset original(features, labels, dim);

    std::stringstream buffer;
    write_csv(buffer, original);
    const Dataset reloaded = read_csv(buffer);
    ASSERT_EQ(reloaded.size(), original.size());
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < dim; ++j) {
        const double a = original.features(i)[j];
        const double b = reloaded.features(i)[j];
        ASSERT_EQ(std::signbit(a), std::signbit(b));
        ASSERT_EQ(a, b) << "trial " << trial << " row " << i;
      }
    }
    ASSERT_EQ(reloaded, original);
  }
}

TEST(Csv, FileRoundTripPreservesRowOrder) {
  RandomStream rng(7);
  const Dataset original = fixtures::random_dataset(25, 3, rng, false);
  const auto path = std::filesystem::temp_directory_path() / "ucompare_roundtrip.csv";
  save_csv(path, original);
  const Dataset reloaded = load_csv(path);
  std::filesystem::remove(path);
  for (std::size_t i = 0; i < original.size(); ++i) {
    EXPECT_EQ(reloaded.observation(i), original.observation(i)) << "row " << i;
  }
}

TEST(Dataset, ConstructionValidates) {
  EXPECT_THROW(Dataset(std::span<const Observation>{}), InvalidArgument);
  const std::vector<Observation> ragged = {{{1.0, 2.0}, 0}, {{1.0}, 1}};
  EXPECT_THROW(Dataset{ragged}, InvalidArgument);
  const std::vector<Observation> bad_label = {{{1.0}, 2}};
  EXPECT_THROW(Dataset{bad_label}, InvalidArgument);
  EXPECT_THROW(Dataset({1.0, 2.0, 3.0}, {0, 1}, 2), InvalidArgument);
}

TEST(Dataset, SubsetKeepsRequestedOrder) {
  const Dataset d = fixtures::make_dataset_1d({10, 20, 30, 40}, {0, 1, 0, 1});
  const std::vector<std::size_t> rows = {3, 0, 2};
  const Dataset s = d.subset(rows);
  ASSERT_EQ(s.size(), 3u);
  EXPECT_EQ(s.observation(0), d.observation(3));
  EXPECT_EQ(s.observation(1), d.observation(0));
  EXPECT_EQ(s.observation(2), d.observation(2));
}
