#include "reimpute/csv_io.hpp"

#include "reimpute/errors.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace reimpute;

namespace {

CsvSchema schema() {
  CsvSchema s;
  s.treatment = "z";
  s.outcomes = {"y"};
  s.covariates = {"x"};
  s.group = "g";
  return s;
}

}  // namespace

TEST(Csv, ReadsRolesAndMissingTokens) {
  std::istringstream in("g,z,x,y\na,1,0.5,1\na,0,,2\nb,1,1.5,NA\nb,0,2,3\n");
  const Dataset d = read_csv(in, schema());
  EXPECT_EQ(d.units(), 4);
  EXPECT_TRUE(d.x().missing(1, 0));
  EXPECT_TRUE(d.y().missing(2, 0));
  EXPECT_EQ(d.groups().group_count(), 2u);
  EXPECT_EQ(d.z(), (TreatmentVector{1, 0, 1, 0}));
}

TEST(Csv, RoundTripsExactly) {
  std::istringstream in("g,z,x,y\na,1,0.1,1e-300\na,0,NA,2.5\nb,1,3,NA\nb,0,0.30000000000000004,3\n");
  const Dataset d = read_csv(in, schema());
  std::ostringstream out;
  write_csv(out, d);
  std::istringstream again(out.str());
  const Dataset d2 = read_csv(again, schema());
  EXPECT_EQ(d.checksum(), d2.checksum());
}

TEST(Csv, MissingColumnIsNamed) {
  std::istringstream in("z,y\n1,2\n");
  try {
    read_csv(in, schema());
    FAIL();
  } catch (const SchemaError& e) {
    EXPECT_NE(std::string(e.what()).find("'x'"), std::string::npos);
  }
}

TEST(Csv, BadTreatmentAndNumbers) {
  CsvSchema s;
  s.treatment = "z";
  s.outcomes = {"y"};
  std::istringstream bad_z("z,y\n2,1\n");
  EXPECT_THROW(read_csv(bad_z, s), SchemaError);
  std::istringstream bad_y("z,y\n1,abc\n");
  EXPECT_THROW(read_csv(bad_y, s), ParseError);
  std::istringstream ragged("z,y\n1\n");
  EXPECT_THROW(read_csv(ragged, s), FormatError);
}

TEST(Csv, FormatDoubleIsShortestRoundTrip) {
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(2.0), "2");
  EXPECT_EQ(std::stod(format_double(1.0 / 3.0)), 1.0 / 3.0);
}
