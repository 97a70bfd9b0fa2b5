#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "qlane/errors.hpp"
#include "qlane/lattice.hpp"
#include "qlane/table_io.hpp"

using namespace qlane;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("qlane_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

// One state, every record identical.
std::string one_state_csv(const char* payoffs = "3,0,5,1") {
  std::string out = "state_id,role,self_type,opp_type,R,S,T,P\n";
  for (const char* r : {"active", "passive"})
    for (const char* a : {"AV", "HDV"})
      for (const char* b : {"AV", "HDV"}) out += std::string("x,") + r + "," + a + "," + b + "," + payoffs + "\n";
  return out;
}

}  // namespace

TEST(TableIo, FormatDouble) {
  EXPECT_EQ(format_double(0.1), "0.10000000000000001");
  EXPECT_EQ(format_double(2.0), "2");
  EXPECT_EQ(format_double(std::nan("")), "NA");
}

TEST(TableIo, RoundTripIsExact) {
  const auto st = synth_table(30, SyntheticTableSpec::defaults(), 4);
  const fs::path dir = temp_dir("roundtrip");
  save_table(st.table, dir / "t.csv");
  EXPECT_TRUE(fs::exists(dir / "t.csv.meta.json"));
  const PayoffTable back = load_table(dir / "t.csv");
  EXPECT_EQ(back, st.table);
  EXPECT_EQ(table_digest(back), table_digest(st.table));
}

TEST(TableIo, LoadWithoutSidecar) {
  const fs::path dir = temp_dir("nosidecar");
  write_text_file(dir / "t.csv", one_state_csv());
  const PayoffTable t = load_table(dir / "t.csv");
  ASSERT_EQ(t.size(), 1u);
  EXPECT_EQ(t.provenance().kind, TableProvenance::Kind::Loaded);
  EXPECT_EQ(t.quad(0, Role::Passive, VehicleType::AV, VehicleType::HDV), (PayoffQuad{3, 0, 5, 1}));
}

TEST(TableIo, MissingRoleIsCompletenessError) {
  std::string csv = "state_id,role,self_type,opp_type,R,S,T,P\n";
  for (const char* a : {"AV", "HDV"})
    for (const char* b : {"AV", "HDV"}) csv += std::string("x,active,") + a + "," + b + ",3,0,5,1\n";
  EXPECT_THROW(parse_table(csv), CompletenessError);
}

TEST(TableIo, DuplicateRecordRejected) {
  std::string csv = one_state_csv();
  csv += "x,active,AV,AV,3,0,5,1\n";
  EXPECT_THROW(parse_table(csv), ParseError);
}

TEST(TableIo, UtilitySchemaConverted) {
  std::string csv = "state_id,role,self_type,opp_type,U_CC,U_CD,U_DC,U_DD\n";
  for (const char* r : {"active", "passive"})
    for (const char* a : {"AV", "HDV"})
      for (const char* b : {"AV", "HDV"}) csv += std::string("x,") + r + "," + a + "," + b + ",2,-1,4,0\n";
  const PayoffTable t = parse_table(csv);
  EXPECT_EQ(t.quad(0, Role::Active, VehicleType::HDV, VehicleType::HDV), (PayoffQuad{2, -1, 4, 0}));
  EXPECT_EQ(t.quad(0, Role::Passive, VehicleType::HDV, VehicleType::HDV), (PayoffQuad{2, 4, -1, 0}));
}

TEST(TableIo, UtilitySchemaRejectsNonzeroBaseline) {
  std::string csv = "state_id,role,self_type,opp_type,U_CC,U_CD,U_DC,U_DD\n";
  csv += "x,active,AV,AV,2,-1,4,0.5\n";
  EXPECT_THROW(parse_table(csv), ParseError);
}

TEST(TableIo, ParseErrorNamesTheLine) {
  std::string csv = one_state_csv();
  const auto pos = csv.find("3,0,5,1", csv.find("passive"));
  csv.replace(pos, 7, "3,zero,5,1");
  try {
    parse_table(csv, "bad.csv");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("bad.csv:6"), std::string::npos) << e.what();
  }
}

TEST(TableIo, BadHeaderAndUnknownRole) {
  EXPECT_THROW(parse_table("a,b,c\n"), ParseError);
  std::string csv = one_state_csv();
  csv.replace(csv.find("active"), 6, "pushy");
  EXPECT_THROW(parse_table(csv), ParseError);
}

TEST(TableIo, MissingFileIsIoError) {
  EXPECT_THROW(load_table("/nonexistent/dir/none.csv"), IoError);
}

TEST(TableIo, HandWrittenFileDrivesASimulation) {
  const fs::path dir = temp_dir("handwritten");
  write_text_file(dir / "pd.csv", one_state_csv());
  const PayoffTable t = load_table(dir / "pd.csv");
  SimParams p;
  p.b2_hdv = 0.0;
  p.init_coop_hdv = 0.5;
  p.t_max = 100;
  p.seed = 11;
  const RunRecord rec = run(p, t);
  EXPECT_EQ(rec.series.size(), 100u);
  EXPECT_LT(rec.series.back().hdv, 0.05);
}

TEST(TableIo, CoefficientsRoundTrip) {
  const auto st = synth_table(5, SyntheticTableSpec::defaults(), 77);
  const UtilityCoefficients back = parse_coefficients(serialize_coefficients(st.coefficients));
  EXPECT_EQ(back, st.coefficients);
}

TEST(TableIo, CoefficientsMissingKey) {
  EXPECT_THROW(parse_coefficients(R"({"format":"qlane-coefficients","coefficients":[]})"), CompletenessError);
}

TEST(TableIo, DigestChangesWithContent) {
  PayoffTable a = uniform_table({3, 0, 5, 1});
  PayoffTable b = uniform_table({3, 0, 5, 1.5});
  EXPECT_NE(table_digest(a), table_digest(b));
  EXPECT_EQ(table_digest(a).size(), 16u);
}
