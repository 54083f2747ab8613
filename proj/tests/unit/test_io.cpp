#include <catch_amalgamated.hpp>

#include <filesystem>
#include <sstream>

#include "shom/frame_io.hpp"
#include "shom/matrix_io.hpp"

using namespace shom;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinRel;

namespace {

const WavelengthGrid kGrid = WavelengthGrid::spanning_nm(790.0, 803.0, 12);

FrameBatch sample_batch() {
  FrameBatch b(kGrid, WavelengthGrid::spanning_nm(791.0, 802.0, 9));
  b.push_frame({{3, Port::plus}, {8, Port::minus}});
  b.push_frame({});
  b.push_frame({{0, Port::plus}, {11, Port::plus}, {0, Port::minus}});
  b.push_frame({});
  return b;
}

std::string serialize(const FrameBatch& b) {
  std::ostringstream os(std::ios::binary);
  write_frames(os, b);
  return os.str();
}

FrameBatch parse(const std::string& bytes) {
  std::istringstream is(bytes, std::ios::binary);
  return read_frames(is);
}

}  // namespace

TEST_CASE("ZHF1 layout") {
  const std::string bytes = serialize(sample_batch());
  REQUIRE(bytes.size() == 72 + 5 * 8);
  CHECK(bytes.substr(0, 4) == "ZHF1");
  CHECK(bytes[4] == 1);
  CHECK(bytes[5] == 0);
  CHECK(static_cast<unsigned char>(bytes[56]) == 4);  // n_frames, little-endian
  CHECK(static_cast<unsigned char>(bytes[64]) == 5);  // n_events
  // First event: frame 0, bin 3, region +.
  CHECK(bytes[72] == 0);
  CHECK(bytes[76] == 3);
  CHECK(bytes[78] == 0);
  // Second event is in region -.
  CHECK(bytes[80 + 6] == 1);
}

TEST_CASE("ZHF1 round trip") {
  const FrameBatch b = sample_batch();
  CHECK(parse(serialize(b)) == b);
  // Trailing empty frames survive because n_frames is stored explicitly.
  CHECK(parse(serialize(b)).n_frames() == 4);
  FrameBatch empty(kGrid, kGrid);
  const std::string header_only = serialize(empty);
  CHECK(header_only.size() == 72);
  CHECK(parse(header_only).n_frames() == 0);

  const auto dir = std::filesystem::temp_directory_path() / "shom_test_io";
  std::filesystem::create_directories(dir);
  write_frames(dir / "f.zhf", b);
  CHECK(read_frames(dir / "f.zhf") == b);
  CHECK_THROWS_AS(read_frames(dir / "missing.zhf"), FormatError);
}

TEST_CASE("ZHF1 rejects malformed input") {
  const std::string good = serialize(sample_batch());
  const auto corrupt = [&](std::size_t offset, char value) {
    std::string s = good;
    s[offset] = value;
    return s;
  };
  CHECK_THROWS_WITH(parse(corrupt(0, 'X')), ContainsSubstring("magic"));
  CHECK_THROWS_WITH(parse(corrupt(4, 2)), ContainsSubstring("version"));
  CHECK_THROWS_AS(parse(good.substr(0, 40)), FormatError);
  CHECK_THROWS_AS(parse(good.substr(0, good.size() - 3)), FormatError);
  CHECK_THROWS_WITH(parse(good + "x"), ContainsSubstring("trailing"));
  CHECK_THROWS_WITH(parse(corrupt(76, 40)), ContainsSubstring("bin out of range"));
  CHECK_THROWS_WITH(parse(corrupt(78, 2)), ContainsSubstring("region"));
  CHECK_THROWS_WITH(parse(corrupt(72, 9)), ContainsSubstring("frame index out of range"));
  // Second event moved to an earlier frame than the first.
  std::string swapped = corrupt(72, 2);
  CHECK_THROWS_WITH(parse(swapped), ContainsSubstring("ordered"));
  // Duplicate event within a frame.
  std::string dup = good;
  dup.replace(80, 8, good.substr(72, 8));
  CHECK_THROWS_WITH(parse(dup), ContainsSubstring("strictly ordered"));
  // Zero grid step.
  std::string zero_step = good;
  for (int i = 16; i < 24; ++i) zero_step[i] = 0;
  CHECK_THROWS_AS(parse(zero_step), FormatError);
}

TEST_CASE("frame CSV export") {
  std::ostringstream os;
  write_frames_csv(os, sample_batch());
  const std::string text = os.str();
  CHECK(text.rfind("frame,region,bin,lambda_nm\n", 0) == 0);
  CHECK_THAT(text, ContainsSubstring("0,+,3,"));
  CHECK_THAT(text, ContainsSubstring("2,-,0,791\n"));
}

TEST_CASE("matrix CSV round trip is exact") {
  CoincidenceMap m{kGrid, WavelengthGrid::spanning_nm(791.0, 802.0, 5), Matrix<double>(12, 5), MapKind::covariance, 0};
  for (std::size_t k = 0; k < m.values.size(); ++k) m.values.flat()[k] = std::sin(1.0 + k) * 1e-7 - 3e-9;
  m.values(0, 0) = -0.0;
  m.values(1, 1) = 1.0 / 3.0;
  std::stringstream ss;
  write_matrix_csv(ss, m);
  const CoincidenceMap back = read_matrix_csv(ss, MapKind::covariance);
  CHECK(back.values == m.values);
  CHECK(back.kind == MapKind::covariance);
  CHECK(same_grid(back.grid_p, m.grid_p, 1e-12));
  CHECK(same_grid(back.grid_m, m.grid_m, 1e-12));
}

TEST_CASE("matrix CSV metadata line") {
  CoincidenceMap m{kGrid, kGrid, Matrix<double>(12, 12, 0.5), MapKind::accidental, 777};
  std::stringstream ss;
  write_matrix_csv(ss, m);
  CHECK(ss.str().rfind("# kind=accidental n_frames=777\n", 0) == 0);
  const CoincidenceMap back = read_matrix_csv(ss, MapKind::covariance);
  CHECK(back.kind == MapKind::accidental);
  CHECK(back.n_frames == 777);

  const auto read = [](const std::string& text) {
    std::istringstream is(text);
    return read_matrix_csv(is);
  };
  const std::string body = "lambda_plus_nm,790,791\nlambda_minus_nm,790,791\n1,2\n";
  CHECK(read("# n_frames=5\n" + body + "3,4\n").n_frames == 5);
  CHECK_THROWS_WITH(read("# kind=bogus\n" + body), ContainsSubstring("unknown map kind"));
  CHECK_THROWS_WITH(read("# n_frames=-1\n" + body), ContainsSubstring("bad n_frames"));
  CHECK_THROWS_WITH(read("# colour=red\n" + body), ContainsSubstring("unknown metadata"));
  CHECK_THROWS_WITH(read("# kind=raw\n" + body), ContainsSubstring("line 5: missing"));
}

TEST_CASE("matrix CSV diagnostics") {
  const auto read = [](const std::string& text) {
    std::istringstream is(text);
    return read_matrix_csv(is);
  };
  const std::string head = "lambda_plus_nm,790,791\nlambda_minus_nm,790,791\n";
  CHECK_NOTHROW(read(head + "1,2\n3,4\n"));
  CHECK_THROWS_WITH(read(""), ContainsSubstring("empty"));
  CHECK_THROWS_WITH(read("x,790,791\n"), ContainsSubstring("line 1"));
  CHECK_THROWS_WITH(read(head + "1,2\n"), ContainsSubstring("line 4: missing"));
  CHECK_THROWS_WITH(read(head + "1,2\n3\n"), ContainsSubstring("line 4: expected 2"));
  CHECK_THROWS_WITH(read(head + "1,2\n3,abc\n"), ContainsSubstring("bad value"));
  CHECK_THROWS_WITH(read(head + "1,2\n3,4\n5,6\n"), ContainsSubstring("unexpected data"));
  CHECK_THROWS_WITH(read("lambda_plus_nm,790,791,795\nlambda_minus_nm,790,791\n"), ContainsSubstring("uniformly"));
  CHECK_THROWS_WITH(read("lambda_plus_nm,790\n"), ContainsSubstring(">= 2 bins"));
  CHECK_THROWS_WITH(read("lambda_plus_nm,791,790\nlambda_minus_nm,790,791\n"), ContainsSubstring("line 1"));
}

TEST_CASE("binary matrix round trip") {
  CoincidenceMap m{kGrid, kGrid, Matrix<double>(12, 12), MapKind::raw, 12345};
  for (std::size_t k = 0; k < m.values.size(); ++k) m.values.flat()[k] = 1e-3 * k;
  std::stringstream ss(std::ios::in | std::ios::out | std::ios::binary);
  write_matrix_binary(ss, m);
  CHECK(ss.str().size() == 4 + 2 + 2 + 48 + 8 + 144 * 8);
  const CoincidenceMap back = read_matrix_binary(ss);
  CHECK(back.values == m.values);
  CHECK(back.kind == MapKind::raw);
  CHECK(back.n_frames == 12345);
  CHECK(back.grid_p == m.grid_p);

  const auto dir = std::filesystem::temp_directory_path() / "shom_test_io";
  std::filesystem::create_directories(dir);
  write_matrix(dir / "m.zhm", m);
  write_matrix(dir / "m.csv", m);
  CHECK(read_matrix(dir / "m.zhm").values == m.values);
  CHECK(read_matrix(dir / "m.csv").values == m.values);
  CHECK_THROWS_AS(read_matrix(dir / "nope.csv"), FormatError);

  std::string bytes = ss.str();
  bytes[0] = 'Q';
  std::istringstream bad(bytes);
  CHECK_THROWS_AS(read_matrix_binary(bad), FormatError);
}
