#include <gtest/gtest.h>

#include <filesystem>

#include "oracles.hpp"
#include "scatmaxp/io.hpp"

using namespace scatmaxp;

TEST(Sgrid, RoundTripIsBitExact) {
  oracle::Gen g(1);
  for (const Plate& p : {Plate::rect({-0.1, 1.0 / 3.0}, {2.5, 0.7}, {5, 7}), Plate::line(-1.0, 3.0, 9)}) {
    const SignalGrid f(p, g.complex_vector(p.sample_count()));
    const std::string bytes = io::encode_sgrid(f);
    const SignalGrid back = io::decode_sgrid(bytes);
    EXPECT_TRUE(back.same_values(f));
    EXPECT_EQ(back.plate(), p);
    EXPECT_EQ(io::encode_sgrid(back), bytes);
  }
}

TEST(Sgrid, HeaderLayout) {
  const SignalGrid f(Plate::rect({-0.5, 0.0}, {1.0, 2.0}, {2, 3}));
  const std::string bytes = io::encode_sgrid(f);
  EXPECT_EQ(bytes.substr(0, bytes.find('\n')), "SGRID 2 -0.5 0 1 2 2 3");
  EXPECT_EQ(bytes.size(), bytes.find('\n') + 1 + 6 * 16);
  const SignalGrid one(Plate::line(0.0, 1.0, 1), {cplx(1.0, -2.0)});
  const std::string b1 = io::encode_sgrid(one);
  // 1.0 little-endian: 00 .. 00 f0 3f
  const std::size_t data = b1.find('\n') + 1;
  EXPECT_EQ(static_cast<unsigned char>(b1[data + 7]), 0x3f);
  EXPECT_EQ(static_cast<unsigned char>(b1[data + 6]), 0xf0);
}

TEST(Sgrid, RejectsMalformedInput) {
  EXPECT_THROW(io::decode_sgrid("NOPE 2\n"), Error);
  EXPECT_THROW(io::decode_sgrid("SGRID 3 0 0 0 1 1 1 1 1 1\n"), Error);
  EXPECT_THROW(io::decode_sgrid("SGRID 1 0 1\n"), Error);
  EXPECT_THROW(io::decode_sgrid("SGRID 1 0 1 2\n" + std::string(16, '\0')), Error);
  EXPECT_THROW(io::decode_sgrid("SGRID 1 0 1 1 7\n" + std::string(16, '\0')), Error);
}

TEST(Pgm, DecodeScalesToUnitInterval) {
  std::string bytes = "P5\n# comment\n3 2\n255\n";
  for (unsigned char c : {0, 51, 255, 102, 204, 153}) bytes.push_back(static_cast<char>(c));
  const SignalGrid f = io::decode_pgm(bytes);
  EXPECT_EQ(f.plate().samples(), (Extents{2, 3}));  // rows on axis 0
  EXPECT_EQ(f.plate(), Plate::unit_square(2, 3));
  EXPECT_EQ(f(0, 1), 0.2);
  EXPECT_EQ(f(0, 2), 1.0);
  EXPECT_EQ(f(1, 0), 0.4);
  EXPECT_EQ(io::encode_pgm(f), "P5\n3 2\n255\n" + bytes.substr(bytes.size() - 6));
}

TEST(Pgm, RejectsUnsupported) {
  EXPECT_THROW(io::decode_pgm("P2\n1 1\n255\n0"), Error);
  EXPECT_THROW(io::decode_pgm("P5\n1 1\n65535\n00"), Error);
  EXPECT_THROW(io::decode_pgm("P5\n2 2\n255\n0"), Error);
  EXPECT_THROW(io::decode_pgm("P5\nx 2\n255\n0000"), Error);
}

TEST(Files, ReadSignalByMagicAndPathContext) {
  const auto dir = std::filesystem::temp_directory_path() / "scatmaxp_io_test";
  std::filesystem::create_directories(dir);
  const SignalGrid f(Plate::unit_square(2, 2), {1.0, 2.0, 3.0, 4.0});
  io::write_sgrid(dir / "a.sgrid", f);
  EXPECT_TRUE(io::read_signal(dir / "a.sgrid").same_values(f));
  io::detail::write_file(dir / "b.pgm", io::encode_pgm(SignalGrid(Plate::unit_square(2, 2), {0.0, 1.0, 1.0, 0.0})));
  EXPECT_EQ(io::read_signal(dir / "b.pgm")(0, 1), 1.0);
  try {
    io::read_signal(dir / "missing.sgrid");
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("missing.sgrid"), std::string::npos);
  }
  std::filesystem::remove_all(dir);
}

TEST(FormatNumber, RoundTrips) {
  oracle::Gen g(2);
  for (int t = 0; t < 1000; ++t) {
    const double x = g.uniform(-1e6, 1e6) * std::pow(10.0, double(g.integer(-200, 200)));
    EXPECT_EQ(std::stod(io::format_number(x)), x);
  }
  EXPECT_EQ(io::format_number(0.5), "0.5");
}
