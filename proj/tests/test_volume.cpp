#include <doctest.h>
#include <zlib.h>

#include <random>

#include "corelr/nrrd.hpp"
#include "corelr/volume.hpp"
#include "oracles.hpp"

using namespace corelr;

namespace {

std::string header(const std::string& sizes, const std::string& extra = "") {
  return "NRRD0004\ntype: uint8\ndimension: 3\nsizes: " + sizes +
         "\nspace directions: (1,0,0) (0,1,0) (0,0,1)\nendian: little\n" + extra;
}

std::string gzip(const std::string& raw) {
  z_stream zs{};
  deflateInit2(&zs, Z_DEFAULT_COMPRESSION, Z_DEFLATED, 16 + MAX_WBITS, 8, Z_DEFAULT_STRATEGY);
  std::string out(deflateBound(&zs, raw.size()) + 32, '\0');
  zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(raw.data()));
  zs.avail_in = static_cast<uInt>(raw.size());
  zs.next_out = reinterpret_cast<Bytef*>(out.data());
  zs.avail_out = static_cast<uInt>(out.size());
  deflate(&zs, Z_FINISH);
  out.resize(zs.total_out);
  deflateEnd(&zs);
  return out;
}

ErrorKind kind_of(const std::string& bytes) {
  try {
    read_nrrd(bytes);
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::Io;
}

}  // namespace

TEST_CASE("minimal raw file reads as an all-liver volume") {
  const std::string file = header("2 2 2", "encoding: raw\n") + "\n" + std::string(8, '\x01');
  const LabelVolume v = read_label_volume(file);
  CHECK(v.dims() == Index3{2, 2, 2});
  CHECK(v.spacing() == Vec3{1, 1, 1});
  for (auto x : v.data()) CHECK(x == kLiver);
}

TEST_CASE("payload shorter than sizes is a size mismatch") {
  CHECK(kind_of(header("2 2 2", "encoding: raw\n") + "\n" + std::string(7, '\x01')) == ErrorKind::SizeMismatch);
}

TEST_CASE("header errors") {
  CHECK(kind_of("NRRD0004\ntype: uint8\ndimension: 3\nencoding: raw\n\n") == ErrorKind::MalformedHeader);
  CHECK(kind_of("P5\n") == ErrorKind::MalformedHeader);
  CHECK(kind_of("NRRD0004\ntype: float\ndimension: 3\nsizes: 1 1 1\nencoding: raw\n\n    ") ==
        ErrorKind::UnsupportedFeature);
  CHECK(kind_of("NRRD0004\ntype: uint8\ndimension: 3\nsizes: 1 1 1\nspace directions: (1,0,0) (0,1,1) (0,0,1)\n"
                "encoding: raw\n\n\x01") == ErrorKind::UnsupportedFeature);
  CHECK(kind_of(header("1 1 1", "encoding: bzip2\n") + "\n\x01") == ErrorKind::UnsupportedFeature);
  CHECK(kind_of("NRRD0004\ntype: uint8\ndimension: 2\nsizes: 1 1\nencoding: raw\n\n\x01") ==
        ErrorKind::UnsupportedFeature);
}

TEST_CASE("labels outside 0..3 are rejected") {
  const std::string file = header("1 1 1", "encoding: raw\n") + "\n\x07";
  CHECK_THROWS_AS(read_label_volume(file), Error);
}

TEST_CASE("gzip payload") {
  std::string raw;
  for (int i = 0; i < 24; ++i) raw.push_back(static_cast<char>(i % 4));
  const std::string file = header("4 3 2", "encoding: gzip\n") + "\n" + gzip(raw);
  const LabelVolume v = read_label_volume(file);
  CHECK(v.dims() == Index3{4, 3, 2});
  for (int i = 0; i < 24; ++i) CHECK(v[static_cast<std::size_t>(i)] == i % 4);
}

TEST_CASE("spacing from the direction diagonal; comments and unknown fields ignored") {
  const std::string file =
      "NRRD0004\n# comment\ntype: uint8\ndimension: 3\nsizes: 1 1 1\nspace: left-posterior-superior\n"
      "space directions: (0.7,0,0) (0,0.7,0) (0,0,2.5)\nkinds: domain domain domain\nkey:=value\nencoding: raw\n\n\x02";
  const LabelVolume v = read_label_volume(file);
  CHECK(v.spacing().x == 0.7);
  CHECK(v.spacing().z == 2.5);
  CHECK(voxel_volume(v) == doctest::Approx(1.225).epsilon(1e-12));
}

TEST_CASE("writer layout") {
  LabelVolume one({1, 1, 1}, {1, 1, 1});
  const std::string bytes = write_nrrd(one);
  CHECK(bytes.back() == '\0');
  CHECK(bytes.find("\n\n") == bytes.size() - 3);

  LabelVolume v({3, 2, 1}, {1, 1, 1});
  const std::string w = write_nrrd(v);
  CHECK(w.find("sizes: 3 2 1\n") != std::string::npos);
  CHECK(w.size() - (w.find("\n\n") + 2) == 6);
  CHECK(w == write_nrrd(v));
  const auto order = {w.find("type:"), w.find("dimension:"), w.find("sizes:"), w.find("space directions:"),
                      w.find("endian:"), w.find("encoding:")};
  CHECK(std::is_sorted(order.begin(), order.end()));
}

TEST_CASE("round trip preserves dims, spacing and data") {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> label(0, 3);
  for (Vec3 spacing : {Vec3{1, 1, 1}, Vec3{0.7, 0.7, 2.5}, Vec3{0.1, 1.0 / 3.0, 7.125}}) {
    LabelVolume v({5, 4, 3}, spacing);
    for (auto& x : v.data()) x = static_cast<std::uint8_t>(label(rng));
    const LabelVolume back = read_label_volume(write_nrrd(v));
    CHECK(back == v);
  }
}

TEST_CASE("extract_mask") {
  LabelVolume empty({3, 3, 3}, {1, 1, 1});
  CHECK(extract_mask(empty, kLesion).empty());
  LabelVolume one({3, 3, 3}, {1, 1, 1});
  one.at(1, 2, 0) = kVessel;
  CHECK(extract_mask(one, kVessel).count() == 1);
  CHECK_THROWS_AS(extract_mask(one, 0), Error);
  CHECK_THROWS_AS(extract_mask(one, 4), Error);

  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> label(0, 3);
  LabelVolume mixed({4, 4, 4}, {1, 1, 1});
  for (auto& x : mixed.data()) x = static_cast<std::uint8_t>(label(rng));
  for (int l : {1, 2, 3, kLiverUnion}) {
    const BinaryMask m = extract_mask(mixed, l);
    for (std::size_t i = 0; i < mixed.size(); ++i) {
      const bool expect = l == kLiverUnion ? mixed[i] != 0 : mixed[i] == l;
      CHECK(static_cast<bool>(m[i]) == expect);
    }
  }
}

TEST_CASE("voxel volume") {
  CHECK(voxel_volume(BinaryMask({1, 1, 1}, {1, 1, 1})) == 1.0);
  CHECK(voxel_volume(BinaryMask({1, 1, 1}, {1, 2, 2})) == 4.0);
}

TEST_CASE("grid validation") {
  CHECK_THROWS_AS(BinaryMask({0, 1, 1}, {1, 1, 1}), Error);
  CHECK_THROWS_AS(BinaryMask({1, 1, 1}, {1, 0, 1}), Error);
  CHECK_THROWS_AS(BinaryMask({2, 1, 1}, {1, 1, 1}, std::vector<std::uint8_t>{1}), Error);
}
