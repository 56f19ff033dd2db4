#include "corelr/nrrd.hpp"

#include <zlib.h>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

#include "corelr/format.hpp"

namespace corelr {

namespace {

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

double parse_double(const std::string& s) {
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
    throw Error(ErrorKind::MalformedHeader, "bad number '" + s + "'");
  }
  return v;
}

// "(a,b,c) (d,e,f) (g,h,i)" -> 3 vectors.
std::vector<Vec3> parse_directions(const std::string& value) {
  std::vector<Vec3> out;
  std::size_t pos = 0;
  while (true) {
    pos = value.find_first_not_of(" \t", pos);
    if (pos == std::string::npos) break;
    if (value.compare(pos, 4, "none") == 0) {
      throw Error(ErrorKind::UnsupportedFeature, "'none' space direction");
    }
    if (value[pos] != '(') throw Error(ErrorKind::MalformedHeader, "space directions: expected '('");
    const auto close = value.find(')', pos);
    if (close == std::string::npos) throw Error(ErrorKind::MalformedHeader, "space directions: missing ')'");
    std::vector<double> comps;
    std::stringstream ss(value.substr(pos + 1, close - pos - 1));
    std::string item;
    while (std::getline(ss, item, ',')) comps.push_back(parse_double(trim(item)));
    if (comps.size() != 3) throw Error(ErrorKind::MalformedHeader, "space direction needs 3 components");
    out.push_back({comps[0], comps[1], comps[2]});
    pos = close + 1;
  }
  if (out.size() != 3) throw Error(ErrorKind::MalformedHeader, "space directions needs 3 vectors");
  return out;
}

std::string gunzip(std::string_view in) {
  z_stream zs{};
  if (inflateInit2(&zs, 16 + MAX_WBITS) != Z_OK) throw Error(ErrorKind::Io, "inflateInit2 failed");
  zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(in.data()));
  zs.avail_in = static_cast<uInt>(in.size());
  std::string out;
  char buf[1 << 15];
  int ret = Z_OK;
  do {
    zs.next_out = reinterpret_cast<Bytef*>(buf);
    zs.avail_out = sizeof(buf);
    ret = inflate(&zs, Z_NO_FLUSH);
    if (ret != Z_OK && ret != Z_STREAM_END) {
      inflateEnd(&zs);
      throw Error(ErrorKind::SizeMismatch, "corrupt gzip payload");
    }
    out.append(buf, sizeof(buf) - zs.avail_out);
  } while (ret != Z_STREAM_END && (zs.avail_in > 0 || zs.avail_out == 0));
  inflateEnd(&zs);
  if (ret != Z_STREAM_END) throw Error(ErrorKind::SizeMismatch, "truncated gzip payload");
  return out;
}

}  // namespace

VoxelGrid<std::uint8_t> read_nrrd(std::string_view bytes) {
  constexpr std::string_view kMagic = "NRRD0004";
  if (bytes.substr(0, kMagic.size()) != kMagic) throw Error(ErrorKind::MalformedHeader, "missing NRRD0004 magic");

  std::size_t pos = bytes.find('\n');
  if (pos == std::string_view::npos) throw Error(ErrorKind::MalformedHeader, "header not terminated");
  ++pos;

  std::map<std::string, std::string> fields;
  bool terminated = false;
  while (pos < bytes.size()) {
    auto eol = bytes.find('\n', pos);
    if (eol == std::string_view::npos) break;
    std::string line = trim(bytes.substr(pos, eol - pos));
    pos = eol + 1;
    if (line.empty()) {
      terminated = true;
      break;
    }
    if (line[0] == '#') continue;
    auto sep = line.find(": ");
    if (sep == std::string::npos) {
      // key:=value pairs and anything else unrecognized are ignored
      continue;
    }
    fields[lower(trim(line.substr(0, sep)))] = trim(line.substr(sep + 2));
  }
  if (!terminated) throw Error(ErrorKind::MalformedHeader, "header not terminated by a blank line");

  auto require = [&](const std::string& key) -> const std::string& {
    auto it = fields.find(key);
    if (it == fields.end()) throw Error(ErrorKind::MalformedHeader, "missing field '" + key + "'");
    return it->second;
  };

  const std::string type = lower(require("type"));
  if (type != "uint8" && type != "uchar" && type != "unsigned char" && type != "uint8_t") {
    throw Error(ErrorKind::UnsupportedFeature, "type '" + type + "'");
  }
  if (require("dimension") != "3") throw Error(ErrorKind::UnsupportedFeature, "dimension must be 3");

  Index3 dims{};
  {
    std::stringstream ss(require("sizes"));
    for (int a = 0; a < 3; ++a) {
      long long v = 0;
      if (!(ss >> v) || v <= 0 || v > (1 << 20)) throw Error(ErrorKind::MalformedHeader, "bad sizes");
      dims[a] = static_cast<int>(v);
    }
    std::string rest;
    if (ss >> rest) throw Error(ErrorKind::MalformedHeader, "sizes has more than 3 entries");
  }

  if (fields.count("data file") || fields.count("datafile")) {
    throw Error(ErrorKind::UnsupportedFeature, "detached data files");
  }

  Vec3 spacing{1.0, 1.0, 1.0};
  if (auto it = fields.find("space directions"); it != fields.end()) {
    const auto dirs = parse_directions(it->second);
    double sp[3];
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) {
        if (a != b && dirs[a][b] != 0.0) throw Error(ErrorKind::UnsupportedFeature, "non-diagonal space directions");
      }
      sp[a] = std::abs(dirs[a][a]);
      if (!(sp[a] > 0.0)) throw Error(ErrorKind::MalformedHeader, "zero spacing in space directions");
    }
    spacing = {sp[0], sp[1], sp[2]};
  } else if (auto it2 = fields.find("spacings"); it2 != fields.end()) {
    std::stringstream ss(it2->second);
    double sp[3];
    for (double& s : sp) {
      std::string tok;
      if (!(ss >> tok)) throw Error(ErrorKind::MalformedHeader, "bad spacings");
      s = parse_double(tok);
      if (!(s > 0.0)) throw Error(ErrorKind::MalformedHeader, "non-positive spacing");
    }
    spacing = {sp[0], sp[1], sp[2]};
  }

  if (auto it = fields.find("endian"); it != fields.end() && lower(it->second) != "little") {
    // Byte order is irrelevant for 8-bit data, but the contract only admits little.
    throw Error(ErrorKind::UnsupportedFeature, "endian '" + it->second + "'");
  }

  const std::string encoding = lower(require("encoding"));
  std::string payload;
  if (encoding == "raw") {
    payload = std::string(bytes.substr(pos));
  } else if (encoding == "gzip" || encoding == "gz") {
    payload = gunzip(bytes.substr(pos));
  } else {
    throw Error(ErrorKind::UnsupportedFeature, "encoding '" + encoding + "'");
  }

  const std::size_t expected =
      static_cast<std::size_t>(dims[0]) * static_cast<std::size_t>(dims[1]) * static_cast<std::size_t>(dims[2]);
  if (payload.size() != expected) {
    throw Error(ErrorKind::SizeMismatch,
                "payload has " + std::to_string(payload.size()) + " bytes, expected " + std::to_string(expected));
  }
  std::vector<std::uint8_t> data(payload.begin(), payload.end());
  return VoxelGrid<std::uint8_t>(dims, spacing, std::move(data));
}

LabelVolume read_label_volume(std::string_view bytes) { return LabelVolume(read_nrrd(bytes)); }

BinaryMask read_mask(std::string_view bytes) { return BinaryMask(read_nrrd(bytes)); }

std::string write_nrrd(const VoxelGrid<std::uint8_t>& grid) {
  const auto& d = grid.dims();
  const Vec3 s = grid.spacing();
  std::string out;
  out += "NRRD0004\n";
  out += "type: uint8\n";
  out += "dimension: 3\n";
  out += "sizes: " + std::to_string(d[0]) + " " + std::to_string(d[1]) + " " + std::to_string(d[2]) + "\n";
  out += "space directions: (" + format_double(s.x) + ",0,0) (0," + format_double(s.y) + ",0) (0,0," +
         format_double(s.z) + ")\n";
  out += "endian: little\n";
  out += "encoding: raw\n";
  out += "\n";
  const auto data = grid.data();
  out.append(reinterpret_cast<const char*>(data.data()), data.size());
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view bytes) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::Io, "cannot write " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(ErrorKind::Io, "short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace corelr
