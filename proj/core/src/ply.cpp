#include "pickplace/ply.hpp"

#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "pickplace/error.hpp"

namespace pickplace {

namespace {

static_assert(std::endian::native == std::endian::little, "binary PLY I/O assumes a little-endian host");

struct Property {
  std::string name;
  std::string type;
  std::size_t size = 0;
};

std::size_t type_size(const std::string& type) {
  if (type == "char" || type == "uchar" || type == "int8" || type == "uint8") return 1;
  if (type == "short" || type == "ushort" || type == "int16" || type == "uint16") return 2;
  if (type == "int" || type == "uint" || type == "int32" || type == "uint32" || type == "float" ||
      type == "float32")
    return 4;
  if (type == "double" || type == "float64") return 8;
  return 0;
}

template <typename T>
double read_as(const char* bytes) {
  T v;
  std::memcpy(&v, bytes, sizeof(T));
  return static_cast<double>(v);
}

double decode(const std::string& type, const char* bytes) {
  if (type == "char" || type == "int8") return read_as<std::int8_t>(bytes);
  if (type == "uchar" || type == "uint8") return read_as<std::uint8_t>(bytes);
  if (type == "short" || type == "int16") return read_as<std::int16_t>(bytes);
  if (type == "ushort" || type == "uint16") return read_as<std::uint16_t>(bytes);
  if (type == "int" || type == "int32") return read_as<std::int32_t>(bytes);
  if (type == "uint" || type == "uint32") return read_as<std::uint32_t>(bytes);
  if (type == "float" || type == "float32") return read_as<float>(bytes);
  return read_as<double>(bytes);
}

[[noreturn]] void parse_error(const std::filesystem::path& path, std::size_t line, const std::string& what) {
  throw Error(ErrorKind::ParseError, path.string() + ":" + std::to_string(line) + ": " + what);
}

}  // namespace

void save_ply(const PointCloud& cloud, const std::filesystem::path& path, PlyEncoding encoding) {
  cloud.validate();
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::IoError, "cannot open " + path.string() + " for writing");

  out << "ply\n"
      << (encoding == PlyEncoding::Ascii ? "format ascii 1.0\n" : "format binary_little_endian 1.0\n")
      << "comment frame " << cloud.frame.name() << "\n"
      << "element vertex " << cloud.size() << "\n"
      << "property double x\nproperty double y\nproperty double z\n";
  if (cloud.has_normals()) out << "property double nx\nproperty double ny\nproperty double nz\n";
  out << "end_header\n";

  if (encoding == PlyEncoding::Ascii) {
    out << std::setprecision(std::numeric_limits<double>::max_digits10);
    for (std::size_t i = 0; i < cloud.size(); ++i) {
      const Vec3& p = cloud.points[i];
      out << p.x() << ' ' << p.y() << ' ' << p.z();
      if (cloud.has_normals()) {
        const Vec3& n = cloud.normals[i];
        out << ' ' << n.x() << ' ' << n.y() << ' ' << n.z();
      }
      out << '\n';
    }
  } else {
    for (std::size_t i = 0; i < cloud.size(); ++i) {
      out.write(reinterpret_cast<const char*>(cloud.points[i].data()), 3 * sizeof(double));
      if (cloud.has_normals()) out.write(reinterpret_cast<const char*>(cloud.normals[i].data()), 3 * sizeof(double));
    }
  }
  if (!out) throw Error(ErrorKind::IoError, "write failed for " + path.string());
}

PointCloud load_ply(const std::filesystem::path& path, std::vector<std::string>* warnings) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path.string());

  std::size_t line_no = 0;
  std::string line;
  auto next_line = [&]() -> bool {
    if (!std::getline(in, line)) return false;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
  };

  if (!next_line() || line != "ply") parse_error(path, line_no, "missing 'ply' magic");

  bool ascii = true;
  bool have_format = false;
  std::string frame = "robot_base";
  std::size_t vertex_count = 0;
  bool in_vertex = false;
  bool seen_vertex = false;
  std::vector<Property> props;

  for (;;) {
    if (!next_line()) parse_error(path, line_no, "unexpected end of file in header");
    std::istringstream ls(line);
    std::string word;
    ls >> word;
    if (word == "end_header") break;
    if (word == "format") {
      std::string fmt, version;
      ls >> fmt >> version;
      if (fmt == "ascii") {
        ascii = true;
      } else if (fmt == "binary_little_endian") {
        ascii = false;
      } else {
        parse_error(path, line_no, "unsupported format '" + fmt + "'");
      }
      have_format = true;
    } else if (word == "comment") {
      std::string key, value;
      ls >> key >> value;
      if (key == "frame" && !value.empty()) frame = value;
    } else if (word == "obj_info" || word.empty()) {
      continue;
    } else if (word == "element") {
      std::string name;
      long long count = -1;
      ls >> name >> count;
      if (count < 0) parse_error(path, line_no, "bad element count");
      in_vertex = (name == "vertex");
      if (in_vertex) {
        vertex_count = static_cast<std::size_t>(count);
        seen_vertex = true;
      } else if (!seen_vertex) {
        parse_error(path, line_no, "element '" + name + "' before vertex element is not supported");
      }
    } else if (word == "property") {
      if (!in_vertex) continue;
      std::string type, name;
      ls >> type >> name;
      if (type == "list") parse_error(path, line_no, "list properties on vertices are not supported");
      const std::size_t size = type_size(type);
      if (size == 0) parse_error(path, line_no, "unknown property type '" + type + "'");
      props.push_back({name, type, size});
    } else {
      parse_error(path, line_no, "unexpected header keyword '" + word + "'");
    }
  }
  if (!have_format) parse_error(path, line_no, "missing format line");

  int ix = -1, iy = -1, iz = -1, inx = -1, iny = -1, inz = -1;
  for (std::size_t i = 0; i < props.size(); ++i) {
    const std::string& n = props[i].name;
    int* slot = n == "x" ? &ix : n == "y" ? &iy : n == "z" ? &iz : n == "nx" ? &inx : n == "ny" ? &iny : n == "nz" ? &inz : nullptr;
    if (slot) {
      *slot = static_cast<int>(i);
    } else if (warnings) {
      warnings->push_back("skipping unknown vertex property '" + n + "'");
    }
  }
  if (ix < 0 || iy < 0 || iz < 0) parse_error(path, line_no, "vertex element lacks x, y, z properties");
  const bool normals = inx >= 0 && iny >= 0 && inz >= 0;

  PointCloud cloud{.points = {}, .normals = {}, .frame = FrameId(frame)};
  cloud.points.reserve(vertex_count);
  if (normals) cloud.normals.reserve(vertex_count);
  std::vector<double> values(props.size());

  if (ascii) {
    for (std::size_t v = 0; v < vertex_count; ++v) {
      if (!next_line()) {
        parse_error(path, line_no + 1, "expected " + std::to_string(vertex_count) + " vertex rows, found " +
                                           std::to_string(v));
      }
      const char* p = line.data();
      const char* end = line.data() + line.size();
      for (std::size_t k = 0; k < props.size(); ++k) {
        while (p < end && (*p == ' ' || *p == '\t')) ++p;
        auto [next, ec] = std::from_chars(p, end, values[k]);
        if (ec != std::errc()) parse_error(path, line_no, "malformed value for property '" + props[k].name + "'");
        p = next;
      }
      cloud.points.emplace_back(values[ix], values[iy], values[iz]);
      if (normals) cloud.normals.emplace_back(values[inx], values[iny], values[inz]);
    }
  } else {
    std::size_t stride = 0;
    for (const Property& p : props) stride += p.size;
    std::vector<char> row(stride);
    for (std::size_t v = 0; v < vertex_count; ++v) {
      if (!in.read(row.data(), static_cast<std::streamsize>(stride))) {
        parse_error(path, line_no + 1, "binary payload truncated at vertex " + std::to_string(v) + " of " +
                                           std::to_string(vertex_count));
      }
      std::size_t offset = 0;
      for (std::size_t k = 0; k < props.size(); ++k) {
        values[k] = decode(props[k].type, row.data() + offset);
        offset += props[k].size;
      }
      cloud.points.emplace_back(values[ix], values[iy], values[iz]);
      if (normals) cloud.normals.emplace_back(values[inx], values[iny], values[inz]);
    }
  }

  try {
    cloud.validate();
  } catch (const Error& e) {
    parse_error(path, line_no, e.what());
  }
  return cloud;
}

}  // namespace pickplace
