// SPDX-License-Identifier: MIT

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "sixdof/dataset_io.h"
#include "sixdof/error.h"

namespace sixdof {
namespace {

[[noreturn]] void parse_fail(const fs::path& path, const std::string& what) {
  throw Error(ErrorCode::kParseError, path.string() + ": " + what);
}

enum class PlyFormat { kAscii, kBinaryLittle, kBinaryBig };

enum class PlyType { kInt8, kUInt8, kInt16, kUInt16, kInt32, kUInt32, kFloat32, kFloat64 };

bool parse_ply_type(const std::string& name, PlyType& type) {
  static const std::pair<const char*, PlyType> kTypes[] = {
      {"char", PlyType::kInt8},     {"int8", PlyType::kInt8},
      {"uchar", PlyType::kUInt8},   {"uint8", PlyType::kUInt8},
      {"short", PlyType::kInt16},   {"int16", PlyType::kInt16},
      {"ushort", PlyType::kUInt16}, {"uint16", PlyType::kUInt16},
      {"int", PlyType::kInt32},     {"int32", PlyType::kInt32},
      {"uint", PlyType::kUInt32},   {"uint32", PlyType::kUInt32},
      {"float", PlyType::kFloat32}, {"float32", PlyType::kFloat32},
      {"double", PlyType::kFloat64}, {"float64", PlyType::kFloat64}};
  for (const auto& [n, t] : kTypes) {
    if (name == n) {
      type = t;
      return true;
    }
  }
  return false;
}

std::size_t ply_type_size(PlyType t) {
  switch (t) {
    case PlyType::kInt8:
    case PlyType::kUInt8: return 1;
    case PlyType::kInt16:
    case PlyType::kUInt16: return 2;
    case PlyType::kInt32:
    case PlyType::kUInt32:
    case PlyType::kFloat32: return 4;
    case PlyType::kFloat64: return 8;
  }
  return 0;
}

struct PlyProperty {
  std::string name;
  PlyType type = PlyType::kFloat32;
  bool is_list = false;
  PlyType count_type = PlyType::kUInt8;
};

struct PlyElement {
  std::string name;
  std::size_t count = 0;
  std::vector<PlyProperty> properties;
};

// Reads scalar values from either the ascii token stream or the binary body.
class PlyReader {
 public:
  PlyReader(std::istream& in, PlyFormat format, const fs::path& path)
      : in_(in), format_(format), path_(path) {}

  double read(PlyType type) {
    if (format_ == PlyFormat::kAscii) {
      double v;
      if (!(in_ >> v)) parse_fail(path_, "unexpected end of ascii data");
      return v;
    }
    unsigned char buf[8];
    const std::size_t n = ply_type_size(type);
    if (!in_.read(reinterpret_cast<char*>(buf), static_cast<std::streamsize>(n))) {
      parse_fail(path_, "unexpected end of binary data");
    }
    const bool swap = (format_ == PlyFormat::kBinaryBig) ==
                      (std::endian::native == std::endian::little);
    if (swap) std::reverse(buf, buf + n);
    switch (type) {
      case PlyType::kInt8: return static_cast<std::int8_t>(buf[0]);
      case PlyType::kUInt8: return buf[0];
      case PlyType::kInt16: return load<std::int16_t>(buf);
      case PlyType::kUInt16: return load<std::uint16_t>(buf);
      case PlyType::kInt32: return load<std::int32_t>(buf);
      case PlyType::kUInt32: return load<std::uint32_t>(buf);
      case PlyType::kFloat32: return load<float>(buf);
      case PlyType::kFloat64: return load<double>(buf);
    }
    return 0.0;
  }

 private:
  template <typename T>
  static T load(const unsigned char* buf) {
    T v;
    std::memcpy(&v, buf, sizeof(T));
    return v;
  }

  std::istream& in_;
  PlyFormat format_;
  const fs::path& path_;
};

void add_polygon(Mesh& mesh, const std::vector<int>& poly, const fs::path& path) {
  if (poly.size() < 3) parse_fail(path, "face with fewer than 3 vertices");
  for (std::size_t i = 1; i + 1 < poly.size(); ++i) {
    mesh.triangles.push_back({poly[0], poly[i], poly[i + 1]});
  }
}

Mesh load_ply(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());

  std::string line;
  if (!std::getline(in, line) || line.rfind("ply", 0) != 0) parse_fail(path, "missing ply magic");
  PlyFormat format = PlyFormat::kAscii;
  bool have_format = false;
  std::vector<PlyElement> elements;
  bool header_done = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream ls(line);
    std::string kw;
    ls >> kw;
    if (kw == "format") {
      std::string f;
      ls >> f;
      if (f == "ascii") format = PlyFormat::kAscii;
      else if (f == "binary_little_endian") format = PlyFormat::kBinaryLittle;
      else if (f == "binary_big_endian") format = PlyFormat::kBinaryBig;
      else parse_fail(path, "unknown format " + f);
      have_format = true;
    } else if (kw == "element") {
      PlyElement e;
      if (!(ls >> e.name >> e.count)) parse_fail(path, "bad element line");
      elements.push_back(e);
    } else if (kw == "property") {
      if (elements.empty()) parse_fail(path, "property before element");
      PlyProperty p;
      std::string t;
      ls >> t;
      if (t == "list") {
        std::string ct, vt;
        ls >> ct >> vt >> p.name;
        p.is_list = true;
        if (!parse_ply_type(ct, p.count_type) || !parse_ply_type(vt, p.type)) {
          parse_fail(path, "bad list property types");
        }
      } else {
        ls >> p.name;
        if (!parse_ply_type(t, p.type)) parse_fail(path, "unknown property type " + t);
      }
      elements.back().properties.push_back(p);
    } else if (kw == "end_header") {
      header_done = true;
      break;
    }
  }
  if (!header_done || !have_format) parse_fail(path, "truncated header");

  Mesh mesh;
  PlyReader reader(in, format, path);
  for (const auto& e : elements) {
    const bool is_vertex = e.name == "vertex";
    const bool is_face = e.name == "face";
    int ix = -1, iy = -1, iz = -1, ir = -1, ig = -1, ib = -1, iface = -1;
    for (std::size_t i = 0; i < e.properties.size(); ++i) {
      const auto& n = e.properties[i].name;
      if (n == "x") ix = static_cast<int>(i);
      if (n == "y") iy = static_cast<int>(i);
      if (n == "z") iz = static_cast<int>(i);
      if (n == "red") ir = static_cast<int>(i);
      if (n == "green") ig = static_cast<int>(i);
      if (n == "blue") ib = static_cast<int>(i);
      if ((n == "vertex_indices" || n == "vertex_index") && e.properties[i].is_list) {
        iface = static_cast<int>(i);
      }
    }
    if (is_vertex && (ix < 0 || iy < 0 || iz < 0)) parse_fail(path, "vertex without x/y/z");
    const bool has_color = is_vertex && ir >= 0 && ig >= 0 && ib >= 0;

    std::vector<double> scalars(e.properties.size());
    std::vector<int> poly;
    for (std::size_t row = 0; row < e.count; ++row) {
      for (std::size_t i = 0; i < e.properties.size(); ++i) {
        const auto& p = e.properties[i];
        if (!p.is_list) {
          scalars[i] = reader.read(p.type);
          continue;
        }
        const double count = reader.read(p.count_type);
        if (count < 0 || count > 1e6) parse_fail(path, "bad list length");
        const auto n = static_cast<std::size_t>(count);
        if (is_face && static_cast<int>(i) == iface) poly.assign(n, 0);
        for (std::size_t k = 0; k < n; ++k) {
          const double v = reader.read(p.type);
          if (is_face && static_cast<int>(i) == iface) poly[k] = static_cast<int>(v);
        }
      }
      if (is_vertex) {
        mesh.vertices.emplace_back(scalars[ix], scalars[iy], scalars[iz]);
        if (has_color) {
          mesh.colors.push_back({static_cast<std::uint8_t>(scalars[ir]),
                                 static_cast<std::uint8_t>(scalars[ig]),
                                 static_cast<std::uint8_t>(scalars[ib])});
        }
      } else if (is_face && iface >= 0) {
        add_polygon(mesh, poly, path);
      }
    }
  }
  return mesh;
}

int resolve_obj_index(const std::string& token, std::size_t vertex_count,
                      const fs::path& path) {
  const std::string head = token.substr(0, token.find('/'));
  int idx = 0;
  try {
    std::size_t used = 0;
    idx = std::stoi(head, &used);
    if (used != head.size()) parse_fail(path, "bad face index " + token);
  } catch (const std::logic_error&) {
    parse_fail(path, "bad face index " + token);
  }
  if (idx < 0) idx += static_cast<int>(vertex_count);
  else idx -= 1;
  return idx;
}

Mesh load_obj(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  Mesh mesh;
  std::vector<std::array<std::uint8_t, 3>> colors;
  bool all_colored = true;
  std::string line;
  std::vector<int> poly;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string kw;
    if (!(ls >> kw) || kw[0] == '#') continue;
    if (kw == "v") {
      double x, y, z;
      if (!(ls >> x >> y >> z)) parse_fail(path, "bad vertex line");
      mesh.vertices.emplace_back(x, y, z);
      double r, g, b;
      if (ls >> r >> g >> b) {
        auto to8 = [](double c) {
          return static_cast<std::uint8_t>(std::clamp(c <= 1.0 ? c * 255.0 : c, 0.0, 255.0));
        };
        colors.push_back({to8(r), to8(g), to8(b)});
      } else {
        all_colored = false;
      }
    } else if (kw == "f") {
      poly.clear();
      std::string tok;
      while (ls >> tok) poly.push_back(resolve_obj_index(tok, mesh.vertices.size(), path));
      add_polygon(mesh, poly, path);
    }
  }
  if (all_colored && colors.size() == mesh.vertices.size()) mesh.colors = std::move(colors);
  return mesh;
}

}  // namespace

Mesh load_mesh(const fs::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), ::tolower);
  Mesh mesh;
  if (ext == ".ply") {
    mesh = load_ply(path);
  } else if (ext == ".obj") {
    mesh = load_obj(path);
  } else {
    throw Error(ErrorCode::kParseError, "unsupported mesh format " + path.string());
  }
  try {
    mesh.validate();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kEmptyMesh) throw;
    throw Error(ErrorCode::kParseError, path.string() + ": " + e.what());
  }
  return mesh;
}

void save_mesh_ply(const fs::path& path, const Mesh& mesh, bool binary) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  const bool color = !mesh.colors.empty();
  out << "ply\nformat "
      << (binary ? (std::endian::native == std::endian::little ? "binary_little_endian"
                                                                : "binary_big_endian")
                 : "ascii")
      << " 1.0\nelement vertex " << mesh.vertices.size()
      << "\nproperty double x\nproperty double y\nproperty double z\n";
  if (color) out << "property uchar red\nproperty uchar green\nproperty uchar blue\n";
  out << "element face " << mesh.triangles.size()
      << "\nproperty list uchar int vertex_indices\nend_header\n";
  if (binary) {
    for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
      out.write(reinterpret_cast<const char*>(mesh.vertices[i].data()), 3 * sizeof(double));
      if (color) out.write(reinterpret_cast<const char*>(mesh.colors[i].data()), 3);
    }
    for (const auto& t : mesh.triangles) {
      const std::uint8_t n = 3;
      out.write(reinterpret_cast<const char*>(&n), 1);
      out.write(reinterpret_cast<const char*>(t.data()), 3 * sizeof(int));
    }
  } else {
    out.precision(17);
    for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
      const auto& v = mesh.vertices[i];
      out << v.x() << ' ' << v.y() << ' ' << v.z();
      if (color) {
        out << ' ' << int(mesh.colors[i][0]) << ' ' << int(mesh.colors[i][1]) << ' '
            << int(mesh.colors[i][2]);
      }
      out << '\n';
    }
    for (const auto& t : mesh.triangles) out << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  }
  if (!out) throw Error(ErrorCode::kIoError, "failed writing " + path.string());
}

void save_mesh_obj(const fs::path& path, const Mesh& mesh) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  out.precision(17);
  for (const auto& v : mesh.vertices) out << "v " << v.x() << ' ' << v.y() << ' ' << v.z() << '\n';
  for (const auto& t : mesh.triangles) {
    out << "f " << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << '\n';
  }
}

}  // namespace sixdof
