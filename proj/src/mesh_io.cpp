#include "radsim/mesh_io.hpp"

#include <algorithm>
#include <cctype>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace radsim {

namespace {

[[noreturn]] void fail(const std::string& path, std::size_t line, const std::string& what) {
  throw std::runtime_error(path + ":" + std::to_string(line) + ": " + what);
}

void push_face(LoadedMesh& mesh, const std::vector<uint32_t>& poly, const std::string& group,
               const std::string& path, std::size_t line) {
  if (poly.size() < 3) fail(path, line, "face with fewer than 3 vertices");
  for (uint32_t v : poly)
    if (v >= mesh.vertices.size()) fail(path, line, "vertex index out of range");
  for (std::size_t i = 1; i + 1 < poly.size(); ++i) {  // fan triangulation
    mesh.faces.push_back({poly[0], poly[i], poly[i + 1]});
    mesh.face_groups.push_back(group);
  }
}

}  // namespace

LoadedMesh load_obj(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("load_obj: cannot open " + path);

  LoadedMesh mesh;
  std::string current_group;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(f, line)) {
    ++line_no;
    std::istringstream ss(line);
    std::string tag;
    if (!(ss >> tag) || tag[0] == '#') continue;

    if (tag == "v") {
      Vec3 v;
      if (!(ss >> v.x >> v.y >> v.z)) fail(path, line_no, "malformed vertex");
      mesh.vertices.push_back(v);
    } else if (tag == "usemtl") {
      if (!(ss >> current_group)) fail(path, line_no, "usemtl without a name");
    } else if (tag == "f") {
      std::vector<uint32_t> poly;
      std::string vert;
      while (ss >> vert) {
        // "i", "i/j", "i//k", "i/j/k"; only the position index matters here.
        std::size_t slash = vert.find('/');
        long idx = 0;
        try {
          idx = std::stol(vert.substr(0, slash));
        } catch (const std::exception&) {
          fail(path, line_no, "malformed face index '" + vert + "'");
        }
        if (idx < 0) idx = long(mesh.vertices.size()) + idx + 1;  // relative index
        if (idx < 1) fail(path, line_no, "face index out of range");
        poly.push_back(uint32_t(idx - 1));
      }
      push_face(mesh, poly, current_group, path, line_no);
    }
    // vn/vt/o/g/s/mtllib and anything else: irrelevant to the tracer.
  }
  return mesh;
}

namespace {

enum class PlyFormat { ascii, binary_le, binary_be };

struct PlyProperty {
  std::string name;
  int size = 0;        // bytes per scalar
  bool is_float = false;
  bool is_list = false;
  int count_size = 0;  // list only
};

struct PlyElement {
  std::string name;
  std::size_t count = 0;
  std::vector<PlyProperty> props;
};

int scalar_size(const std::string& type) {
  if (type == "char" || type == "uchar" || type == "int8" || type == "uint8") return 1;
  if (type == "short" || type == "ushort" || type == "int16" || type == "uint16") return 2;
  if (type == "int" || type == "uint" || type == "int32" || type == "uint32" ||
      type == "float" || type == "float32")
    return 4;
  if (type == "double" || type == "float64" || type == "int64" || type == "uint64") return 8;
  return 0;
}

bool scalar_is_float(const std::string& type) {
  return type == "float" || type == "float32" || type == "double" || type == "float64";
}

struct BinaryReader {
  const std::string& bytes;
  std::size_t pos;
  bool swap;
  const std::string& path;

  uint64_t read_uint(int size) {
    check(size);
    uint64_t v = 0;
    for (int i = 0; i < size; ++i) {
      int shift = swap ? (size - 1 - i) * 8 : i * 8;
      v |= uint64_t((unsigned char)bytes[pos + i]) << shift;
    }
    pos += size;
    return v;
  }

  double read_value(const PlyProperty& p) {
    if (!p.is_float) return double(int64_t(read_uint(p.size)));  // sign only matters for coords
    check(p.size);
    if (p.size == 4) {
      uint32_t u = uint32_t(read_uint(4));
      float f;
      std::memcpy(&f, &u, 4);
      return f;
    }
    uint64_t u = read_uint(8);
    double d;
    std::memcpy(&d, &u, 8);
    return d;
  }

  void check(int size) {
    if (pos + size > bytes.size())
      throw std::runtime_error(path + ": truncated binary data at byte " + std::to_string(pos));
  }
};

}  // namespace

LoadedMesh load_ply(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("load_ply: cannot open " + path);
  std::string bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());

  // Header is always ascii lines up to end_header.
  std::size_t pos = 0;
  std::size_t line_no = 0;
  auto next_line = [&]() -> std::string {
    if (pos >= bytes.size()) fail(path, line_no, "unexpected end of header");
    std::size_t eol = bytes.find('\n', pos);
    if (eol == std::string::npos) eol = bytes.size();
    std::string line = bytes.substr(pos, eol - pos);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    pos = eol + 1;
    ++line_no;
    return line;
  };

  if (next_line() != "ply") fail(path, 1, "missing 'ply' magic");
  PlyFormat format = PlyFormat::ascii;
  std::vector<PlyElement> elements;
  bool have_format = false;
  while (true) {
    std::string line = next_line();
    std::istringstream ss(line);
    std::string tag;
    ss >> tag;
    if (tag == "comment" || tag == "obj_info" || tag.empty()) continue;
    if (tag == "end_header") break;
    if (tag == "format") {
      std::string fmt, version;
      ss >> fmt >> version;
      if (fmt == "ascii") format = PlyFormat::ascii;
      else if (fmt == "binary_little_endian") format = PlyFormat::binary_le;
      else if (fmt == "binary_big_endian") format = PlyFormat::binary_be;
      else fail(path, line_no, "unknown format '" + fmt + "'");
      have_format = true;
    } else if (tag == "element") {
      PlyElement el;
      if (!(ss >> el.name >> el.count)) fail(path, line_no, "malformed element");
      elements.push_back(el);
    } else if (tag == "property") {
      if (elements.empty()) fail(path, line_no, "property before any element");
      PlyProperty p;
      std::string type;
      ss >> type;
      if (type == "list") {
        std::string count_type, item_type;
        if (!(ss >> count_type >> item_type >> p.name))
          fail(path, line_no, "malformed list property");
        p.is_list = true;
        p.count_size = scalar_size(count_type);
        p.size = scalar_size(item_type);
        p.is_float = scalar_is_float(item_type);
        if (p.count_size == 0 || p.size == 0) fail(path, line_no, "unknown list types");
      } else {
        if (!(ss >> p.name)) fail(path, line_no, "malformed property");
        p.size = scalar_size(type);
        p.is_float = scalar_is_float(type);
        if (p.size == 0) fail(path, line_no, "unknown property type '" + type + "'");
      }
      elements.back().props.push_back(p);
    } else {
      fail(path, line_no, "unknown header line '" + tag + "'");
    }
  }
  if (!have_format) fail(path, line_no, "missing format line");

  LoadedMesh mesh;
  BinaryReader reader{bytes, pos, format == PlyFormat::binary_be, path};
  std::istringstream ascii_rest;
  if (format == PlyFormat::ascii) ascii_rest.str(bytes.substr(pos));

  auto ascii_value = [&](const char* what) {
    double v;
    if (!(ascii_rest >> v)) throw std::runtime_error(path + ": missing " + what);
    return v;
  };

  for (const PlyElement& el : elements) {
    bool is_vertex = el.name == "vertex";
    bool is_face = el.name == "face";
    for (std::size_t i = 0; i < el.count; ++i) {
      Vec3 v;
      std::vector<uint32_t> poly;
      for (const PlyProperty& p : el.props) {
        if (p.is_list) {
          std::size_t n = format == PlyFormat::ascii ? std::size_t(ascii_value("list count"))
                                                     : std::size_t(reader.read_uint(p.count_size));
          if (n > 1024) throw std::runtime_error(path + ": absurd list length");
          for (std::size_t k = 0; k < n; ++k) {
            double item = format == PlyFormat::ascii ? ascii_value("list item")
                                                     : reader.read_value(p);
            if (is_face && (p.name == "vertex_indices" || p.name == "vertex_index")) {
              if (item < 0) throw std::runtime_error(path + ": negative face index");
              poly.push_back(uint32_t(item));
            }
          }
        } else {
          double value =
              format == PlyFormat::ascii ? ascii_value(p.name.c_str()) : reader.read_value(p);
          if (is_vertex) {
            if (p.name == "x") v.x = value;
            else if (p.name == "y") v.y = value;
            else if (p.name == "z") v.z = value;
          }
        }
      }
      if (is_vertex) mesh.vertices.push_back(v);
      if (is_face && !poly.empty()) push_face(mesh, poly, "", path, 0);
    }
  }
  return mesh;
}

LoadedMesh load_mesh(const std::string& path) {
  std::size_t dot = path.rfind('.');
  std::string ext = dot == std::string::npos ? "" : path.substr(dot + 1);
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return char(std::tolower(c)); });
  if (ext == "obj") return load_obj(path);
  if (ext == "ply") return load_ply(path);
  throw std::runtime_error("load_mesh: unsupported extension '" + ext + "' for " + path);
}

}  // namespace radsim
