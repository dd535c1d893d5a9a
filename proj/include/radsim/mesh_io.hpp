#pragma once

#include <array>
#include <string>
#include <vector>

#include "radsim/geometry.hpp"

namespace radsim {

// Geometry as it comes off disk: positions, triangulated faces, and the OBJ
// material group of each face ("" when the file has none).
struct LoadedMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<uint32_t, 3>> faces;
  std::vector<std::string> face_groups;
};

// Wavefront OBJ: v/f/usemtl are honored, polygons are fan-triangulated,
// everything else is skipped. Errors carry the line number.
LoadedMesh load_obj(const std::string& path);

// PLY, ascii or binary (either endianness). Polygonal faces are
// fan-triangulated. Errors carry the offending line or byte offset.
LoadedMesh load_ply(const std::string& path);

// Dispatch on file extension (.obj/.ply).
LoadedMesh load_mesh(const std::string& path);

}  // namespace radsim
