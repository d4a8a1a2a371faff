#pragma once

#include <cstdint>
#include <span>

#include "xrauthor/common/errors.hpp"
#include "xrauthor/common/types.hpp"

namespace xrauthor::bundle {

// kind() is one of BadMagic, UnsupportedVersion, LengthMismatch,
// MalformedJsonChunk, NoMeshes.
class GlbError : public Error {
 public:
  GlbError(std::string kind, const std::string& message) : Error(std::move(kind), message) {}
};

// Checks the binary glTF container and summarizes its geometry.
//
// Verified: the 12-byte header (magic "glTF", version 2, declared length equal
// to the byte count), a leading 4-byte aligned JSON chunk that parses to an
// object with asset.version, and at least one mesh with primitives whose
// accessor references resolve.
//
// Triangles are counted per primitive from the index accessor (or POSITION
// when unindexed): TRIANGLES gives count/3, strips and fans count-2, other
// modes none. Bounds are the union of POSITION accessor min/max in mesh-local
// space; node transforms are not applied.
AssetMeta validate_glb(std::span<const std::uint8_t> bytes, AssetSource source = AssetSource::Generated);

}  // namespace xrauthor::bundle
