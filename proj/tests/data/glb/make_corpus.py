"""Writes the GLB test corpus: good/*.glb must validate, bad/*.glb must not.

Run from this directory:  python3 make_corpus.py
Each good file's expected mesh count, triangle count and bounds are written to
expected.json from the construction data below.
"""

import json
import struct
from pathlib import Path

HERE = Path(__file__).resolve().parent

ARRAY_BUFFER = 34962
ELEMENT_ARRAY_BUFFER = 34963
FLOAT = 5126
UNSIGNED_SHORT = 5123


def pad(data: bytes, fill: bytes, align: int = 4) -> bytes:
    return data + fill * ((-len(data)) % align)


def glb(doc: dict, binary: bytes = b"", magic: bytes = b"glTF", version: int = 2, length_delta: int = 0,
        raw_json: bytes | None = None) -> bytes:
    json_bytes = pad(raw_json if raw_json is not None else json.dumps(doc, separators=(",", ":")).encode(), b" ")
    chunks = struct.pack("<II", len(json_bytes), 0x4E4F534A) + json_bytes
    if binary:
        bin_bytes = pad(binary, b"\x00")
        chunks += struct.pack("<II", len(bin_bytes), 0x004E4942) + bin_bytes
    total = 12 + len(chunks)
    return magic + struct.pack("<II", version, total + length_delta) + chunks


class Builder:
    """Accumulates one binary buffer plus the glTF objects that index into it."""

    def __init__(self):
        self.bin = b""
        self.doc = {"asset": {"version": "2.0", "generator": "corpus"}, "buffers": [], "bufferViews": [],
                    "accessors": [], "meshes": [], "nodes": [], "scenes": [{"nodes": []}], "scene": 0}
        self.bounds = None
        self.triangles = 0

    def _view(self, data: bytes, target: int) -> int:
        self.bin = pad(self.bin, b"\x00")
        self.doc["bufferViews"].append({"buffer": 0, "byteOffset": len(self.bin), "byteLength": len(data),
                                        "target": target})
        self.bin += data
        return len(self.doc["bufferViews"]) - 1

    def positions(self, points) -> int:
        data = b"".join(struct.pack("<fff", *p) for p in points)
        # Bounds as float32, matching what a reader sees.
        f32 = [struct.unpack("<fff", struct.pack("<fff", *p)) for p in points]
        lo = [min(p[i] for p in f32) for i in range(3)]
        hi = [max(p[i] for p in f32) for i in range(3)]
        view = self._view(data, ARRAY_BUFFER)
        self.doc["accessors"].append({"bufferView": view, "componentType": FLOAT, "count": len(points),
                                      "type": "VEC3", "min": lo, "max": hi})
        if self.bounds is None:
            self.bounds = [lo, hi]
        else:
            self.bounds = [[min(a, b) for a, b in zip(self.bounds[0], lo)],
                           [max(a, b) for a, b in zip(self.bounds[1], hi)]]
        return len(self.doc["accessors"]) - 1

    def indices(self, idx) -> int:
        view = self._view(b"".join(struct.pack("<H", i) for i in idx), ELEMENT_ARRAY_BUFFER)
        self.doc["accessors"].append({"bufferView": view, "componentType": UNSIGNED_SHORT, "count": len(idx),
                                      "type": "SCALAR"})
        return len(self.doc["accessors"]) - 1

    def mesh(self, points, idx=None, mode=4) -> None:
        prim = {"attributes": {"POSITION": self.positions(points)}}
        count = len(points)
        if idx is not None:
            prim["indices"] = self.indices(idx)
            count = len(idx)
        if mode != 4:
            prim["mode"] = mode
        self.triangles += count // 3 if mode == 4 else max(count - 2, 0)
        self.doc["meshes"].append({"primitives": [prim]})
        self.doc["nodes"].append({"mesh": len(self.doc["meshes"]) - 1})
        self.doc["scenes"][0]["nodes"].append(len(self.doc["nodes"]) - 1)

    def build(self) -> bytes:
        self.doc["buffers"] = [{"byteLength": len(pad(self.bin, b"\x00"))}]
        return glb(self.doc, self.bin)

    def expected(self, data: bytes) -> dict:
        return {"byte_length": len(data), "mesh_count": len(self.doc["meshes"]), "triangle_count": self.triangles,
                "min": self.bounds[0], "max": self.bounds[1]}


def triangle() -> Builder:
    b = Builder()
    b.mesh([(0, 0, 0), (1, 0, 0), (0, 1, 0)])
    return b


def indexed_quad() -> Builder:
    b = Builder()
    b.mesh([(-1, -1, 0), (1, -1, 0), (1, 1, 0), (-1, 1, 0)], [0, 1, 2, 0, 2, 3])
    return b


def two_meshes() -> Builder:
    b = Builder()
    b.mesh([(0, 0, 0), (1, 0, 0), (0, 1, 0)])
    b.mesh([(2, 2, 2), (3, 2, 2), (2, 3, 5)])
    return b


def strip() -> Builder:
    b = Builder()
    b.mesh([(0, 0, 0), (0, 1, 0), (1, 0, 0), (1, 1, 0), (2, 0, 0.5)], mode=5)
    return b


def cube() -> Builder:
    b = Builder()
    pts = [(x, y, z) for x in (-0.5, 0.5) for y in (-0.5, 0.5) for z in (-0.5, 0.5)]
    faces = [(0, 1, 3, 2), (4, 6, 7, 5), (0, 4, 5, 1), (2, 3, 7, 6), (0, 2, 6, 4), (1, 5, 7, 3)]
    idx = []
    for a, b_, c, d in faces:
        idx += [a, b_, c, a, c, d]
    b.mesh(pts, idx)
    return b


def heart() -> Builder:
    # A squashed octahedron standing in for the heart model served by the mocks.
    b = Builder()
    pts = [(0.06, 0, 0), (-0.05, 0, 0), (0, 0.07, 0), (0, -0.09, 0), (0, 0, 0.045), (0, 0, -0.045)]
    idx = []
    for top in (2, 3):
        for a, c in ((0, 4), (4, 1), (1, 5), (5, 0)):
            idx += [top, a, c] if top == 2 else [top, c, a]
    b.mesh(pts, idx)
    b.doc["materials"] = [{"name": "myocardium",
                           "pbrMetallicRoughness": {"baseColorFactor": [0.7, 0.1, 0.12, 1.0]}}]
    b.doc["meshes"][0]["primitives"][0]["material"] = 0
    return b


def main() -> None:
    good = {"triangle": triangle(), "indexed_quad": indexed_quad(), "two_meshes": two_meshes(),
            "triangle_strip": strip(), "cube": cube(), "heart": heart()}
    (HERE / "good").mkdir(exist_ok=True)
    (HERE / "bad").mkdir(exist_ok=True)
    expected = {}
    for name, builder in good.items():
        data = builder.build()
        (HERE / "good" / f"{name}.glb").write_bytes(data)
        expected[name] = builder.expected(data)

    base = triangle()
    ok = base.build()
    bad = {
        "bad_magic": b"GLTF" + ok[4:],
        "version_1": glb(base.doc, base.bin, version=1),
        "length_mismatch": glb(base.doc, base.bin, length_delta=8),
        "malformed_json": glb({}, base.bin, raw_json=b'{"asset":{"version":"2.0"},"meshes":[{"primitives":['),
        "zero_meshes": glb({"asset": {"version": "2.0"}, "scenes": [{"nodes": []}], "scene": 0}),
    }
    for name, data in bad.items():
        (HERE / "bad" / f"{name}.glb").write_bytes(data)

    (HERE / "expected.json").write_text(json.dumps(expected, indent=2) + "\n")


if __name__ == "__main__":
    main()
