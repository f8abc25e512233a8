#!/usr/bin/env python3
"""Regenerate the reference fixtures under fixtures/formats/.

GeoTIFFs are written by GDAL (through rasterio) and shapefiles by pyshp, so the
C++ readers are checked against files they did not produce themselves. Each
fixture gets an expected.json entry recorded by reading the file back with the
same reference tool.

    pip install rasterio pyshp
    python3 tools/make_fixtures.py fixtures/formats
"""
import json
import os
import sys

import numpy as np
import rasterio
from rasterio.transform import from_origin
import shapefile


def write_tif(out_dir, name, data, transform, crs=None, nodata=None, **opts):
    path = os.path.join(out_dir, name)
    profile = dict(driver="GTiff", width=data.shape[1], height=data.shape[0],
                   count=1, dtype=data.dtype, transform=transform)
    if crs:
        profile["crs"] = crs
    if nodata is not None:
        profile["nodata"] = nodata
    profile.update(opts)
    with rasterio.open(path, "w", **profile) as dst:
        dst.write(data, 1)
    return path


def describe_tif(path):
    with rasterio.open(path) as src:
        t = src.transform
        values = src.read(1).astype("float64")
        return {
            "width": src.width,
            "height": src.height,
            "origin_x": t.c,
            "origin_y": t.f,
            "pixel_w": t.a,
            "pixel_h": -t.e,
            "nodata": src.nodata,
            "values": values.ravel().tolist(),
        }


def describe_shp(path):
    r = shapefile.Reader(path)
    out = {"shape_type": r.shapeType, "bbox": list(r.bbox), "shapes": []}
    for s in r.shapes():
        out["shapes"].append({"type": s.shapeType,
                              "parts": list(s.parts) if hasattr(s, "parts") else [],
                              "points": [list(p) for p in s.points]})
    r.close()
    return out


def main(out_dir):
    os.makedirs(out_dir, exist_ok=True)
    expected = {"rasters": {}, "shapefiles": {}, "rejected": {}}

    t = from_origin(350000.0, 9950000.0, 90.0, 90.0)
    six = np.arange(1, 7, dtype="float32").reshape(2, 3)
    for name, opts in [("f32_le_3x2.tif", {}),
                       ("f32_be_3x2.tif", {"ENDIANNESS": "BIG"})]:
        p = write_tif(out_dir, name, six, t, crs="EPSG:32636", **opts)
        expected["rasters"][name] = describe_tif(p)

    rng = np.random.default_rng(20240601)
    i16 = rng.integers(-500, 3000, size=(4, 5)).astype("int16")
    i16[1, 2] = -9999
    p = write_tif(out_dir, "i16_deflate_nodata.tif", i16,
                  from_origin(1000.0, 5000.0, 250.0, 250.0), crs="EPSG:32636",
                  nodata=-9999, compress="DEFLATE")
    expected["rasters"]["i16_deflate_nodata.tif"] = describe_tif(p)

    u8 = rng.integers(1, 6, size=(6, 7)).astype("uint8")
    p = write_tif(out_dir, "u8_categories.tif", u8,
                  from_origin(0.0, 6000.0, 1000.0, 1000.0), crs="EPSG:32636")
    expected["rasters"]["u8_categories.tif"] = describe_tif(p)

    f64 = rng.normal(100.0, 25.0, size=(20, 10)).astype("float64")
    p = write_tif(out_dir, "f64_deflate_strips.tif", f64,
                  from_origin(-2000.0, 3000.0, 30.0, 30.0), crs="EPSG:32636",
                  compress="DEFLATE", BLOCKYSIZE=4, ENDIANNESS="BIG")
    expected["rasters"]["f64_deflate_strips.tif"] = describe_tif(p)

    i32 = rng.integers(-100000, 100000, size=(3, 4)).astype("int32")
    u16 = rng.integers(0, 65535, size=(3, 4)).astype("uint16")
    for name, arr in [("i32_le.tif", i32), ("u16_le.tif", u16)]:
        p = write_tif(out_dir, name, arr, from_origin(10.0, 20.0, 5.0, 5.0),
                      crs="EPSG:32636")
        expected["rasters"][name] = describe_tif(p)

    # Rejected inputs: the tag the reader must name.
    big = rng.normal(size=(32, 32)).astype("float32")
    write_tif(out_dir, "tiled.tif", big, t, crs="EPSG:32636", tiled=True,
              blockxsize=16, blockysize=16)
    expected["rejected"]["tiled.tif"] = "322"
    write_tif(out_dir, "lzw.tif", six, t, crs="EPSG:32636", compress="LZW")
    expected["rejected"]["lzw.tif"] = "259"
    write_tif(out_dir, "no_georef.tif", six, rasterio.Affine.identity())
    expected["rejected"]["no_georef.tif"] = "33922"

    def shp(name, kind, build):
        path = os.path.join(out_dir, name)
        w = shapefile.Writer(path, shapeType=kind)
        w.field("id", "N")
        build(w)
        w.close()
        expected["shapefiles"][name + ".shp"] = describe_shp(path)

    def points(w):
        w.point(3000.0, 4000.0)
        w.record(1)

    def lines(w):
        w.line([[[0.0, 0.0], [10000.0, 0.0]],
                [[2000.0, 3000.0], [2500.0, 3500.0], [4000.0, 3600.0]]])
        w.record(1)
        w.null()
        w.record(2)
        w.line([[[-150.5, 20.25], [300.75, -40.0]]])
        w.record(3)

    def polygons(w):
        outer = [[0.0, 0.0], [0.0, 10000.0], [10000.0, 10000.0],
                 [10000.0, 0.0], [0.0, 0.0]]
        hole = [[3000.0, 3000.0], [7000.0, 3000.0], [7000.0, 7000.0],
                [3000.0, 7000.0], [3000.0, 3000.0]]
        w.poly([outer, hole])
        w.record(1)
        w.poly([[[20000.0, 0.0], [20000.0, 5000.0], [25000.0, 0.0],
                 [20000.0, 0.0]]])
        w.record(2)

    def nulls(w):
        w.null()
        w.record(1)

    shp("point", shapefile.POINT, points)
    shp("lines", shapefile.POLYLINE, lines)
    shp("polygons", shapefile.POLYGON, polygons)
    shp("null_only", shapefile.NULL, nulls)

    with open(os.path.join(out_dir, "expected.json"), "w") as f:
        json.dump(expected, f, indent=1, sort_keys=True)
        f.write("\n")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "fixtures/formats")
