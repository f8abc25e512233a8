#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "poachgrid/geoformats.hpp"

namespace poachgrid {

/// 256-step ramp over [0, 1]: blue at 0, yellow at 0.5, red at 1.
std::array<std::uint8_t, 3> risk_color(double value);

/// RGBA PNG of a [0, 1] raster through risk_color; nodata is transparent.
std::vector<std::uint8_t> encode_risk_png(const RasterDataset& risk);

}  // namespace poachgrid
