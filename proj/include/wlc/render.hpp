#pragma once

#include <cstdint>
#include <vector>

#include "wlc/types.hpp"

namespace wlc {

// Binary PPM (P6) with one pixel per label: palette colour for classes
// 1..10, black for no-data. Expects a SIMPLIFIED10 raster.
std::vector<std::uint8_t> render_labels(const LabelRaster& raster);

} // namespace wlc
