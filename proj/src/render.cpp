#include "wlc/render.hpp"

#include <string>

#include "wlc/error.hpp"
#include "wlc/labels.hpp"

namespace wlc {

std::vector<std::uint8_t> render_labels(const LabelRaster& raster) {
    if (raster.scheme != Scheme::Simplified10) throw DataError("render_labels expects a SIMPLIFIED10 raster");
    if (raster.values.size() != static_cast<std::size_t>(raster.height) * raster.width) {
        throw DataError("label raster size does not match its height x width");
    }
    const std::string header =
        "P6\n" + std::to_string(raster.width) + " " + std::to_string(raster.height) + "\n255\n";
    std::vector<std::uint8_t> out(header.begin(), header.end());
    out.reserve(header.size() + 3 * raster.values.size());
    const auto& palette = labels::scheme_map().palette;
    for (std::size_t i = 0; i < raster.values.size(); ++i) {
        const std::uint8_t v = raster.values[i];
        if (v > kNumClasses) {
            throw DataError("illegal class id " + std::to_string(v) + " at pixel " + std::to_string(i));
        }
        const labels::Rgb c = v == kNoData ? labels::Rgb{} : palette[v - 1];
        out.push_back(c.r);
        out.push_back(c.g);
        out.push_back(c.b);
    }
    return out;
}

} // namespace wlc
