#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace vog {

/// One 8-bit grayscale eye image. Pixels are row-major.
///
/// Timestamps carry sub-microsecond resolution: camera intervals such as
/// 2.0030 ms versus 2.0031 ms differ by 100 ns.
struct Frame {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;
    double timestamp_us = 0.0;
    std::int64_t index = 0;

    Frame() = default;
    Frame(int w, int h, std::uint8_t fill = 0)
        : width(w), height(h), pixels(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), fill)
    {
    }

    std::uint8_t at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
    std::uint8_t& at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }

    bool well_formed() const
    {
        return width > 0 && height > 0 &&
               pixels.size() == static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    }

    std::span<const std::uint8_t> row(int y) const
    {
        return {pixels.data() + static_cast<std::size_t>(y) * width, static_cast<std::size_t>(width)};
    }

    friend bool operator==(const Frame&, const Frame&) = default;
};

} // namespace vog
