#pragma once

#include "vog/frame.hpp"
#include "vog/geometry.hpp"

#include <cstdint>
#include <vector>

namespace vog {

/// Binary image with the same layout as a Frame.
struct BinaryMask {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> bits;

    BinaryMask() = default;
    BinaryMask(int w, int h)
        : width(w), height(h), bits(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), 0)
    {
    }

    bool get(int x, int y) const { return bits[static_cast<std::size_t>(y) * width + x] != 0; }
    void set(int x, int y, bool v = true) { bits[static_cast<std::size_t>(y) * width + x] = v ? 1 : 0; }
    std::size_t count() const;
};

enum class Connectivity { Four = 4, Eight = 8 };

/// Region properties of one connected component.
///
/// `centroid` is the unweighted mean of member pixel coordinates (pixel
/// centers at integer positions). `refined_centroid` starts out equal to it;
/// detectors replace it with a background-subtracted intensity-weighted
/// estimate when they refine a blob.
struct Blob {
    Point2d centroid;
    Point2d refined_centroid;
    int area = 0;
    double mean_intensity = 0.0;
    int max_intensity = 0;
    PixelRect bbox;
    // Member pixels as linear indices (row-major), in scan order.
    std::vector<std::int32_t> pixels;
};

/// Labels maximal connected sets of true pixels. Blobs are returned in order
/// of their first pixel in row-major scan order; intensities come from
/// `source`, which must match the mask dimensions.
std::vector<Blob> connected_components(const BinaryMask& mask, const Frame& source,
                                       Connectivity connectivity);

/// Label image variant: 0 = background, 1..n in the same order as the blobs.
std::vector<std::int32_t> label_image(const BinaryMask& mask, Connectivity connectivity,
                                      int* label_count = nullptr);

} // namespace vog
