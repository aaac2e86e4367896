#include "vog/components.hpp"

#include "vog/error.hpp"

#include <algorithm>
#include <numeric>

namespace vog {

std::size_t BinaryMask::count() const
{
    return static_cast<std::size_t>(std::count_if(bits.begin(), bits.end(), [](auto b) { return b != 0; }));
}

namespace {

// Union-find over provisional labels, always keeping the smaller root so that
// final labels follow first-pixel scan order.
class DisjointSets {
public:
    std::int32_t make()
    {
        parent_.push_back(static_cast<std::int32_t>(parent_.size()));
        return parent_.back();
    }

    std::int32_t find(std::int32_t a)
    {
        while (parent_[a] != a) {
            parent_[a] = parent_[parent_[a]];
            a = parent_[a];
        }
        return a;
    }

    void unite(std::int32_t a, std::int32_t b)
    {
        a = find(a);
        b = find(b);
        if (a == b)
            return;
        if (a < b)
            parent_[b] = a;
        else
            parent_[a] = b;
    }

    std::size_t size() const { return parent_.size(); }

private:
    std::vector<std::int32_t> parent_;
};

} // namespace

std::vector<std::int32_t> label_image(const BinaryMask& mask, Connectivity connectivity, int* label_count)
{
    const int w = mask.width;
    const int h = mask.height;
    std::vector<std::int32_t> labels(static_cast<std::size_t>(w) * h, 0);
    DisjointSets sets;
    sets.make(); // label 0 is background

    const bool eight = connectivity == Connectivity::Eight;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const std::size_t i = static_cast<std::size_t>(y) * w + x;
            if (!mask.bits[i])
                continue;
            std::int32_t best = 0;
            auto visit = [&](int nx, int ny) {
                if (nx < 0 || nx >= w || ny < 0)
                    return;
                const std::int32_t l = labels[static_cast<std::size_t>(ny) * w + nx];
                if (l == 0)
                    return;
                if (best == 0)
                    best = l;
                else
                    sets.unite(best, l);
            };
            visit(x - 1, y);
            visit(x, y - 1);
            if (eight) {
                visit(x - 1, y - 1);
                visit(x + 1, y - 1);
            }
            labels[i] = best != 0 ? best : sets.make();
        }
    }

    // Compact roots to 1..n in order of first appearance.
    std::vector<std::int32_t> remap(sets.size(), 0);
    std::int32_t next = 0;
    for (auto& l : labels) {
        if (l == 0)
            continue;
        const std::int32_t root = sets.find(l);
        if (remap[root] == 0)
            remap[root] = ++next;
        l = remap[root];
    }
    if (label_count)
        *label_count = next;
    return labels;
}

std::vector<Blob> connected_components(const BinaryMask& mask, const Frame& source, Connectivity connectivity)
{
    if (mask.width != source.width || mask.height != source.height || !source.well_formed())
        throw Error(ErrorCode::FrameMalformed, "mask and source dimensions differ");

    int count = 0;
    const auto labels = label_image(mask, connectivity, &count);
    std::vector<Blob> blobs(static_cast<std::size_t>(count));
    std::vector<double> sx(blobs.size(), 0.0), sy(blobs.size(), 0.0), si(blobs.size(), 0.0);

    const int w = mask.width;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] == 0)
            continue;
        const std::size_t k = static_cast<std::size_t>(labels[i] - 1);
        const int x = static_cast<int>(i % w);
        const int y = static_cast<int>(i / w);
        Blob& b = blobs[k];
        if (b.area == 0)
            b.bbox = {x, y, x, y};
        else {
            b.bbox.x0 = std::min(b.bbox.x0, x);
            b.bbox.x1 = std::max(b.bbox.x1, x);
            b.bbox.y1 = std::max(b.bbox.y1, y);
        }
        ++b.area;
        b.pixels.push_back(static_cast<std::int32_t>(i));
        sx[k] += x;
        sy[k] += y;
        const int v = source.pixels[i];
        si[k] += v;
        b.max_intensity = std::max(b.max_intensity, v);
    }
    for (std::size_t k = 0; k < blobs.size(); ++k) {
        Blob& b = blobs[k];
        b.centroid = {sx[k] / b.area, sy[k] / b.area};
        b.refined_centroid = b.centroid;
        b.mean_intensity = si[k] / b.area;
    }
    return blobs;
}

} // namespace vog
