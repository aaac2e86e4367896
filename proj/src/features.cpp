#include "vog/features.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace vog {

namespace {

PixelRect clip(PixelRect r, const Frame& f)
{
    r.x0 = std::max(r.x0, 0);
    r.y0 = std::max(r.y0, 0);
    r.x1 = std::min(r.x1, f.width - 1);
    r.y1 = std::min(r.y1, f.height - 1);
    return r;
}

// Connected components of pixels selected by `keep` inside `window`, reported
// in full-frame coordinates.
template <typename Pred>
std::vector<Blob> window_components(const Frame& frame, PixelRect window, Connectivity conn, Pred keep)
{
    window = clip(window, frame);
    if (window.empty())
        return {};
    const int ww = window.width();
    const int wh = window.height();
    Frame local(ww, wh);
    BinaryMask mask(ww, wh);
    for (int y = 0; y < wh; ++y) {
        for (int x = 0; x < ww; ++x) {
            const int gx = window.x0 + x;
            const int gy = window.y0 + y;
            local.at(x, y) = frame.at(gx, gy);
            if (keep(gx, gy))
                mask.set(x, y);
        }
    }
    auto blobs = connected_components(mask, local, conn);
    const Point2d offset{static_cast<double>(window.x0), static_cast<double>(window.y0)};
    for (auto& b : blobs) {
        b.centroid = b.centroid + offset;
        b.refined_centroid = b.refined_centroid + offset;
        b.bbox = {b.bbox.x0 + window.x0, b.bbox.y0 + window.y0, b.bbox.x1 + window.x0, b.bbox.y1 + window.y0};
        for (auto& p : b.pixels) {
            const int lx = p % ww;
            const int ly = p / ww;
            p = (window.y0 + ly) * frame.width + (window.x0 + lx);
        }
    }
    return blobs;
}

void require_well_formed(const Frame& frame)
{
    if (!frame.well_formed())
        throw Error(ErrorCode::FrameMalformed, "pixel buffer does not match frame dimensions");
}

// Nearest to `center` by unweighted centroid; ties go to the larger area, then
// to the earlier blob in scan order (stable over the input order).
const Blob* nearest_blob(const std::vector<const Blob*>& candidates, Point2d center)
{
    const Blob* best = nullptr;
    double best_d = 0.0;
    for (const Blob* b : candidates) {
        const double d = distance(b->centroid, center);
        if (!best || d < best_d || (d == best_d && b->area > best->area)) {
            best = b;
            best_d = d;
        }
    }
    return best;
}

} // namespace

void P4Params::validate() const
{
    if (area_min >= area_max)
        throw Error(ErrorCode::InvalidArgument, "P4 area_min must be below area_max");
    if (bright_cutoff <= 0 || bright_cutoff > 255)
        throw Error(ErrorCode::InvalidArgument, "P4 bright_cutoff must lie in (0, 255]");
    if (aoi_margin < 0.0 || p1_exclusion < 0)
        throw Error(ErrorCode::InvalidArgument, "P4 AOI margins must be non-negative");
}

PupilEstimate detect_pupil(const Frame& frame, int threshold, AreaBounds bounds)
{
    require_well_formed(frame);
    if (threshold <= 0 || threshold >= 255)
        throw Error(ErrorCode::InvalidArgument, "pupil threshold must lie in (0, 255)");

    BinaryMask mask(frame.width, frame.height);
    for (std::size_t i = 0; i < frame.pixels.size(); ++i)
        mask.bits[i] = frame.pixels[i] < threshold ? 1 : 0;
    const auto blobs = connected_components(mask, frame, Connectivity::Eight);

    const Blob* best = nullptr;
    for (const auto& b : blobs) {
        if (b.area < bounds.min || b.area > bounds.max)
            continue;
        if (!best || b.area > best->area)
            best = &b;
    }
    if (!best)
        throw Error(ErrorCode::PupilNotFound, "no dark blob within area bounds");

    PupilEstimate p;
    p.center = best->centroid;
    p.refined_center = refine_pupil_center(frame, *best);
    p.area = best->area;
    p.radius = std::sqrt(static_cast<double>(best->area) / std::numbers::pi);
    p.threshold_used = threshold;
    return p;
}

Blob detect_p1(const Frame& frame, const PupilEstimate& pupil, int bright_threshold, double search_radius_factor)
{
    require_well_formed(frame);
    const double search = search_radius_factor * pupil.radius;
    const int reach = static_cast<int>(std::ceil(search)) + 8;
    const PixelRect window{static_cast<int>(pupil.center.x) - reach, static_cast<int>(pupil.center.y) - reach,
                           static_cast<int>(pupil.center.x) + reach, static_cast<int>(pupil.center.y) + reach};
    auto blobs = window_components(frame, window, Connectivity::Eight,
                                   [&](int x, int y) { return frame.at(x, y) >= bright_threshold; });

    std::vector<const Blob*> candidates;
    for (const auto& b : blobs)
        if (distance(b.centroid, pupil.center) <= search)
            candidates.push_back(&b);
    const Blob* best = nearest_blob(candidates, pupil.center);
    if (!best)
        throw Error(ErrorCode::P1NotFound, "no bright blob within search radius");

    Blob p1 = *best;
    p1.refined_centroid = refine_centroid(frame, p1);
    return p1;
}

double adaptive_threshold(std::span<const std::uint8_t> aoi_pixels, double k)
{
    if (aoi_pixels.empty())
        throw Error(ErrorCode::EmptyAOI, "no pixels in area of interest");
    double sum = 0.0;
    for (auto v : aoi_pixels)
        sum += v;
    const double n = static_cast<double>(aoi_pixels.size());
    const double mean = sum / n;
    double ss = 0.0;
    for (auto v : aoi_pixels)
        ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / n);
    return std::clamp(mean + k * sd, 0.0, 255.0);
}

std::vector<std::int32_t> p4_aoi(const Frame& frame, const PupilEstimate& pupil, const Blob* p1,
                                 const P4Params& params)
{
    const double r = pupil.radius - params.aoi_margin;
    std::vector<std::int32_t> out;
    if (r <= 0.0)
        return out;
    const PixelRect box = clip({static_cast<int>(std::floor(pupil.center.x - r)),
                                static_cast<int>(std::floor(pupil.center.y - r)),
                                static_cast<int>(std::ceil(pupil.center.x + r)),
                                static_cast<int>(std::ceil(pupil.center.y + r))},
                               frame);
    const PixelRect excluded = p1 ? p1->bbox.expanded(params.p1_exclusion) : PixelRect{};
    const double r2 = r * r;
    for (int y = box.y0; y <= box.y1; ++y) {
        for (int x = box.x0; x <= box.x1; ++x) {
            const double dx = x - pupil.center.x;
            const double dy = y - pupil.center.y;
            if (dx * dx + dy * dy > r2 || excluded.contains(x, y))
                continue;
            out.push_back(y * frame.width + x);
        }
    }
    return out;
}

P4Detection detect_p4(const Frame& frame, const PupilEstimate& pupil, const Blob* p1, const P4Params& params)
{
    require_well_formed(frame);
    params.validate();

    // Step 1: area of interest.
    const auto aoi = p4_aoi(frame, pupil, p1, params);
    if (aoi.empty())
        throw Error(ErrorCode::P4NotFound, "empty area of interest");

    // Step 2: bright cutoff, then adaptive floor over what remains.
    std::vector<std::uint8_t> dim;
    dim.reserve(aoi.size());
    for (auto i : aoi)
        if (frame.pixels[i] <= params.bright_cutoff)
            dim.push_back(frame.pixels[i]);
    if (dim.empty())
        throw Error(ErrorCode::P4NotFound, "every AOI pixel exceeds the bright cutoff");
    const double floor = params.floor_override ? *params.floor_override : adaptive_threshold(dim, params.adaptive_k);

    // Step 3: 8-connected blobs of the surviving pixels.
    BinaryMask keep(frame.width, frame.height);
    PixelRect window{frame.width, frame.height, -1, -1};
    for (auto i : aoi) {
        const int v = frame.pixels[i];
        if (v > params.bright_cutoff || v < floor)
            continue;
        keep.bits[i] = 1;
        const int x = i % frame.width;
        const int y = i / frame.width;
        window = {std::min(window.x0, x), std::min(window.y0, y), std::max(window.x1, x), std::max(window.y1, y)};
    }
    const auto blobs = window_components(frame, window, Connectivity::Eight,
                                         [&](int x, int y) { return keep.get(x, y); });

    // Step 4: area and brightness filters, then nearest to the pupil center.
    std::vector<const Blob*> survivors;
    for (const auto& b : blobs) {
        if (b.area < params.area_min || b.area > params.area_max)
            continue;
        if (b.max_intensity < floor + params.blob_margin)
            continue;
        survivors.push_back(&b);
    }
    const Blob* best = nearest_blob(survivors, pupil.center);
    if (!best)
        throw Error(ErrorCode::P4NotFound, "no blob survived the area and brightness filters");

    P4Detection out{*best, floor};
    out.blob.refined_centroid = refine_centroid(frame, out.blob);
    return out;
}

FeatureSet detect_all(const Frame& frame, const DetectionParams& params)
{
    require_well_formed(frame);
    FeatureSet fs;
    fs.frame_index = frame.index;
    fs.timestamp_us = frame.timestamp_us;

    try {
        fs.pupil = detect_pupil(frame, params.pupil_threshold, params.pupil_area);
    } catch (const Error& e) {
        fs.failure_reasons.push_back(e.code());
        return fs;
    }
    try {
        fs.p1 = detect_p1(frame, *fs.pupil, params.p1_bright_threshold, params.p1_search_radius_factor);
    } catch (const Error& e) {
        fs.failure_reasons.push_back(e.code());
    }
    try {
        auto d = detect_p4(frame, *fs.pupil, fs.p1 ? &*fs.p1 : nullptr, params.p4);
        fs.p4 = std::move(d.blob);
        fs.p4_floor = d.adaptive_threshold;
    } catch (const Error& e) {
        if (e.code() == ErrorCode::InvalidArgument)
            throw;
        fs.failure_reasons.push_back(e.code());
    }
    return fs;
}

FeatureSet detect_all(const Frame& frame, int pupil_threshold, const P4Params& p4_params)
{
    DetectionParams params;
    params.pupil_threshold = pupil_threshold;
    params.p4 = p4_params;
    return detect_all(frame, params);
}

Point2d refine_centroid(const Frame& frame, const Blob& blob, int dilation)
{
    if (blob.pixels.empty())
        return blob.centroid;
    const int reach = dilation + 1;
    const PixelRect window = clip(blob.bbox.expanded(reach), frame);
    const int ww = window.width();
    const int wh = window.height();

    // Chebyshev distance from every window pixel to the blob, capped at reach + 1.
    std::vector<int> dist(static_cast<std::size_t>(ww) * wh, reach + 1);
    for (auto p : blob.pixels) {
        const int bx = p % frame.width - window.x0;
        const int by = p / frame.width - window.y0;
        for (int y = std::max(0, by - reach); y <= std::min(wh - 1, by + reach); ++y)
            for (int x = std::max(0, bx - reach); x <= std::min(ww - 1, bx + reach); ++x) {
                const int d = std::max(std::abs(x - bx), std::abs(y - by));
                auto& slot = dist[static_cast<std::size_t>(y) * ww + x];
                slot = std::min(slot, d);
            }
    }

    std::vector<int> ring;
    for (int y = 0; y < wh; ++y)
        for (int x = 0; x < ww; ++x)
            if (dist[static_cast<std::size_t>(y) * ww + x] == reach)
                ring.push_back(frame.at(window.x0 + x, window.y0 + y));
    if (ring.empty())
        return blob.centroid;
    auto mid = ring.begin() + static_cast<std::ptrdiff_t>(ring.size() / 2);
    std::nth_element(ring.begin(), mid, ring.end());
    const double background = *mid;

    double sw = 0.0, sx = 0.0, sy = 0.0;
    for (int y = 0; y < wh; ++y)
        for (int x = 0; x < ww; ++x) {
            if (dist[static_cast<std::size_t>(y) * ww + x] > dilation)
                continue;
            const double w = frame.at(window.x0 + x, window.y0 + y) - background;
            if (w <= 0.0)
                continue;
            sw += w;
            sx += w * (window.x0 + x);
            sy += w * (window.y0 + y);
        }
    if (sw <= 0.0)
        return blob.centroid;
    return {sx / sw, sy / sw};
}

namespace {

// Chessboard distance to the nearest pixel with target[i] != 0, capped at cap.
std::vector<int> chessboard_distance(const std::vector<char>& target, int w, int h, int cap)
{
    std::vector<int> d(target.size(), cap);
    for (std::size_t i = 0; i < target.size(); ++i)
        if (target[i])
            d[i] = 0;
    auto relax = [&](int x, int y, int nx, int ny) {
        if (nx < 0 || ny < 0 || nx >= w || ny >= h)
            return;
        auto& v = d[static_cast<std::size_t>(y) * w + x];
        v = std::min(v, d[static_cast<std::size_t>(ny) * w + nx] + 1);
    };
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            relax(x, y, x - 1, y);
            relax(x, y, x - 1, y - 1);
            relax(x, y, x, y - 1);
            relax(x, y, x + 1, y - 1);
        }
    for (int y = h - 1; y >= 0; --y)
        for (int x = w - 1; x >= 0; --x) {
            relax(x, y, x + 1, y);
            relax(x, y, x + 1, y + 1);
            relax(x, y, x, y + 1);
            relax(x, y, x - 1, y + 1);
        }
    return d;
}

double median(std::vector<double> v)
{
    auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
    std::nth_element(v.begin(), mid, v.end());
    return *mid;
}

} // namespace

Point2d refine_pupil_center(const Frame& frame, const Blob& blob, int band)
{
    if (blob.pixels.empty() || band < 1)
        return blob.centroid;
    const PixelRect window = clip(blob.bbox.expanded(band + 2), frame);
    const int ww = window.width();
    const int wh = window.height();
    const auto n = static_cast<std::size_t>(ww) * wh;

    std::vector<char> inside(n, 0);
    for (auto p : blob.pixels)
        inside[static_cast<std::size_t>(p / frame.width - window.y0) * ww + (p % frame.width - window.x0)] = 1;

    // Fill holes: background reachable from the window border (4-connected).
    std::vector<char> outside(n, 0);
    std::vector<int> stack;
    auto seed = [&](int x, int y) {
        const auto i = static_cast<std::size_t>(y) * ww + x;
        if (!inside[i] && !outside[i]) {
            outside[i] = 1;
            stack.push_back(static_cast<int>(i));
        }
    };
    for (int x = 0; x < ww; ++x) {
        seed(x, 0);
        seed(x, wh - 1);
    }
    for (int y = 0; y < wh; ++y) {
        seed(0, y);
        seed(ww - 1, y);
    }
    while (!stack.empty()) {
        const int i = stack.back();
        stack.pop_back();
        const int x = i % ww, y = i / ww;
        if (x > 0) seed(x - 1, y);
        if (x + 1 < ww) seed(x + 1, y);
        if (y > 0) seed(x, y - 1);
        if (y + 1 < wh) seed(x, y + 1);
    }
    std::vector<char> filled(n);
    for (std::size_t i = 0; i < n; ++i)
        filled[i] = !outside[i];

    const int cap = band + 2;
    const auto to_outside = chessboard_distance(outside, ww, wh, cap); // for filled pixels
    const auto to_inside = chessboard_distance(filled, ww, wh, cap);   // for outside pixels

    std::vector<double> ring, core;
    for (std::size_t i = 0; i < n; ++i) {
        const double v = frame.at(window.x0 + static_cast<int>(i % ww), window.y0 + static_cast<int>(i / ww));
        if (filled[i] && to_outside[i] > band)
            core.push_back(v);
        else if (!filled[i] && to_inside[i] == band + 1)
            ring.push_back(v);
    }
    if (core.empty() || ring.empty())
        return blob.centroid;
    const double iris = median(std::move(ring));
    const double dark = median(std::move(core));
    if (iris - dark < 1.0)
        return blob.centroid;

    double sw = 0.0, sx = 0.0, sy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double w;
        if (filled[i] && to_outside[i] > band) {
            w = 1.0;
        } else if ((filled[i] && to_outside[i] <= band) || (!filled[i] && to_inside[i] <= band)) {
            const double v = frame.at(window.x0 + static_cast<int>(i % ww), window.y0 + static_cast<int>(i / ww));
            w = std::clamp((iris - v) / (iris - dark), 0.0, 1.0);
        } else {
            continue;
        }
        sw += w;
        sx += w * (window.x0 + static_cast<double>(i % ww));
        sy += w * (window.y0 + static_cast<double>(i / ww));
    }
    return {sx / sw, sy / sw};
}

} // namespace vog
