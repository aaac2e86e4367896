#pragma once

#include "vog/components.hpp"
#include "vog/features.hpp"
#include "vog/gaze.hpp"
#include "vog/metrics.hpp"
#include "vog/replay.hpp"
#include "vog/synthcam.hpp"

#include <cstdlib>
#include <unistd.h>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

namespace vogtest {

// Reference labeling: BFS from each unvisited set pixel in scan order.
// Labels start at 1, background is 0.
inline std::vector<int> flood_fill_labels(const vog::BinaryMask& mask, int connectivity)
{
    const int w = mask.width, h = mask.height;
    std::vector<int> label(static_cast<std::size_t>(w) * h, 0);
    int next = 0;
    std::vector<std::pair<int, int>> stack;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            if (!mask.get(x, y) || label[y * w + x])
                continue;
            ++next;
            label[y * w + x] = next;
            stack.assign(1, {x, y});
            while (!stack.empty()) {
                auto [cx, cy] = stack.back();
                stack.pop_back();
                for (int dy = -1; dy <= 1; ++dy)
                    for (int dx = -1; dx <= 1; ++dx) {
                        if ((dx == 0 && dy == 0) || (connectivity == 4 && dx != 0 && dy != 0))
                            continue;
                        const int nx = cx + dx, ny = cy + dy;
                        if (nx < 0 || ny < 0 || nx >= w || ny >= h || !mask.get(nx, ny) || label[ny * w + nx])
                            continue;
                        label[ny * w + nx] = next;
                        stack.push_back({nx, ny});
                    }
            }
        }
    return label;
}

inline vog::BinaryMask random_mask(int w, int h, double density, std::mt19937_64& rng)
{
    vog::BinaryMask m(w, h);
    std::bernoulli_distribution on(density);
    for (auto& b : m.bits)
        b = on(rng) ? 1 : 0;
    return m;
}

inline vog::SampleLog detect_session(const vog::SessionSimulator& sim, const vog::DetectionParams& params,
                                     const vog::CalibrationModel* vog_cal = nullptr,
                                     const vog::CalibrationModel* dpi_cal = nullptr)
{
    vog::SampleLog log;
    log.reserve(static_cast<std::size_t>(sim.frame_count()));
    for (std::int64_t i = 0; i < sim.frame_count(); ++i) {
        const auto r = sim.render(i);
        log.push_back(vog::make_sample_row(vog::detect_all(r.frame, params), vog_cal, dpi_cal));
    }
    return log;
}

inline vog::CalibrationModel calibrate_log(const vog::SampleLog& log, const vog::ResolvedSchedule& schedule,
                                           vog::SignalSource source)
{
    const auto samples = vog::to_gaze_samples(log, source);
    const auto seg = vog::segment_fixations(samples, schedule);
    std::vector<vog::CalibrationPoint> pts;
    for (const auto& s : seg.segments)
        pts.push_back({s.raw_mean, s.target_deg});
    auto model = vog::fit_calibration(pts);
    model.source = source;
    return model;
}

inline vog::ResolvedSchedule nine_point_schedule(std::uint64_t seed, double dwell_min = 1.0, double dwell_max = 2.0)
{
    std::vector<vog::Point2d> pts;
    for (double y : {-8.0, 0.0, 8.0})
        for (double x : {-10.0, 0.0, 10.0})
            pts.push_back({x, y});
    return vog::resolve(vog::point_sequence(pts, dwell_min, dwell_max), seed);
}

inline std::filesystem::path temp_dir(const std::string& name)
{
    auto dir = std::filesystem::temp_directory_path() / ("vogtest_" + name + "_" + std::to_string(::getpid()));
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

} // namespace vogtest
