#pragma once

#include "vog/components.hpp"
#include "vog/error.hpp"
#include "vog/frame.hpp"
#include "vog/geometry.hpp"

#include <optional>
#include <span>
#include <vector>

namespace vog {

struct PupilEstimate {
    Point2d center;         // unweighted centroid of the dark blob
    Point2d refined_center; // edge-coverage weighted, see refine_pupil_center
    double radius = 0.0; // equivalent circle, sqrt(area / pi)
    int area = 0;
    int threshold_used = 0;
};

struct AreaBounds {
    int min = 50;
    int max = 60000;
};

/// Parameters of the fourth Purkinje image search.
struct P4Params {
    int bright_cutoff = 65;   // pixels above this are discarded; 65 itself is kept
    int area_min = 5;
    int area_max = 30;
    double adaptive_k = 2.0;  // floor = mean + k * population std of the AOI
    double blob_margin = 5.0; // a candidate's max must reach floor + margin
    double aoi_margin = 2.0;  // AOI radius = pupil radius - aoi_margin
    int p1_exclusion = 2;     // P1 bounding box dilation in pixels
    // Per-session override of the adaptive floor; computed per frame when unset.
    std::optional<double> floor_override;

    void validate() const;
};

struct DetectionParams {
    int pupil_threshold = 37;
    AreaBounds pupil_area;
    int p1_bright_threshold = 200;
    double p1_search_radius_factor = 2.0;
    P4Params p4;
};

struct FeatureSet {
    std::optional<PupilEstimate> pupil;
    std::optional<Blob> p1;
    std::optional<Blob> p4;
    std::int64_t frame_index = 0;
    double timestamp_us = 0.0;
    std::vector<ErrorCode> failure_reasons;
    std::optional<double> p4_floor; // adaptive threshold used for the P4 search
};

struct P4Detection {
    Blob blob;
    double adaptive_threshold = 0.0;
};

/// Largest blob of pixels darker than `threshold` whose area lies in bounds.
/// Throws PupilNotFound.
PupilEstimate detect_pupil(const Frame& frame, int threshold, AreaBounds bounds = {});

/// Bright corneal reflection nearest to the pupil center. Throws P1NotFound.
Blob detect_p1(const Frame& frame, const PupilEstimate& pupil, int bright_threshold = 200,
               double search_radius_factor = 2.0);

/// clamp(mean + k * population_std, 0, 255). Throws EmptyAOI.
double adaptive_threshold(std::span<const std::uint8_t> aoi_pixels, double k);

/// Pixels that make up the P4 area of interest: inside the (eroded) pupil
/// disk and outside the dilated P1 bounding box. Returned as linear indices.
std::vector<std::int32_t> p4_aoi(const Frame& frame, const PupilEstimate& pupil, const Blob* p1,
                                 const P4Params& params);

/// Fourth Purkinje image search inside the pupil. Throws P4NotFound.
P4Detection detect_p4(const Frame& frame, const PupilEstimate& pupil, const Blob* p1,
                      const P4Params& params = {});

/// Runs pupil, P1 and P4 detection in dependency order. Detection failures
/// are recorded in failure_reasons; only a malformed frame throws.
FeatureSet detect_all(const Frame& frame, const DetectionParams& params);
FeatureSet detect_all(const Frame& frame, int pupil_threshold, const P4Params& p4_params = {});

/// Background-subtracted intensity-weighted centroid over the blob dilated by
/// `dilation` pixels (Chebyshev). The background level is the median of the
/// ring just outside that window.
Point2d refine_centroid(const Frame& frame, const Blob& blob, int dilation = 2);

/// Centroid of the hole-filled pupil blob with fractional weights in a band
/// of `band` pixels around its boundary: weight = (iris - I) / (iris - dark),
/// clamped to [0, 1], where both levels are medians (ring just outside the
/// band, blob interior). Glints and P4 inside the pupil count as pupil.
Point2d refine_pupil_center(const Frame& frame, const Blob& blob, int band = 2);

} // namespace vog
