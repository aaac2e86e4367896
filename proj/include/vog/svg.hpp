#pragma once

#include "vog/gaze.hpp"
#include "vog/stimulus.hpp"

#include <span>
#include <string>

namespace vog {

/// Two stacked line charts (horizontal and vertical gaze against time) with
/// the target position drawn as a step trace. Invalid samples break the line.
std::string gaze_trace_svg(std::span<const GazeSample> samples, const ResolvedSchedule& schedule,
                           const std::string& title);

} // namespace vog
