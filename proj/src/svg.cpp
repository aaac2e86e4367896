#include "vog/svg.hpp"

#include "vog/csv.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace vog {

namespace {

constexpr double kWidth = 1000.0;
constexpr double kPanel = 220.0;
constexpr double kLeft = 60.0;
constexpr double kRight = 20.0;
constexpr double kTop = 40.0;
constexpr double kGap = 40.0;

struct Scale {
    double t0, t1, v0, v1, top;
    double x(double t) const { return kLeft + (t - t0) / (t1 - t0) * (kWidth - kLeft - kRight); }
    double y(double v) const { return top + kPanel - (v - v0) / (v1 - v0) * kPanel; }
};

std::string f(double v) { return csv::fixed(v, 2); }

} // namespace

std::string gaze_trace_svg(std::span<const GazeSample> samples, const ResolvedSchedule& schedule,
                           const std::string& title)
{
    double t0 = static_cast<double>(schedule.start_us()), t1 = static_cast<double>(schedule.end_us());
    if (!samples.empty()) {
        t0 = std::min(t0, samples.front().timestamp_us);
        t1 = std::max(t1, samples.back().timestamp_us);
    }
    if (!(t1 > t0))
        t1 = t0 + 1.0;

    std::ostringstream out;
    const double height = kTop + 2 * kPanel + kGap + 40.0;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << height << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << kLeft << "\" y=\"24\" font-family=\"sans-serif\" font-size=\"14\">" << title << "</text>\n";

    for (int axis = 0; axis < 2; ++axis) {
        auto value = [axis](const GazeSample& s) { return axis == 0 ? s.x_deg : s.y_deg; };
        auto target = [axis](const ResolvedEvent& e) { return axis == 0 ? e.target.x : e.target.y; };
        double v0 = -1.0, v1 = 1.0;
        for (const auto& s : samples)
            if (s.valid && std::isfinite(value(s))) {
                v0 = std::min(v0, value(s));
                v1 = std::max(v1, value(s));
            }
        for (const auto& e : schedule.events) {
            v0 = std::min(v0, target(e));
            v1 = std::max(v1, target(e));
        }
        const Scale sc{t0, t1, v0 - 0.5, v1 + 0.5, kTop + axis * (kPanel + kGap)};

        out << "<rect x=\"" << kLeft << "\" y=\"" << f(sc.top) << "\" width=\"" << kWidth - kLeft - kRight
            << "\" height=\"" << kPanel << "\" fill=\"none\" stroke=\"#888\"/>\n";
        out << "<text x=\"8\" y=\"" << f(sc.top + kPanel / 2) << "\" font-family=\"sans-serif\" font-size=\"12\">"
            << (axis == 0 ? "x (deg)" : "y (deg)") << "</text>\n";
        out << "<text x=\"" << kLeft - 4 << "\" y=\"" << f(sc.y(sc.v1)) << "\" text-anchor=\"end\" "
            << "font-family=\"sans-serif\" font-size=\"10\">" << f(sc.v1) << "</text>\n";
        out << "<text x=\"" << kLeft - 4 << "\" y=\"" << f(sc.y(sc.v0)) << "\" text-anchor=\"end\" "
            << "font-family=\"sans-serif\" font-size=\"10\">" << f(sc.v0) << "</text>\n";

        out << "<polyline fill=\"none\" stroke=\"#d33\" stroke-width=\"1\" points=\"";
        for (const auto& e : schedule.events) {
            out << f(sc.x(static_cast<double>(e.t_start_us))) << ',' << f(sc.y(target(e))) << ' ';
            out << f(sc.x(static_cast<double>(e.t_end_us))) << ',' << f(sc.y(target(e))) << ' ';
        }
        out << "\"/>\n";

        bool open = false;
        for (const auto& s : samples) {
            const bool ok = s.valid && std::isfinite(value(s));
            if (ok && !open) {
                out << "<polyline fill=\"none\" stroke=\"#236\" stroke-width=\"0.8\" points=\"";
                open = true;
            } else if (!ok && open) {
                out << "\"/>\n";
                open = false;
            }
            if (ok)
                out << f(sc.x(s.timestamp_us)) << ',' << f(sc.y(value(s))) << ' ';
        }
        if (open)
            out << "\"/>\n";
    }
    out << "<text x=\"" << kLeft << "\" y=\"" << f(height - 12) << "\" font-family=\"sans-serif\" font-size=\"12\">"
        << "time " << f(t0 / 1e6) << " - " << f(t1 / 1e6) << " s; red: target, blue: gaze</text>\n";
    out << "</svg>\n";
    return out.str();
}

} // namespace vog
