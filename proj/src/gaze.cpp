#include "vog/gaze.hpp"

#include "vog/csv.hpp"
#include "vog/error.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <sstream>

namespace vog {

namespace {

constexpr double kRadToDeg = 180.0 / std::numbers::pi;
constexpr double kPivotTolerance = 1e-10;

std::array<double, 6> basis(double u, double v) { return {1.0, u, v, u * u, v * v, u * v}; }

double evaluate(const std::array<double, 6>& c, double u, double v)
{
    const auto b = basis(u, v);
    double s = 0.0;
    for (std::size_t i = 0; i < 6; ++i)
        s += c[i] * b[i];
    return s;
}

} // namespace

void ScreenGeometry::validate() const
{
    if (!(width_mm > 0 && height_mm > 0 && width_px > 0 && height_px > 0 && eye_distance_mm > 0))
        throw Error(ErrorCode::InvalidArgument, "screen geometry values must be positive");
}

Point2d ScreenGeometry::half_extent_deg() const
{
    return {std::atan(0.5 * width_mm / eye_distance_mm) * kRadToDeg,
            std::atan(0.5 * height_mm / eye_distance_mm) * kRadToDeg};
}

Point2d target_px_to_deg(const ScreenGeometry& g, Point2d px)
{
    const double mm_x = (px.x - g.width_px / 2.0) * g.width_mm / g.width_px;
    const double mm_y = (px.y - g.height_px / 2.0) * g.height_mm / g.height_px;
    return {std::atan(mm_x / g.eye_distance_mm) * kRadToDeg, std::atan(mm_y / g.eye_distance_mm) * kRadToDeg};
}

Point2d target_deg_to_px(const ScreenGeometry& g, Point2d deg)
{
    const double mm_x = std::tan(deg.x / kRadToDeg) * g.eye_distance_mm;
    const double mm_y = std::tan(deg.y / kRadToDeg) * g.eye_distance_mm;
    return {g.width_px / 2.0 + mm_x * g.width_px / g.width_mm, g.height_px / 2.0 + mm_y * g.height_px / g.height_mm};
}

std::string_view to_string(SignalSource s) { return s == SignalSource::VOG ? "vog" : "dpi"; }

SignalSource signal_from_string(std::string_view s)
{
    if (s == "vog")
        return SignalSource::VOG;
    if (s == "dpi")
        return SignalSource::DPI;
    throw Error(ErrorCode::InvalidArgument, "unknown signal '" + std::string(s) + "'");
}

DifferenceVectors difference_vectors(const FeatureSet& f)
{
    DifferenceVectors out;
    if (f.pupil && f.p1) {
        const Point2d d = f.pupil->refined_center - f.p1->refined_centroid;
        out.vog = DifferenceVector{d.x, d.y, SignalSource::VOG};
    }
    if (f.p1 && f.p4) {
        const Point2d d = f.p1->refined_centroid - f.p4->refined_centroid;
        out.dpi = DifferenceVector{d.x, d.y, SignalSource::DPI};
    }
    return out;
}

CalibrationModel fit_calibration(std::span<const CalibrationPoint> points)
{
    if (points.size() < kMinCalibrationPoints)
        throw Error(ErrorCode::TooFewPoints, "need at least 6 calibration points, got " +
                                                 std::to_string(points.size()));

    const auto n = static_cast<Eigen::Index>(points.size());
    Eigen::MatrixXd design(n, 6);
    Eigen::VectorXd tx(n), ty(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& p = points[static_cast<std::size_t>(i)];
        const auto b = basis(p.raw.dx, p.raw.dy);
        for (int j = 0; j < 6; ++j)
            design(i, j) = b[static_cast<std::size_t>(j)];
        tx(i) = p.target_deg.x;
        ty(i) = p.target_deg.y;
    }

    // Normal equations, Jacobi-scaled so the pivot tolerance is scale free.
    Eigen::MatrixXd normal = design.transpose() * design;
    Eigen::VectorXd scale = normal.diagonal().cwiseSqrt();
    for (int j = 0; j < 6; ++j)
        if (!(scale(j) > 0.0))
            throw Error(ErrorCode::RankDeficient, "basis column " + std::to_string(j) + " is identically zero");
    const Eigen::MatrixXd scaled = scale.cwiseInverse().asDiagonal() * normal * scale.cwiseInverse().asDiagonal();
    Eigen::LDLT<Eigen::MatrixXd> ldlt(scaled);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive() || ldlt.vectorD().minCoeff() <= kPivotTolerance)
        throw Error(ErrorCode::RankDeficient, "calibration normal matrix is singular");

    auto solve = [&](const Eigen::VectorXd& target) {
        const Eigen::VectorXd rhs = scale.cwiseInverse().asDiagonal() * (design.transpose() * target);
        const Eigen::VectorXd y = ldlt.solve(rhs);
        std::array<double, 6> c{};
        for (int j = 0; j < 6; ++j)
            c[static_cast<std::size_t>(j)] = y(j) / scale(j);
        return c;
    };

    CalibrationModel model;
    model.coeff_x = solve(tx);
    model.coeff_y = solve(ty);
    model.point_count = static_cast<int>(points.size());
    model.source = points.front().raw.source;

    double ss = 0.0;
    for (const auto& p : points) {
        const Point2d g = apply_calibration(model, p.raw);
        ss += (g.x - p.target_deg.x) * (g.x - p.target_deg.x) + (g.y - p.target_deg.y) * (g.y - p.target_deg.y);
    }
    model.residual_rms = std::sqrt(ss / static_cast<double>(points.size()));
    return model;
}

Point2d apply_calibration(const CalibrationModel& model, const DifferenceVector& raw)
{
    return {evaluate(model.coeff_x, raw.dx, raw.dy), evaluate(model.coeff_y, raw.dx, raw.dy)};
}

std::string format_calibration(const CalibrationModel& model)
{
    std::ostringstream out;
    out << "calibration point_count=" << model.point_count << " residual_rms=" << csv::num(model.residual_rms)
        << " signal=" << to_string(model.source) << " basis=1,u,v,u2,v2,uv\n";
    out << "x";
    for (double c : model.coeff_x)
        out << ' ' << csv::num(c);
    out << "\ny";
    for (double c : model.coeff_y)
        out << ' ' << csv::num(c);
    out << '\n';
    return out.str();
}

CalibrationModel parse_calibration(std::string_view text)
{
    const auto ls = csv::lines(text);
    if (ls.size() < 3)
        throw Error(ErrorCode::ParseError, "calibration file needs a header and two axis lines");

    CalibrationModel model;
    const auto header = csv::split(ls[0], ' ');
    if (header.empty() || header[0] != "calibration")
        throw Error(ErrorCode::ParseError, "calibration header must start with 'calibration'");
    bool have_count = false, have_rms = false;
    for (std::size_t i = 1; i < header.size(); ++i) {
        const auto eq = header[i].find('=');
        if (eq == std::string_view::npos)
            throw Error(ErrorCode::ParseError, "malformed header field '" + std::string(header[i]) + "'");
        const auto key = header[i].substr(0, eq);
        const auto value = header[i].substr(eq + 1);
        if (key == "point_count") {
            model.point_count = static_cast<int>(csv::to_int(value));
            have_count = true;
        } else if (key == "residual_rms") {
            model.residual_rms = csv::to_double(value);
            have_rms = true;
        } else if (key == "signal") {
            model.source = signal_from_string(value);
        }
    }
    if (!have_count || !have_rms)
        throw Error(ErrorCode::ParseError, "calibration header lacks point_count or residual_rms");

    auto axis = [&](std::string_view line, std::string_view name) {
        const auto cells = csv::split(line, ' ');
        if (cells.size() != 7 || cells[0] != name)
            throw Error(ErrorCode::ParseError, "expected '" + std::string(name) + "' followed by 6 coefficients");
        std::array<double, 6> c{};
        for (std::size_t i = 0; i < 6; ++i)
            c[i] = csv::to_double(cells[i + 1]);
        return c;
    };
    model.coeff_x = axis(ls[1], "x");
    model.coeff_y = axis(ls[2], "y");
    return model;
}

} // namespace vog
