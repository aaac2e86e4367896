#include "vog/stimulus.hpp"

#include "vog/csv.hpp"
#include "vog/error.hpp"
#include "vog/rng.hpp"

#include <boost/property_tree/detail/rapidxml.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

namespace vog {

namespace rx = boost::property_tree::detail::rapidxml;

std::string_view to_string(EventKind k)
{
    switch (k) {
    case EventKind::Fixation: return "fixation";
    case EventKind::Pursuit: return "pursuit";
    case EventKind::Shrink: return "shrink";
    case EventKind::Image: return "image";
    case EventKind::Video: return "video";
    }
    return "fixation";
}

namespace {

EventKind event_kind_from(std::string_view s)
{
    for (auto k : {EventKind::Fixation, EventKind::Pursuit, EventKind::Shrink, EventKind::Image, EventKind::Video})
        if (to_string(k) == s)
            return k;
    throw Error(ErrorCode::SchemaError, "unknown event kind '" + std::string(s) + "'");
}

[[noreturn]] void schema_error(std::string_view element, const std::string& message)
{
    throw Error(ErrorCode::SchemaError, "<" + std::string(element) + ">: " + message);
}

// Attribute access with the allowed set checked up front.
class Attributes {
public:
    Attributes(const rx::xml_node<char>* node, std::initializer_list<std::string_view> allowed)
        : element_(node->name(), node->name_size())
    {
        const std::set<std::string_view> ok(allowed);
        for (auto* a = node->first_attribute(); a; a = a->next_attribute()) {
            std::string_view name(a->name(), a->name_size());
            if (!ok.contains(name))
                schema_error(element_, "unknown attribute '" + std::string(name) + "'");
            values_[name] = std::string_view(a->value(), a->value_size());
        }
    }

    bool has(std::string_view name) const { return values_.contains(name); }

    std::string_view text(std::string_view name) const
    {
        auto it = values_.find(name);
        if (it == values_.end())
            schema_error(element_, "missing attribute '" + std::string(name) + "'");
        return it->second;
    }

    double number(std::string_view name) const
    {
        const auto t = text(name);
        try {
            const double v = csv::to_double(t);
            if (!std::isfinite(v))
                throw Error(ErrorCode::ParseError, "non-finite");
            return v;
        } catch (const Error&) {
            schema_error(element_, "attribute '" + std::string(name) + "' is not a number: '" + std::string(t) + "'");
        }
    }

    double number_or(std::string_view name, double fallback) const { return has(name) ? number(name) : fallback; }

    std::int64_t integer(std::string_view name) const
    {
        const auto t = text(name);
        try {
            return csv::to_int(t);
        } catch (const Error&) {
            schema_error(element_, "attribute '" + std::string(name) + "' is not an integer: '" + std::string(t) + "'");
        }
    }

    const std::string& element() const { return element_; }

private:
    std::string element_;
    std::map<std::string_view, std::string_view, std::less<>> values_;
};

void require_positive(const Attributes& a, std::string_view name, double v)
{
    if (!(v > 0.0))
        schema_error(a.element(), "attribute '" + std::string(name) + "' must be positive");
}

Command parse_command(const rx::xml_node<char>* node)
{
    const std::string_view name(node->name(), node->name_size());
    if (name == "dot_show") {
        Attributes a(node, {"x", "y", "diameter"});
        DotShow c{{a.number("x"), a.number("y")}, a.number_or("diameter", 0.67)};
        require_positive(a, "diameter", c.diameter);
        return c;
    }
    if (name == "fixate") {
        Attributes a(node, {"min", "max"});
        Fixate c{a.number("min"), a.number("max")};
        if (c.dwell_min_s < 0.0)
            schema_error(name, "dwell 'min' must be non-negative");
        if (c.dwell_min_s > c.dwell_max_s)
            schema_error(name, "dwell 'min' exceeds 'max'");
        return c;
    }
    if (name == "jump") {
        Attributes a(node, {"x", "y"});
        return Jump{{a.number("x"), a.number("y")}};
    }
    if (name == "smooth_move") {
        Attributes a(node, {"x", "y", "velocity"});
        SmoothMove c{{a.number("x"), a.number("y")}, a.number("velocity")};
        require_positive(a, "velocity", c.velocity_deg_s);
        return c;
    }
    if (name == "shrink") {
        Attributes a(node, {"diameter", "over"});
        Shrink c{a.number("diameter"), a.number("over")};
        require_positive(a, "diameter", c.to_diameter);
        if (c.over_s < 0.0)
            schema_error(name, "attribute 'over' must be non-negative");
        return c;
    }
    if (name == "image" || name == "video") {
        Attributes a(node, {"path", "duration"});
        const std::string path(a.text("path"));
        const double d = a.number("duration");
        if (d < 0.0)
            schema_error(name, "attribute 'duration' must be non-negative");
        if (name == "image")
            return ImageShow{path, d};
        return VideoShow{path, d};
    }
    if (name == "event") {
        Attributes a(node, {"kind", "t_start_us", "t_end_us", "x", "y", "diameter", "media"});
        ResolvedEvent e;
        e.kind = event_kind_from(a.text("kind"));
        e.t_start_us = a.integer("t_start_us");
        e.t_end_us = a.integer("t_end_us");
        e.target = {a.number("x"), a.number("y")};
        e.diameter_deg = a.number_or("diameter", 0.67);
        if (a.has("media"))
            e.media = std::string(a.text("media"));
        if (e.t_end_us <= e.t_start_us)
            schema_error(name, "t_end_us must exceed t_start_us");
        return FrozenEvent{std::move(e)};
    }
    schema_error(name, "unknown element");
}

std::pair<int, int> line_column(std::string_view text, const char* where)
{
    int line = 1, col = 1;
    for (const char* p = text.data(); p < where && p < text.data() + text.size(); ++p) {
        if (*p == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

std::string xml_escape(std::string_view s)
{
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

std::int64_t seconds_to_us(double s) { return std::llround(s * 1e6); }

} // namespace

StimulusProgram parse_program(std::string_view xml)
{
    std::vector<char> buffer(xml.begin(), xml.end());
    buffer.push_back('\0');
    rx::xml_document<char> doc;
    try {
        doc.parse<rx::parse_validate_closing_tags>(buffer.data());
    } catch (const rx::parse_error& e) {
        const auto [line, col] = line_column(std::string_view(buffer.data(), xml.size()), e.where<char>());
        throw Error(ErrorCode::ParseError,
                    "line " + std::to_string(line) + ", column " + std::to_string(col) + ": " + e.what());
    }

    const auto* root = doc.first_node();
    if (!root)
        throw Error(ErrorCode::ParseError, "document has no root element");
    const std::string_view root_name(root->name(), root->name_size());

    StimulusProgram program;
    if (root_name == "stimulus") {
        Attributes a(root, {"version", "background", "dot"});
        program.version = static_cast<int>(a.integer("version"));
        program.background_intensity = a.number_or("background", 200.0);
        program.dot_intensity = a.number_or("dot", 0.0);
    } else if (root_name == "schedule") {
        Attributes a(root, {"version", "seed", "events"});
        program.version = static_cast<int>(a.integer("version"));
        program.recorded_seed = 0;
        if (const auto* attr = root->first_attribute("seed")) {
            const std::string_view v(attr->value(), attr->value_size());
            std::uint64_t seed = 0;
            const auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), seed);
            if (ec != std::errc{} || end != v.data() + v.size())
                schema_error(root_name, "seed must be an unsigned integer");
            program.recorded_seed = seed;
        }
    } else {
        schema_error(root_name, "root must be <stimulus> or <schedule>");
    }
    if (program.version != kStimulusSchemaVersion)
        schema_error(root_name, "unsupported version " + std::to_string(program.version));

    const bool frozen = root_name == "schedule";
    for (auto* node = root->first_node(); node; node = node->next_sibling()) {
        if (node->type() != rx::node_element)
            continue;
        const std::string_view name(node->name(), node->name_size());
        if (frozen != (name == "event"))
            schema_error(name, frozen ? "only <event> is allowed in a schedule" : "<event> is only allowed in a schedule");
        program.commands.push_back(parse_command(node));
    }
    return program;
}

ResolvedSchedule resolve(const StimulusProgram& program, std::uint64_t seed, const ScreenGeometry& geometry)
{
    const Point2d limit = geometry.half_extent_deg();
    auto check_on_screen = [&](Point2d p, std::string_view what) {
        constexpr double eps = 1e-9;
        if (std::abs(p.x) > limit.x + eps || std::abs(p.y) > limit.y + eps)
            throw Error(ErrorCode::SchemaError, std::string(what) + " target (" + csv::num(p.x) + ", " +
                                                    csv::num(p.y) + ") deg lies outside the screen");
    };

    if (program.recorded_seed)
        seed = *program.recorded_seed;
    Xorshift64Star rng(seed);
    ResolvedSchedule out;
    out.seed = seed;
    std::int64_t t = 0;
    Point2d pos{};
    double diameter = 0.67;

    auto emit = [&](std::int64_t duration, EventKind kind, Point2d target, std::string media = {}) {
        if (duration <= 0)
            return;
        out.events.push_back({t, t + duration, target, kind, diameter, std::move(media)});
        t += duration;
    };

    for (const auto& command : program.commands) {
        std::visit(
            [&](const auto& c) {
                using T = std::decay_t<decltype(c)>;
                if constexpr (std::is_same_v<T, DotShow>) {
                    check_on_screen(c.position, "dot_show");
                    pos = c.position;
                    diameter = c.diameter;
                } else if constexpr (std::is_same_v<T, Fixate>) {
                    const double dwell = c.dwell_min_s + (c.dwell_max_s - c.dwell_min_s) * rng.uniform();
                    emit(seconds_to_us(dwell), EventKind::Fixation, pos);
                } else if constexpr (std::is_same_v<T, Jump>) {
                    check_on_screen(c.to, "jump");
                    pos = c.to;
                } else if constexpr (std::is_same_v<T, SmoothMove>) {
                    check_on_screen(c.to, "smooth_move");
                    emit(seconds_to_us(distance(pos, c.to) / c.velocity_deg_s), EventKind::Pursuit, c.to);
                    pos = c.to;
                } else if constexpr (std::is_same_v<T, Shrink>) {
                    diameter = c.to_diameter;
                    emit(seconds_to_us(c.over_s), EventKind::Shrink, pos);
                } else if constexpr (std::is_same_v<T, ImageShow>) {
                    emit(seconds_to_us(c.duration_s), EventKind::Image, pos, c.path);
                } else if constexpr (std::is_same_v<T, VideoShow>) {
                    emit(seconds_to_us(c.duration_s), EventKind::Video, pos, c.path);
                } else if constexpr (std::is_same_v<T, FrozenEvent>) {
                    if (c.event.t_start_us != t)
                        throw Error(ErrorCode::SchemaError, "schedule events are not contiguous at t=" +
                                                                std::to_string(c.event.t_start_us) + " us");
                    check_on_screen(c.event.target, "event");
                    out.events.push_back(c.event);
                    t = c.event.t_end_us;
                    pos = c.event.target;
                    diameter = c.event.diameter_deg;
                }
            },
            command);
    }
    return out;
}

std::string emit_resolved(const ResolvedSchedule& schedule)
{
    std::ostringstream out;
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out << "<schedule version=\"" << kStimulusSchemaVersion << "\" seed=\"" << schedule.seed << "\" events=\""
        << schedule.events.size() << "\">\n";
    for (const auto& e : schedule.events) {
        out << "  <event kind=\"" << to_string(e.kind) << "\" t_start_us=\"" << e.t_start_us << "\" t_end_us=\""
            << e.t_end_us << "\" x=\"" << csv::num(e.target.x) << "\" y=\"" << csv::num(e.target.y)
            << "\" diameter=\"" << csv::num(e.diameter_deg) << "\"";
        if (!e.media.empty())
            out << " media=\"" << xml_escape(e.media) << "\"";
        out << "/>\n";
    }
    out << "</schedule>\n";
    return out.str();
}

ResolvedSchedule parse_resolved(std::string_view xml)
{
    const auto program = parse_program(xml);
    if (!program.recorded_seed)
        throw Error(ErrorCode::SchemaError, "expected a <schedule> document");
    return resolve(program, *program.recorded_seed);
}

std::string emit_program(const StimulusProgram& program)
{
    std::ostringstream out;
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out << "<stimulus version=\"" << program.version << "\" background=\"" << csv::num(program.background_intensity)
        << "\" dot=\"" << csv::num(program.dot_intensity) << "\">\n";
    for (const auto& command : program.commands) {
        std::visit(
            [&](const auto& c) {
                using T = std::decay_t<decltype(c)>;
                out << "  ";
                if constexpr (std::is_same_v<T, DotShow>)
                    out << "<dot_show x=\"" << csv::num(c.position.x) << "\" y=\"" << csv::num(c.position.y)
                        << "\" diameter=\"" << csv::num(c.diameter) << "\"/>";
                else if constexpr (std::is_same_v<T, Fixate>)
                    out << "<fixate min=\"" << csv::num(c.dwell_min_s) << "\" max=\"" << csv::num(c.dwell_max_s)
                        << "\"/>";
                else if constexpr (std::is_same_v<T, Jump>)
                    out << "<jump x=\"" << csv::num(c.to.x) << "\" y=\"" << csv::num(c.to.y) << "\"/>";
                else if constexpr (std::is_same_v<T, SmoothMove>)
                    out << "<smooth_move x=\"" << csv::num(c.to.x) << "\" y=\"" << csv::num(c.to.y)
                        << "\" velocity=\"" << csv::num(c.velocity_deg_s) << "\"/>";
                else if constexpr (std::is_same_v<T, Shrink>)
                    out << "<shrink diameter=\"" << csv::num(c.to_diameter) << "\" over=\"" << csv::num(c.over_s)
                        << "\"/>";
                else if constexpr (std::is_same_v<T, ImageShow>)
                    out << "<image path=\"" << xml_escape(c.path) << "\" duration=\"" << csv::num(c.duration_s)
                        << "\"/>";
                else if constexpr (std::is_same_v<T, VideoShow>)
                    out << "<video path=\"" << xml_escape(c.path) << "\" duration=\"" << csv::num(c.duration_s)
                        << "\"/>";
                else
                    throw Error(ErrorCode::InvalidArgument, "frozen events cannot appear in an authored program");
                out << "\n";
            },
            command);
    }
    out << "</stimulus>\n";
    return out.str();
}

std::vector<double> grid_amplitudes(const SaccadeGridSpec& spec)
{
    if (!(spec.step > 0.0))
        throw Error(ErrorCode::InvalidArgument, "grid step must be positive");
    if (spec.amp_max < spec.amp_min)
        throw Error(ErrorCode::InvalidArgument, "grid amp_max is below amp_min");
    const auto n = static_cast<int>(std::floor((spec.amp_max - spec.amp_min) / spec.step + 1e-9)) + 1;
    std::vector<double> amps;
    for (int i = 0; i < n; ++i)
        amps.push_back(spec.amp_min + i * spec.step);
    return amps;
}

StimulusProgram saccade_grid(const SaccadeGridSpec& spec)
{
    const auto amps = grid_amplitudes(spec);
    StimulusProgram p;
    const Fixate dwell{spec.dwell_min_s, spec.dwell_max_s};
    p.commands.push_back(DotShow{{0.0, 0.0}, spec.dot_diameter});
    p.commands.push_back(dwell);
    auto along = [&](double s) {
        return spec.axis == GridAxis::Horizontal ? Point2d{s, 0.0} : Point2d{0.0, s};
    };
    for (double a : amps) {
        p.commands.push_back(Jump{along(-a / 2.0)});
        p.commands.push_back(dwell);
        p.commands.push_back(Jump{along(a / 2.0)});
        p.commands.push_back(dwell);
    }
    return p;
}

StimulusProgram point_sequence(const std::vector<Point2d>& points, double dwell_min_s, double dwell_max_s,
                               double dot_diameter)
{
    StimulusProgram p;
    if (points.empty())
        return p;
    p.commands.push_back(DotShow{points.front(), dot_diameter});
    p.commands.push_back(Fixate{dwell_min_s, dwell_max_s});
    for (std::size_t i = 1; i < points.size(); ++i) {
        p.commands.push_back(Jump{points[i]});
        p.commands.push_back(Fixate{dwell_min_s, dwell_max_s});
    }
    return p;
}

} // namespace vog
