#include "vog/cli.hpp"

#include "vog/csv.hpp"
#include "vog/error.hpp"
#include "vog/framestore.hpp"
#include "vog/metrics.hpp"
#include "vog/replay.hpp"
#include "vog/stimulus.hpp"
#include "vog/svg.hpp"
#include "vog/synthcam.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <functional>
#include <optional>

namespace vog {

namespace fs = std::filesystem;

namespace {

struct StimCompileArgs {
    std::string in, out;
    std::uint64_t seed = 0;
};

struct StimGridArgs {
    std::string axis = "h", out;
    double amp_min = 2.5, amp_max = 40.0, step = 2.5, dwell_min = 1.0, dwell_max = 2.0, dot = 0.67;
};

struct StimPointsArgs {
    std::string points, out;
    double dwell_min = 1.0, dwell_max = 2.0, dot = 0.67;
};

struct SynthArgs {
    std::string schedule, out, confounders = "a";
    std::uint64_t seed = 0;
    double noise = 1.0;
    MotionModel motion;
    EyeState eye;
    CameraModel camera;
    std::uint64_t segment_limit = kDefaultSegmentLimit;
};

struct DetectArgs {
    std::string session, out, calibration;
    DetectionParams params;
    std::optional<double> p4_floor;
};

struct SweepArgs {
    std::string session, out;
    std::vector<int> thresholds;
};

struct CalibrateArgs {
    std::string samples, schedule, out, signal = "vog";
    double settle = 300.0, tail = 20.0;
};

struct AnalyzeArgs {
    std::string samples, schedule, report, signal = "vog", calibration, plot, fixations;
    std::optional<double> min_validity;
    double settle = 300.0, tail = 20.0;
};

void require_file(const std::string& path)
{
    if (!fs::is_regular_file(path))
        throw Error(ErrorCode::IoError, "no such file: " + path);
}

ResolvedSchedule load_schedule(const std::string& path)
{
    require_file(path);
    return parse_resolved(csv::read_file(path));
}

std::optional<CalibrationModel> load_calibration(const std::string& path)
{
    if (path.empty())
        return std::nullopt;
    require_file(path);
    return parse_calibration(csv::read_file(path));
}

std::vector<Point2d> parse_points(std::string_view text)
{
    std::vector<Point2d> pts;
    for (auto item : csv::split(text, ';')) {
        if (item.empty())
            continue;
        const auto xy = csv::split(item, ':');
        if (xy.size() != 2)
            throw Error(ErrorCode::InvalidArgument, "points must look like x:y;x:y;...");
        try {
            pts.push_back({csv::to_double(xy[0]), csv::to_double(xy[1])});
        } catch (const Error&) {
            throw Error(ErrorCode::InvalidArgument, "not a number in point '" + std::string(item) + "'");
        }
    }
    if (pts.empty())
        throw Error(ErrorCode::InvalidArgument, "no points given");
    return pts;
}

int run_stim_compile(const StimCompileArgs& a, std::ostream& out)
{
    require_file(a.in);
    const auto schedule = resolve(parse_program(csv::read_file(a.in)), a.seed);
    csv::write_file(a.out, emit_resolved(schedule));
    out << "resolved " << schedule.events.size() << " events, " << csv::num(schedule.duration_us() / 1e6)
        << " s\n";
    return kExitOk;
}

int run_stim_grid(const StimGridArgs& a, std::ostream&)
{
    SaccadeGridSpec spec;
    if (a.axis == "h")
        spec.axis = GridAxis::Horizontal;
    else if (a.axis == "v")
        spec.axis = GridAxis::Vertical;
    else
        throw Error(ErrorCode::InvalidArgument, "--axis must be h or v");
    spec.amp_min = a.amp_min;
    spec.amp_max = a.amp_max;
    spec.step = a.step;
    spec.dwell_min_s = a.dwell_min;
    spec.dwell_max_s = a.dwell_max;
    spec.dot_diameter = a.dot;
    csv::write_file(a.out, emit_program(saccade_grid(spec)));
    return kExitOk;
}

int run_stim_points(const StimPointsArgs& a, std::ostream&)
{
    csv::write_file(a.out, emit_program(point_sequence(parse_points(a.points), a.dwell_min, a.dwell_max, a.dot)));
    return kExitOk;
}

int run_synth(SynthArgs a, std::ostream& out)
{
    const auto schedule = load_schedule(a.schedule);
    if (a.confounders.size() != 1)
        throw Error(ErrorCode::InvalidArgument, "--confounders takes one of a, b, c, d");
    a.motion.noise_sigma = a.noise;
    a.motion.confounders = confounder_preset(a.confounders[0], a.eye.pupil_center);
    const SessionSimulator sim(schedule, a.motion, a.eye, a.camera, a.seed);
    write_session(sim, a.out, a.segment_limit);
    out << "wrote " << sim.frame_count() << " frames to " << a.out << "\n";
    return kExitOk;
}

int run_detect(DetectArgs a, std::ostream& out)
{
    FrameStoreReader store(a.session);
    const auto cal = load_calibration(a.calibration);
    a.params.p4.floor_override = a.p4_floor;
    const auto log = replay(store, a.params, cal ? &*cal : nullptr);
    csv::write_file(a.out, format_sample_log(log));
    std::size_t vog = 0, dpi = 0;
    for (const auto& r : log) {
        vog += r.vog_valid;
        dpi += r.dpi_valid;
    }
    out << log.size() << " frames; vog valid " << vog << ", dpi valid " << dpi << "\n";
    return kExitOk;
}

int run_sweep(const SweepArgs& a, std::ostream& out)
{
    FrameStoreReader store(a.session);
    const auto results = threshold_sweep(store, a.thresholds);
    std::error_code ec;
    fs::create_directories(a.out, ec);
    if (!fs::is_directory(a.out))
        throw Error(ErrorCode::IoError, "cannot create " + a.out);
    for (const auto& r : results) {
        const auto path = fs::path(a.out) / ("samples_t" + std::to_string(r.threshold) + ".csv");
        csv::write_file(path, format_sample_log(r.log));
        out << "threshold " << r.threshold << " -> " << path.string() << "\n";
    }
    return kExitOk;
}

int run_calibrate(const CalibrateArgs& a, std::ostream& out)
{
    require_file(a.samples);
    const auto log = parse_sample_log(csv::read_file(a.samples));
    const auto schedule = load_schedule(a.schedule);
    const auto source = signal_from_string(a.signal);
    const auto samples = to_gaze_samples(log, source);
    const auto seg = segment_fixations(samples, schedule, a.settle, a.tail);
    std::vector<CalibrationPoint> points;
    for (const auto& s : seg.segments)
        points.push_back({s.raw_mean, s.target_deg});
    auto model = fit_calibration(points);
    model.source = source;
    csv::write_file(a.out, format_calibration(model));
    out << "calibrated " << to_string(source) << " on " << points.size() << " fixations, residual "
        << csv::fixed(model.residual_rms, 4) << " deg\n";
    return kExitOk;
}

int run_analyze(const AnalyzeArgs& a, std::ostream& out)
{
    require_file(a.samples);
    const auto log = parse_sample_log(csv::read_file(a.samples));
    const auto schedule = load_schedule(a.schedule);
    const auto source = signal_from_string(a.signal);
    const auto cal = load_calibration(a.calibration);
    if (cal && cal->source != source)
        throw Error(ErrorCode::InvalidArgument, "calibration was fitted on the " + std::string(to_string(cal->source)) +
                                                    " signal");
    const auto samples = to_gaze_samples(log, source, cal ? &*cal : nullptr);
    const auto report = build_report(samples, schedule, a.settle, a.tail);
    csv::write_file(a.report, format_report_csv(report));
    if (!a.fixations.empty())
        csv::write_file(a.fixations, format_fixation_csv(report));
    if (!a.plot.empty())
        csv::write_file(a.plot, gaze_trace_svg(samples, schedule, std::string(to_string(source)) + " gaze"));

    out << to_string(source) << ": validity " << csv::fixed(report.validity_fraction, 4) << ", fixations "
        << report.fixation_count;
    if (report.accuracy)
        out << ", accuracy " << csv::fixed(report.accuracy->mean, 4) << " deg";
    out << "\n";
    if (a.min_validity && report.validity_fraction < *a.min_validity) {
        out << "quality gate failed: validity " << csv::fixed(report.validity_fraction, 4) << " < "
            << csv::num(*a.min_validity) << "\n";
        return kExitQualityGate;
    }
    return kExitOk;
}

} // namespace

int run_cli(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Offline video-oculography toolkit: synthetic sessions, feature detection, calibration and "
                 "data-quality metrics.",
                 "vogtool"};
    app.require_subcommand(1);
    app.failure_message(CLI::FailureMessage::help);
    std::function<int()> action;

    auto* stim = app.add_subcommand("stim", "Stimulus programs and schedules");
    stim->require_subcommand(1);

    StimCompileArgs sc;
    auto* compile = stim->add_subcommand("compile", "Resolve a stimulus program into a timed schedule");
    compile->add_option("--in", sc.in, "Stimulus program XML")->required();
    compile->add_option("--seed", sc.seed, "Seed for random dwell times")->required();
    compile->add_option("--out", sc.out, "Resolved schedule XML")->required();
    compile->callback([&] { action = [&] { return run_stim_compile(sc, out); }; });

    StimGridArgs sg;
    auto* grid = stim->add_subcommand("grid", "Write a saccade amplitude grid program");
    grid->add_option("--axis", sg.axis, "h or v")->capture_default_str();
    grid->add_option("--amp-min", sg.amp_min, "Smallest amplitude (deg)")->capture_default_str();
    grid->add_option("--amp-max", sg.amp_max, "Largest amplitude (deg)")->capture_default_str();
    grid->add_option("--step", sg.step, "Amplitude step (deg)")->capture_default_str();
    grid->add_option("--dwell-min", sg.dwell_min, "Shortest fixation (s)")->capture_default_str();
    grid->add_option("--dwell-max", sg.dwell_max, "Longest fixation (s)")->capture_default_str();
    grid->add_option("--dot", sg.dot, "Dot diameter (deg)")->capture_default_str();
    grid->add_option("--out", sg.out, "Stimulus program XML")->required();
    grid->callback([&] { action = [&] { return run_stim_grid(sg, out); }; });

    StimPointsArgs sp;
    auto* points = stim->add_subcommand("points", "Write a fixation sequence over listed points");
    points->add_option("--points", sp.points, "Targets in degrees, x:y;x:y;... (use --points=...)")->required();
    points->add_option("--dwell-min", sp.dwell_min, "Shortest fixation (s)")->capture_default_str();
    points->add_option("--dwell-max", sp.dwell_max, "Longest fixation (s)")->capture_default_str();
    points->add_option("--dot", sp.dot, "Dot diameter (deg)")->capture_default_str();
    points->add_option("--out", sp.out, "Stimulus program XML")->required();
    points->callback([&] { action = [&] { return run_stim_points(sp, out); }; });

    SynthArgs sy;
    auto* synth = app.add_subcommand("synth", "Render a synthetic recording session into a frame store");
    synth->add_option("--schedule", sy.schedule, "Resolved schedule XML")->required();
    synth->add_option("--out", sy.out, "Session directory")->required();
    synth->add_option("--seed", sy.seed, "Seed for frame noise and camera timing")->required();
    synth->add_option("--noise", sy.noise, "Pixel noise sigma (intensity units)")->capture_default_str();
    synth->add_option("--confounders", sy.confounders, "Reflection scenario a|b|c|d")->capture_default_str();
    synth->add_option("--wobble", sy.motion.wobble_amplitude, "P4 post-saccadic wobble amplitude (deg)")
        ->capture_default_str();
    synth->add_option("--wobble-freq", sy.motion.wobble_frequency, "Wobble frequency (Hz)")->capture_default_str();
    synth->add_option("--wobble-decay", sy.motion.wobble_decay, "Wobble decay constant (ms)")->capture_default_str();
    synth->add_option("--coupling-h", sy.motion.coupling_h_to_v, "Horizontal-to-vertical leakage (fraction)")
        ->capture_default_str();
    synth->add_option("--coupling-v", sy.motion.coupling_v_to_h, "Vertical-to-horizontal leakage (fraction)")
        ->capture_default_str();
    synth->add_option("--p4-intensity", sy.eye.p4_intensity, "P4 peak intensity; equal to the pupil removes P4")
        ->capture_default_str();
    synth->add_option("--alternation", sy.camera.alternation_prob, "Probability that the frame interval switches")
        ->capture_default_str();
    synth->add_option("--segment-limit", sy.segment_limit, "Maximum segment file size (bytes)")
        ->capture_default_str();
    synth->callback([&] { action = [&] { return run_synth(sy, out); }; });

    DetectArgs de;
    auto* detect = app.add_subcommand("detect", "Replay a session and write the sample log");
    detect->add_option("--session", de.session, "Session directory")->required();
    detect->add_option("--pupil-threshold", de.params.pupil_threshold, "Pupil intensity threshold")
        ->capture_default_str();
    detect->add_option("--p4-floor", de.p4_floor, "Fixed P4 floor instead of the per-frame adaptive one");
    detect->add_option("--calibration", de.calibration, "Calibration model; fills the degree columns");
    detect->add_option("--out", de.out, "Sample log CSV")->required();
    detect->callback([&] { action = [&] { return run_detect(de, out); }; });

    SweepArgs sw;
    auto* sweep = app.add_subcommand("sweep", "Replay one session at several pupil thresholds");
    sweep->add_option("--session", sw.session, "Session directory")->required();
    sweep->add_option("--thresholds", sw.thresholds, "Comma-separated pupil thresholds")
        ->required()
        ->delimiter(',');
    sweep->add_option("--out", sw.out, "Output directory for samples_tNN.csv")->required();
    sweep->callback([&] { action = [&] { return run_sweep(sw, out); }; });

    CalibrateArgs ca;
    auto* calibrate = app.add_subcommand("calibrate", "Fit a calibration model from a calibration session");
    calibrate->add_option("--samples", ca.samples, "Sample log of the calibration session")->required();
    calibrate->add_option("--schedule", ca.schedule, "Resolved schedule of the calibration session")->required();
    calibrate->add_option("--signal", ca.signal, "vog or dpi")->capture_default_str();
    calibrate->add_option("--settle", ca.settle, "Settle time after target onset (ms)")->capture_default_str();
    calibrate->add_option("--tail", ca.tail, "Excluded time before target offset (ms)")->capture_default_str();
    calibrate->add_option("--out", ca.out, "Calibration model text file")->required();
    calibrate->callback([&] { action = [&] { return run_calibrate(ca, out); }; });

    AnalyzeArgs an;
    auto* analyze = app.add_subcommand("analyze", "Compute the data-quality report");
    analyze->add_option("--samples", an.samples, "Sample log")->required();
    analyze->add_option("--schedule", an.schedule, "Resolved schedule")->required();
    analyze->add_option("--report", an.report, "Report CSV (name,value,unit)")->required();
    analyze->add_option("--signal", an.signal, "vog or dpi")->capture_default_str();
    analyze->add_option("--calibration", an.calibration, "Calibration model applied to the raw signal");
    analyze->add_option("--min-validity", an.min_validity, "Exit 3 when validity falls below this fraction");
    analyze->add_option("--fixations", an.fixations, "Per-fixation detail CSV");
    analyze->add_option("--plot", an.plot, "SVG gaze trace");
    analyze->add_option("--settle", an.settle, "Settle time after target onset (ms)")->capture_default_str();
    analyze->add_option("--tail", an.tail, "Excluded time before target offset (ms)")->capture_default_str();
    analyze->callback([&] { action = [&] { return run_analyze(an, out); }; });

    std::vector<const char*> cargs;
    for (const auto& s : argv)
        cargs.push_back(s.c_str());
    try {
        app.parse(static_cast<int>(cargs.size()), cargs.data());
    } catch (const CLI::Success& e) {
        app.exit(e, out, err);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kExitUsage;
    }

    try {
        return action ? action() : kExitUsage;
    } catch (const Error& e) {
        err << "vogtool: " << e.what() << "\n";
        return e.code() == ErrorCode::InvalidArgument ? kExitUsage : kExitIo;
    } catch (const std::exception& e) {
        err << "vogtool: " << e.what() << "\n";
        return kExitIo;
    }
}

} // namespace vog
