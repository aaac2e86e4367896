#include "support.hpp"

#include "vog/csv.hpp"
#include "vog/framestore.hpp"
#include "vog/recorder.hpp"
#include "vog/stimulus.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <thread>

using namespace vog;
namespace fs = std::filesystem;

namespace {

Frame random_frame(int w, int h, std::int64_t index, std::mt19937_64& rng)
{
    Frame f(w, h);
    for (auto& p : f.pixels)
        p = static_cast<std::uint8_t>(rng());
    f.index = index;
    f.timestamp_us = 2003.05 * static_cast<double>(index) + 0.1;
    return f;
}

std::vector<Frame> write_frames(const fs::path& dir, int n, int w, int h, std::uint64_t limit, int* segments = nullptr)
{
    std::mt19937_64 rng(n);
    std::vector<Frame> frames;
    FrameStoreWriter writer(dir, {limit});
    for (int i = 0; i < n; ++i) {
        frames.push_back(random_frame(w, h, i, rng));
        writer.write(frames.back());
    }
    writer.close();
    if (segments)
        *segments = writer.segment_count();
    return frames;
}

ErrorCode code_of(const std::function<void()>& f)
{
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no vog::Error thrown";
    return ErrorCode::InvalidArgument;
}

} // namespace

TEST(Pgm, RoundTrip)
{
    std::mt19937_64 rng(1);
    const auto f = random_frame(37, 11, 0, rng);
    const auto bytes = encode_pgm(f);
    const std::string head(bytes.begin(), bytes.begin() + 2);
    EXPECT_EQ(head, "P5");
    const auto back = decode_pgm(bytes);
    EXPECT_EQ(back.width, 37);
    EXPECT_EQ(back.height, 11);
    EXPECT_EQ(back.pixels, f.pixels);
}

TEST(Pgm, Malformed)
{
    std::mt19937_64 rng(1);
    auto bytes = encode_pgm(random_frame(8, 8, 0, rng));
    bytes.pop_back();
    EXPECT_EQ(code_of([&] { decode_pgm(bytes); }), ErrorCode::CorruptSegment);
    bytes[1] = '2';
    EXPECT_EQ(code_of([&] { decode_pgm(bytes); }), ErrorCode::CorruptSegment);
}

TEST(FrameStore, RoundTripSingleSegment)
{
    const auto dir = vogtest::temp_dir("store_one");
    int segments = 0;
    const auto frames = write_frames(dir, 100, 512, 320, kDefaultSegmentLimit, &segments);
    EXPECT_EQ(segments, 1);
    FrameStoreReader reader(dir);
    ASSERT_EQ(reader.frame_count(), 100);
    for (std::int64_t i = 0; i < 100; ++i)
        EXPECT_EQ(reader.read(i), frames[i]);
    fs::remove_all(dir);
}

TEST(FrameStore, SplitsAtLimit)
{
    const auto dir = vogtest::temp_dir("store_split");
    int segments = 0;
    const auto frames = write_frames(dir, 100, 512, 320, 1 << 20, &segments);
    const std::uint64_t record = encode_pgm(frames[0]).size() + 4;
    const std::uint64_t per_segment = (1 << 20) / record;
    EXPECT_EQ(segments, static_cast<int>((100 + per_segment - 1) / per_segment));
    for (int s = 0; s < segments; ++s)
        EXPECT_LE(fs::file_size(dir / segment_name(s)), 1u << 20);
    FrameStoreReader reader(dir);
    for (std::int64_t i = 99; i >= 0; --i)
        EXPECT_EQ(reader.read(i), frames[i]);
    fs::remove_all(dir);
}

TEST(FrameStore, SplitIsContentDeterministic)
{
    const auto a = vogtest::temp_dir("store_det_a");
    const auto b = vogtest::temp_dir("store_det_b");
    write_frames(a, 40, 200, 100, 100000);
    write_frames(b, 40, 200, 100, 100000);
    EXPECT_EQ(csv::read_file(a / "manifest.csv"), csv::read_file(b / "manifest.csv"));
    fs::remove_all(a);
    fs::remove_all(b);
}

TEST(FrameStore, RecordLargerThanLimit)
{
    const auto dir = vogtest::temp_dir("store_full");
    FrameStoreWriter writer(dir, {1000});
    std::mt19937_64 rng(2);
    EXPECT_EQ(code_of([&] { writer.write(random_frame(64, 64, 0, rng)); }), ErrorCode::StorageFull);
    fs::remove_all(dir);
}

TEST(FrameStore, WriterRejectsGapsAndBackwardsTime)
{
    const auto dir = vogtest::temp_dir("store_order");
    FrameStoreWriter writer(dir);
    std::mt19937_64 rng(2);
    writer.write(random_frame(8, 8, 0, rng));
    EXPECT_EQ(code_of([&] { writer.write(random_frame(8, 8, 2, rng)); }), ErrorCode::InvalidArgument);
    auto f = random_frame(8, 8, 1, rng);
    f.timestamp_us = 0.0;
    EXPECT_EQ(code_of([&] { writer.write(f); }), ErrorCode::NonMonotoneTimestamps);
    fs::remove_all(dir);
}

TEST(FrameStore, ManifestPastSegmentEnd)
{
    const auto dir = vogtest::temp_dir("store_past");
    write_frames(dir, 5, 32, 32, kDefaultSegmentLimit);
    auto text = csv::read_file(dir / "manifest.csv");
    const auto pos = text.rfind("\n4,0,");
    ASSERT_NE(pos, std::string::npos);
    const auto comma = text.find(',', pos + 5);
    text.replace(pos + 5, comma - (pos + 5), "999999");
    csv::write_file(dir / "manifest.csv", text);
    FrameStoreReader reader(dir);
    EXPECT_NO_THROW(reader.read(3));
    EXPECT_EQ(code_of([&] { reader.read(4); }), ErrorCode::ManifestMismatch);
    fs::remove_all(dir);
}

TEST(FrameStore, CorruptLengthPrefix)
{
    const auto dir = vogtest::temp_dir("store_corrupt");
    write_frames(dir, 3, 32, 32, kDefaultSegmentLimit);
    {
        std::fstream seg(dir / segment_name(0), std::ios::in | std::ios::out | std::ios::binary);
        const char bogus[4] = {'\x07', 0, 0, 0};
        seg.write(bogus, 4);
    }
    FrameStoreReader reader(dir);
    EXPECT_EQ(code_of([&] { reader.read(0); }), ErrorCode::CorruptSegment);
    fs::remove_all(dir);
}

TEST(FrameStore, MissingPieces)
{
    EXPECT_EQ(code_of([] { FrameStoreReader r("/nonexistent/vog/session"); }), ErrorCode::IoError);
    const auto dir = vogtest::temp_dir("store_missing");
    EXPECT_EQ(code_of([&] { FrameStoreReader r(dir); }), ErrorCode::IoError);
    write_frames(dir, 3, 16, 16, kDefaultSegmentLimit);
    fs::remove(dir / segment_name(0));
    EXPECT_EQ(code_of([&] { FrameStoreReader r(dir); }), ErrorCode::ManifestMismatch);
    fs::remove_all(dir);
}

namespace {

class SlowSink : public FrameSink {
public:
    void write(const Frame& f) override
    {
        if (f.index % 97 == 0)
            std::this_thread::sleep_for(std::chrono::microseconds(200));
        indices.push_back(f.index);
    }
    std::vector<std::int64_t> indices;
};

FrameProducer counting_producer(std::int64_t n)
{
    auto i = std::make_shared<std::int64_t>(0);
    return [i, n]() -> std::optional<Frame> {
        if (*i >= n)
            return std::nullopt;
        Frame f(4, 4, static_cast<std::uint8_t>(*i));
        f.index = (*i)++;
        return f;
    };
}

} // namespace

TEST(Recorder, CapacityOneLosesNothing)
{
    SlowSink sink;
    const auto stats = record(counting_producer(500), {1}, sink);
    EXPECT_EQ(stats.produced, 500u);
    EXPECT_EQ(stats.persisted, 500u);
    EXPECT_EQ(stats.max_occupancy, 1u);
    ASSERT_EQ(sink.indices.size(), 500u);
    for (std::int64_t i = 0; i < 500; ++i)
        EXPECT_EQ(sink.indices[i], i);
}

TEST(Recorder, SlowConsumerTenThousandFrames)
{
    SlowSink sink;
    const auto stats = record(counting_producer(10000), {16}, sink);
    EXPECT_EQ(stats.persisted, 10000u);
    EXPECT_LE(stats.max_occupancy, 16u);
    ASSERT_EQ(sink.indices.size(), 10000u);
    EXPECT_TRUE(std::is_sorted(sink.indices.begin(), sink.indices.end()));
    EXPECT_EQ(sink.indices.back(), 9999);
}

TEST(Recorder, SinkErrorsPropagate)
{
    class Failing : public FrameSink {
    public:
        void write(const Frame& f) override
        {
            if (f.index == 50)
                throw Error(ErrorCode::StorageFull, "disk full");
        }
    } sink;
    EXPECT_EQ(code_of([&] { record(counting_producer(1000), {4}, sink); }), ErrorCode::StorageFull);
}

TEST(Recorder, ZeroCapacityRejected)
{
    SlowSink sink;
    EXPECT_EQ(code_of([&] { record(counting_producer(1), {0}, sink); }), ErrorCode::InvalidArgument);
}

namespace {

fs::path small_session(const std::string& name, double noise)
{
    const auto dir = vogtest::temp_dir(name);
    const auto schedule = resolve(point_sequence({{0, 0}, {4, 2}}, 0.2, 0.2), 1);
    MotionModel motion;
    motion.noise_sigma = noise;
    const SessionSimulator sim(schedule, motion, EyeState{}, CameraModel{}, 2);
    write_session(sim, dir, kDefaultSegmentLimit);
    return dir;
}

} // namespace

TEST(Replay, CleanStoreAndDeterminism)
{
    const auto dir = small_session("replay", 1.0);
    FrameStoreReader store(dir);
    const auto a = replay(store, DetectionParams{});
    const auto b = replay(store, DetectionParams{});
    EXPECT_EQ(format_sample_log(a), format_sample_log(b));
    ASSERT_EQ(a.size(), 200u);
    std::size_t dpi = 0;
    for (const auto& r : a) {
        dpi += r.dpi_valid;
        EXPECT_FALSE(r.vog_deg);
        EXPECT_FALSE(r.dpi_deg);
        EXPECT_TRUE(r.pupil && r.p1);
    }
    EXPECT_GE(dpi, 198u);
    EXPECT_TRUE(fs::exists(dir / "truth.csv"));
    fs::remove_all(dir);
}

TEST(Replay, SampleLogRoundTrip)
{
    const auto dir = small_session("replay_rt", 1.0);
    FrameStoreReader store(dir);
    CalibrationModel cal;
    cal.coeff_x[1] = 0.2;
    cal.coeff_y[2] = 0.2;
    const auto log = replay(store, DetectionParams{}, &cal);
    ASSERT_TRUE(log[0].vog_deg);
    EXPECT_FALSE(log[0].dpi_deg);
    const auto text = format_sample_log(log);
    EXPECT_EQ(text.substr(0, text.find('\n')),
              "frame_index,timestamp_us,pupil_x,pupil_y,pupil_r,p1_x,p1_y,p4_x,p4_y,vog_x_deg,vog_y_deg,"
              "dpi_x_deg,dpi_y_deg,vog_valid,dpi_valid,failure_reasons");
    const auto back = parse_sample_log(text);
    EXPECT_EQ(format_sample_log(back), text);
    ASSERT_EQ(back.size(), log.size());
    EXPECT_EQ(back[7].raw(SignalSource::VOG)->dx, log[7].raw(SignalSource::VOG)->dx);
    fs::remove_all(dir);
}

TEST(Sweep, SingleAndDuplicateThresholds)
{
    const auto dir = small_session("sweep", 4.0);
    FrameStoreReader store(dir);
    const auto plain = format_sample_log(replay(store, DetectionParams{}));
    const auto one = threshold_sweep(store, {37});
    ASSERT_EQ(one.size(), 1u);
    EXPECT_EQ(format_sample_log(one[0].log), plain);

    const auto dup = threshold_sweep(store, {42, 42});
    EXPECT_EQ(format_sample_log(dup[0].log), format_sample_log(dup[1].log));
    EXPECT_NE(format_sample_log(dup[0].log), plain);
    EXPECT_EQ(dup[0].threshold, 42);
    fs::remove_all(dir);
}
