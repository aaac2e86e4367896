#pragma once

#include "vog/frame.hpp"

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace vog {

/// Binary 8-bit PGM (P5, maxval 255).
std::vector<std::uint8_t> encode_pgm(const Frame& frame);
/// Pixels and size only; index and timestamp live in the manifest.
Frame decode_pgm(std::span<const std::uint8_t> bytes);

class FrameSink {
public:
    virtual ~FrameSink() = default;
    virtual void write(const Frame& frame) = 0;
};

inline constexpr std::uint64_t kDefaultSegmentLimit = 4ull << 30;

struct FrameStoreOptions {
    std::uint64_t segment_limit_bytes = kDefaultSegmentLimit;
};

struct ManifestEntry {
    std::int64_t frame_index = 0;
    int segment = 0;
    std::uint64_t offset = 0;
    double timestamp_us = 0.0;
};

std::string segment_name(int segment);

/// Writes `seg_NNNN.vframes` files of [u32 LE length][PGM] records, starting a
/// new segment whenever the next record would push the current one past the
/// limit, and `manifest.csv` on close().
class FrameStoreWriter : public FrameSink {
public:
    FrameStoreWriter(std::filesystem::path dir, FrameStoreOptions options = {});
    ~FrameStoreWriter() override;

    /// Frames must arrive with dense indices from 0 and strictly increasing
    /// timestamps. Throws StorageFull when a record cannot fit in any segment
    /// or the device runs out of space.
    void write(const Frame& frame) override;
    void close();

    const std::vector<ManifestEntry>& manifest() const { return manifest_; }
    int segment_count() const { return segment_ + 1; }

private:
    void open_segment(int segment);

    std::filesystem::path dir_;
    FrameStoreOptions options_;
    std::ofstream out_;
    int segment_ = -1;
    std::uint64_t segment_size_ = 0;
    std::vector<ManifestEntry> manifest_;
    bool closed_ = false;
};

class FrameStoreReader {
public:
    /// Throws IoError when the directory or manifest is missing and
    /// ManifestMismatch when the manifest is malformed or not dense.
    explicit FrameStoreReader(std::filesystem::path dir);

    std::int64_t frame_count() const { return static_cast<std::int64_t>(manifest_.size()); }
    const std::vector<ManifestEntry>& manifest() const { return manifest_; }

    /// ManifestMismatch when the entry points past the segment end;
    /// CorruptSegment when the length prefix disagrees with the payload.
    Frame read(std::int64_t index);

private:
    std::ifstream& segment_stream(int segment, std::uint64_t& size);

    std::filesystem::path dir_;
    std::vector<ManifestEntry> manifest_;
    std::map<int, std::pair<std::ifstream, std::uint64_t>> segments_;
};

std::string format_manifest(const std::vector<ManifestEntry>& manifest);

} // namespace vog
