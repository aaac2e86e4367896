#include "vog/framestore.hpp"

#include "vog/csv.hpp"
#include "vog/error.hpp"

#include <cerrno>
#include <charconv>
#include <cstdio>
#include <cstring>
#include <set>

namespace vog {

namespace fs = std::filesystem;

std::vector<std::uint8_t> encode_pgm(const Frame& frame)
{
    if (!frame.well_formed())
        throw Error(ErrorCode::FrameMalformed, "cannot encode a malformed frame");
    const std::string header = "P5\n" + std::to_string(frame.width) + " " + std::to_string(frame.height) + "\n255\n";
    std::vector<std::uint8_t> out(header.begin(), header.end());
    out.insert(out.end(), frame.pixels.begin(), frame.pixels.end());
    return out;
}

namespace {

// Reads one PNM header token, skipping whitespace and '#' comments.
std::string_view next_token(std::span<const std::uint8_t> bytes, std::size_t& pos)
{
    auto is_space = [](std::uint8_t c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; };
    while (pos < bytes.size()) {
        if (is_space(bytes[pos])) {
            ++pos;
        } else if (bytes[pos] == '#') {
            while (pos < bytes.size() && bytes[pos] != '\n')
                ++pos;
        } else {
            break;
        }
    }
    const std::size_t start = pos;
    while (pos < bytes.size() && !is_space(bytes[pos]))
        ++pos;
    return {reinterpret_cast<const char*>(bytes.data()) + start, pos - start};
}

int header_int(std::span<const std::uint8_t> bytes, std::size_t& pos)
{
    const auto tok = next_token(bytes, pos);
    int v = 0;
    const auto r = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (tok.empty() || r.ec != std::errc() || r.ptr != tok.data() + tok.size())
        throw Error(ErrorCode::CorruptSegment, "bad PGM header field");
    return v;
}

void write_failed(const fs::path& path)
{
    if (errno == ENOSPC)
        throw Error(ErrorCode::StorageFull, "no space left writing " + path.string());
    throw Error(ErrorCode::IoError, "cannot write " + path.string());
}

} // namespace

Frame decode_pgm(std::span<const std::uint8_t> bytes)
{
    std::size_t pos = 0;
    if (next_token(bytes, pos) != "P5")
        throw Error(ErrorCode::CorruptSegment, "not a binary PGM");
    const int w = header_int(bytes, pos);
    const int h = header_int(bytes, pos);
    const int maxval = header_int(bytes, pos);
    if (w <= 0 || h <= 0 || maxval != 255)
        throw Error(ErrorCode::CorruptSegment, "unsupported PGM geometry or maxval");
    ++pos; // single whitespace before the raster
    const auto n = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
    if (pos > bytes.size() || bytes.size() - pos != n)
        throw Error(ErrorCode::CorruptSegment, "PGM raster size does not match its header");
    Frame f(w, h);
    std::memcpy(f.pixels.data(), bytes.data() + pos, n);
    return f;
}

std::string segment_name(int segment)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "seg_%04d.vframes", segment);
    return buf;
}

FrameStoreWriter::FrameStoreWriter(fs::path dir, FrameStoreOptions options) : dir_(std::move(dir)), options_(options)
{
    if (options_.segment_limit_bytes == 0)
        throw Error(ErrorCode::InvalidArgument, "segment limit must be positive");
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec || !fs::is_directory(dir_))
        throw Error(ErrorCode::IoError, "cannot create " + dir_.string());
}

FrameStoreWriter::~FrameStoreWriter()
{
    if (!closed_) {
        try {
            close();
        } catch (...) {
        }
    }
}

void FrameStoreWriter::open_segment(int segment)
{
    if (out_.is_open())
        out_.close();
    segment_ = segment;
    segment_size_ = 0;
    const auto path = dir_ / segment_name(segment);
    out_.open(path, std::ios::binary | std::ios::trunc);
    if (!out_)
        throw Error(ErrorCode::IoError, "cannot create " + path.string());
}

void FrameStoreWriter::write(const Frame& frame)
{
    if (closed_)
        throw Error(ErrorCode::InvalidArgument, "frame store already closed");
    const auto expected = static_cast<std::int64_t>(manifest_.size());
    if (frame.index != expected)
        throw Error(ErrorCode::InvalidArgument,
                    "frame index " + std::to_string(frame.index) + " but expected " + std::to_string(expected));
    if (!manifest_.empty() && !(frame.timestamp_us > manifest_.back().timestamp_us))
        throw Error(ErrorCode::NonMonotoneTimestamps, "frame timestamps must increase");

    const auto payload = encode_pgm(frame);
    const std::uint64_t record = 4 + payload.size();
    if (payload.size() > 0xFFFFFFFFull || record > options_.segment_limit_bytes)
        throw Error(ErrorCode::StorageFull, "frame record does not fit within the segment limit");
    if (segment_ < 0 || segment_size_ + record > options_.segment_limit_bytes)
        open_segment(segment_ + 1);

    const auto len = static_cast<std::uint32_t>(payload.size());
    const unsigned char prefix[4] = {static_cast<unsigned char>(len), static_cast<unsigned char>(len >> 8),
                                     static_cast<unsigned char>(len >> 16), static_cast<unsigned char>(len >> 24)};
    errno = 0;
    out_.write(reinterpret_cast<const char*>(prefix), 4);
    out_.write(reinterpret_cast<const char*>(payload.data()), static_cast<std::streamsize>(payload.size()));
    if (!out_)
        write_failed(dir_ / segment_name(segment_));

    manifest_.push_back({frame.index, segment_, segment_size_, frame.timestamp_us});
    segment_size_ += record;
}

std::string format_manifest(const std::vector<ManifestEntry>& manifest)
{
    std::string text = "frame_index,segment,offset,timestamp_us\n";
    for (const auto& e : manifest)
        text += std::to_string(e.frame_index) + ',' + std::to_string(e.segment) + ',' + std::to_string(e.offset) +
                ',' + csv::num(e.timestamp_us) + '\n';
    return text;
}

void FrameStoreWriter::close()
{
    if (closed_)
        return;
    closed_ = true;
    if (out_.is_open()) {
        errno = 0;
        out_.flush();
        if (!out_)
            write_failed(dir_ / segment_name(segment_));
        out_.close();
    }
    csv::write_file(dir_ / "manifest.csv", format_manifest(manifest_));
}

FrameStoreReader::FrameStoreReader(fs::path dir) : dir_(std::move(dir))
{
    if (!fs::is_directory(dir_))
        throw Error(ErrorCode::IoError, "no such session directory: " + dir_.string());
    const auto path = dir_ / "manifest.csv";
    if (!fs::exists(path))
        throw Error(ErrorCode::IoError, "missing " + path.string());
    try {
        csv::Table t(csv::read_file(path));
        const auto ci = t.column("frame_index"), cs = t.column("segment"), co = t.column("offset"),
                   ct = t.column("timestamp_us");
        for (std::size_t r = 0; r < t.rows(); ++r) {
            ManifestEntry e;
            e.frame_index = csv::to_int(t.cell(r, ci));
            e.segment = static_cast<int>(csv::to_int(t.cell(r, cs)));
            e.offset = static_cast<std::uint64_t>(csv::to_int(t.cell(r, co)));
            e.timestamp_us = csv::to_double(t.cell(r, ct));
            if (e.frame_index != static_cast<std::int64_t>(r) || e.segment < 0)
                throw Error(ErrorCode::ManifestMismatch, "manifest frame indices are not dense from 0");
            manifest_.push_back(e);
        }
    } catch (const Error& e) {
        if (e.code() == ErrorCode::IoError || e.code() == ErrorCode::ManifestMismatch)
            throw;
        throw Error(ErrorCode::ManifestMismatch, std::string("malformed manifest: ") + e.what());
    }
    std::set<int> referenced;
    for (const auto& e : manifest_)
        referenced.insert(e.segment);
    for (int seg : referenced)
        if (!fs::is_regular_file(dir_ / segment_name(seg)))
            throw Error(ErrorCode::ManifestMismatch, "manifest references missing segment " + segment_name(seg));
}

std::ifstream& FrameStoreReader::segment_stream(int segment, std::uint64_t& size)
{
    auto it = segments_.find(segment);
    if (it == segments_.end()) {
        const auto path = dir_ / segment_name(segment);
        std::error_code ec;
        const auto bytes = fs::file_size(path, ec);
        if (ec)
            throw Error(ErrorCode::ManifestMismatch, "manifest references missing segment " + path.string());
        std::ifstream in(path, std::ios::binary);
        if (!in)
            throw Error(ErrorCode::IoError, "cannot open " + path.string());
        it = segments_.emplace(segment, std::make_pair(std::move(in), static_cast<std::uint64_t>(bytes))).first;
    }
    size = it->second.second;
    return it->second.first;
}

Frame FrameStoreReader::read(std::int64_t index)
{
    if (index < 0 || index >= frame_count())
        throw Error(ErrorCode::InvalidArgument, "frame index out of range");
    const auto& e = manifest_[static_cast<std::size_t>(index)];
    std::uint64_t size = 0;
    auto& in = segment_stream(e.segment, size);
    if (e.offset + 4 > size)
        throw Error(ErrorCode::ManifestMismatch, "manifest entry " + std::to_string(index) + " points past the end of " +
                                                     segment_name(e.segment));
    in.clear();
    in.seekg(static_cast<std::streamoff>(e.offset));
    unsigned char prefix[4];
    in.read(reinterpret_cast<char*>(prefix), 4);
    const std::uint64_t len = prefix[0] | (prefix[1] << 8) | (prefix[2] << 16) | (std::uint64_t{prefix[3]} << 24);
    if (!in || e.offset + 4 + len > size)
        throw Error(ErrorCode::CorruptSegment, "record length prefix of frame " + std::to_string(index) +
                                                   " runs past the end of " + segment_name(e.segment));
    std::vector<std::uint8_t> payload(len);
    in.read(reinterpret_cast<char*>(payload.data()), static_cast<std::streamsize>(len));
    if (!in)
        throw Error(ErrorCode::CorruptSegment, "short read in " + segment_name(e.segment));
    Frame f = decode_pgm(payload);
    f.index = e.frame_index;
    f.timestamp_us = e.timestamp_us;
    return f;
}

} // namespace vog
