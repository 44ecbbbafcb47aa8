#include "eeglab/eegb.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>

namespace eeglab {

namespace {

// All scalar fields are little-endian; this code assumes a little-endian
// host (checked once at file open).
bool host_is_little_endian() {
    const std::uint32_t probe = 1;
    std::uint8_t b;
    std::memcpy(&b, &probe, 1);
    return b == 1;
}

template <typename T>
void put(std::ofstream& os, T v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::ifstream& is) {
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!is) throw DataError("truncated EEGB file");
    return v;
}

constexpr char kMagic[4] = {'E', 'E', 'G', 'B'};
constexpr std::uint32_t kVersionTag = 1;

}  // namespace

void write_eegb(const std::string& path, const SegmentFile& file) {
    if (!host_is_little_endian())
        throw DataError("EEGB I/O requires a little-endian host");
    std::ofstream os(path, std::ios::binary);
    if (!os) throw DataError("cannot open for writing: " + path);
    os.write(kMagic, 4);
    put<std::uint32_t>(os, kVersionTag);
    put<std::uint32_t>(os, file.n_channels);
    put<std::uint32_t>(os, file.sampling_rate_hz);
    put<std::uint32_t>(os, static_cast<std::uint32_t>(file.segments.size()));
    std::vector<float> buf;
    for (const auto& seg : file.segments) {
        if (seg.samples.rows != file.n_channels)
            throw DataError("segment channel count differs from header");
        put<std::uint32_t>(os, static_cast<std::uint32_t>(seg.samples.cols));
        put<std::int32_t>(os, static_cast<std::int32_t>(seg.class_label));
        put<std::uint32_t>(os, seg.block_index);
        put<std::uint32_t>(os, seg.subject_id);
        put<std::uint32_t>(os, seg.session_id);
        put<std::uint64_t>(os, seg.onset_ms);
        buf.resize(seg.samples.size());
        for (std::size_t i = 0; i < seg.samples.size(); ++i)
            buf[i] = static_cast<float>(seg.samples.v[i]);
        os.write(reinterpret_cast<const char*>(buf.data()),
                 static_cast<std::streamsize>(buf.size() * sizeof(float)));
    }
    if (!os) throw DataError("write failed: " + path);
}

SegmentFile read_eegb(const std::string& path) {
    if (!host_is_little_endian())
        throw DataError("EEGB I/O requires a little-endian host");
    std::ifstream is(path, std::ios::binary);
    if (!is) throw DataError("cannot open for reading: " + path);
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, kMagic, 4) != 0)
        throw DataError("not an EEGB file: " + path);
    std::uint32_t version = get<std::uint32_t>(is);
    if (version != kVersionTag)
        throw DataError("unsupported EEGB version " + std::to_string(version));
    SegmentFile file;
    file.n_channels = get<std::uint32_t>(is);
    file.sampling_rate_hz = get<std::uint32_t>(is);
    std::uint32_t n_segments = get<std::uint32_t>(is);
    if (file.n_channels == 0) throw DataError("EEGB header: zero channels");
    file.segments.reserve(n_segments);
    std::vector<float> buf;
    for (std::uint32_t k = 0; k < n_segments; ++k) {
        Segment seg;
        std::uint32_t n_samples = get<std::uint32_t>(is);
        seg.class_label = static_cast<int>(get<std::int32_t>(is));
        seg.block_index = get<std::uint32_t>(is);
        seg.subject_id = get<std::uint32_t>(is);
        seg.session_id = get<std::uint32_t>(is);
        seg.onset_ms = get<std::uint64_t>(is);
        buf.resize(static_cast<std::size_t>(file.n_channels) * n_samples);
        is.read(reinterpret_cast<char*>(buf.data()),
                static_cast<std::streamsize>(buf.size() * sizeof(float)));
        if (!is) throw DataError("truncated EEGB file");
        seg.samples = Mat(file.n_channels, n_samples);
        for (std::size_t i = 0; i < buf.size(); ++i)
            seg.samples.v[i] = static_cast<double>(buf[i]);
        file.segments.push_back(std::move(seg));
    }
    return file;
}

}  // namespace eeglab
