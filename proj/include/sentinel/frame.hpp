// Image frames, frame streams and the FRM1 binary stream format.
#pragma once

#include <sentinel/error.hpp>

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <span>
#include <string>
#include <vector>

namespace sentinel {

/// One W x H x C image with values in [0, 1], row-major and channel-last:
/// pixel (x, y, c) lives at index (y * width + x) * channels + c.
class FrameTensor {
  public:
    FrameTensor() = default;

    FrameTensor(std::uint32_t width, std::uint32_t height, std::uint32_t channels, float fill = 0.0f)
        : width_(width), height_(height), channels_(channels),
          pixels_(checked_size(width, height, channels), fill) {
        check_range(fill);
    }

    FrameTensor(std::uint32_t width, std::uint32_t height, std::uint32_t channels,
                std::vector<float> pixels)
        : width_(width), height_(height), channels_(channels), pixels_(std::move(pixels)) {
        if (pixels_.size() != checked_size(width, height, channels))
            throw UsageError("frame pixel count does not match width*height*channels");
        for (float p : pixels_)
            check_range(p);
    }

    std::uint32_t width() const noexcept { return width_; }
    std::uint32_t height() const noexcept { return height_; }
    std::uint32_t channels() const noexcept { return channels_; }
    std::size_t size() const noexcept { return pixels_.size(); }

    std::span<const float> pixels() const noexcept { return pixels_; }

    float at(std::uint32_t x, std::uint32_t y, std::uint32_t c = 0) const {
        return pixels_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c];
    }

    // Writes are clamped to [0, 1] so the pixel invariant always holds.
    void set(std::uint32_t x, std::uint32_t y, std::uint32_t c, double value) {
        pixels_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c] =
            static_cast<float>(std::clamp(value, 0.0, 1.0));
    }

    void set_flat(std::size_t i, double value) {
        pixels_[i] = static_cast<float>(std::clamp(value, 0.0, 1.0));
    }

    bool same_shape(const FrameTensor& other) const noexcept {
        return width_ == other.width_ && height_ == other.height_ && channels_ == other.channels_;
    }

    friend bool operator==(const FrameTensor&, const FrameTensor&) = default;

  private:
    static std::size_t checked_size(std::uint32_t w, std::uint32_t h, std::uint32_t c) {
        if (w == 0 || h == 0 || c == 0)
            throw UsageError("frame dimensions must be positive");
        return static_cast<std::size_t>(w) * h * c;
    }

    static void check_range(float p) {
        if (!(p >= 0.0f && p <= 1.0f))
            throw UsageError("pixel value outside [0, 1]");
    }

    std::uint32_t width_ = 0;
    std::uint32_t height_ = 0;
    std::uint32_t channels_ = 0;
    std::vector<float> pixels_;
};

/// Ordered frames sharing one shape. Index i is discrete time t = i.
class FrameStream {
  public:
    FrameStream() = default;
    explicit FrameStream(double frame_rate_hz) : frame_rate_hz_(frame_rate_hz) {
        if (!(frame_rate_hz > 0.0))
            throw UsageError("frame rate must be positive");
    }

    void push_back(FrameTensor frame) {
        if (!frames_.empty() && !frames_.front().same_shape(frame))
            throw UsageError("all frames in a stream must share dimensions");
        frames_.push_back(std::move(frame));
    }

    std::size_t size() const noexcept { return frames_.size(); }
    bool empty() const noexcept { return frames_.empty(); }
    const FrameTensor& operator[](std::size_t i) const { return frames_[i]; }
    std::span<const FrameTensor> frames() const noexcept { return frames_; }
    double frame_rate_hz() const noexcept { return frame_rate_hz_; }

    auto begin() const { return frames_.begin(); }
    auto end() const { return frames_.end(); }

  private:
    std::vector<FrameTensor> frames_;
    double frame_rate_hz_ = 10.0;
};

namespace detail {

inline void put_u32(std::vector<unsigned char>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i)
        out.push_back(static_cast<unsigned char>((v >> (8 * i)) & 0xFFu));
}

inline std::uint32_t get_u32(std::span<const unsigned char> in, std::size_t offset) {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i)
        v |= static_cast<std::uint32_t>(in[offset + i]) << (8 * i);
    return v;
}

} // namespace detail

inline constexpr char kFrameMagic[4] = {'F', 'R', 'M', '1'};

/// Serializes a stream as FRM1: magic, little-endian u32 count/width/height/
/// channels, then little-endian float32 pixels frame by frame.
inline std::vector<unsigned char> encode_frames(const FrameStream& stream) {
    std::vector<unsigned char> out(kFrameMagic, kFrameMagic + 4);
    const std::uint32_t w = stream.empty() ? 0 : stream[0].width();
    const std::uint32_t h = stream.empty() ? 0 : stream[0].height();
    const std::uint32_t c = stream.empty() ? 0 : stream[0].channels();
    detail::put_u32(out, static_cast<std::uint32_t>(stream.size()));
    detail::put_u32(out, w);
    detail::put_u32(out, h);
    detail::put_u32(out, c);
    out.reserve(out.size() + stream.size() * static_cast<std::size_t>(w) * h * c * 4);
    for (const auto& frame : stream)
        for (float p : frame.pixels())
            detail::put_u32(out, std::bit_cast<std::uint32_t>(p));
    return out;
}

inline FrameStream decode_frames(std::span<const unsigned char> bytes, double frame_rate_hz = 10.0) {
    if (bytes.size() < 4)
        throw FormatError("truncated FRM1 header: missing magic", bytes.size());
    if (std::memcmp(bytes.data(), kFrameMagic, 4) != 0)
        throw FormatError("bad magic: expected \"FRM1\"", 0);
    if (bytes.size() < 20)
        throw FormatError("truncated FRM1 header", bytes.size());
    const std::uint32_t count = detail::get_u32(bytes, 4);
    const std::uint32_t w = detail::get_u32(bytes, 8);
    const std::uint32_t h = detail::get_u32(bytes, 12);
    const std::uint32_t c = detail::get_u32(bytes, 16);
    if (count > 0 && (w == 0 || h == 0 || c == 0))
        throw FormatError("zero frame dimension in FRM1 header", 8);
    const std::uint64_t per_frame = static_cast<std::uint64_t>(w) * h * c;
    const std::uint64_t expected = 20 + 4 * per_frame * count;
    if (bytes.size() < expected)
        throw FormatError("truncated FRM1 payload: expected " + std::to_string(expected) +
                              " bytes, found " + std::to_string(bytes.size()),
                          bytes.size());
    if (bytes.size() > expected)
        throw FormatError("trailing bytes after FRM1 payload", expected);

    FrameStream stream(frame_rate_hz);
    std::size_t offset = 20;
    for (std::uint32_t f = 0; f < count; ++f) {
        std::vector<float> pixels(per_frame);
        for (auto& p : pixels) {
            p = std::bit_cast<float>(detail::get_u32(bytes, offset));
            if (!(p >= 0.0f && p <= 1.0f))
                throw FormatError("pixel value outside [0, 1]", offset);
            offset += 4;
        }
        stream.push_back(FrameTensor(w, h, c, std::move(pixels)));
    }
    return stream;
}

inline std::vector<unsigned char> read_file_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw UsageError("cannot open file for reading: " + path);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_file_bytes(const std::string& path, std::span<const unsigned char> bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw UsageError("cannot open file for writing: " + path);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out)
        throw UsageError("write failed: " + path);
}

inline FrameStream read_frames(const std::string& path, double frame_rate_hz = 10.0) {
    const auto bytes = read_file_bytes(path);
    return decode_frames(bytes, frame_rate_hz);
}

inline void write_frames(const std::string& path, const FrameStream& stream) {
    write_file_bytes(path, encode_frames(stream));
}

} // namespace sentinel
