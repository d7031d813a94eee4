#pragma once

// Little-endian readers and writers shared by the binary file formats.

#include <bit>
#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "olpsynth/error.hpp"

namespace olpsynth::detail {

class ByteReader {
public:
    ByteReader(std::span<const std::uint8_t> bytes, std::string what) : bytes_(bytes), what_(std::move(what)) {}

    void expect_magic(std::string_view magic) {
        need(magic.size(), "magic");
        if (std::memcmp(bytes_.data() + pos_, magic.data(), magic.size()) != 0)
            throw FormatError(what_ + ": bad magic, expected '" + std::string(magic) + "'");
        pos_ += magic.size();
    }

    std::uint32_t u32(std::string_view field) { return read<std::uint32_t>(field); }
    std::uint64_t u64(std::string_view field) { return read<std::uint64_t>(field); }

    void floats(std::vector<float>& out, std::uint64_t count, std::string_view field) {
        if (count > remaining() / 4) throw FormatError(what_ + ": truncated stream in " + std::string(field));
        out.resize(count);
        for (auto& v : out) v = std::bit_cast<float>(read<std::uint32_t>(field));
    }

    std::size_t remaining() const noexcept { return bytes_.size() - pos_; }
    bool at_end() const noexcept { return pos_ == bytes_.size(); }

private:
    void need(std::size_t n, std::string_view field) const {
        if (remaining() < n) throw FormatError(what_ + ": truncated stream in " + std::string(field));
    }

    template <class T>
    T read(std::string_view field) {
        need(sizeof(T), field);
        T v = 0;
        for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(bytes_[pos_ + i]) << (8 * i);
        pos_ += sizeof(T);
        return v;
    }

    std::span<const std::uint8_t> bytes_;
    std::string what_;
    std::size_t pos_ = 0;
};

class ByteWriter {
public:
    void magic(std::string_view m) { bytes_.insert(bytes_.end(), m.begin(), m.end()); }
    void u32(std::uint32_t v) { write(v); }
    void u64(std::uint64_t v) { write(v); }
    void floats(std::span<const float> values) {
        for (float f : values) write(std::bit_cast<std::uint32_t>(f));
    }

    std::vector<std::uint8_t> take() { return std::move(bytes_); }

private:
    template <class T>
    void write(T v) {
        for (std::size_t i = 0; i < sizeof(T); ++i) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }

    std::vector<std::uint8_t> bytes_;
};

std::vector<std::uint8_t> read_file(const std::string& path);
void write_file(const std::string& path, std::span<const std::uint8_t> bytes);

}  // namespace olpsynth::detail
