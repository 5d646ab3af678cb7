#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace omnigraph {

// Little-endian byte sink used by the dataset cache and checkpoint formats.
class ByteWriter {
public:
    void u32(std::uint32_t v);
    void u64(std::uint64_t v);
    void i32(std::int32_t v) { u32(static_cast<std::uint32_t>(v)); }
    void f64(double v);
    void bytes(std::string_view s);
    void f64_array(std::span<const double> v);  // u64 length, then values
    void string(std::string_view s);             // u64 length, then bytes

    const std::vector<std::uint8_t>& data() const { return buf_; }
    void save(const std::filesystem::path& path) const;

private:
    std::vector<std::uint8_t> buf_;
};

// Reader over an in-memory buffer. Every read names the section being read so
// truncation errors say what is missing.
class ByteReader {
public:
    explicit ByteReader(std::vector<std::uint8_t> buf) : buf_(std::move(buf)) {}
    static ByteReader open(const std::filesystem::path& path);

    std::uint32_t u32(std::string_view section);
    std::uint64_t u64(std::string_view section);
    std::int32_t i32(std::string_view section) { return static_cast<std::int32_t>(u32(section)); }
    double f64(std::string_view section);
    std::string bytes(std::size_t n, std::string_view section);
    std::vector<double> f64_array(std::string_view section);
    std::string string(std::string_view section);

    bool at_end() const { return pos_ == buf_.size(); }
    std::size_t remaining() const { return buf_.size() - pos_; }

private:
    void need(std::size_t n, std::string_view section) const;

    std::vector<std::uint8_t> buf_;
    std::size_t pos_ = 0;
};

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);

}  // namespace omnigraph
