#include "omnigraph/binary_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "omnigraph/error.hpp"

namespace omnigraph {

void ByteWriter::u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void ByteWriter::u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void ByteWriter::f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }

void ByteWriter::bytes(std::string_view s) { buf_.insert(buf_.end(), s.begin(), s.end()); }

void ByteWriter::f64_array(std::span<const double> v) {
    u64(v.size());
    for (double x : v) f64(x);
}

void ByteWriter::string(std::string_view s) {
    u64(s.size());
    bytes(s);
}

void ByteWriter::save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out.write(reinterpret_cast<const char*>(buf_.data()), static_cast<std::streamsize>(buf_.size()));
    if (!out) throw IoError("write failed: " + path.string());
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::vector<std::uint8_t> buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) throw IoError("read failed: " + path.string());
    return buf;
}

ByteReader ByteReader::open(const std::filesystem::path& path) { return ByteReader(read_file(path)); }

void ByteReader::need(std::size_t n, std::string_view section) const {
    if (buf_.size() - pos_ < n) {
        throw FormatError("truncated file: missing " + std::string(section) + " (need " + std::to_string(n) +
                          " bytes, " + std::to_string(buf_.size() - pos_) + " left)");
    }
}

std::uint32_t ByteReader::u32(std::string_view section) {
    need(4, section);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(buf_[pos_ + i]) << (8 * i);
    pos_ += 4;
    return v;
}

std::uint64_t ByteReader::u64(std::string_view section) {
    need(8, section);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(buf_[pos_ + i]) << (8 * i);
    pos_ += 8;
    return v;
}

double ByteReader::f64(std::string_view section) { return std::bit_cast<double>(u64(section)); }

std::string ByteReader::bytes(std::size_t n, std::string_view section) {
    need(n, section);
    std::string s(reinterpret_cast<const char*>(buf_.data() + pos_), n);
    pos_ += n;
    return s;
}

std::vector<double> ByteReader::f64_array(std::string_view section) {
    const std::uint64_t n = u64(section);
    if (n > remaining() / 8) {
        throw FormatError("truncated file: missing " + std::string(section) + " (array of " + std::to_string(n) +
                          " values, " + std::to_string(remaining()) + " bytes left)");
    }
    std::vector<double> v(n);
    for (auto& x : v) x = f64(section);
    return v;
}

std::string ByteReader::string(std::string_view section) {
    const std::uint64_t n = u64(section);
    return bytes(n, section);
}

}  // namespace omnigraph
