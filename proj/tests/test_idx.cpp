#include <doctest.h>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "omnigraph/error.hpp"
#include "omnigraph/idx.hpp"

using namespace omnigraph;
namespace fs = std::filesystem;

namespace {

void put_be32(std::vector<std::uint8_t>& b, std::uint32_t v) {
    for (int s = 24; s >= 0; s -= 8) b.push_back(static_cast<std::uint8_t>(v >> s));
}

std::vector<std::uint8_t> image_file(std::uint32_t magic, std::uint32_t count, std::uint32_t rows, std::uint32_t cols,
                                     std::size_t payload) {
    std::vector<std::uint8_t> b;
    put_be32(b, magic);
    put_be32(b, count);
    put_be32(b, rows);
    put_be32(b, cols);
    for (std::size_t i = 0; i < payload; ++i) b.push_back(static_cast<std::uint8_t>(i % 256));
    return b;
}

std::vector<std::uint8_t> label_file(std::uint32_t magic, std::uint32_t count, std::size_t payload) {
    std::vector<std::uint8_t> b;
    put_be32(b, magic);
    put_be32(b, count);
    for (std::size_t i = 0; i < payload; ++i) b.push_back(static_cast<std::uint8_t>(i % 3));
    return b;
}

fs::path write(const std::string& name, const std::vector<std::uint8_t>& bytes) {
    const auto dir = fs::temp_directory_path() / "omnigraph_test_idx";
    fs::create_directories(dir);
    const auto p = dir / name;
    std::ofstream(p, std::ios::binary).write(reinterpret_cast<const char*>(bytes.data()),
                                             static_cast<std::streamsize>(bytes.size()));
    return p;
}

std::string message_of(const fs::path& img, const fs::path& lab) {
    try {
        load_idx(img, lab);
    } catch (const FormatError& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST_CASE("well-formed pair loads and scales pixels") {
    const auto img = write("ok-img", image_file(kIdxImageMagic, 3, 2, 2, 12));
    const auto lab = write("ok-lab", label_file(kIdxLabelMagic, 3, 3));
    const auto data = load_idx(img, lab);
    REQUIRE(data.size() == 3);
    CHECK(data[0].image.side == 2);
    CHECK(data[1].image.values[0] == doctest::Approx(4.0 / 255.0));
    CHECK(data[2].label == 2);
}

TEST_CASE("corrupted image magic is rejected") {
    const auto img = write("bad-img", image_file(0x00000804, 3, 2, 2, 12));
    const auto lab = write("bad-img-lab", label_file(kIdxLabelMagic, 3, 3));
    const auto msg = message_of(img, lab);
    CHECK(msg.find("bad image magic") != std::string::npos);
    CHECK(msg.find("0x00000804") != std::string::npos);
}

TEST_CASE("corrupted label magic is rejected") {
    const auto img = write("lm-img", image_file(kIdxImageMagic, 3, 2, 2, 12));
    const auto lab = write("lm-lab", label_file(0x00000803, 3, 3));
    CHECK(message_of(img, lab).find("bad label magic") != std::string::npos);
}

TEST_CASE("count mismatch names both counts") {
    const auto img = write("cm-img", image_file(kIdxImageMagic, 3, 2, 2, 12));
    const auto lab = write("cm-lab", label_file(kIdxLabelMagic, 4, 4));
    const auto msg = message_of(img, lab);
    CHECK(msg.find("3") != std::string::npos);
    CHECK(msg.find("4") != std::string::npos);
}

TEST_CASE("truncation and shape errors") {
    const auto lab = write("tr-lab", label_file(kIdxLabelMagic, 3, 3));
    CHECK(message_of(write("tr-img", image_file(kIdxImageMagic, 3, 2, 2, 11)), lab).find("truncated") !=
          std::string::npos);
    CHECK(message_of(write("hdr-img", {0, 0, 8}), lab).find("truncated") != std::string::npos);
    CHECK(message_of(write("rect-img", image_file(kIdxImageMagic, 3, 2, 3, 18)), lab).find("square") !=
          std::string::npos);
    CHECK(message_of(write("tl-img", image_file(kIdxImageMagic, 3, 2, 2, 12)),
                     write("tl-lab", label_file(kIdxLabelMagic, 3, 2)))
              .find("truncated") != std::string::npos);
    CHECK_THROWS_AS(load_idx("/nonexistent/images", lab), IoError);
}

TEST_CASE("bundled MNIST subset") {
    const fs::path dir = OMNIGRAPH_DATA_DIR;
    const auto data = load_idx(dir / "mnist012-images-idx3-ubyte", dir / "mnist012-labels-idx1-ubyte");
    CHECK(data.size() == 1500);
    int counts[3] = {0, 0, 0};
    for (const auto& d : data) {
        REQUIRE(d.label >= 0);
        REQUIRE(d.label <= 2);
        ++counts[d.label];
        CHECK(d.image.side == 28);
    }
    CHECK(counts[0] == 500);
    CHECK(counts[1] == 500);
    CHECK(counts[2] == 500);
}
