#include "omnigraph/idx.hpp"

#include <cstdint>
#include <iomanip>
#include <sstream>

#include "omnigraph/binary_io.hpp"
#include "omnigraph/error.hpp"

namespace omnigraph {
namespace {

std::uint32_t read_be32(const std::vector<std::uint8_t>& buf, std::size_t offset, const std::string& what) {
    if (buf.size() < offset + 4) throw FormatError("truncated IDX header in " + what);
    return (std::uint32_t{buf[offset]} << 24) | (std::uint32_t{buf[offset + 1]} << 16) |
           (std::uint32_t{buf[offset + 2]} << 8) | std::uint32_t{buf[offset + 3]};
}

std::string hex(std::uint32_t v) {
    std::ostringstream os;
    os << "0x" << std::hex << std::setw(8) << std::setfill('0') << v;
    return os.str();
}

}  // namespace

std::vector<LabeledImage> load_idx(const std::filesystem::path& images_path,
                                   const std::filesystem::path& labels_path) {
    const auto img = read_file(images_path);
    const auto lab = read_file(labels_path);
    const std::string img_name = images_path.string();
    const std::string lab_name = labels_path.string();

    if (auto m = read_be32(img, 0, img_name); m != kIdxImageMagic) {
        throw FormatError(img_name + ": bad image magic " + hex(m) + ", expected " + hex(kIdxImageMagic));
    }
    if (auto m = read_be32(lab, 0, lab_name); m != kIdxLabelMagic) {
        throw FormatError(lab_name + ": bad label magic " + hex(m) + ", expected " + hex(kIdxLabelMagic));
    }
    const std::uint32_t n_img = read_be32(img, 4, img_name);
    const std::uint32_t rows = read_be32(img, 8, img_name);
    const std::uint32_t cols = read_be32(img, 12, img_name);
    const std::uint32_t n_lab = read_be32(lab, 4, lab_name);

    if (n_img != n_lab) {
        throw FormatError("image count " + std::to_string(n_img) + " in " + img_name + " does not match label count " +
                          std::to_string(n_lab) + " in " + lab_name);
    }
    if (rows != cols || rows == 0) {
        throw FormatError(img_name + ": images must be square, got " + std::to_string(rows) + "x" +
                          std::to_string(cols));
    }
    const std::size_t pixels = std::size_t{rows} * cols;
    if (img.size() - 16 < std::size_t{n_img} * pixels) {
        throw FormatError(img_name + ": truncated pixel payload, expected " + std::to_string(n_img * pixels) +
                          " bytes");
    }
    if (lab.size() - 8 < n_lab) {
        throw FormatError(lab_name + ": truncated label payload, expected " + std::to_string(n_lab) + " bytes");
    }

    std::vector<LabeledImage> out;
    out.reserve(n_img);
    for (std::size_t i = 0; i < n_img; ++i) {
        std::vector<double> px(pixels);
        const std::uint8_t* src = img.data() + 16 + i * pixels;
        for (std::size_t k = 0; k < pixels; ++k) px[k] = src[k] / 255.0;
        out.push_back({PlanarImage(static_cast<int>(rows), std::move(px)), lab[8 + i]});
    }
    return out;
}

}  // namespace omnigraph
