#include "pepita/idx.hpp"

#include <fstream>
#include <sstream>

namespace pepita {
namespace {

constexpr std::uint32_t kImageMagic = 0x00000803;
constexpr std::uint32_t kLabelMagic = 0x00000801;

[[noreturn]] void fail(const std::string& path, std::size_t offset,
                       const std::string& what) {
    std::ostringstream os;
    os << path << ": " << what << " at offset " << offset;
    throw ParseError(os.str());
}

std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ParseError("cannot open " + path);
    std::ostringstream buf;
    buf << f.rdbuf();
    return buf.str();
}

std::uint32_t be_u32(const std::string& bytes, std::size_t offset,
                     const std::string& path) {
    if (bytes.size() < offset + 4) fail(path, offset, "truncated header");
    const auto* p =
        reinterpret_cast<const std::uint8_t*>(bytes.data() + offset);
    return (std::uint32_t(p[0]) << 24) | (std::uint32_t(p[1]) << 16) |
           (std::uint32_t(p[2]) << 8) | std::uint32_t(p[3]);
}

void put_be_u32(std::ofstream& f, std::uint32_t v) {
    const char buf[4] = {static_cast<char>(v >> 24), static_cast<char>(v >> 16),
                         static_cast<char>(v >> 8), static_cast<char>(v)};
    f.write(buf, 4);
}

}  // namespace

IdxImages load_idx_images(const std::string& path) {
    const std::string bytes = slurp(path);
    const std::uint32_t magic = be_u32(bytes, 0, path);
    if (magic != kImageMagic) {
        std::ostringstream os;
        os << "bad magic 0x" << std::hex << magic << ", want 0x" << kImageMagic;
        fail(path, 0, os.str());
    }
    IdxImages imgs;
    imgs.count = be_u32(bytes, 4, path);
    imgs.rows = be_u32(bytes, 8, path);
    imgs.cols = be_u32(bytes, 12, path);
    const std::size_t want = imgs.count * imgs.rows * imgs.cols;
    if (bytes.size() != 16 + want)
        fail(path, bytes.size(),
             "payload size mismatch, want " + std::to_string(16 + want) +
                 " bytes total");
    imgs.pixels.assign(bytes.begin() + 16, bytes.end());
    return imgs;
}

std::vector<std::uint8_t> load_idx_labels(const std::string& path) {
    const std::string bytes = slurp(path);
    const std::uint32_t magic = be_u32(bytes, 0, path);
    if (magic != kLabelMagic) {
        std::ostringstream os;
        os << "bad magic 0x" << std::hex << magic << ", want 0x" << kLabelMagic;
        fail(path, 0, os.str());
    }
    const std::size_t count = be_u32(bytes, 4, path);
    if (bytes.size() != 8 + count)
        fail(path, bytes.size(),
             "payload size mismatch, want " + std::to_string(8 + count) +
                 " bytes total");
    return std::vector<std::uint8_t>(bytes.begin() + 8, bytes.end());
}

void save_idx_images(const std::string& path, const IdxImages& imgs) {
    require(imgs.pixels.size() == imgs.count * imgs.rows * imgs.cols,
            "save_idx_images: pixel buffer does not match dims");
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw ParseError("cannot open " + path + " for writing");
    put_be_u32(f, kImageMagic);
    put_be_u32(f, static_cast<std::uint32_t>(imgs.count));
    put_be_u32(f, static_cast<std::uint32_t>(imgs.rows));
    put_be_u32(f, static_cast<std::uint32_t>(imgs.cols));
    f.write(reinterpret_cast<const char*>(imgs.pixels.data()),
            static_cast<std::streamsize>(imgs.pixels.size()));
    if (!f) throw ParseError("short write to " + path);
}

void save_idx_labels(const std::string& path,
                     const std::vector<std::uint8_t>& labels) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw ParseError("cannot open " + path + " for writing");
    put_be_u32(f, kLabelMagic);
    put_be_u32(f, static_cast<std::uint32_t>(labels.size()));
    f.write(reinterpret_cast<const char*>(labels.data()),
            static_cast<std::streamsize>(labels.size()));
    if (!f) throw ParseError("short write to " + path);
}

}  // namespace pepita
