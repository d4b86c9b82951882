#include "pepita/cifar.hpp"

#include <fstream>
#include <sstream>

namespace pepita {
namespace {

[[noreturn]] void fail(const std::string& path, std::size_t offset,
                       const std::string& what) {
    std::ostringstream os;
    os << path << ": " << what << " at offset " << offset;
    throw ParseError(os.str());
}

}  // namespace

void load_cifar_batch(const std::string& path, CifarVariant variant,
                      CifarSplit& out) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ParseError("cannot open " + path);
    std::ostringstream buf;
    buf << f.rdbuf();
    const std::string bytes = buf.str();

    const std::size_t label_bytes = variant == CifarVariant::C100 ? 2 : 1;
    const std::size_t record = label_bytes + kCifarPixels;
    if (bytes.empty() || bytes.size() % record != 0)
        fail(path, bytes.size(),
             "size is not a multiple of the " + std::to_string(record) +
                 "-byte record");

    const std::size_t n = bytes.size() / record;
    out.pixels.reserve(out.pixels.size() + n * kCifarPixels);
    out.labels.reserve(out.labels.size() + n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto* rec =
            reinterpret_cast<const std::uint8_t*>(bytes.data()) + i * record;
        // C100 records lead with the coarse label; the fine label is last.
        out.labels.push_back(rec[label_bytes - 1]);
        out.pixels.insert(out.pixels.end(), rec + label_bytes,
                          rec + label_bytes + kCifarPixels);
    }
    out.count += n;
}

CifarData load_cifar(const std::string& dir, CifarVariant variant) {
    CifarData data;
    if (variant == CifarVariant::C10) {
        for (int i = 1; i <= 5; ++i)
            load_cifar_batch(dir + "/data_batch_" + std::to_string(i) + ".bin",
                             variant, data.train);
        load_cifar_batch(dir + "/test_batch.bin", variant, data.test);
    } else {
        load_cifar_batch(dir + "/train.bin", variant, data.train);
        load_cifar_batch(dir + "/test.bin", variant, data.test);
    }
    return data;
}

void save_cifar_batch(const std::string& path, CifarVariant variant,
                      const CifarSplit& split,
                      const std::vector<std::uint8_t>& coarse_labels) {
    require(split.pixels.size() == split.count * kCifarPixels,
            "save_cifar_batch: pixel buffer does not match count");
    require(split.labels.size() == split.count,
            "save_cifar_batch: label count mismatch");
    if (variant == CifarVariant::C100)
        require(coarse_labels.size() == split.count,
                "save_cifar_batch: C100 needs coarse labels");
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw ParseError("cannot open " + path + " for writing");
    for (std::size_t i = 0; i < split.count; ++i) {
        if (variant == CifarVariant::C100)
            f.put(static_cast<char>(coarse_labels[i]));
        f.put(static_cast<char>(split.labels[i]));
        f.write(reinterpret_cast<const char*>(split.pixels.data() +
                                              i * kCifarPixels),
                static_cast<std::streamsize>(kCifarPixels));
    }
    if (!f) throw ParseError("short write to " + path);
}

}  // namespace pepita
