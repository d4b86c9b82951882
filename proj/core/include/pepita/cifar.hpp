#ifndef PEPITA_CIFAR_HPP
#define PEPITA_CIFAR_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "pepita/idx.hpp"

namespace pepita {

enum class CifarVariant : std::uint8_t { C10, C100 };

// One split of CIFAR records: 32x32x3 channel-major pixels flattened in
// file order, fine labels only (C100 coarse labels are read and dropped).
struct CifarSplit {
    std::size_t count = 0;
    std::vector<std::uint8_t> pixels;  // count * 3072
    std::vector<std::uint8_t> labels;
};

constexpr std::size_t kCifarPixels = 3 * 32 * 32;

// Parses one binary batch file: per record 1 (C10) or 2 (C100) label
// bytes then 3072 pixel bytes. Appends to `out`.
void load_cifar_batch(const std::string& path, CifarVariant variant,
                      CifarSplit& out);

// Loads a standard directory layout: data_batch_{1..5}.bin + test_batch.bin
// (C10) or train.bin + test.bin (C100).
struct CifarData {
    CifarSplit train;
    CifarSplit test;
};
CifarData load_cifar(const std::string& dir, CifarVariant variant);

// Fixture writer, inverse of load_cifar_batch.
void save_cifar_batch(const std::string& path, CifarVariant variant,
                      const CifarSplit& split,
                      const std::vector<std::uint8_t>& coarse_labels = {});

}  // namespace pepita

#endif
