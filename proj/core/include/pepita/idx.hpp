#ifndef PEPITA_IDX_HPP
#define PEPITA_IDX_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "pepita/checkpoint.hpp"

namespace pepita {

// Raw images as flat u8 rows; labels as one byte each.
struct IdxImages {
    std::size_t count = 0;
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<std::uint8_t> pixels;  // count * rows * cols
};

// IDX headers are big-endian: magic 0x00000803 for images (3 dims),
// 0x00000801 for labels (1 dim). Errors name the byte offset.
IdxImages load_idx_images(const std::string& path);
std::vector<std::uint8_t> load_idx_labels(const std::string& path);

void save_idx_images(const std::string& path, const IdxImages& imgs);
void save_idx_labels(const std::string& path,
                     const std::vector<std::uint8_t>& labels);

}  // namespace pepita

#endif
