#ifndef PEPITA_DATASET_HPP
#define PEPITA_DATASET_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "pepita/cifar.hpp"
#include "pepita/rng.hpp"
#include "pepita/tensor.hpp"

namespace pepita {

// Unprepared pixels and labels, straight from the files.
struct RawData {
    std::string name;
    std::size_t input_dim = 0;
    std::size_t num_classes = 0;
    std::vector<std::uint8_t> train_pixels;  // train count * input_dim
    std::vector<std::uint8_t> train_labels;
    std::vector<std::uint8_t> test_pixels;
    std::vector<std::uint8_t> test_labels;
};

// Prepared dataset: inputs are samples x input_dim scaled by 1/255 (no
// mean/std standardization, attacks clip to [0,1]); one_hot rows sum to 1;
// split index lists are disjoint and cover every sample. Immutable once
// prepared, freely shared across threads.
struct Dataset {
    std::string name;
    std::size_t input_dim = 0;
    std::size_t num_classes = 0;
    Tensor2 inputs;                     // samples x input_dim
    std::vector<std::uint8_t> labels;   // class indices
    Tensor2 one_hot;                    // samples x num_classes
    std::vector<std::size_t> train_idx;
    std::vector<std::size_t> val_idx;
    std::vector<std::size_t> test_idx;

    std::size_t size() const { return inputs.rows; }
};

RawData raw_from_idx(const std::string& name, const IdxImages& train_images,
                     const std::vector<std::uint8_t>& train_labels,
                     const IdxImages& test_images,
                     const std::vector<std::uint8_t>& test_labels);
RawData raw_from_cifar(const std::string& name, const CifarData& data,
                       std::size_t num_classes);

// Reads one of mnist | fmnist | cifar10 | cifar100 from data_dir/<name>/.
RawData load_raw(const std::string& name, const std::string& data_dir);

// Validation is carved from the official training split by a seeded
// shuffle (kShuffle substream); train_idx keeps the remaining shuffled
// order, test_idx is the official test split in file order.
Dataset prepare(const RawData& raw, std::uint64_t seed, double val_fraction);

// 10000 validation samples for the 60k MNIST-family sets, 5000 for the
// 50k CIFAR sets.
double default_val_fraction(const std::string& name);

// Keeps only the first n entries of train_idx (they are already in
// seeded-shuffle order). The dropped tail then belongs to no split.
void apply_subset(Dataset& d, std::size_t n);

// Batch gathering: columns are samples, in idx[begin .. begin+count) order.
Tensor2 gather_inputs(const Dataset& d, const std::vector<std::size_t>& idx,
                      std::size_t begin, std::size_t count);
Tensor2 gather_one_hot(const Dataset& d, const std::vector<std::size_t>& idx,
                       std::size_t begin, std::size_t count);

}  // namespace pepita

#endif
