#include "pepita/dataset.hpp"

#include <cmath>
#include <numeric>

namespace pepita {
namespace {

void check_labels(const std::vector<std::uint8_t>& labels,
                  std::size_t num_classes, const std::string& what) {
    for (std::uint8_t l : labels)
        if (l >= num_classes)
            throw ParseError(what + ": label " + std::to_string(l) +
                             " outside [0, " + std::to_string(num_classes) +
                             ")");
}

}  // namespace

RawData raw_from_idx(const std::string& name, const IdxImages& train_images,
                     const std::vector<std::uint8_t>& train_labels,
                     const IdxImages& test_images,
                     const std::vector<std::uint8_t>& test_labels) {
    require(train_images.count == train_labels.size(),
            name + ": train image/label count mismatch");
    require(test_images.count == test_labels.size(),
            name + ": test image/label count mismatch");
    require(train_images.rows * train_images.cols ==
                test_images.rows * test_images.cols,
            name + ": train/test image shapes differ");
    RawData raw;
    raw.name = name;
    raw.input_dim = train_images.rows * train_images.cols;
    raw.num_classes = 10;
    raw.train_pixels = train_images.pixels;
    raw.train_labels = train_labels;
    raw.test_pixels = test_images.pixels;
    raw.test_labels = test_labels;
    check_labels(raw.train_labels, raw.num_classes, name);
    check_labels(raw.test_labels, raw.num_classes, name);
    return raw;
}

RawData raw_from_cifar(const std::string& name, const CifarData& data,
                       std::size_t num_classes) {
    RawData raw;
    raw.name = name;
    raw.input_dim = kCifarPixels;
    raw.num_classes = num_classes;
    raw.train_pixels = data.train.pixels;
    raw.train_labels = data.train.labels;
    raw.test_pixels = data.test.pixels;
    raw.test_labels = data.test.labels;
    check_labels(raw.train_labels, raw.num_classes, name);
    check_labels(raw.test_labels, raw.num_classes, name);
    return raw;
}

RawData load_raw(const std::string& name, const std::string& data_dir) {
    const std::string dir = data_dir + "/" + name;
    if (name == "mnist" || name == "fmnist") {
        IdxImages train_images = load_idx_images(dir + "/train-images-idx3-ubyte");
        auto train_labels = load_idx_labels(dir + "/train-labels-idx1-ubyte");
        IdxImages test_images = load_idx_images(dir + "/t10k-images-idx3-ubyte");
        auto test_labels = load_idx_labels(dir + "/t10k-labels-idx1-ubyte");
        return raw_from_idx(name, train_images, train_labels, test_images,
                            test_labels);
    }
    if (name == "cifar10")
        return raw_from_cifar(name, load_cifar(dir, CifarVariant::C10), 10);
    if (name == "cifar100")
        return raw_from_cifar(name, load_cifar(dir, CifarVariant::C100), 100);
    throw ParseError("unknown dataset " + name);
}

Dataset prepare(const RawData& raw, std::uint64_t seed, double val_fraction) {
    require(val_fraction > 0.0 && val_fraction < 0.5,
            "prepare: val_fraction outside (0, 0.5)");
    const std::size_t train_n = raw.train_labels.size();
    const std::size_t test_n = raw.test_labels.size();
    require(raw.train_pixels.size() == train_n * raw.input_dim,
            "prepare: train pixel buffer mismatch");
    require(raw.test_pixels.size() == test_n * raw.input_dim,
            "prepare: test pixel buffer mismatch");

    Dataset d;
    d.name = raw.name;
    d.input_dim = raw.input_dim;
    d.num_classes = raw.num_classes;
    const std::size_t total = train_n + test_n;
    d.inputs = Tensor2(total, raw.input_dim);
    d.labels.resize(total);
    d.one_hot = Tensor2(total, raw.num_classes);

    for (std::size_t i = 0; i < train_n; ++i) {
        for (std::size_t j = 0; j < raw.input_dim; ++j)
            d.inputs(i, j) = raw.train_pixels[i * raw.input_dim + j] / 255.0;
        d.labels[i] = raw.train_labels[i];
    }
    for (std::size_t i = 0; i < test_n; ++i) {
        for (std::size_t j = 0; j < raw.input_dim; ++j)
            d.inputs(train_n + i, j) =
                raw.test_pixels[i * raw.input_dim + j] / 255.0;
        d.labels[train_n + i] = raw.test_labels[i];
    }
    for (std::size_t i = 0; i < total; ++i) d.one_hot(i, d.labels[i]) = 1.0;

    std::vector<std::size_t> perm(train_n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    Rng rng = Rng(seed).substream(Rng::kShuffle);
    rng.shuffle(perm);

    const auto val_n =
        static_cast<std::size_t>(std::llround(train_n * val_fraction));
    d.val_idx.assign(perm.begin(), perm.begin() + val_n);
    d.train_idx.assign(perm.begin() + val_n, perm.end());
    d.test_idx.resize(test_n);
    std::iota(d.test_idx.begin(), d.test_idx.end(), train_n);
    return d;
}

double default_val_fraction(const std::string& name) {
    if (name == "cifar10" || name == "cifar100") return 5000.0 / 50000.0;
    return 10000.0 / 60000.0;
}

void apply_subset(Dataset& d, std::size_t n) {
    if (n == 0 || n >= d.train_idx.size()) return;
    d.train_idx.resize(n);
}

Tensor2 gather_inputs(const Dataset& d, const std::vector<std::size_t>& idx,
                      std::size_t begin, std::size_t count) {
    require(begin + count <= idx.size(), "gather_inputs: range out of bounds");
    Tensor2 out(d.input_dim, count);
    for (std::size_t c = 0; c < count; ++c) {
        const std::size_t s = idx[begin + c];
        for (std::size_t r = 0; r < d.input_dim; ++r)
            out(r, c) = d.inputs(s, r);
    }
    return out;
}

Tensor2 gather_one_hot(const Dataset& d, const std::vector<std::size_t>& idx,
                       std::size_t begin, std::size_t count) {
    require(begin + count <= idx.size(),
            "gather_one_hot: range out of bounds");
    Tensor2 out(d.num_classes, count);
    for (std::size_t c = 0; c < count; ++c) {
        const std::size_t s = idx[begin + c];
        for (std::size_t r = 0; r < d.num_classes; ++r)
            out(r, c) = d.one_hot(s, r);
    }
    return out;
}

}  // namespace pepita
