#ifndef PEPITA_CHECKPOINT_HPP
#define PEPITA_CHECKPOINT_HPP

#include <cstdint>
#include <string>

#include "pepita/mlp.hpp"

#include "json.hpp"

namespace pepita {

struct ParseError : std::runtime_error {
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

// Binary checkpoint layout (all integers and doubles little-endian):
//   magic "PEPITAC1" (8 bytes), u32 version, u32 layer_count,
//   per layer: u32 rows, u32 cols, u8 activation,
//   u32 f_rows, u32 f_cols, f64 dropout_rate, u8 dropout_input,
//   then payload: per layer W (rows*cols f64) and b (rows f64), then F.
// The sidecar "<path>.json" carries hyperparameters and RNG seeds.
// Round-trips are bit-exact.

void save_checkpoint(const std::string& path, const Mlp& m,
                     const nlohmann::json& sidecar);
Mlp load_checkpoint(const std::string& path);

// Sidecar for `path` if present, else an empty object.
nlohmann::json load_sidecar(const std::string& path);

// Serializes the checkpoint into memory; fnv1a64 of this is the model hash
// recorded in attack dump manifests.
std::string serialize_checkpoint(const Mlp& m);
Mlp deserialize_checkpoint(const std::string& bytes);
std::uint64_t model_hash(const Mlp& m);

}  // namespace pepita

#endif
