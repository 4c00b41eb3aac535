#pragma once

#include <string>

#include "gesturegan/training.hpp"

namespace gesturegan {

inline constexpr std::uint32_t kCheckpointVersion = 1;

// GGCK layout, little endian:
//   "GGCK" u32 version
//   u32 n_tensors, then per tensor: u32 name_len, name, u32 rank (2),
//     u32 rows, u32 cols, rows*cols f32 row-major
//   u32 n_strings, then per entry: u32 key_len, key, u32 value_len, value
// Tensors hold both networks, standardization statistics and Adam moments;
// strings hold the TrainConfig echo, counters and TrainState::metadata.
void save_checkpoint(const TrainState& state, const std::string& path);

// Rebuilds the architecture from the stored configuration.
TrainState load_checkpoint(const std::string& path);

// Loads into the architecture implied by `expected`; any tensor whose shape
// differs (or that is absent) raises ShapeError naming it.
TrainState load_checkpoint(const std::string& path, const TrainConfig& expected);

// Bitwise comparison of everything a checkpoint stores.
bool states_identical(const TrainState& a, const TrainState& b);

}  // namespace gesturegan
