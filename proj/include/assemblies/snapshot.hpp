#pragma once

#include <string>

#include "assemblies/learning.hpp"

namespace assemblies {

/* Model snapshot file, little-endian binary:
 *
 *   magic "ASMB" | u32 version (1)
 *   config: u32 n, u32 k, f64 p, f64 beta, u64 seed, u32 sensory_n
 *   u8 weights_normalized | u8 inhibited
 *   fiber weights, recurrent weights (each: u32 n_src, u32 n_tgt,
 *       u64 edge_count, u64 offsets[n_tgt+1], u32 sources[], f64 weights[])
 *   area state: u32 firing count + indices, u8 ever_fired[n]
 *   u32 assembly count, each: i32 label, u32 core count + indices,
 *       u32 support count + indices, f64 gamma
 *
 * Round-trips a trained model bit-exactly.
 */
void save_model(const TrainedModel& trained, const std::string& path);
TrainedModel load_model(const std::string& path);

} // namespace assemblies
