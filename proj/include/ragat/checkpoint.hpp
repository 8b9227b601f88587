#pragma once

#include <string>

#include "ragat/classifier.hpp"
#include "ragat/config.hpp"
#include "ragat/textdata.hpp"

namespace ragat {

// Self-contained trained model: parameters plus the config and vocabulary
// they were trained with.
//
// File layout (all integers little-endian):
//   magic "RGATCKPT" (8 bytes), u32 version (currently 1)
//   u64 config length, config JSON bytes
//   u32 vocabulary size, then per id from 0: u32 token length, token bytes
//   u32 parameter count, then per parameter in named_entries order:
//     u32 name length, name bytes, u32 ndim, i32 extents..., f64 values...
struct Checkpoint {
    RunConfig config;
    Vocabulary vocab;
    ModelParams params;

    void save(const std::string& path) const;
    static Checkpoint load(const std::string& path);
};

}  // namespace ragat
