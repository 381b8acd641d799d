#pragma once

#include "maser/nn/tape.hpp"

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace maser::nn {

// Checkpoint text format, version 1:
//
//   maser-checkpoint 1
//   arrays <count>
//   <name> <rows> <cols>
//   <row 0 values, space separated>
//   ...
//   <row rows-1 values>
//   (next array header)
//
// Values are printed with 17 significant digits so a save/load round trip is
// bit exact. Names contain no whitespace. Arrays appear in the order given to
// save_checkpoint(); loading matches by name, so order is not significant.

inline constexpr int kCheckpointVersion = 1;

struct NamedArray {
    std::string name;
    Matrix value;
};

void write_checkpoint(std::ostream& out, std::span<const Parameter* const> params);
std::vector<NamedArray> read_checkpoint(std::istream& in);

void save_checkpoint(const std::filesystem::path& path, std::span<const Parameter* const> params);
std::vector<NamedArray> load_checkpoint(const std::filesystem::path& path);

/// Copies arrays into same-named parameters. Throws ConfigError on a missing
/// name or shape mismatch.
void restore(std::span<Parameter* const> params, const std::vector<NamedArray>& arrays);

} // namespace maser::nn
