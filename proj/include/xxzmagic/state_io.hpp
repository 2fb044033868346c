#pragma once

#include <filesystem>

#include "xxzmagic/density_mps.hpp"

namespace xxzmagic {

/// Flat binary container for VectorizedDensityMps; see docs/state_format.md
/// for the exact byte layout. Little-endian host assumed.
void save_state(const VectorizedDensityMps& state, const std::filesystem::path& file);
VectorizedDensityMps load_state(const std::filesystem::path& file);

}  // namespace xxzmagic
