#pragma once

namespace qdent {

// Energies are in µeV and times in ns throughout the library.
inline constexpr double kHbar = 0.6582119569;  // µeV·ns

}  // namespace qdent
