#pragma once

namespace philr {

/// Selects between the OpenMP kernel and its serial reference.
enum class Exec { serial, parallel };

int max_threads() noexcept;

}  // namespace philr
