#pragma once

#include <cstddef>

#include "qtherm/field.hpp"

namespace qtherm::detail {

/// Unnormalized forward DFT (e^{-ikx} convention) of a contiguous line.
void fft_forward(std::size_t n, complexd* data);

/// Inverse DFT including the 1/n normalization.
void fft_inverse(std::size_t n, complexd* data);

/// Angular wavenumber of mode j for a periodic axis of physical length
/// `length` sampled at n points.  Modes above n/2 alias to negative k.
double fft_wavenumber(std::size_t j, std::size_t n, double length);

} // namespace qtherm::detail
