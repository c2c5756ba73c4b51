#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace edof {

using Complex = std::complex<double>;

// Thin wrappers around FFTW's 2D complex transforms. Plans are cached per
// (width, height, direction) and shared between threads; execution is
// thread-safe. Data is row-major with `width` columns.

std::vector<Complex> fft2(std::span<const double> real, std::size_t width, std::size_t height);
std::vector<Complex> fft2(std::span<const Complex> data, std::size_t width, std::size_t height);

// Normalized inverse transform (divides by width*height).
std::vector<Complex> ifft2(std::span<const Complex> spectrum, std::size_t width, std::size_t height);

// Real part of the normalized inverse transform.
std::vector<double> ifft2_real(std::span<const Complex> spectrum, std::size_t width,
                               std::size_t height);

// Embed a small centered filter (odd side) into a width x height array with
// its center tap at index (0, 0), wrapping negative offsets. Filters wider than
// the array fold modulo the array size.
std::vector<double> embed_centered(std::span<const double> filter, std::size_t filter_size,
                                   std::size_t width, std::size_t height);

// Swap quadrants so the zero-lag sample moves from (0, 0) to (width/2, height/2).
std::vector<double> fftshift(std::span<const double> data, std::size_t width, std::size_t height);

} // namespace edof
