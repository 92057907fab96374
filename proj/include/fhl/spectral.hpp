#pragma once

#include <array>
#include <complex>
#include <functional>
#include <span>
#include <vector>

#include "fhl/field.hpp"

namespace fhl {

using cplx = std::complex<double>;

/// Symbol of a spatial Fourier multiplier, evaluated at the angular wavevector.
using SpatialSymbol = std::function<cplx(std::array<double, 2> kappa)>;
/// Symbol of a space-time multiplier at (angular wavevector, angular frequency).
/// A mode exp(i(kappa.x + omega t)) is multiplied by symbol(kappa, omega).
using SpaceTimeSymbol = std::function<cplx(std::array<double, 2> kappa, double omega)>;

/// In-place normalized FFT over a row-major array of the given extents
/// (1, 2 or 3 axes). Plans are cached per shape and shared across threads.
void fft_forward(std::span<cplx> data, std::span<const int> dims);
void fft_inverse(std::span<cplx> data, std::span<const int> dims);

/// Tabulated spatial symbol in FFT order; rejects non-finite values.
std::vector<cplx> spatial_symbol_table(const Grid& g, const SpatialSymbol& symbol);

/// Applies a tabulated spatial multiplier to one real scalar array (length space_points).
std::vector<double> apply_table(const Grid& g, std::span<const double> data, std::span<const cplx> table);

/// Componentwise F -> IFFT(symbol * FFT(F)). Real part is returned.
/// Throws InputError when the symbol is non-finite on a grid mode.
Field apply_multiplier(const Field& f, const SpatialSymbol& symbol);

/// Space-time multiplier. `time_pad` zero samples are appended to the time axis
/// before the transform and dropped afterwards (0 = purely periodic).
SpaceTimeField apply_multiplier(const SpaceTimeField& f, const SpaceTimeSymbol& symbol, int time_pad = 0);

/// Complex-valued variant on the periodic space-time lattice (data ordered as the field layout, m = 1).
void apply_multiplier_complex(const Grid& g, std::span<cplx> data, const SpaceTimeSymbol& symbol);

/// Spectral partial derivative d/dx_axis of a scalar array.
std::vector<double> spectral_derivative(const Grid& g, std::span<const double> data, int axis);
std::vector<double> spectral_laplacian(const Grid& g, std::span<const double> data);

/// Squared wavenumber |kappa|^2 of flat FFT index p.
double kappa_squared(const Grid& g, std::size_t p);
std::array<double, 2> kappa_vector(const Grid& g, std::size_t p);

/// 2/3-rule mask in FFT order: 1 on retained modes, 0 on the top third.
std::vector<double> dealias_mask(const Grid& g);

}  // namespace fhl
