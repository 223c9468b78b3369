#ifndef NSREG_SRC_FIELD_FFT_HPP
#define NSREG_SRC_FIELD_FFT_HPP

#include <complex>

namespace nsreg::detail {

// Unnormalized 3D transforms on an n^3 grid in x-fastest order.  Plans are
// created once per size (FFTW_ESTIMATE, so the chosen algorithm and hence the
// rounding are reproducible from run to run) and shared between threads.
void forward_r2c(int n, const double* in, std::complex<double>* out);
// `in` is not modified; a scratch copy is made because c2r destroys its input.
void inverse_c2r(int n, const std::complex<double>* in, double* out);

}  // namespace nsreg::detail

#endif
