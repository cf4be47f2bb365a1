#pragma once

#include <complex>
#include <span>

namespace dklb::fft {

using cplx = std::complex<double>;
using cplx_ld = std::complex<long double>;

// Unnormalised DFTs: forward uses e^{-2 pi i jk/N}, backward e^{+2 pi i jk/N}.
// Plans are cached per length; execution is safe from concurrent threads.
void forward(std::span<const cplx> in, std::span<cplx> out);
void backward(std::span<const cplx> in, std::span<cplx> out);

// Extended-precision variants for paths whose roundoff is later amplified.
void forward(std::span<const cplx_ld> in, std::span<cplx_ld> out);
void backward(std::span<const cplx_ld> in, std::span<cplx_ld> out);

}  // namespace dklb::fft
