// fft.hpp
//
// In-place forward/inverse DFT for arbitrary lengths. Power-of-two sizes run
// radix-2 Cooley-Tukey directly; other sizes go through Bluestein's chirp-z
// reduction to a power-of-two convolution.

#pragma once

#include <complex>
#include <vector>

namespace tracekit {

void fft(std::vector<std::complex<double>>& data);
void ifft(std::vector<std::complex<double>>& data);

}  // namespace tracekit
