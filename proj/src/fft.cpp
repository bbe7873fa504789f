#include "tracekit/fft.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace tracekit {

namespace {

using cd = std::complex<double>;

bool is_pow2(size_t n) { return n != 0 && (n & (n - 1)) == 0; }

size_t next_pow2(size_t n) {
    size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

// Iterative radix-2, n must be a power of two.
void fft_pow2(std::vector<cd>& a, bool inverse) {
    size_t n = a.size();
    for (size_t i = 1, j = 0; i < n; ++i) {
        size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (size_t len = 2; len <= n; len <<= 1) {
        double ang = 2.0 * std::numbers::pi / static_cast<double>(len) *
                     (inverse ? 1.0 : -1.0);
        cd wlen(std::cos(ang), std::sin(ang));
        for (size_t i = 0; i < n; i += len) {
            cd w(1.0, 0.0);
            for (size_t k = 0; k < len / 2; ++k) {
                cd u = a[i + k];
                cd v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
    if (inverse)
        for (auto& x : a) x /= static_cast<double>(n);
}

// X_k = w_k * ((x_j w_j) circularly convolved with conj(w)), w_j = e^{-i pi j^2 / n}.
void fft_bluestein(std::vector<cd>& a, bool inverse) {
    size_t n = a.size();
    double sign = inverse ? 1.0 : -1.0;

    std::vector<cd> w(n);
    for (size_t j = 0; j < n; ++j) {
        // j^2 mod 2n keeps the chirp argument small without changing it.
        uint64_t jj = (static_cast<uint64_t>(j) * j) % (2 * n);
        double ang = sign * std::numbers::pi * static_cast<double>(jj) /
                     static_cast<double>(n);
        w[j] = cd(std::cos(ang), std::sin(ang));
    }

    size_t m = next_pow2(2 * n - 1);
    std::vector<cd> fa(m, cd{}), fb(m, cd{});
    for (size_t j = 0; j < n; ++j) fa[j] = a[j] * w[j];
    fb[0] = std::conj(w[0]);
    for (size_t j = 1; j < n; ++j)
        fb[j] = fb[m - j] = std::conj(w[j]);

    fft_pow2(fa, false);
    fft_pow2(fb, false);
    for (size_t j = 0; j < m; ++j) fa[j] *= fb[j];
    fft_pow2(fa, true);

    for (size_t j = 0; j < n; ++j) a[j] = fa[j] * w[j];
    if (inverse)
        for (auto& x : a) x /= static_cast<double>(n);
}

void transform(std::vector<cd>& a, bool inverse) {
    if (a.empty()) throw std::invalid_argument("fft: empty input");
    if (a.size() == 1) return;
    if (is_pow2(a.size()))
        fft_pow2(a, inverse);
    else
        fft_bluestein(a, inverse);
}

}  // namespace

void fft(std::vector<std::complex<double>>& data) { transform(data, false); }

void ifft(std::vector<std::complex<double>>& data) { transform(data, true); }

}  // namespace tracekit
