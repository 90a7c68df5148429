#ifndef SHARPCONE_RNG_HPP
#define SHARPCONE_RNG_HPP

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <utility>
#include <vector>

namespace sharpcone {

/// std::mt19937_64 seeded through std::seed_seq; both are fully specified by
/// the standard, so streams are identical across platforms. The standard
/// distributions are not, hence the explicit transforms below. Gaussians use
/// Box-Muller on two consecutive uniforms.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : Rng(words_of(seed)) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [lo, hi].
    int uniform_int(int lo, int hi)
    {
        const auto span = static_cast<std::uint64_t>(hi - lo + 1);
        return lo + static_cast<int>(next_u64() % span);
    }

    double gaussian()
    {
        const double u1 = 1.0 - uniform(); // (0, 1]
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    /// Standard complex Gaussian, E|z|^2 = 1.
    std::complex<double> complex_gaussian()
    {
        const double re = gaussian();
        const double im = gaussian();
        return {re * std::numbers::sqrt2 / 2.0, im * std::numbers::sqrt2 / 2.0};
    }

    /// Independent child stream keyed by the seed path; does not advance
    /// this generator.
    Rng split(std::uint64_t stream) const
    {
        std::vector<std::uint32_t> w = words_;
        const auto s = words_of(stream);
        w.insert(w.end(), s.begin(), s.end());
        return Rng(std::move(w));
    }

private:
    explicit Rng(std::vector<std::uint32_t> words) : words_(std::move(words))
    {
        std::seed_seq seq(words_.begin(), words_.end());
        engine_.seed(seq);
    }

    static std::vector<std::uint32_t> words_of(std::uint64_t v)
    {
        return {static_cast<std::uint32_t>(v), static_cast<std::uint32_t>(v >> 32)};
    }

    std::vector<std::uint32_t> words_;
    std::mt19937_64 engine_;
};

} // namespace sharpcone

#endif
