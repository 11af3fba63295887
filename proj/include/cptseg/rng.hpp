#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace cptseg {

/// Deterministic random source.  mt19937_64 has a fixed, standard-specified
/// output sequence, and the samplers below avoid std::*_distribution (whose
/// algorithms are implementation-defined), so streams are reproducible
/// across platforms and standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    /// Uniform double in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [lo, hi] via rejection (unbiased).
    int uniform_int(int lo, int hi) {
        const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return lo + static_cast<int>(x % span);
    }

    bool bernoulli(double p) { return uniform() < p; }

    /// Standard normal via the Marsaglia polar method (one value per call,
    /// the spare is kept).
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * f;
        has_spare_ = true;
        return u * f;
    }

    double normal(double mu, double sigma) { return mu + sigma * normal(); }

    double lognormal(double mu, double sigma) {
        return std::exp(normal(mu, sigma));
    }

    /// Poisson draw.  Knuth's product method for small rates; larger rates
    /// split in half and use additivity, which stays exact.
    long poisson(double lambda) {
        if (lambda <= 0.0) return 0;
        if (lambda > 50.0)
            return poisson(lambda / 2.0) + poisson(lambda - lambda / 2.0);
        const double limit = std::exp(-lambda);
        long k = 0;
        double p = 1.0;
        do {
            ++k;
            p *= uniform();
        } while (p > limit);
        return k - 1;
    }

    /// Derive an independent stream for a subcomponent.
    Rng split(std::uint64_t salt) {
        return Rng(engine_() ^ (salt * 0x9e3779b97f4a7c15ULL));
    }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace cptseg
