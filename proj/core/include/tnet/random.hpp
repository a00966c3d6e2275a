#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

namespace tnet {

// Seeded Gaussian source built on std::mt19937_64 (whose output sequence is
// pinned by the standard) plus an explicit Box-Muller transform. We do not use
// std::normal_distribution because its variate sequence is implementation
// defined, which would break cross-toolchain reproducibility of seeded runs.
class GaussianRng {
  public:
    explicit GaussianRng(std::uint64_t seed) : eng_(seed) {}

    // uniform double in [0, 1) from the top 53 bits
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    // standard normal variate; generates pairs, caches the second
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = 1.0 - uniform();  // (0, 1], keeps log finite
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * M_PI * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

    // real part drawn first, then imaginary part
    std::complex<double> complex_normal() {
        const double re = normal();
        const double im = normal();
        return {re, im};
    }

  private:
    std::mt19937_64 eng_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace tnet
