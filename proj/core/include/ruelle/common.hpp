#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>

namespace ruelle {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

// Invalid parameters or malformed configuration. Maps to CLI exit code 2.
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// A grid or quadrature too coarse for the requested object. Maps to exit code 3.
struct ResolutionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A numerical certificate that did not hold. Maps to exit code 1.
struct CertificateError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

const char* version();

// C-infinity step: 0 for t <= 0, 1 for t >= 1.
double smooth_step(double t);

// Worker count: hardware concurrency capped by RUELLE_THREADS when set.
unsigned thread_count();

// Runs body(i) for i in [0, n). Each index must write only its own output
// slot; results are then independent of scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

// Deterministic generator. The distribution maps are written out here so
// that streams do not depend on the standard library's distribution code.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
  double uniform(double a, double b) { return a + (b - a) * uniform(); }
  double normal();
  std::uint64_t bits() { return eng_(); }

 private:
  std::mt19937_64 eng_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace ruelle
