#include "nebv/random.hpp"

#include <cmath>
#include <stdexcept>

namespace nebv {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t product = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(product >> 32);
  lo = static_cast<std::uint32_t>(product);
}

}  // namespace

Philox4x32::Philox4x32(Key key, std::uint32_t c1, std::uint32_t c2, std::uint32_t c3) noexcept
    : key_(key), counter_{0, c1, c2, c3} {}

Philox4x32::Counter Philox4x32::block(Counter c, Key k) noexcept {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, c[0], hi0, lo0);
    mulhilo(kMul1, c[2], hi1, lo1);
    c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    k[0] += kWeyl0;
    k[1] += kWeyl1;
  }
  return c;
}

Philox4x32::result_type Philox4x32::operator()() noexcept {
  if (index_ == 4) {
    buffer_ = block(counter_, key_);
    ++counter_[0];
    index_ = 0;
  }
  return buffer_[index_++];
}

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

namespace {

Philox4x32 make_engine(std::uint64_t seed, std::uint64_t replication, Stream stream) {
  const std::uint64_t mixed = splitmix64(seed);
  return Philox4x32({static_cast<std::uint32_t>(mixed), static_cast<std::uint32_t>(mixed >> 32)},
                    static_cast<std::uint32_t>(replication),
                    static_cast<std::uint32_t>(replication >> 32),
                    static_cast<std::uint32_t>(stream));
}

}  // namespace

Rng::Rng(std::uint64_t seed, std::uint64_t replication, Stream stream)
    : engine_(make_engine(seed, replication, stream)) {}

double Rng::uniform() {
  // 53 random bits mapped to the centre of each of 2^53 cells: never 0 or 1.
  const std::uint64_t hi = engine_();
  const std::uint64_t lo = engine_();
  const std::uint64_t bits = ((hi << 32) | lo) >> 11;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

double Rng::uniform(double a, double b) { return a + (b - a) * uniform(); }

double Rng::normal() { return normal_(engine_); }

double Rng::gamma(double shape, double scale) {
  std::gamma_distribution<double> dist(shape, scale);
  return dist(engine_);
}

double Rng::chi_square(double k) { return gamma(0.5 * k, 2.0); }

std::uint64_t Rng::below(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("Rng::below: empty range");
  std::uniform_int_distribution<std::uint64_t> dist(0, n - 1);
  return dist(engine_);
}

double sample_scaled_chisq(double sigma2, DegreesOfFreedom k, Rng& rng) {
  if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) {
    throw std::invalid_argument("scaled chi-square: variance must be finite and > 0");
  }
  const double kk = static_cast<double>(k.value());
  return sigma2 * (rng.chi_square(kk) / kk);
}

}  // namespace nebv
