#include "rlab/number_theory.hpp"

#include <numeric>
#include <string>
#include <utility>

#include "rlab/errors.hpp"

namespace rlab {

std::uint64_t powmod(std::uint64_t a, std::uint64_t e, std::uint64_t m) noexcept {
  using u128 = unsigned __int128;
  if (m == 1) return 0;
  std::uint64_t result = 1;
  std::uint64_t base = a % m;
  while (e > 0) {
    if (e & 1) result = static_cast<std::uint64_t>(static_cast<u128>(result) * base % m);
    base = static_cast<std::uint64_t>(static_cast<u128>(base) * base % m);
    e >>= 1;
  }
  return result;
}

int jacobi(std::uint64_t a, std::uint64_t n) {
  if (n < 3 || n % 2 == 0) throw InvalidArgument("jacobi: n must be odd and >= 3, got " + std::to_string(n));
  a %= n;
  int result = 1;
  while (a != 0) {
    while (a % 2 == 0) {
      a /= 2;
      const std::uint64_t r = n % 8;
      if (r == 3 || r == 5) result = -result;
    }
    std::swap(a, n);
    if (a % 4 == 3 && n % 4 == 3) result = -result;
    a %= n;
  }
  return n == 1 ? result : 0;
}

bool ss_witness(std::uint64_t a, std::uint64_t n) {
  if (n < 3 || n % 2 == 0) throw InvalidArgument("ss_witness: n must be odd and >= 3, got " + std::to_string(n));
  if (a < 2 || a > n - 1) {
    throw InvalidArgument("ss_witness: a = " + std::to_string(a) + " outside [2, " + std::to_string(n - 1) + "]");
  }
  if (std::gcd(a, n) > 1) return true;
  const std::uint64_t euler = powmod(a, (n - 1) / 2, n);
  const int j = jacobi(a, n);
  const std::uint64_t j_mod = j == -1 ? n - 1 : static_cast<std::uint64_t>(j);
  return euler != j_mod;
}

namespace {

std::vector<std::uint32_t> primes_up_to(std::uint64_t bound) {
  std::vector<bool> composite(bound + 1, false);
  std::vector<std::uint32_t> primes;
  for (std::uint64_t i = 2; i <= bound; ++i) {
    if (composite[i]) continue;
    primes.push_back(static_cast<std::uint32_t>(i));
    for (std::uint64_t j = i * i; j <= bound; j += i) composite[j] = true;
  }
  return primes;
}

std::uint64_t isqrt(std::uint64_t n) {
  std::uint64_t r = 0;
  while ((r + 1) * (r + 1) <= n) ++r;
  return r;
}

// Full Korselt check by trial division. Assumes n odd.
bool korselt(std::uint64_t n, const std::vector<std::uint32_t>& primes) {
  std::uint64_t rest = n;
  int factors = 0;
  for (std::uint32_t p : primes) {
    if (static_cast<std::uint64_t>(p) * p > rest) break;
    if (rest % p != 0) continue;
    rest /= p;
    if (rest % p == 0) return false;  // not squarefree
    if ((n - 1) % (p - 1) != 0) return false;
    ++factors;
  }
  if (rest > 1) {
    if (rest == n) return false;  // prime
    if ((n - 1) % (rest - 1) != 0) return false;
    ++factors;
  }
  return factors >= 3;
}

}  // namespace

CarmichaelSet korselt_carmichael(std::uint64_t limit) {
  if (limit > kMaxCarmichaelLimit) {
    throw ResourceError("Carmichael limit " + std::to_string(limit) + " exceeds supported maximum " +
                        std::to_string(kMaxCarmichaelLimit));
  }
  CarmichaelSet set{limit, {}};
  if (limit < 9) return set;

  const auto small_primes = primes_up_to(isqrt(limit) + 1);

  // Odd-only sieve: index k stands for 2k + 1.
  std::vector<bool> odd_composite(limit / 2 + 1, false);
  for (std::uint32_t p : small_primes) {
    if (p == 2) continue;
    for (std::uint64_t m = static_cast<std::uint64_t>(p) * p; m <= limit; m += 2 * p) odd_composite[m / 2] = true;
  }

  for (std::uint64_t n = 9; n <= limit; n += 2) {
    if (!odd_composite[n / 2]) continue;
    // Every Carmichael number is a base-2 Fermat pseudoprime; the cheap
    // Fermat check discards almost every composite before factoring.
    if (powmod(2, n - 1, n) != 1) continue;
    if (korselt(n, small_primes)) set.numbers.push_back(n);
  }
  return set;
}

}  // namespace rlab
