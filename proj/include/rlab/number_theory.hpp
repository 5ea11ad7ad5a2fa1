#pragma once

#include <cstdint>
#include <vector>

namespace rlab {

/// a^e mod m using 128-bit intermediate products. m >= 1.
std::uint64_t powmod(std::uint64_t a, std::uint64_t e, std::uint64_t m) noexcept;

/// Jacobi symbol (a/n) for odd n >= 3, by the binary reciprocity algorithm.
/// Throws InvalidArgument for even or small n.
int jacobi(std::uint64_t a, std::uint64_t n);

/// True when `a` proves n composite under the Solovay-Strassen predicate:
/// gcd(a, n) > 1, or a^((n-1)/2) mod n differs from (a/n) taken mod n.
/// Requires odd n >= 3 and 2 <= a <= n - 1.
bool ss_witness(std::uint64_t a, std::uint64_t n);

/// Complete ascending list of Carmichael numbers up to a limit.
struct CarmichaelSet {
  std::uint64_t limit = 0;
  std::vector<std::uint64_t> numbers;

  friend bool operator==(const CarmichaelSet&, const CarmichaelSet&) = default;
};

inline constexpr std::uint64_t kMaxCarmichaelLimit = 100'000'000;

/// Enumerates Carmichael numbers <= limit by the Korselt criterion
/// (odd, squarefree, at least three prime factors, (p - 1) | (n - 1) for
/// every prime p | n). Limits above kMaxCarmichaelLimit throw ResourceError.
CarmichaelSet korselt_carmichael(std::uint64_t limit);

}  // namespace rlab
