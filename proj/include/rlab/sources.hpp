#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rlab/bitstream.hpp"
#include "rlab/qsim.hpp"

namespace rlab {

/// 64-bit xorshift* generator. Output words are emitted MSB-first by
/// prng_bits; the constants are fixed so bit streams agree across
/// implementations.
class XorShift64Star {
 public:
  static constexpr std::uint64_t kMultiplier = 2685821657736338717ULL;
  /// Replacement for the forbidden all-zero state.
  static constexpr std::uint64_t kZeroSeedReplacement = 0x9E3779B97F4A7C15ULL;

  explicit XorShift64Star(std::uint64_t seed) noexcept
      : state_(seed == 0 ? kZeroSeedReplacement : seed) {}

  std::uint64_t next() noexcept {
    state_ ^= state_ >> 12;
    state_ ^= state_ << 25;
    state_ ^= state_ >> 27;
    return state_ * kMultiplier;
  }

  /// Uniform double strictly inside (0, 1) built from the top 53 bits.
  double uniform_open() noexcept {
    return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
  }

 private:
  std::uint64_t state_;
};

BitString prng_bits(std::uint64_t seed, std::uint64_t n_bits);

/// Decimal digits, each in [0, 9].
using DigitStream = std::vector<std::uint8_t>;

/// Parses decimal digit text. Whitespace is skipped and a leading "3." is
/// tolerated (both characters dropped). Any other character is a FormatError.
DigitStream parse_digits(std::string_view text);
DigitStream read_digit_file(const std::filesystem::path& path);

using DigitPair = std::array<std::uint8_t, 2>;

/// The ten deleted-digit pairs used for the ten π samples of the original
/// experiment, in sample order.
inline constexpr std::array<DigitPair, 10> kPiDeletedPairs = {{
    {0, 1}, {0, 5}, {1, 6}, {2, 3}, {2, 7}, {3, 8}, {4, 5}, {4, 9}, {6, 7}, {8, 9},
}};

struct PiExtraction {
  BitString bits;
  std::size_t digits_consumed = 0;
};

/// Drops both `deleted` digits and writes every surviving digit as its 3-bit
/// rank among the eight survivors (ascending), MSB first, stopping after
/// n_bits. Reading starts at `offset`. Throws InsufficientData when the
/// stream runs out first.
PiExtraction pi_extract_from(const DigitStream& digits, DigitPair deleted, std::uint64_t n_bits,
                             std::size_t offset = 0);

inline BitString pi_extract(const DigitStream& digits, DigitPair deleted, std::uint64_t n_bits) {
  return pi_extract_from(digits, deleted, n_bits).bits;
}

/// Pairs 01 -> 0, 10 -> 1; 00 and 11 are dropped, as is a trailing odd bit.
BitString von_neumann_extract(const BitString& x);

/// `pattern` repeated cyclically and cut to n_bits.
BitString pattern_bits(const BitString& pattern, std::uint64_t n_bits);

enum class SourceKind { prng, pi_digits, file, qsim, constant_pattern };

std::string_view to_string(SourceKind kind);
SourceKind source_kind_from_string(std::string_view name);

/// Parameters of the simulated beam-splitter source.
struct QsimParams {
  enum class Preparation { hadamard, demon };
  Preparation preparation = Preparation::hadamard;
  double frequency = 1.0;  // demon oscillation frequency
  double rate = 1.0;       // samples per unit time
  DemonMode mode = DemonMode::pure;
  Unitary2 splitter = hadamard();
  bool von_neumann = false;

  friend bool operator==(const QsimParams&, const QsimParams&) = default;
};

/// Labels which box a sample came from, plus its kind-specific parameters.
struct SourceSpec {
  SourceKind kind = SourceKind::prng;
  std::uint64_t seed = 0;
  // pi_digits
  std::filesystem::path digits_path;
  std::optional<DigitPair> deleted;  // unset: cycle through kPiDeletedPairs per sample
  std::size_t digit_offset = 0;
  // file
  std::filesystem::path file_path;
  // qsim
  QsimParams qsim;
  // constant_pattern
  BitString pattern;

  /// Throws InvalidArgument when the kind-specific parameters are incomplete
  /// or invalid.
  void validate() const;

  friend bool operator==(const SourceSpec&, const SourceSpec&) = default;
};

/// Generates one standalone sample. pi_digits samples read from
/// `digit_offset`; file samples take the first n_bits of the file.
BitString generate(const SourceSpec& spec, std::uint64_t n_bits);

/// qsim source of the given parameters driven by the reference PRNG.
BitString qsim_bits(const QsimParams& params, std::uint64_t n_bits, std::uint64_t seed);

}  // namespace rlab
