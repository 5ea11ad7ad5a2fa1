#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "rlab/bitstream.hpp"
#include "rlab/errors.hpp"
#include "rlab/number_theory.hpp"

// The five randomness tests. Each is a deterministic function of its input
// string (plus parameters) returning one scalar metric and a detail record.

namespace rlab {

enum class TestId { borel, entropy, bookstack, primality, walk };

inline constexpr TestId kAllTests[] = {TestId::borel, TestId::entropy, TestId::bookstack, TestId::primality,
                                       TestId::walk};

std::string_view to_string(TestId id);
TestId test_id_from_string(std::string_view name);

struct BorelLevel {
  unsigned m = 0;
  std::uint64_t blocks = 0;  // |x|_m, the number of complete m-bit blocks
  std::vector<std::uint64_t> counts;
  std::uint64_t max_count = 0;
  std::uint64_t min_count = 0;
  double max_deviation = 0;  // max_j |N_j / |x|_m - 2^-m|
  bool pass = false;
};

struct BorelDetail {
  unsigned m_max = 0;
  double bound = 0;  // sqrt(log2|x| / |x|)
  std::vector<BorelLevel> levels;
  bool pass = false;
};

struct EntropyDetail {
  std::uint64_t window = 0;
  std::uint64_t samples = 0;
  std::uint64_t match_sum = 0;
};

struct BookStackDetail {
  std::uint64_t bytes = 0;
  std::uint64_t ones_before = 0;
  std::uint64_t ones_after = 0;
  std::int64_t diff = 0;
};

struct PrimalityDetail {
  std::uint64_t numbers = 0;        // Carmichael numbers under test
  std::uint64_t rounds = 0;         // k_final
  std::vector<std::uint64_t> survivors;  // uncertified count after each round
  std::uint64_t bits_consumed = 0;
  bool complete = false;
};

struct WalkDetail {
  std::uint64_t steps = 0;
  std::int64_t max = 0;
  std::int64_t min = 0;
};

using TestDetail = std::variant<BorelDetail, EntropyDetail, BookStackDetail, PrimalityDetail, WalkDetail>;

struct TestResult {
  TestId id = TestId::borel;
  double metric = 0;
  TestDetail detail;
};

// --- Borel normality -------------------------------------------------------

/// floor(log2 log2 n): the largest m with n >= 2^(2^m). 0 when n < 4.
unsigned borel_m_max(std::uint64_t n) noexcept;

/// Requires |x| >= 4. The metric is the largest per-level count spread
/// (max_j N_j^m - min_j N_j^m) rescaled to single-bit units by |x|_1 / |x|_m.
TestResult borel_test(const BitString& x);

// --- Match-length entropy --------------------------------------------------

struct EntropyParams {
  std::uint64_t window = std::uint64_t{1} << 16;
  std::uint64_t samples = 1000;
};

/// Bits required beyond window + samples so every match has room to grow.
inline constexpr std::uint64_t kEntropyHeadroom = 64;
inline constexpr double kEntropyClamp = 1.05;

std::uint64_t entropy_min_length(const EntropyParams& params) noexcept;

/// For each of `samples` consecutive target positions, the longest prefix of
/// the remaining string that also starts inside the preceding `window` bits.
/// Metric: samples * log2(window) / sum of match lengths, clamped to [0, 1.05].
TestResult entropy_test(const BitString& x, const EntropyParams& params = {});

// --- Book stack (move-to-front) --------------------------------------------

/// Move-to-front over the byte alphabet, stack initialised to 0..255.
std::vector<std::uint8_t> mtf_encode(std::span<const std::uint8_t> input);
std::vector<std::uint8_t> mtf_decode(std::span<const std::uint8_t> indices);

/// Requires |x| >= 8; a trailing partial byte is ignored. Metric is the
/// number of one bits removed by the transform.
TestResult bookstack_test(const BitString& x);

// --- Solovay-Strassen over Carmichael numbers ------------------------------

/// Thrown when the string runs out before every number is certified; carries
/// the progress made so far.
class PrimalityExhausted : public InsufficientData {
 public:
  PrimalityExhausted(const std::string& what, PrimalityDetail partial)
      : InsufficientData(what), partial_(std::move(partial)) {}
  const PrimalityDetail& partial() const noexcept { return partial_; }

 private:
  PrimalityDetail partial_;
};

/// Bits needed for one witness draw against n: ceil(log2(n - 1)).
unsigned witness_draw_width(std::uint64_t n) noexcept;

/// Rounds over the uncertified Carmichael numbers; each number receives one
/// candidate per round, read from fresh bits by rejection sampling into
/// [2, n - 1]. Metric: total bits consumed once every number is certified.
TestResult primality_test(const BitString& x, const CarmichaelSet& carmichaels);

// --- Random walk -----------------------------------------------------------

/// 1 steps up, 0 steps down, starting at 0 (included in the extremes).
/// Metric: max - min.
TestResult walk_test(const BitString& x);

// --- Dispatch --------------------------------------------------------------

struct BatteryParams {
  EntropyParams entropy;
  std::uint64_t carmichael_limit = 1'000'000;
};

/// Minimum string length accepted by a test under `params`.
std::uint64_t min_length(TestId id, const BatteryParams& params) noexcept;

/// Runs one test. `carmichaels` is only consulted by the primality test.
TestResult run_test(TestId id, const BitString& x, const BatteryParams& params, const CarmichaelSet& carmichaels);

}  // namespace rlab
