#include "rlab/battery.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <limits>
#include <numeric>

namespace rlab {

std::string_view to_string(TestId id) {
  switch (id) {
    case TestId::borel: return "borel";
    case TestId::entropy: return "entropy";
    case TestId::bookstack: return "bookstack";
    case TestId::primality: return "primality";
    case TestId::walk: return "walk";
  }
  return "unknown";
}

TestId test_id_from_string(std::string_view name) {
  for (TestId id : kAllTests) {
    if (to_string(id) == name) return id;
  }
  throw InvalidArgument("unknown test '" + std::string(name) + "'");
}

// --- Borel -----------------------------------------------------------------

unsigned borel_m_max(std::uint64_t n) noexcept {
  unsigned m = 0;
  // n >= 2^(2^(m+1)) <=> bit_width(n) - 1 >= 2^(m+1)
  const unsigned log2_floor = n == 0 ? 0 : static_cast<unsigned>(std::bit_width(n)) - 1;
  while ((1u << (m + 1)) <= log2_floor) ++m;
  return m;
}

TestResult borel_test(const BitString& x) {
  const std::uint64_t n = x.size();
  if (n < 4) throw InvalidArgument("borel_test needs at least 4 bits, got " + std::to_string(n));

  BorelDetail d;
  d.m_max = borel_m_max(n);
  d.bound = std::sqrt(std::log2(static_cast<double>(n)) / static_cast<double>(n));
  d.pass = true;
  double metric = 0;
  for (unsigned m = 1; m <= d.m_max; ++m) {
    BorelLevel level;
    level.m = m;
    level.counts = count_blocks(x, m);
    level.blocks = n / m;
    const auto [lo, hi] = std::minmax_element(level.counts.begin(), level.counts.end());
    level.min_count = *lo;
    level.max_count = *hi;
    const double expected = std::ldexp(1.0, -static_cast<int>(m));
    const double blocks = static_cast<double>(level.blocks);
    for (std::uint64_t c : level.counts) {
      level.max_deviation = std::max(level.max_deviation, std::abs(static_cast<double>(c) / blocks - expected));
    }
    level.pass = level.max_deviation <= d.bound;
    d.pass = d.pass && level.pass;
    const double spread = static_cast<double>(level.max_count - level.min_count);
    metric = std::max(metric, spread * static_cast<double>(n) / blocks);
    d.levels.push_back(std::move(level));
  }
  return {TestId::borel, metric, std::move(d)};
}

// --- Entropy ---------------------------------------------------------------

std::uint64_t entropy_min_length(const EntropyParams& params) noexcept {
  return params.window + params.samples + kEntropyHeadroom;
}

namespace {

// Length of the common prefix of x[s..] and x[p..], at most cap.
std::uint64_t common_prefix(const BitString& x, std::uint64_t s, std::uint64_t p, std::uint64_t cap) {
  std::uint64_t len = 0;
  while (len < cap) {
    const std::uint64_t diff = x.word_at(s + len) ^ x.word_at(p + len);
    if (diff != 0) return std::min(cap, len + static_cast<std::uint64_t>(std::countl_zero(diff)));
    len += 64;
  }
  return cap;
}

}  // namespace

TestResult entropy_test(const BitString& x, const EntropyParams& params) {
  const std::uint64_t w = params.window;
  const std::uint64_t t = params.samples;
  if (w < 2 || !std::has_single_bit(w)) throw InvalidArgument("entropy window must be a power of two >= 2");
  if (t == 0) throw InvalidArgument("entropy sample count must be positive");
  if (x.size() < entropy_min_length(params)) {
    throw InvalidArgument("entropy_test needs at least " + std::to_string(entropy_min_length(params)) +
                          " bits, got " + std::to_string(x.size()));
  }

  std::uint64_t match_sum = 0;
  for (std::uint64_t i = 0; i < t; ++i) {
    const std::uint64_t p = w + i;
    const std::uint64_t cap = x.size() - p;
    const std::uint64_t target = x.word_at(p);
    std::uint64_t best = 0;
    for (std::uint64_t s = i; s < p && best < cap; ++s) {
      const std::uint64_t diff = x.word_at(s) ^ target;
      std::uint64_t len;
      if (diff != 0) {
        len = std::min(cap, static_cast<std::uint64_t>(std::countl_zero(diff)));
      } else {
        len = common_prefix(x, s, p, cap);
      }
      best = std::max(best, len);
    }
    match_sum += best;
  }

  double h = kEntropyClamp;
  if (match_sum > 0) {
    h = static_cast<double>(t) * std::log2(static_cast<double>(w)) / static_cast<double>(match_sum);
    h = std::clamp(h, 0.0, kEntropyClamp);
  }
  return {TestId::entropy, h, EntropyDetail{w, t, match_sum}};
}

// --- Book stack ------------------------------------------------------------

std::vector<std::uint8_t> mtf_encode(std::span<const std::uint8_t> input) {
  std::array<std::uint8_t, 256> stack;
  std::iota(stack.begin(), stack.end(), 0);
  std::vector<std::uint8_t> out(input.size());
  for (std::size_t i = 0; i < input.size(); ++i) {
    const std::uint8_t v = input[i];
    std::size_t idx = 0;
    while (stack[idx] != v) ++idx;
    out[i] = static_cast<std::uint8_t>(idx);
    std::memmove(stack.data() + 1, stack.data(), idx);
    stack[0] = v;
  }
  return out;
}

std::vector<std::uint8_t> mtf_decode(std::span<const std::uint8_t> indices) {
  std::array<std::uint8_t, 256> stack;
  std::iota(stack.begin(), stack.end(), 0);
  std::vector<std::uint8_t> out(indices.size());
  for (std::size_t i = 0; i < indices.size(); ++i) {
    const std::uint8_t idx = indices[i];
    const std::uint8_t v = stack[idx];
    out[i] = v;
    std::memmove(stack.data() + 1, stack.data(), idx);
    stack[0] = v;
  }
  return out;
}

TestResult bookstack_test(const BitString& x) {
  if (x.size() < 8) throw InvalidArgument("bookstack_test needs at least 8 bits, got " + std::to_string(x.size()));
  const auto bytes = x.bytes().first(x.size() / 8);
  const auto encoded = mtf_encode(bytes);
  BookStackDetail d;
  d.bytes = bytes.size();
  for (std::uint8_t b : bytes) d.ones_before += static_cast<std::uint64_t>(std::popcount(b));
  for (std::uint8_t b : encoded) d.ones_after += static_cast<std::uint64_t>(std::popcount(b));
  d.diff = static_cast<std::int64_t>(d.ones_before) - static_cast<std::int64_t>(d.ones_after);
  return {TestId::bookstack, static_cast<double>(d.diff), d};
}

// --- Primality -------------------------------------------------------------

unsigned witness_draw_width(std::uint64_t n) noexcept {
  // ceil(log2(k)) == bit_width(k - 1) for k >= 1, with k = n - 1.
  return static_cast<unsigned>(std::bit_width(n - 2));
}

TestResult primality_test(const BitString& x, const CarmichaelSet& carmichaels) {
  if (carmichaels.numbers.empty()) throw InvalidArgument("primality_test needs a non-empty Carmichael set");
  for (std::uint64_t n : carmichaels.numbers) {
    if (n < 5 || n % 2 == 0) throw InvalidArgument("primality_test: " + std::to_string(n) + " is not an odd n >= 5");
  }

  BitReader reader(x);
  PrimalityDetail d;
  d.numbers = carmichaels.numbers.size();
  std::vector<std::uint64_t> alive = carmichaels.numbers;
  std::vector<std::uint64_t> next;
  while (!alive.empty()) {
    ++d.rounds;
    next.clear();
    for (std::size_t k = 0; k < alive.size(); ++k) {
      const std::uint64_t n = alive[k];
      const unsigned width = witness_draw_width(n);
      std::uint64_t v = 0;
      try {
        do {
          v = reader.read(width);
        } while (v > n - 3);
      } catch (const InsufficientData&) {
        d.bits_consumed = reader.position();
        d.survivors.push_back(next.size() + (alive.size() - k));
        throw PrimalityExhausted("string exhausted after " + std::to_string(d.bits_consumed) + " bits in round " +
                                     std::to_string(d.rounds) + " with " + std::to_string(d.survivors.back()) +
                                     " numbers uncertified",
                                 d);
      }
      if (!ss_witness(v + 2, n)) next.push_back(n);
    }
    d.survivors.push_back(next.size());
    alive.swap(next);
  }
  d.bits_consumed = reader.position();
  d.complete = true;
  return {TestId::primality, static_cast<double>(d.bits_consumed), std::move(d)};
}

// --- Walk ------------------------------------------------------------------

namespace {

struct ByteStep {
  std::int8_t delta;
  std::int8_t max_prefix;  // over positions after 1..8 steps
  std::int8_t min_prefix;
};

constexpr std::array<ByteStep, 256> make_step_table() {
  std::array<ByteStep, 256> t{};
  for (int b = 0; b < 256; ++b) {
    int pos = 0;
    int hi = -8;
    int lo = 8;
    for (int k = 7; k >= 0; --k) {
      pos += ((b >> k) & 1) ? 1 : -1;
      hi = std::max(hi, pos);
      lo = std::min(lo, pos);
    }
    t[static_cast<std::size_t>(b)] = {static_cast<std::int8_t>(pos), static_cast<std::int8_t>(hi),
                                      static_cast<std::int8_t>(lo)};
  }
  return t;
}

constexpr auto kStepTable = make_step_table();

}  // namespace

TestResult walk_test(const BitString& x) {
  if (x.empty()) throw InvalidArgument("walk_test needs a non-empty string");
  std::int64_t pos = 0;
  std::int64_t hi = 0;
  std::int64_t lo = 0;
  const std::uint64_t full = x.size() / 8;
  const auto bytes = x.bytes();
  for (std::uint64_t i = 0; i < full; ++i) {
    const ByteStep& s = kStepTable[bytes[i]];
    hi = std::max(hi, pos + s.max_prefix);
    lo = std::min(lo, pos + s.min_prefix);
    pos += s.delta;
  }
  for (std::uint64_t i = full * 8; i < x.size(); ++i) {
    pos += x[i] ? 1 : -1;
    hi = std::max(hi, pos);
    lo = std::min(lo, pos);
  }
  return {TestId::walk, static_cast<double>(hi - lo), WalkDetail{x.size(), hi, lo}};
}

// --- Dispatch --------------------------------------------------------------

std::uint64_t min_length(TestId id, const BatteryParams& params) noexcept {
  switch (id) {
    case TestId::borel: return 4;
    case TestId::entropy: return entropy_min_length(params.entropy);
    case TestId::bookstack: return 8;
    case TestId::primality: return 1;
    case TestId::walk: return 1;
  }
  return 1;
}

TestResult run_test(TestId id, const BitString& x, const BatteryParams& params, const CarmichaelSet& carmichaels) {
  switch (id) {
    case TestId::borel: return borel_test(x);
    case TestId::entropy: return entropy_test(x, params.entropy);
    case TestId::bookstack: return bookstack_test(x);
    case TestId::primality: return primality_test(x, carmichaels);
    case TestId::walk: return walk_test(x);
  }
  throw InvalidArgument("unknown test id");
}

}  // namespace rlab
