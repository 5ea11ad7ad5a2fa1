#include "rlab/sources.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "rlab/errors.hpp"

namespace rlab {

BitString prng_bits(std::uint64_t seed, std::uint64_t n_bits) {
  XorShift64Star rng(seed);
  std::vector<std::uint8_t> bytes((n_bits + 7) / 8);
  std::size_t k = 0;
  while (k < bytes.size()) {
    const std::uint64_t w = rng.next();
    for (int b = 7; b >= 0 && k < bytes.size(); --b) bytes[k++] = static_cast<std::uint8_t>(w >> (8 * b));
  }
  return BitString::from_bytes(std::move(bytes), n_bits);
}

DigitStream parse_digits(std::string_view text) {
  DigitStream digits;
  digits.reserve(text.size());
  std::size_t i = 0;
  auto skip_ws = [&] {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
  };
  skip_ws();
  if (i + 1 < text.size() && text[i] == '3') {
    std::size_t j = i + 1;
    while (j < text.size() && std::isspace(static_cast<unsigned char>(text[j]))) ++j;
    if (j < text.size() && text[j] == '.') i = j + 1;
  }
  for (; i < text.size(); ++i) {
    const char c = text[i];
    if (c >= '0' && c <= '9') {
      digits.push_back(static_cast<std::uint8_t>(c - '0'));
    } else if (!std::isspace(static_cast<unsigned char>(c))) {
      throw FormatError(std::string("unexpected character '") + c + "' in digit stream at offset " +
                        std::to_string(i));
    }
  }
  return digits;
}

DigitStream read_digit_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open digit file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_digits(ss.str());
}

PiExtraction pi_extract_from(const DigitStream& digits, DigitPair deleted, std::uint64_t n_bits,
                             std::size_t offset) {
  if (deleted[0] > 9 || deleted[1] > 9 || deleted[0] == deleted[1]) {
    throw InvalidArgument("deleted digits must be two distinct values in [0, 9]");
  }
  // rank[d] = position of d among the eight surviving digits, or -1.
  std::array<int, 10> rank{};
  int next = 0;
  for (int d = 0; d < 10; ++d) rank[static_cast<std::size_t>(d)] = (d == deleted[0] || d == deleted[1]) ? -1 : next++;

  BitWriter out(n_bits);
  std::size_t i = offset;
  while (out.size() < n_bits) {
    if (i >= digits.size()) {
      throw InsufficientData("digit stream exhausted after " + std::to_string(out.size()) + " of " +
                             std::to_string(n_bits) + " bits");
    }
    const std::uint8_t d = digits[i++];
    if (d > 9) throw InvalidArgument("digit out of range: " + std::to_string(d));
    const int r = rank[d];
    if (r < 0) continue;
    const std::uint64_t room = n_bits - out.size();
    if (room >= 3) {
      out.push_bits(static_cast<std::uint64_t>(r), 3);
    } else {
      out.push_bits(static_cast<std::uint64_t>(r) >> (3 - room), static_cast<unsigned>(room));
    }
  }
  return {std::move(out).finish(), i - offset};
}

BitString von_neumann_extract(const BitString& x) {
  BitWriter out(x.size() / 4);
  const std::uint64_t pairs = x.size() / 2;
  for (std::uint64_t p = 0; p < pairs; ++p) {
    const bool a = x[2 * p];
    const bool b = x[2 * p + 1];
    if (a != b) out.push(a);
  }
  return std::move(out).finish();
}

BitString pattern_bits(const BitString& pattern, std::uint64_t n_bits) {
  if (pattern.empty()) throw InvalidArgument("pattern must be non-empty");
  BitWriter out(n_bits);
  const std::uint64_t plen = pattern.size();
  for (std::uint64_t i = 0; i < n_bits; ++i) out.push(pattern[i % plen]);
  return std::move(out).finish();
}

std::string_view to_string(SourceKind kind) {
  switch (kind) {
    case SourceKind::prng: return "prng";
    case SourceKind::pi_digits: return "pi_digits";
    case SourceKind::file: return "file";
    case SourceKind::qsim: return "qsim";
    case SourceKind::constant_pattern: return "constant_pattern";
  }
  return "unknown";
}

SourceKind source_kind_from_string(std::string_view name) {
  for (SourceKind k : {SourceKind::prng, SourceKind::pi_digits, SourceKind::file, SourceKind::qsim,
                       SourceKind::constant_pattern}) {
    if (to_string(k) == name) return k;
  }
  throw InvalidArgument("unknown source kind '" + std::string(name) + "'");
}

void SourceSpec::validate() const {
  switch (kind) {
    case SourceKind::prng:
      break;
    case SourceKind::pi_digits:
      if (digits_path.empty()) throw InvalidArgument("pi_digits source needs a digit file path");
      if (deleted && ((*deleted)[0] > 9 || (*deleted)[1] > 9 || (*deleted)[0] == (*deleted)[1])) {
        throw InvalidArgument("deleted digits must be two distinct values in [0, 9]");
      }
      break;
    case SourceKind::file:
      if (file_path.empty()) throw InvalidArgument("file source needs a path");
      break;
    case SourceKind::qsim:
      if (!(qsim.rate > 0) || !std::isfinite(qsim.rate)) throw InvalidArgument("qsim rate must be positive");
      if (qsim.preparation == QsimParams::Preparation::demon &&
          (!(qsim.frequency > 0) || !std::isfinite(qsim.frequency))) {
        throw InvalidArgument("demon frequency must be positive");
      }
      break;
    case SourceKind::constant_pattern:
      if (pattern.empty()) throw InvalidArgument("constant_pattern source needs a non-empty pattern");
      break;
  }
}

BitString qsim_bits(const QsimParams& params, std::uint64_t n_bits, std::uint64_t seed) {
  StateFunction state_fn;
  if (params.preparation == QsimParams::Preparation::hadamard) {
    const QState s = evolve(hadamard(), ket0());
    state_fn = [s](double) { return s; };
  } else {
    state_fn = [nu = params.frequency, mode = params.mode](double t) { return demon_state(nu, t, mode); };
  }
  if (!params.von_neumann) return sample_bits(state_fn, params.splitter, params.rate, n_bits, seed);

  // Debiased output: keep drawing raw chunks (continuing the same time axis
  // and PRNG stream) until enough bits survive extraction.
  const std::uint64_t max_raw = std::max<std::uint64_t>(64 * n_bits, 1 << 16);
  XorShift64Star rng(seed);
  BitWriter out(n_bits);
  std::uint64_t i = 0;
  while (out.size() < n_bits) {
    if (i + 2 > max_raw) {
      throw InsufficientData("von Neumann extraction yielded only " + std::to_string(out.size()) + " of " +
                             std::to_string(n_bits) + " bits from " + std::to_string(i) + " raw samples");
    }
    bool pair[2];
    for (bool& b : pair) {
      const double t = static_cast<double>(i++) / params.rate;
      const double p0 = born_probability(evolve(params.splitter, state_fn(t)), 0);
      b = !(rng.uniform_open() < p0);
    }
    if (pair[0] != pair[1]) out.push(pair[0]);
  }
  return std::move(out).finish();
}

BitString generate(const SourceSpec& spec, std::uint64_t n_bits) {
  spec.validate();
  switch (spec.kind) {
    case SourceKind::prng:
      return prng_bits(spec.seed, n_bits);
    case SourceKind::pi_digits: {
      const DigitStream digits = read_digit_file(spec.digits_path);
      return pi_extract_from(digits, spec.deleted.value_or(kPiDeletedPairs[0]), n_bits, spec.digit_offset).bits;
    }
    case SourceKind::file: {
      const BitString all = read_bitfile(spec.file_path);
      if (all.size() < n_bits) {
        throw InsufficientData(spec.file_path.string() + " holds " + std::to_string(all.size()) +
                               " bits, " + std::to_string(n_bits) + " requested");
      }
      return all.slice(0, n_bits);
    }
    case SourceKind::qsim:
      return qsim_bits(spec.qsim, n_bits, spec.seed);
    case SourceKind::constant_pattern:
      return pattern_bits(spec.pattern, n_bits);
  }
  throw InvalidArgument("unknown source kind");
}

}  // namespace rlab
