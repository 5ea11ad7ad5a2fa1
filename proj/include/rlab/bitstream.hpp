#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace rlab {

/// Packed, length-addressed binary string.
///
/// Bits are stored MSB-first: bit 0 of the string is the most significant bit
/// of byte 0. Unused trailing bits of the final byte are always zero. A
/// BitString is immutable once built, so it can be shared freely between
/// threads.
class BitString {
 public:
  BitString() = default;

  /// Copies `bytes` and keeps the first `len_bits` bits. Throws
  /// InvalidArgument when len_bits exceeds 8 * bytes.size().
  static BitString from_bytes(std::span<const std::uint8_t> bytes, std::uint64_t len_bits);
  static BitString from_bytes(std::vector<std::uint8_t>&& bytes, std::uint64_t len_bits);

  /// Parses a string of '0'/'1' characters. Anything else is rejected.
  static BitString from_string(std::string_view bits);

  std::uint64_t size() const noexcept { return len_bits_; }
  bool empty() const noexcept { return len_bits_ == 0; }
  std::span<const std::uint8_t> bytes() const noexcept { return data_; }

  /// Bounds-checked bit access; throws RangeError.
  bool bit_at(std::uint64_t i) const;

  /// Unchecked access for hot loops.
  bool operator[](std::uint64_t i) const noexcept {
    return (data_[i >> 3] >> (7 - (i & 7))) & 1u;
  }

  /// The `width` bits starting at `pos` as an unsigned integer (first bit is
  /// most significant). Bits past the end read as zero. width <= 57.
  std::uint64_t bits(std::uint64_t pos, unsigned width) const noexcept;

  /// 64 bits starting at `pos`, left-aligned; zero-padded past the end.
  std::uint64_t word_at(std::uint64_t pos) const noexcept;

  std::uint64_t popcount() const noexcept;

  /// Bits [pos, pos + len). Throws RangeError when the range is out of bounds.
  BitString slice(std::uint64_t pos, std::uint64_t len) const;

  std::string to_string() const;

  friend bool operator==(const BitString&, const BitString&) = default;

 private:
  std::vector<std::uint8_t> data_;
  std::uint64_t len_bits_ = 0;
};

/// Append-only builder used by generators.
class BitWriter {
 public:
  BitWriter() = default;
  explicit BitWriter(std::uint64_t reserve_bits) { bytes_.reserve((reserve_bits + 7) / 8); }

  void push(bool bit);
  /// Appends the low `width` bits of `value`, most significant first.
  void push_bits(std::uint64_t value, unsigned width);

  std::uint64_t size() const noexcept { return len_; }
  BitString finish() &&;

 private:
  std::vector<std::uint8_t> bytes_;
  std::uint64_t len_ = 0;
};

/// Sequential reader over a BitString with a private cursor.
class BitReader {
 public:
  explicit BitReader(const BitString& source) : src_(&source) {}

  std::uint64_t position() const noexcept { return pos_; }
  std::uint64_t remaining() const noexcept { return src_->size() - pos_; }

  /// Reads `width` (<= 57) bits; throws InsufficientData if fewer remain.
  std::uint64_t read(unsigned width);

 private:
  const BitString* src_;
  std::uint64_t pos_ = 0;
};

/// Non-overlapping m-bit blocks of a string; a trailing remainder shorter than
/// m is never yielded.
class BlockIterator {
 public:
  BlockIterator(const BitString& source, unsigned m);

  std::uint64_t block_count() const noexcept { return count_; }
  bool done() const noexcept { return index_ >= count_; }
  std::uint64_t next() noexcept;

 private:
  const BitString* src_;
  unsigned m_;
  std::uint64_t count_;
  std::uint64_t index_ = 0;
};

inline constexpr unsigned kMaxBlockWidth = 24;

/// Histogram of the 2^m non-overlapping m-bit block values. 1 <= m <= 24.
std::vector<std::uint64_t> count_blocks(const BitString& x, unsigned m);

/// Bit file I/O.
///
/// On-disk layout: an optional 16-byte header ("RLAB", version byte = 1,
/// three reserved zero bytes, len_bits as little-endian u64) followed by the
/// packed payload. Headerless files hold 8 * filesize bits.
/// write_bitfile emits the header only when it is needed to recover the exact
/// length, or when the raw payload would itself begin with a valid header.
BitString read_bitfile(const std::filesystem::path& path);
void write_bitfile(const BitString& x, const std::filesystem::path& path);

inline constexpr std::size_t kBitfileHeaderSize = 16;
inline constexpr std::uint8_t kBitfileVersion = 1;

}  // namespace rlab
