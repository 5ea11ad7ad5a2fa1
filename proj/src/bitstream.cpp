#include "rlab/bitstream.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "rlab/errors.hpp"

namespace rlab {

namespace {

constexpr std::array<char, 4> kMagic = {'R', 'L', 'A', 'B'};

void mask_tail(std::vector<std::uint8_t>& data, std::uint64_t len_bits) {
  data.resize((len_bits + 7) / 8);
  if (const unsigned rem = len_bits & 7; rem != 0) {
    data.back() &= static_cast<std::uint8_t>(0xFFu << (8 - rem));
  }
}

}  // namespace

BitString BitString::from_bytes(std::span<const std::uint8_t> bytes, std::uint64_t len_bits) {
  return from_bytes(std::vector<std::uint8_t>(bytes.begin(), bytes.end()), len_bits);
}

BitString BitString::from_bytes(std::vector<std::uint8_t>&& bytes, std::uint64_t len_bits) {
  if (len_bits > 8 * static_cast<std::uint64_t>(bytes.size())) {
    throw InvalidArgument("len_bits " + std::to_string(len_bits) + " exceeds storage of " +
                          std::to_string(bytes.size()) + " bytes");
  }
  BitString out;
  out.data_ = std::move(bytes);
  mask_tail(out.data_, len_bits);
  out.len_bits_ = len_bits;
  return out;
}

BitString BitString::from_string(std::string_view bits) {
  BitWriter w(bits.size());
  for (char c : bits) {
    if (c != '0' && c != '1') throw InvalidArgument(std::string("not a bit character: '") + c + "'");
    w.push(c == '1');
  }
  return std::move(w).finish();
}

bool BitString::bit_at(std::uint64_t i) const {
  if (i >= len_bits_) {
    throw RangeError("bit index " + std::to_string(i) + " out of range for length " +
                     std::to_string(len_bits_));
  }
  return (*this)[i];
}

std::uint64_t BitString::word_at(std::uint64_t pos) const noexcept {
  if (pos >= len_bits_) return 0;
  const std::uint64_t byte = pos >> 3;
  const unsigned shift = pos & 7;
  std::uint64_t w = 0;
  const std::size_t avail = data_.size() - byte;
  if (avail >= 9) {
    for (std::size_t k = 0; k < 8; ++k) w = (w << 8) | data_[byte + k];
    if (shift) w = (w << shift) | (data_[byte + 8] >> (8 - shift));
    return w;
  }
  // Near the end: assemble through a zero-padded buffer.
  std::array<std::uint8_t, 9> buf{};
  std::memcpy(buf.data(), data_.data() + byte, avail);
  for (std::size_t k = 0; k < 8; ++k) w = (w << 8) | buf[k];
  if (shift) w = (w << shift) | (buf[8] >> (8 - shift));
  return w;
}

std::uint64_t BitString::bits(std::uint64_t pos, unsigned width) const noexcept {
  if (width == 0) return 0;
  return word_at(pos) >> (64 - width);
}

std::uint64_t BitString::popcount() const noexcept {
  std::uint64_t n = 0;
  for (std::uint8_t b : data_) n += static_cast<std::uint64_t>(std::popcount(b));
  return n;
}

BitString BitString::slice(std::uint64_t pos, std::uint64_t len) const {
  if (pos > len_bits_ || len > len_bits_ - pos) {
    throw RangeError("slice [" + std::to_string(pos) + ", +" + std::to_string(len) +
                     ") out of range for length " + std::to_string(len_bits_));
  }
  if ((pos & 7) == 0) {
    const auto first = data_.begin() + static_cast<std::ptrdiff_t>(pos >> 3);
    return from_bytes(std::vector<std::uint8_t>(first, first + static_cast<std::ptrdiff_t>((len + 7) / 8)), len);
  }
  BitWriter w(len);
  std::uint64_t i = 0;
  for (; i + 56 <= len; i += 56) w.push_bits(bits(pos + i, 56), 56);
  if (i < len) w.push_bits(bits(pos + i, static_cast<unsigned>(len - i)), static_cast<unsigned>(len - i));
  return std::move(w).finish();
}

std::string BitString::to_string() const {
  std::string s;
  s.reserve(len_bits_);
  for (std::uint64_t i = 0; i < len_bits_; ++i) s.push_back((*this)[i] ? '1' : '0');
  return s;
}

void BitWriter::push(bool bit) {
  if ((len_ & 7) == 0) bytes_.push_back(0);
  if (bit) bytes_.back() |= static_cast<std::uint8_t>(0x80u >> (len_ & 7));
  ++len_;
}

void BitWriter::push_bits(std::uint64_t value, unsigned width) {
  while (width > 0) {
    const unsigned used = len_ & 7;
    if (used == 0) bytes_.push_back(0);
    const unsigned room = 8 - used;
    const unsigned take = std::min(room, width);
    const auto chunk = static_cast<std::uint8_t>((value >> (width - take)) & ((1u << take) - 1));
    bytes_.back() |= static_cast<std::uint8_t>(chunk << (room - take));
    len_ += take;
    width -= take;
  }
}

BitString BitWriter::finish() && {
  return BitString::from_bytes(std::move(bytes_), len_);
}

std::uint64_t BitReader::read(unsigned width) {
  if (width > remaining()) {
    throw InsufficientData("need " + std::to_string(width) + " bits at position " +
                           std::to_string(pos_) + ", only " + std::to_string(remaining()) +
                           " remain");
  }
  const std::uint64_t v = src_->bits(pos_, width);
  pos_ += width;
  return v;
}

BlockIterator::BlockIterator(const BitString& source, unsigned m)
    : src_(&source), m_(m), count_(m == 0 ? 0 : source.size() / m) {
  if (m == 0 || m > kMaxBlockWidth) {
    throw InvalidArgument("block width must be in [1, " + std::to_string(kMaxBlockWidth) + "], got " +
                          std::to_string(m));
  }
}

std::uint64_t BlockIterator::next() noexcept {
  const std::uint64_t v = src_->bits(index_ * m_, m_);
  ++index_;
  return v;
}

std::vector<std::uint64_t> count_blocks(const BitString& x, unsigned m) {
  BlockIterator it(x, m);
  std::vector<std::uint64_t> hist(std::size_t{1} << m, 0);
  if (m == 8) {
    const auto bytes = x.bytes();
    for (std::uint64_t i = 0; i < it.block_count(); ++i) ++hist[bytes[i]];
    return hist;
  }
  while (!it.done()) ++hist[it.next()];
  return hist;
}

BitString read_bitfile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open bit file " + path.string());
  std::vector<std::uint8_t> raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read failure on " + path.string());

  const bool has_header =
      raw.size() >= kBitfileHeaderSize && std::equal(kMagic.begin(), kMagic.end(), raw.begin());
  if (!has_header) {
    const std::uint64_t len = 8 * static_cast<std::uint64_t>(raw.size());
    return BitString::from_bytes(std::move(raw), len);
  }

  if (raw[4] != kBitfileVersion) {
    throw FormatError(path.string() + ": unsupported bit file version " + std::to_string(raw[4]));
  }
  if (raw[5] != 0 || raw[6] != 0 || raw[7] != 0) {
    throw FormatError(path.string() + ": reserved header bytes are not zero");
  }
  std::uint64_t len_bits = 0;
  for (int k = 7; k >= 0; --k) len_bits = (len_bits << 8) | raw[8 + static_cast<std::size_t>(k)];
  const std::uint64_t payload = raw.size() - kBitfileHeaderSize;
  if (len_bits > 8 * payload) {
    throw FormatError(path.string() + ": header declares " + std::to_string(len_bits) +
                      " bits but payload holds " + std::to_string(8 * payload));
  }
  if ((len_bits + 7) / 8 != payload) {
    throw FormatError(path.string() + ": payload has " + std::to_string(payload) +
                      " bytes, header length needs " + std::to_string((len_bits + 7) / 8));
  }
  raw.erase(raw.begin(), raw.begin() + kBitfileHeaderSize);
  return BitString::from_bytes(std::move(raw), len_bits);
}

void write_bitfile(const BitString& x, const std::filesystem::path& path) {
  const auto bytes = x.bytes();
  const bool looks_like_header =
      bytes.size() >= kBitfileHeaderSize && std::equal(kMagic.begin(), kMagic.end(), bytes.begin());
  const bool need_header = (x.size() % 8 != 0) || looks_like_header;

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot create bit file " + path.string());
  if (need_header) {
    std::array<char, kBitfileHeaderSize> header{};
    std::copy(kMagic.begin(), kMagic.end(), header.begin());
    header[4] = static_cast<char>(kBitfileVersion);
    for (int k = 0; k < 8; ++k) header[8 + static_cast<std::size_t>(k)] = static_cast<char>((x.size() >> (8 * k)) & 0xFF);
    out.write(header.data(), header.size());
  }
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failure on " + path.string());
}

}  // namespace rlab
