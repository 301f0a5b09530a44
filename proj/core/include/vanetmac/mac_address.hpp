#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <string_view>

namespace vanetmac {

/// 8-octet station address, written as eight hyphen-separated hex pairs
/// ("00-1D-0F-C3-01-D3-1D-0F"). Ordered lexicographically by octet.
class MacAddress {
 public:
  static constexpr std::size_t kOctets = 8;
  using Octets = std::array<std::uint8_t, kOctets>;

  constexpr MacAddress() = default;
  constexpr explicit MacAddress(const Octets& octets) : octets_(octets) {}

  /// Builds an address from the low 64 bits of `value`, most significant octet first.
  static constexpr MacAddress from_u64(std::uint64_t value) {
    Octets o{};
    for (std::size_t i = 0; i < kOctets; ++i) {
      o[kOctets - 1 - i] = static_cast<std::uint8_t>(value >> (8 * i));
    }
    return MacAddress(o);
  }

  constexpr std::uint64_t to_u64() const {
    std::uint64_t v = 0;
    for (auto b : octets_) v = (v << 8) | b;
    return v;
  }

  constexpr const Octets& octets() const { return octets_; }

  friend constexpr auto operator<=>(const MacAddress&, const MacAddress&) = default;
  friend constexpr bool operator==(const MacAddress&, const MacAddress&) = default;

 private:
  Octets octets_{};
};

/// Parses the canonical text form. Hex digits are case-insensitive.
/// Throws ParseError whose position() is the offending character offset.
MacAddress parse_mac(std::string_view text);

/// Canonical uppercase form, e.g. "00-1D-0F-C3-01-D3-1D-0F".
std::string format_mac(const MacAddress& mac);

std::ostream& operator<<(std::ostream& os, const MacAddress& mac);

}  // namespace vanetmac

template <>
struct std::hash<vanetmac::MacAddress> {
  std::size_t operator()(const vanetmac::MacAddress& mac) const noexcept {
    return std::hash<std::uint64_t>{}(mac.to_u64());
  }
};
