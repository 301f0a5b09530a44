#include "vanetmac/mac_address.hpp"

#include <ostream>

#include "vanetmac/error.hpp"

namespace vanetmac {

namespace {

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  return -1;
}

}  // namespace

MacAddress parse_mac(std::string_view text) {
  // 8 groups of 2 digits plus 7 separators.
  constexpr std::size_t kLength = MacAddress::kOctets * 3 - 1;

  MacAddress::Octets octets{};
  std::size_t pos = 0;
  for (std::size_t group = 0; group < MacAddress::kOctets; ++group) {
    if (group > 0) {
      if (pos >= text.size()) {
        throw ParseError("MAC address has " + std::to_string(group) + " groups, expected 8", pos);
      }
      if (text[pos] != '-') {
        throw ParseError("expected '-' between MAC address groups", pos);
      }
      ++pos;
    }
    if (pos + 2 > text.size()) {
      throw ParseError("MAC address has " + std::to_string(group) + " groups, expected 8", pos);
    }
    const int hi = hex_value(text[pos]);
    if (hi < 0) throw ParseError("non-hex digit in MAC address group " + std::to_string(group), pos);
    const int lo = hex_value(text[pos + 1]);
    if (lo < 0) throw ParseError("non-hex digit in MAC address group " + std::to_string(group), pos + 1);
    octets[group] = static_cast<std::uint8_t>(hi * 16 + lo);
    pos += 2;
  }
  if (text.size() != kLength) {
    throw ParseError("trailing characters after MAC address", kLength);
  }
  return MacAddress(octets);
}

std::string format_mac(const MacAddress& mac) {
  static constexpr char kDigits[] = "0123456789ABCDEF";
  std::string out;
  out.reserve(MacAddress::kOctets * 3 - 1);
  for (std::size_t i = 0; i < MacAddress::kOctets; ++i) {
    if (i > 0) out.push_back('-');
    out.push_back(kDigits[mac.octets()[i] >> 4]);
    out.push_back(kDigits[mac.octets()[i] & 0x0F]);
  }
  return out;
}

std::ostream& operator<<(std::ostream& os, const MacAddress& mac) { return os << format_mac(mac); }

}  // namespace vanetmac
