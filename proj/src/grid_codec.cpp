#include "pascrowd/protocol.hpp"

#include <fmt/format.h>
#include <openssl/evp.h>

namespace pascrowd {

std::string base64_encode(const std::vector<std::uint8_t>& bytes) {
  std::string out(4 * ((bytes.size() + 2) / 3), '\0');
  const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()), bytes.data(),
                                static_cast<int>(bytes.size()));
  out.resize(static_cast<std::size_t>(n));
  return out;
}

std::vector<std::uint8_t> base64_decode(const std::string& text) {
  if (text.size() % 4 != 0) throw Error("base64: length is not a multiple of 4");
  std::vector<std::uint8_t> out(3 * text.size() / 4);
  const int n = EVP_DecodeBlock(out.data(), reinterpret_cast<const unsigned char*>(text.data()),
                                static_cast<int>(text.size()));
  if (n < 0) throw Error("base64: invalid characters");
  // EVP_DecodeBlock keeps the zero bytes produced by '=' padding.
  std::size_t size = static_cast<std::size_t>(n);
  if (!text.empty() && text.back() == '=') --size;
  if (text.size() >= 2 && text[text.size() - 2] == '=') --size;
  out.resize(size);
  return out;
}

std::string encode_grid(const OccupancyGrid& grid) {
  const auto& codes = grid.codes();
  return base64_encode(std::vector<std::uint8_t>(codes.data(), codes.data() + codes.size()));
}

OccupancyGrid decode_grid(const std::string& payload, const GridSpec& spec) {
  const auto bytes = base64_decode(payload);
  const std::size_t expected = static_cast<std::size_t>(spec.height_cells) * spec.width_cells;
  if (bytes.size() != expected) {
    throw Error(fmt::format("decode_grid: {} bytes, expected {}", bytes.size(), expected));
  }
  OccupancyGrid grid(spec, CellClass::Free);
  for (std::size_t i = 0; i < bytes.size(); ++i) {
    if (bytes[i] > 2) throw Error(fmt::format("decode_grid: byte {} at offset {} is not a cell code", bytes[i], i));
    grid.codes().data()[i] = bytes[i];
  }
  return grid;
}

}  // namespace pascrowd
