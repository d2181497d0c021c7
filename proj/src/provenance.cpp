#include "forge/provenance.hpp"

#include <openssl/evp.h>

#include <array>
#include <memory>

#include "forge/error.hpp"

namespace forge {

std::string sha256_hex(std::string_view bytes) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), digest.data(), &len) != 1)
    throw Error(ErrorKind::Io, "provenance", "sha256 failed");
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0xF];
  }
  return out;
}

Provenance& Provenance::param(std::string key, std::string value) {
  params_.emplace_back(std::move(key), std::move(value));
  return *this;
}

Provenance& Provenance::input(std::string name, std::string_view contents) {
  inputs_.emplace_back(std::move(name), sha256_hex(contents));
  return *this;
}

std::string Provenance::line() const {
  std::string out = "# forge ";
  out += kToolVersion;
  out += " cmd=" + command_;
  for (const auto& [k, v] : params_) out += " " + k + "=" + v;
  for (const auto& [name, digest] : inputs_) out += " in:" + name + "=sha256:" + digest;
  out += '\n';
  return out;
}

}  // namespace forge
