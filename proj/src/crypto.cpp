// Copyright 2026 The attest Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "attest/crypto.hpp"

#include <openssl/core_names.h>
#include <openssl/crypto.h>
#include <openssl/evp.h>
#include <openssl/rand.h>

#include <memory>

#include "attest/error.hpp"

namespace attest::crypto {

namespace {

struct PkeyDeleter {
  void operator()(EVP_PKEY* p) const { EVP_PKEY_free(p); }
};
struct MdCtxDeleter {
  void operator()(EVP_MD_CTX* p) const { EVP_MD_CTX_free(p); }
};
using PkeyPtr = std::unique_ptr<EVP_PKEY, PkeyDeleter>;
using MdCtxPtr = std::unique_ptr<EVP_MD_CTX, MdCtxDeleter>;

Bytes digest(const EVP_MD* md, BytesView data, std::size_t out_len) {
  Bytes out(out_len);
  unsigned int written = 0;
  if (EVP_Digest(data.data(), data.size(), out.data(), &written, md, nullptr) != 1 ||
      written != out_len) {
    raise(Errc::io_error, "digest computation failed");
  }
  return out;
}

PkeyPtr private_key_from_seed(BytesView seed) {
  PkeyPtr key(EVP_PKEY_new_raw_private_key(EVP_PKEY_ED25519, nullptr,
                                           seed.data(), seed.size()));
  if (!key) raise(Errc::io_error, "ed25519 key construction failed");
  return key;
}

}  // namespace

Bytes sha1(BytesView data) { return digest(EVP_sha1(), data, kSha1Len); }

Bytes sha256(BytesView data) { return digest(EVP_sha256(), data, kSha256Len); }

Bytes hmac_sha1(BytesView key, BytesView data) {
  struct MacDeleter {
    void operator()(EVP_MAC* p) const { EVP_MAC_free(p); }
  };
  struct MacCtxDeleter {
    void operator()(EVP_MAC_CTX* p) const { EVP_MAC_CTX_free(p); }
  };
  std::unique_ptr<EVP_MAC, MacDeleter> mac(
      EVP_MAC_fetch(nullptr, "HMAC", nullptr));
  if (!mac) raise(Errc::io_error, "HMAC fetch failed");
  std::unique_ptr<EVP_MAC_CTX, MacCtxDeleter> ctx(EVP_MAC_CTX_new(mac.get()));
  if (!ctx) raise(Errc::io_error, "HMAC context allocation failed");

  char digest_name[] = "SHA1";
  OSSL_PARAM params[] = {
      OSSL_PARAM_construct_utf8_string(OSSL_MAC_PARAM_DIGEST, digest_name, 0),
      OSSL_PARAM_construct_end()};
  if (EVP_MAC_init(ctx.get(), key.data(), key.size(), params) != 1 ||
      EVP_MAC_update(ctx.get(), data.data(), data.size()) != 1) {
    raise(Errc::io_error, "HMAC computation failed");
  }
  Bytes out(kSha1Len);
  std::size_t written = 0;
  if (EVP_MAC_final(ctx.get(), out.data(), &written, out.size()) != 1 ||
      written != kSha1Len) {
    raise(Errc::io_error, "HMAC finalization failed");
  }
  return out;
}

SigningKey SigningKey::from_seed(BytesView seed32) {
  if (seed32.size() != kSeedLen) {
    raise(Errc::invalid_argument, "signing key seed must be 32 bytes");
  }
  PkeyPtr key = private_key_from_seed(seed32);
  Bytes pub(kPublicKeyLen);
  std::size_t len = pub.size();
  if (EVP_PKEY_get_raw_public_key(key.get(), pub.data(), &len) != 1 ||
      len != kPublicKeyLen) {
    raise(Errc::io_error, "ed25519 public key extraction failed");
  }
  return SigningKey(Bytes(seed32.begin(), seed32.end()), std::move(pub));
}

SigningKey SigningKey::generate() { return from_seed(random_bytes(kSeedLen)); }

Bytes SigningKey::sign(BytesView message) const {
  PkeyPtr key = private_key_from_seed(seed_);
  MdCtxPtr ctx(EVP_MD_CTX_new());
  if (!ctx ||
      EVP_DigestSignInit(ctx.get(), nullptr, nullptr, nullptr, key.get()) != 1) {
    raise(Errc::io_error, "signing context initialization failed");
  }
  Bytes sig(kSignatureLen);
  std::size_t len = sig.size();
  if (EVP_DigestSign(ctx.get(), sig.data(), &len, message.data(),
                     message.size()) != 1 ||
      len != kSignatureLen) {
    raise(Errc::io_error, "signing failed");
  }
  return sig;
}

bool verify(BytesView public_key, BytesView message, BytesView signature) {
  if (public_key.size() != kPublicKeyLen || signature.size() != kSignatureLen) {
    return false;
  }
  PkeyPtr key(EVP_PKEY_new_raw_public_key(EVP_PKEY_ED25519, nullptr,
                                          public_key.data(), public_key.size()));
  if (!key) return false;
  MdCtxPtr ctx(EVP_MD_CTX_new());
  if (!ctx ||
      EVP_DigestVerifyInit(ctx.get(), nullptr, nullptr, nullptr, key.get()) != 1) {
    return false;
  }
  return EVP_DigestVerify(ctx.get(), signature.data(), signature.size(),
                          message.data(), message.size()) == 1;
}

Bytes random_bytes(std::size_t n) {
  Bytes out(n);
  if (n != 0 && RAND_bytes(out.data(), static_cast<int>(n)) != 1) {
    raise(Errc::io_error, "OS randomness unavailable");
  }
  return out;
}

bool constant_time_equal(BytesView a, BytesView b) {
  if (a.size() != b.size()) return false;
  if (a.empty()) return true;
  return CRYPTO_memcmp(a.data(), b.data(), a.size()) == 0;
}

bool constant_time_equal(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  if (a.empty()) return true;
  return CRYPTO_memcmp(a.data(), b.data(), a.size()) == 0;
}

}  // namespace attest::crypto
