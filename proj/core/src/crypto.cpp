// Copyright 2026 The manetsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "manet/crypto.hpp"

#include <openssl/crypto.h>
#include <openssl/evp.h>
#include <openssl/hmac.h>

#include <algorithm>
#include <array>
#include <cctype>
#include <random>

namespace manet {
namespace {

struct PkeyDeleter {
  void operator()(EVP_PKEY* p) const { EVP_PKEY_free(p); }
};
struct MdCtxDeleter {
  void operator()(EVP_MD_CTX* p) const { EVP_MD_CTX_free(p); }
};
using PkeyPtr = std::unique_ptr<EVP_PKEY, PkeyDeleter>;
using MdCtxPtr = std::unique_ptr<EVP_MD_CTX, MdCtxDeleter>;

const EVP_MD* as_md(const void* p) { return static_cast<const EVP_MD*>(p); }

}  // namespace

HashFunction::HashFunction(std::string name) : name_(std::move(name)) {
  const EVP_MD* md = EVP_get_digestbyname(name_.c_str());
  if (md == nullptr) {
    throw std::invalid_argument("unknown hash function: " + name_);
  }
  md_ = md;
  digest_size_ = static_cast<std::size_t>(EVP_MD_get_size(md));
}

Bytes HashFunction::operator()(ByteView data) const {
  Bytes out(digest_size_);
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), out.data(), &len, as_md(md_),
                 nullptr) != 1) {
    throw std::runtime_error("EVP_Digest failed");
  }
  out.resize(len);
  return out;
}

ChainPair chain_init(const HashFunction& h, ByteView seed,
                     std::uint32_t max_hop_count) {
  if (max_hop_count < 1) {
    throw std::invalid_argument("chain_init: max_hop_count must be >= 1");
  }
  ChainPair pair;
  pair.hash.assign(seed.begin(), seed.end());
  Bytes v = pair.hash;
  for (std::uint32_t i = 0; i < max_hop_count; ++i) v = h(v);
  pair.top_hash = std::move(v);
  return pair;
}

Bytes chain_step(const HashFunction& h, ByteView hash) { return h(hash); }

bool chain_verify(const HashFunction& h, ByteView hash, ByteView top_hash,
                  std::uint32_t hop_count, std::uint32_t max_hop_count) {
  if (hop_count > max_hop_count) return false;
  if (hash.size() != h.digest_size() || top_hash.size() != h.digest_size()) {
    return false;
  }
  Bytes v(hash.begin(), hash.end());
  for (std::uint32_t i = hop_count; i < max_hop_count; ++i) v = h(v);
  return CRYPTO_memcmp(v.data(), top_hash.data(), v.size()) == 0;
}

// ---------------------------------------------------------------------------

std::string_view signature_scheme_name(SignatureScheme s) {
  switch (s) {
    case SignatureScheme::kEd25519: return "ed25519";
    case SignatureScheme::kHmacSha256: return "hmac-sha256";
  }
  return "?";
}

SignatureScheme parse_signature_scheme(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "ed25519") return SignatureScheme::kEd25519;
  if (lower == "hmac-sha256") return SignatureScheme::kHmacSha256;
  throw std::invalid_argument("unknown signature scheme: " + std::string(name));
}

KeyNotFound::KeyNotFound(NodeId id)
    : std::out_of_range("no key pair for node " + std::to_string(id)) {}

struct KeyRegistry::Keys {
  std::array<std::uint8_t, 32> secret{};
  PkeyPtr private_key;  // ed25519 only
  PkeyPtr public_key;   // ed25519 only
};

KeyRegistry::KeyRegistry() = default;
KeyRegistry::~KeyRegistry() = default;
KeyRegistry::KeyRegistry(KeyRegistry&&) noexcept = default;
KeyRegistry& KeyRegistry::operator=(KeyRegistry&&) noexcept = default;

KeyRegistry KeyRegistry::provision(std::size_t node_count, std::uint64_t seed,
                                   SignatureScheme scheme) {
  KeyRegistry reg;
  reg.scheme_ = scheme;
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32), 0x6b657973u};
  std::mt19937_64 gen(seq);
  for (std::size_t i = 0; i < node_count; ++i) {
    auto keys = std::make_unique<Keys>();
    for (std::size_t j = 0; j < keys->secret.size(); j += 8) {
      std::uint64_t word = gen();
      for (std::size_t b = 0; b < 8; ++b) {
        keys->secret[j + b] = static_cast<std::uint8_t>(word >> (8 * b));
      }
    }
    if (scheme == SignatureScheme::kEd25519) {
      keys->private_key.reset(EVP_PKEY_new_raw_private_key(
          EVP_PKEY_ED25519, nullptr, keys->secret.data(), keys->secret.size()));
      if (!keys->private_key) throw std::runtime_error("ed25519 keygen failed");
      std::array<std::uint8_t, 32> pub{};
      std::size_t pub_len = pub.size();
      if (EVP_PKEY_get_raw_public_key(keys->private_key.get(), pub.data(),
                                      &pub_len) != 1) {
        throw std::runtime_error("ed25519 public key export failed");
      }
      keys->public_key.reset(EVP_PKEY_new_raw_public_key(
          EVP_PKEY_ED25519, nullptr, pub.data(), pub_len));
    }
    reg.keys_.push_back(std::move(keys));
  }
  return reg;
}

bool KeyRegistry::contains(NodeId id) const { return id < keys_.size(); }

std::size_t KeyRegistry::size() const { return keys_.size(); }

Bytes KeyRegistry::sign(NodeId signer, ByteView message) const {
  if (!contains(signer)) throw KeyNotFound(signer);
  const Keys& k = *keys_[signer];
  if (scheme_ == SignatureScheme::kHmacSha256) {
    Bytes mac(EVP_MAX_MD_SIZE);
    unsigned int len = 0;
    HMAC(EVP_sha256(), k.secret.data(), static_cast<int>(k.secret.size()),
         message.data(), message.size(), mac.data(), &len);
    mac.resize(len);
    return mac;
  }
  MdCtxPtr ctx(EVP_MD_CTX_new());
  std::size_t len = 64;
  Bytes sig(len);
  if (EVP_DigestSignInit(ctx.get(), nullptr, nullptr, nullptr,
                         k.private_key.get()) != 1 ||
      EVP_DigestSign(ctx.get(), sig.data(), &len, message.data(),
                     message.size()) != 1) {
    throw std::runtime_error("ed25519 sign failed");
  }
  sig.resize(len);
  return sig;
}

bool KeyRegistry::verify(NodeId signer, ByteView message,
                         ByteView signature) const {
  if (!contains(signer)) return false;
  const Keys& k = *keys_[signer];
  if (scheme_ == SignatureScheme::kHmacSha256) {
    Bytes expected = sign(signer, message);
    return expected.size() == signature.size() &&
           CRYPTO_memcmp(expected.data(), signature.data(), expected.size()) ==
               0;
  }
  MdCtxPtr ctx(EVP_MD_CTX_new());
  if (EVP_DigestVerifyInit(ctx.get(), nullptr, nullptr, nullptr,
                           k.public_key.get()) != 1) {
    return false;
  }
  return EVP_DigestVerify(ctx.get(), signature.data(), signature.size(),
                          message.data(), message.size()) == 1;
}

// ---------------------------------------------------------------------------

SecurityExtension sign(const RoutingMessage& msg, NodeId signer,
                       const KeyRegistry& registry, SignatureKind kind) {
  if (!registry.contains(signer)) throw KeyNotFound(signer);
  RoutingMessage copy = msg;
  auto* slot = security_of(copy);
  if (slot == nullptr) {
    throw std::invalid_argument("message type does not carry a signature");
  }
  SecurityExtension ext = slot->value_or(SecurityExtension{});
  ext.signer = signer;
  ext.sig_kind = kind;
  ext.signature.clear();
  if (kind == SignatureKind::kSingle) ext.dest_reply.clear();
  *slot = ext;
  ext.signature = registry.sign(signer, canonical_bytes(copy, false));
  return ext;
}

bool verify(const RoutingMessage& msg, const SecurityExtension& ext,
            const KeyRegistry& registry) {
  RoutingMessage copy = msg;
  auto* slot = security_of(copy);
  if (slot == nullptr) return false;
  *slot = ext;
  if (!registry.verify(ext.signer, canonical_bytes(copy, false),
                       ext.signature)) {
    return false;
  }
  if (ext.sig_kind == SignatureKind::kSingle) return ext.dest_reply.empty();

  const auto* reply = std::get_if<Rrep>(&msg);
  if (reply == nullptr || ext.dest_reply.empty()) return false;
  RoutingMessage cached;
  try {
    cached = decode(ext.dest_reply);
  } catch (const DecodeError&) {
    return false;
  }
  const auto* original = std::get_if<Rrep>(&cached);
  if (original == nullptr || !original->security) return false;
  const SecurityExtension& inner = *original->security;
  return inner.sig_kind == SignatureKind::kSingle &&
         inner.signer == original->dst && original->dst == reply->dst &&
         original->dst_seq == reply->dst_seq &&
         verify(cached, inner, registry);
}

}  // namespace manet
