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

#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "manet/messages.hpp"

namespace manet {

using ByteView = std::span<const std::uint8_t>;

/// A one-way hash function selected by OpenSSL digest name ("SHA256",
/// "SHA512", "SHA3-256", ...).
class HashFunction {
 public:
  explicit HashFunction(std::string name = "SHA256");

  Bytes operator()(ByteView data) const;
  std::size_t digest_size() const { return digest_size_; }
  const std::string& name() const { return name_; }

 private:
  std::string name_;
  const void* md_;  // const EVP_MD*
  std::size_t digest_size_;
};

// ---------------------------------------------------------------------------
// Hash chains over the hop count

struct ChainPair {
  Bytes hash;
  Bytes top_hash;
};

/// hash = seed, top_hash = H^max_hop_count(seed).
/// Throws std::invalid_argument when max_hop_count < 1.
ChainPair chain_init(const HashFunction& h, ByteView seed,
                     std::uint32_t max_hop_count);

/// One hop's worth of re-hashing: H(hash).
Bytes chain_step(const HashFunction& h, ByteView hash);

/// True iff hop_count <= max_hop_count and
/// H^(max_hop_count - hop_count)(hash) == top_hash.
bool chain_verify(const HashFunction& h, ByteView hash, ByteView top_hash,
                  std::uint32_t hop_count, std::uint32_t max_hop_count);

// ---------------------------------------------------------------------------
// Signatures

enum class SignatureScheme {
  kEd25519,     // deterministic public-key signatures
  kHmacSha256,  // keyed-MAC surrogate; verifier looks keys up in the registry
};

std::string_view signature_scheme_name(SignatureScheme s);
SignatureScheme parse_signature_scheme(std::string_view name);

class KeyNotFound : public std::out_of_range {
 public:
  explicit KeyNotFound(NodeId id);
};

/// Per-node key pairs, provisioned once at scenario start. Read-only after
/// construction and safe to share across threads.
class KeyRegistry {
 public:
  /// Derives one key pair per node in [0, node_count) from `seed`.
  static KeyRegistry provision(std::size_t node_count, std::uint64_t seed,
                               SignatureScheme scheme);

  KeyRegistry();
  ~KeyRegistry();
  KeyRegistry(KeyRegistry&&) noexcept;
  KeyRegistry& operator=(KeyRegistry&&) noexcept;

  bool contains(NodeId id) const;
  std::size_t size() const;
  SignatureScheme scheme() const { return scheme_; }

  Bytes sign(NodeId signer, ByteView message) const;
  bool verify(NodeId signer, ByteView message, ByteView signature) const;

 private:
  struct Keys;
  SignatureScheme scheme_ = SignatureScheme::kEd25519;
  std::vector<std::unique_ptr<Keys>> keys_;
};

/// Signs the non-mutable image of `msg`. The chain fields (and, for kDouble,
/// `dest_reply`) are taken from the extension already attached to msg; the
/// returned extension is that one completed with signer, kind and signature.
/// Throws KeyNotFound for an unknown signer.
SecurityExtension sign(const RoutingMessage& msg, NodeId signer,
                       const KeyRegistry& registry, SignatureKind kind);

/// Checks `ext` against msg's non-mutable image. kDouble additionally
/// requires `dest_reply` to be a single-signed reply by the destination for
/// the same destination and sequence number.
bool verify(const RoutingMessage& msg, const SecurityExtension& ext,
            const KeyRegistry& registry);

/// Hash function plus key registry shared by every secured node in a run.
struct CryptoSuite {
  HashFunction hash;
  KeyRegistry keys;
};

}  // namespace manet
