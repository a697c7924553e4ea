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

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "manet/crypto.hpp"

namespace manet {
namespace {

using testing::sha256;
using testing::sha256_fold;

Bytes seed_bytes(std::uint8_t fill) { return Bytes(32, fill); }

TEST(HashFunction, MatchesLibcryptoSha256) {
  HashFunction h;
  EXPECT_EQ(h.digest_size(), 32u);
  const Bytes in = {'a', 'b', 'c'};
  EXPECT_EQ(h(in), sha256(in));
}

TEST(HashFunction, RejectsUnknownDigest) {
  EXPECT_THROW(HashFunction("NOT-A-DIGEST"), std::invalid_argument);
}

TEST(ChainInit, RejectsZeroLength) {
  HashFunction h;
  EXPECT_THROW(chain_init(h, seed_bytes(1), 0), std::invalid_argument);
}

TEST(ChainInit, SingleApplication) {
  HashFunction h;
  const auto pair = chain_init(h, seed_bytes(1), 1);
  EXPECT_EQ(pair.hash, seed_bytes(1));
  EXPECT_EQ(pair.top_hash, sha256(seed_bytes(1)));
}

TEST(ChainInit, TenFoldMatchesIterativeOracle) {
  HashFunction h;
  const auto pair = chain_init(h, seed_bytes(2), 10);
  EXPECT_EQ(pair.top_hash, sha256_fold(seed_bytes(2), 10));
}

TEST(ChainStep, IsOneHashApplication) {
  HashFunction h;
  const Bytes s = seed_bytes(3);
  EXPECT_EQ(chain_step(h, s), sha256(s));
  Bytes v = s;
  for (int k = 1; k <= 25; ++k) {
    v = chain_step(h, v);
    EXPECT_EQ(v, sha256_fold(s, k));
    EXPECT_EQ(v.size(), h.digest_size());
  }
}

TEST(ChainVerify, HonestForwardsVerifyAtEveryHop) {
  HashFunction h;
  constexpr std::uint32_t kMax = 30;
  const auto pair = chain_init(h, seed_bytes(4), kMax);
  Bytes hash = pair.hash;
  for (std::uint32_t k = 0; k <= kMax; ++k) {
    EXPECT_TRUE(chain_verify(h, hash, pair.top_hash, k, kMax)) << k;
    if (k > 0) {
      EXPECT_FALSE(chain_verify(h, hash, pair.top_hash, k - 1, kMax)) << k;
    }
    hash = chain_step(h, hash);
  }
}

TEST(ChainVerify, RejectsHopCountBeyondMaximum) {
  HashFunction h;
  const auto pair = chain_init(h, seed_bytes(5), 5);
  EXPECT_FALSE(chain_verify(h, pair.hash, pair.top_hash, 6, 5));
}

TEST(ChainVerify, RejectsWrongLengthInputs) {
  HashFunction h;
  const auto pair = chain_init(h, seed_bytes(5), 5);
  EXPECT_FALSE(chain_verify(h, Bytes(31, 0), pair.top_hash, 0, 5));
  EXPECT_FALSE(chain_verify(h, pair.hash, Bytes(), 0, 5));
}

// Lengthening a route is not detectable: hashing extra times and raising the
// hop count by the same amount still verifies.
TEST(ChainVerify, IncreaseIsUndetectable) {
  HashFunction h;
  const auto pair = chain_init(h, seed_bytes(6), 20);
  Bytes hash = chain_step(h, chain_step(h, pair.hash));  // honest k = 2
  for (std::uint32_t extra = 1; extra <= 5; ++extra) {
    hash = chain_step(h, hash);
    EXPECT_TRUE(chain_verify(h, hash, pair.top_hash, 2 + extra, 20));
  }
}

// --- signatures --------------------------------------------------------------

class SignatureTest : public ::testing::TestWithParam<SignatureScheme> {
 protected:
  CryptoSuite suite = testing::make_suite(8, GetParam());
};

Rreq sample_rreq() {
  Rreq q{2, 10, 3, 5, 4, 0, 30, SecurityExtension{}};
  q.security->hash = Bytes(32, 1);
  q.security->top_hash = Bytes(32, 2);
  q.security->max_hop_count = 30;
  return q;
}

TEST_P(SignatureTest, SignThenVerify) {
  Rreq q = sample_rreq();
  q.security = sign(q, 2, suite.keys, SignatureKind::kSingle);
  EXPECT_EQ(q.security->signer, 2u);
  EXPECT_TRUE(verify(q, *q.security, suite.keys));
}

TEST_P(SignatureTest, FlippingAnyNonMutableFieldBreaksSignature) {
  Rreq q = sample_rreq();
  q.security = sign(q, 2, suite.keys, SignatureKind::kSingle);
  const std::vector<std::function<void(Rreq&)>> flips = {
      [](Rreq& m) { m.src ^= 1; },          [](Rreq& m) { m.src_seq ^= 1; },
      [](Rreq& m) { m.broadcast_id ^= 1; }, [](Rreq& m) { m.dst ^= 1; },
      [](Rreq& m) { m.dst_seq ^= 1; },
      [](Rreq& m) { m.security->top_hash[7] ^= 0x10; },
      [](Rreq& m) { m.security->max_hop_count ^= 1; },
  };
  for (std::size_t i = 0; i < flips.size(); ++i) {
    Rreq t = q;
    flips[i](t);
    EXPECT_FALSE(verify(t, *t.security, suite.keys)) << "flip " << i;
  }
}

TEST_P(SignatureTest, OtherNodesKeyDoesNotVerify) {
  Rreq q = sample_rreq();
  q.security = sign(q, 2, suite.keys, SignatureKind::kSingle);
  SecurityExtension ext = *q.security;
  ext.signer = 3;
  EXPECT_FALSE(verify(q, ext, suite.keys));
}

TEST_P(SignatureTest, HopCountAndHashAreNotSigned) {
  Rreq q = sample_rreq();
  q.security = sign(q, 2, suite.keys, SignatureKind::kSingle);
  q.hop_count = 9;
  q.ttl = 1;
  q.security->hash = Bytes(32, 0xEE);
  EXPECT_TRUE(verify(q, *q.security, suite.keys));
}

TEST_P(SignatureTest, UnknownSignerThrows) {
  EXPECT_THROW(sign(sample_rreq(), 99, suite.keys, SignatureKind::kSingle), KeyNotFound);
}

TEST_P(SignatureTest, MessagesWithoutSecuritySlotCannotBeSigned) {
  EXPECT_THROW(sign(DataPacket{}, 1, suite.keys, SignatureKind::kSingle),
               std::invalid_argument);
}

Rrep signed_dest_reply(const CryptoSuite& suite, NodeId dst, SeqNum seq) {
  Rrep r{0, dst, seq, 0, 20.0, kNoNode, SecurityExtension{}};
  r.security->hash = Bytes(32, 1);
  r.security->top_hash = Bytes(32, 2);
  r.security->max_hop_count = 30;
  r.security = sign(r, dst, suite.keys, SignatureKind::kSingle);
  return r;
}

Rrep double_signed(const CryptoSuite& suite, NodeId replier, const Rrep& original,
                   SeqNum seq) {
  Rrep r{0, original.dst, seq, 2, 15.0, 4, SecurityExtension{}};
  r.security->hash = Bytes(32, 3);
  r.security->top_hash = Bytes(32, 4);
  r.security->max_hop_count = 30;
  r.security->dest_reply = canonical_bytes(original, true);
  r.security = sign(r, replier, suite.keys, SignatureKind::kDouble);
  return r;
}

TEST_P(SignatureTest, DoubleSignatureNeedsTheDestinationsReply) {
  const Rrep original = signed_dest_reply(suite, 5, 9);
  const Rrep reply = double_signed(suite, 3, original, 9);
  EXPECT_TRUE(verify(reply, *reply.security, suite.keys));

  // Cached reply signed by someone other than its destination.
  Rrep forged = original;
  forged.security = sign(forged, 6, suite.keys, SignatureKind::kSingle);
  const Rrep bad_inner = double_signed(suite, 3, forged, 9);
  EXPECT_FALSE(verify(bad_inner, *bad_inner.security, suite.keys));

  // Sequence number raised above what the destination signed.
  const Rrep inflated = double_signed(suite, 3, original, 10);
  EXPECT_FALSE(verify(inflated, *inflated.security, suite.keys));

  // Tampered cached bytes.
  Rrep corrupted = reply;
  corrupted.security->dest_reply.back() ^= 1;
  EXPECT_FALSE(verify(corrupted, *corrupted.security, suite.keys));
}

TEST_P(SignatureTest, SingleSignatureMustNotCarryCachedReply) {
  Rrep r = signed_dest_reply(suite, 5, 9);
  SecurityExtension ext = *r.security;
  ext.dest_reply = {1, 2, 3};
  EXPECT_FALSE(verify(r, ext, suite.keys));
}

INSTANTIATE_TEST_SUITE_P(Schemes, SignatureTest,
                         ::testing::Values(SignatureScheme::kEd25519,
                                           SignatureScheme::kHmacSha256),
                         [](const auto& info) {
                           return info.param == SignatureScheme::kEd25519 ? "Ed25519"
                                                                          : "HmacSha256";
                         });

TEST(KeyRegistry, ProvisioningIsDeterministic) {
  auto a = KeyRegistry::provision(4, 42, SignatureScheme::kEd25519);
  auto b = KeyRegistry::provision(4, 42, SignatureScheme::kEd25519);
  const Bytes msg = {1, 2, 3};
  EXPECT_EQ(a.sign(1, msg), b.sign(1, msg));
  EXPECT_TRUE(b.verify(1, msg, a.sign(1, msg)));
  EXPECT_EQ(a.size(), 4u);
  EXPECT_FALSE(a.contains(4));
}

TEST(SignatureSchemeNames, RoundTrip) {
  for (auto s : {SignatureScheme::kEd25519, SignatureScheme::kHmacSha256}) {
    EXPECT_EQ(parse_signature_scheme(signature_scheme_name(s)), s);
  }
  EXPECT_THROW(parse_signature_scheme("rsa"), std::invalid_argument);
}

}  // namespace
}  // namespace manet
