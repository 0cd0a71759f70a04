// Copyright 2026 the cif authors
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

#include "cif/signatures.hpp"

#include <sodium.h>

#include <algorithm>

#include "cif/errors.hpp"
#include "cif/wire.hpp"

namespace cif {

std::string_view verify_status_name(VerifyStatus s) {
    switch (s) {
    case VerifyStatus::Valid: return "VALID";
    case VerifyStatus::Invalid: return "INVALID";
    case VerifyStatus::AlgorithmUnsupported: return "ALGORITHM_UNSUPPORTED";
    }
    return "?";
}

namespace {

void check_ranges(const ItemFileHandle& handle, const std::vector<CoveredRange>& covered) {
    for (const CoveredRange& c : covered) {
        if (c.section == SectionKind::Signatures)
            raise(ErrorCode::RangeOutOfBounds, "signatures section cannot be covered");
        const std::uint64_t len = handle.header().descriptor(c.section).byte_length;
        if (c.offset > len || c.length > len - c.offset)
            raise(ErrorCode::RangeOutOfBounds,
                  std::string(section_name(c.section)) + " range " + std::to_string(c.offset) + "+" +
                      std::to_string(c.length) + " exceeds payload of " + std::to_string(len));
    }
}

// Returns nullopt when a covered range no longer fits its section.
std::optional<std::vector<std::uint8_t>> try_digest_input(const ItemFileHandle& handle,
                                                          const std::vector<CoveredRange>& covered) {
    wire::Writer w;
    w.u16(handle.header().format_version);
    w.u64(handle.header().item_id.value);
    w.u64(handle.header().series_id);
    w.u32(handle.header().version_id);
    for (const CoveredRange& c : covered) {
        if (c.section == SectionKind::Signatures) return std::nullopt;
        const std::uint64_t len = handle.header().descriptor(c.section).byte_length;
        if (c.offset > len || c.length > len - c.offset) return std::nullopt;
        w.u8(static_cast<std::uint8_t>(c.section));
        w.u64(c.offset);
        w.u64(c.length);
        const auto payload = handle.read_section(c.section);
        w.bytes(std::span(payload).subspan(c.offset, c.length));
    }
    return w.take();
}

} // namespace

std::vector<std::uint8_t> canonical_digest_input(const ItemFileHandle& handle,
                                                 const std::vector<CoveredRange>& covered) {
    check_ranges(handle, covered);
    return *try_digest_input(handle, covered);
}

std::vector<std::uint8_t> hmac_sha256(std::span<const std::uint8_t> key,
                                      std::span<const std::uint8_t> message) {
    // crypto_auth_hmacsha256 wants a fixed 32-byte key; fold arbitrary key
    // material through SHA-256 first, as HMAC implementations do for long keys
    std::uint8_t folded[crypto_hash_sha256_BYTES];
    crypto_hash_sha256(folded, key.data(), key.size());
    std::vector<std::uint8_t> mac(crypto_auth_hmacsha256_BYTES);
    crypto_auth_hmacsha256_state st;
    crypto_auth_hmacsha256_init(&st, folded, sizeof(folded));
    crypto_auth_hmacsha256_update(&st, message.data(), message.size());
    crypto_auth_hmacsha256_final(&st, mac.data());
    return mac;
}

Ed25519KeyPair ed25519_generate() {
    if (sodium_init() < 0) raise(ErrorCode::IoFailure, "libsodium init failed");
    Ed25519KeyPair kp;
    kp.public_key.resize(crypto_sign_PUBLICKEYBYTES);
    kp.secret_key.resize(crypto_sign_SECRETKEYBYTES);
    crypto_sign_keypair(kp.public_key.data(), kp.secret_key.data());
    return kp;
}

std::size_t sign_item(ItemFileHandle& handle, const std::vector<CoveredRange>& covered,
                      SignatureAlgorithm algorithm, std::span<const std::uint8_t> key,
                      const std::string& signer_id, DateTimeMicros signed_at,
                      bool override_read_only) {
    check_ranges(handle, covered);
    const auto message = *try_digest_input(handle, covered);

    SignatureRecord record;
    record.algorithm = static_cast<std::uint8_t>(algorithm);
    record.signer_id = signer_id;
    record.signed_at = signed_at;
    record.covered = covered;
    switch (algorithm) {
    case SignatureAlgorithm::HmacSha256:
        record.signature_bytes = hmac_sha256(key, message);
        break;
    case SignatureAlgorithm::Ed25519: {
        if (key.size() != crypto_sign_SECRETKEYBYTES)
            raise(ErrorCode::InvalidItem, "ed25519 signing key must be 64 bytes");
        record.signature_bytes.resize(crypto_sign_BYTES);
        crypto_sign_detached(record.signature_bytes.data(), nullptr, message.data(), message.size(),
                             key.data());
        break;
    }
    }

    const auto prior = wire::decode_signatures_payload(handle.read_section(SectionKind::Signatures));
    handle.append_signature(record, override_read_only);
    return prior.size();
}

VerifyStatus verify_item(const ItemFileHandle& handle, std::size_t record_index,
                         std::span<const std::uint8_t> key) {
    const auto records = wire::decode_signatures_payload(handle.read_section(SectionKind::Signatures));
    if (record_index >= records.size())
        raise(ErrorCode::NotFound, "no signature record " + std::to_string(record_index));
    const SignatureRecord& record = records[record_index];

    const auto message = try_digest_input(handle, record.covered);
    if (!message.has_value()) return VerifyStatus::Invalid; // covered range no longer exists

    if (record.algorithm == static_cast<std::uint8_t>(SignatureAlgorithm::HmacSha256)) {
        const auto expected = hmac_sha256(key, *message);
        if (expected.size() != record.signature_bytes.size()) return VerifyStatus::Invalid;
        return sodium_memcmp(expected.data(), record.signature_bytes.data(), expected.size()) == 0
                   ? VerifyStatus::Valid
                   : VerifyStatus::Invalid;
    }
    if (record.algorithm == static_cast<std::uint8_t>(SignatureAlgorithm::Ed25519)) {
        if (key.size() != crypto_sign_PUBLICKEYBYTES) return VerifyStatus::Invalid;
        if (record.signature_bytes.size() != crypto_sign_BYTES) return VerifyStatus::Invalid;
        return crypto_sign_verify_detached(record.signature_bytes.data(), message->data(),
                                           message->size(), key.data()) == 0
                   ? VerifyStatus::Valid
                   : VerifyStatus::Invalid;
    }
    return VerifyStatus::AlgorithmUnsupported;
}

} // namespace cif
