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

#pragma once

#include <span>
#include <vector>

#include "cif/item_file_handle.hpp"
#include "cif/types.hpp"

namespace cif {

enum class VerifyStatus {
    Valid,
    Invalid,
    AlgorithmUnsupported,
};

std::string_view verify_status_name(VerifyStatus s);

// The byte stream a signature binds: header identity fields followed by each
// covered range's declared coordinates and current payload bytes. Including
// the identity fields makes a record non-replayable onto another item.
//
//   format_version u16 | item_id u64 | series_id u64 | version_id u32
//   then per range: kind u8 | offset u64 | length u64 | payload bytes
std::vector<std::uint8_t> canonical_digest_input(const ItemFileHandle& handle,
                                                 const std::vector<CoveredRange>& covered);

// Validates the ranges against current section byte lengths, computes the
// signature and appends the record. Returns the new record's index.
// `override_read_only` carries the store's sign-after-seal policy.
std::size_t sign_item(ItemFileHandle& handle, const std::vector<CoveredRange>& covered,
                      SignatureAlgorithm algorithm, std::span<const std::uint8_t> key,
                      const std::string& signer_id, DateTimeMicros signed_at,
                      bool override_read_only);

// Recomputes the digest over the file's current bytes and checks record
// `index` against it.
VerifyStatus verify_item(const ItemFileHandle& handle, std::size_t record_index,
                         std::span<const std::uint8_t> key);

// HMAC-SHA256 / Ed25519 primitives (exposed for the CLI key tooling).
std::vector<std::uint8_t> hmac_sha256(std::span<const std::uint8_t> key,
                                      std::span<const std::uint8_t> message);
struct Ed25519KeyPair {
    std::vector<std::uint8_t> public_key;  // 32 bytes
    std::vector<std::uint8_t> secret_key;  // 64 bytes
};
Ed25519KeyPair ed25519_generate();

} // namespace cif
