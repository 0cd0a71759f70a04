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

#include "cif/types.hpp"

namespace cif {

// Raises InvalidItem when any model invariant is violated.
void validate_item(const ItemFile& item);

// Encodes an item into a fresh container: page 0 header, then each non-empty
// section in canonical order (metadata, relations, content, signatures), one
// contiguous extent per section. Output length is a whole multiple of
// page_size and unused page tails are zero.
std::vector<std::uint8_t> encode_item(const ItemFile& item, std::uint32_t page_size);

struct DecodedItem {
    ItemFile item;
    std::uint32_t page_size = 0;
    ItemHeader header; // physical directory as stored
};

// Decodes an arbitrary byte sequence; consults nothing but the bytes.
// Raises BadMagic / Truncated / CorruptDirectory / CorruptSection.
DecodedItem decode_item(std::span<const std::uint8_t> bytes);

// Encoded logical payload of one section of `item` (content is returned as-is).
std::vector<std::uint8_t> section_payload(const ItemFile& item, SectionKind kind);

// Reassembles a section's logical payload out of its extents.
std::vector<std::uint8_t> gather_section(std::span<const std::uint8_t> file_bytes,
                                         const SectionDescriptor& descriptor,
                                         std::uint32_t page_size);

} // namespace cif
