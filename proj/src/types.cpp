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

#include "cif/types.hpp"

#include <sodium.h>

#include <bit>
#include <cstdio>
#include <fstream>

#include "cif/errors.hpp"

namespace cif {

std::string_view error_code_name(ErrorCode code) {
    switch (code) {
    case ErrorCode::InvalidItem: return "INVALID_ITEM";
    case ErrorCode::PageSizeInvalid: return "PAGE_SIZE_INVALID";
    case ErrorCode::BadMagic: return "BAD_MAGIC";
    case ErrorCode::Truncated: return "TRUNCATED";
    case ErrorCode::CorruptDirectory: return "CORRUPT_DIRECTORY";
    case ErrorCode::CorruptSection: return "CORRUPT_SECTION";
    case ErrorCode::ProtectionViolation: return "PROTECTION_VIOLATION";
    case ErrorCode::ProtectionDowngrade: return "PROTECTION_DOWNGRADE";
    case ErrorCode::SealedFile: return "SEALED_FILE";
    case ErrorCode::UnknownSection: return "UNKNOWN_SECTION";
    case ErrorCode::NotFound: return "NOT_FOUND";
    case ErrorCode::IdCollision: return "ID_COLLISION";
    case ErrorCode::StoreSealed: return "STORE_SEALED";
    case ErrorCode::IoFailure: return "IO_FAILURE";
    case ErrorCode::RangeOutOfBounds: return "RANGE_OUT_OF_BOUNDS";
    case ErrorCode::OperatorTypeMismatch: return "OPERATOR_TYPE_MISMATCH";
    case ErrorCode::CatalogRebuilding: return "CATALOG_REBUILDING";
    }
    return "UNKNOWN_ERROR";
}

std::string to_hex(ItemId id) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(id.value));
    return std::string(buf, 16);
}

std::optional<ItemId> item_id_from_hex(std::string_view hex) {
    if (hex.size() != 16) return std::nullopt;
    std::uint64_t v = 0;
    for (char c : hex) {
        v <<= 4;
        if (c >= '0' && c <= '9') v |= static_cast<std::uint64_t>(c - '0');
        else if (c >= 'a' && c <= 'f') v |= static_cast<std::uint64_t>(c - 'a' + 10);
        else return std::nullopt;
    }
    if (v == 0) return std::nullopt;
    return ItemId{v};
}

std::string_view section_name(SectionKind kind) {
    switch (kind) {
    case SectionKind::Metadata: return "metadata";
    case SectionKind::Relations: return "relations";
    case SectionKind::Content: return "content";
    case SectionKind::Signatures: return "signatures";
    }
    return "?";
}

std::optional<SectionKind> section_from_name(std::string_view name) {
    for (SectionKind kind : kAllSections)
        if (section_name(kind) == name) return kind;
    return std::nullopt;
}

std::string_view protection_name(Protection p) {
    switch (p) {
    case Protection::Writable: return "writable";
    case Protection::AppendOnly: return "append_only";
    case Protection::ReadOnly: return "read_only";
    }
    return "?";
}

std::uint64_t SectionDescriptor::allocated_pages() const {
    std::uint64_t total = 0;
    for (const Extent& e : extents) total += e.page_count;
    return total;
}

std::string_view value_type_name(ValueType t) {
    switch (t) {
    case ValueType::String: return "string";
    case ValueType::Int64: return "int";
    case ValueType::Float64: return "float";
    case ValueType::Bool: return "bool";
    case ValueType::DateTimeMicros: return "datetime";
    case ValueType::Bytes: return "bytes";
    case ValueType::Table: return "table";
    }
    return "?";
}

std::optional<ValueType> value_type_from_name(std::string_view name) {
    for (auto t : {ValueType::String, ValueType::Int64, ValueType::Float64, ValueType::Bool,
                   ValueType::DateTimeMicros, ValueType::Bytes, ValueType::Table})
        if (value_type_name(t) == name) return t;
    return std::nullopt;
}

ValueType value_type_of(const ScalarValue& v) {
    return static_cast<ValueType>(v.index());
}

ValueType value_type_of(const Value& v) {
    return static_cast<ValueType>(v.index());
}

ScalarValue scalar_of(const Value& v) {
    return std::visit(
        [](const auto& x) -> ScalarValue {
            if constexpr (std::is_same_v<std::decay_t<decltype(x)>, TableValue>)
                throw CifError(ErrorCode::InvalidItem, "table value where scalar expected");
            else
                return ScalarValue(x);
        },
        v);
}

Value to_value(const ScalarValue& v) {
    return std::visit([](const auto& x) { return Value(x); }, v);
}

MetadataEntry make_entry(std::string name, Value value) {
    MetadataEntry e;
    e.name = std::move(name);
    e.type = value_type_of(value);
    e.multiplicity = Multiplicity::Single;
    e.values.push_back(std::move(value));
    return e;
}

MetadataEntry make_repeated_entry(std::string name, ValueType type, std::vector<Value> values) {
    MetadataEntry e;
    e.name = std::move(name);
    e.type = type;
    e.multiplicity = Multiplicity::Repeated;
    e.values = std::move(values);
    return e;
}

bool page_size_valid(std::uint32_t page_size) {
    return page_size >= kMinPageSize && page_size <= kMaxPageSize && std::has_single_bit(page_size);
}

std::size_t max_extents_per_section(std::uint32_t page_size) {
    return page_size >= 1024 ? 16 : 8;
}

bool utf8_valid(std::string_view text) {
    std::size_t i = 0;
    const std::size_t n = text.size();
    while (i < n) {
        const auto b0 = static_cast<std::uint8_t>(text[i]);
        std::size_t len;
        std::uint32_t cp;
        if (b0 < 0x80) {
            i += 1;
            continue;
        } else if ((b0 & 0xE0) == 0xC0) {
            len = 2;
            cp = b0 & 0x1Fu;
        } else if ((b0 & 0xF0) == 0xE0) {
            len = 3;
            cp = b0 & 0x0Fu;
        } else if ((b0 & 0xF8) == 0xF0) {
            len = 4;
            cp = b0 & 0x07u;
        } else {
            return false;
        }
        if (i + len > n) return false;
        for (std::size_t k = 1; k < len; ++k) {
            const auto b = static_cast<std::uint8_t>(text[i + k]);
            if ((b & 0xC0) != 0x80) return false;
            cp = (cp << 6) | (b & 0x3Fu);
        }
        // reject overlong forms, surrogates, and out-of-range code points
        if (len == 2 && cp < 0x80) return false;
        if (len == 3 && cp < 0x800) return false;
        if (len == 4 && cp < 0x10000) return false;
        if (cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) return false;
        i += len;
    }
    return true;
}

std::string sha256_hex(const std::uint8_t* data, std::size_t len) {
    std::uint8_t digest[crypto_hash_sha256_BYTES];
    crypto_hash_sha256(digest, data, len);
    std::string out;
    out.reserve(crypto_hash_sha256_BYTES * 2);
    static const char* kHex = "0123456789abcdef";
    for (std::uint8_t b : digest) {
        out.push_back(kHex[b >> 4]);
        out.push_back(kHex[b & 0xF]);
    }
    return out;
}

std::string sha256_file_hex(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(ErrorCode::IoFailure, "cannot open " + path);
    crypto_hash_sha256_state st;
    crypto_hash_sha256_init(&st);
    char buf[1 << 16];
    while (in) {
        in.read(buf, sizeof(buf));
        const auto got = static_cast<std::size_t>(in.gcount());
        if (got > 0) crypto_hash_sha256_update(&st, reinterpret_cast<const std::uint8_t*>(buf), got);
    }
    std::uint8_t digest[crypto_hash_sha256_BYTES];
    crypto_hash_sha256_final(&st, digest);
    std::string out;
    static const char* kHex = "0123456789abcdef";
    for (std::uint8_t b : digest) {
        out.push_back(kHex[b >> 4]);
        out.push_back(kHex[b & 0xF]);
    }
    return out;
}

} // namespace cif
