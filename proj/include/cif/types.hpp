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

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace cif {

// ---------------------------------------------------------------------------
// Identifiers

// 64-bit nonzero item identifier, rendered as 16 lowercase hex digits.
struct ItemId {
    std::uint64_t value = 0;

    constexpr auto operator<=>(const ItemId&) const = default;
    constexpr explicit operator bool() const { return value != 0; }
};

std::string to_hex(ItemId id);                       // exactly 16 lowercase hex digits
std::optional<ItemId> item_id_from_hex(std::string_view hex);

// ---------------------------------------------------------------------------
// Sections

enum class SectionKind : std::uint8_t {
    Metadata = 0,
    Relations = 1,
    Content = 2,
    Signatures = 3,
};
inline constexpr std::size_t kSectionCount = 4;
inline constexpr std::array<SectionKind, kSectionCount> kAllSections = {
    SectionKind::Metadata, SectionKind::Relations, SectionKind::Content, SectionKind::Signatures};

std::string_view section_name(SectionKind kind);
std::optional<SectionKind> section_from_name(std::string_view name);

enum class Protection : std::uint8_t {
    Writable = 0,
    AppendOnly = 1,
    ReadOnly = 2,
};

std::string_view protection_name(Protection p);

struct Extent {
    std::uint64_t start_page = 0;
    std::uint32_t page_count = 0;

    auto operator<=>(const Extent&) const = default;
};

struct SectionDescriptor {
    SectionKind kind = SectionKind::Metadata;
    Protection protection = Protection::Writable;
    std::uint64_t byte_length = 0;
    std::vector<Extent> extents;

    std::uint64_t allocated_pages() const;
    bool operator==(const SectionDescriptor&) const = default;
};

// ---------------------------------------------------------------------------
// Metadata

enum class ValueType : std::uint8_t {
    String = 0,
    Int64 = 1,
    Float64 = 2,
    Bool = 3,
    DateTimeMicros = 4,
    Bytes = 5,
    Table = 6,
};

std::string_view value_type_name(ValueType t);
std::optional<ValueType> value_type_from_name(std::string_view name);

enum class Multiplicity : std::uint8_t {
    Single = 0,
    Repeated = 1,
};

// Microseconds since the Unix epoch, unsigned.
struct DateTimeMicros {
    std::uint64_t micros = 0;
    auto operator<=>(const DateTimeMicros&) const = default;
};

// Scalar values: everything a table cell (or index posting) can hold.
using ScalarValue = std::variant<std::string,               // String
                                 std::int64_t,              // Int64
                                 double,                    // Float64
                                 bool,                      // Bool
                                 DateTimeMicros,            // DateTimeMicros
                                 std::vector<std::uint8_t>>; // Bytes

ValueType value_type_of(const ScalarValue& v);

struct TableColumn {
    std::string name;
    ValueType type = ValueType::String; // scalar types only, never Table

    bool operator==(const TableColumn&) const = default;
};

// Row-major cells; exactly columns.size() cells per row.
struct TableValue {
    std::vector<TableColumn> columns;
    std::vector<ScalarValue> cells;

    std::size_t row_count() const { return columns.empty() ? 0 : cells.size() / columns.size(); }
    bool operator==(const TableValue&) const = default;
};

using Value = std::variant<std::string,               // String
                           std::int64_t,              // Int64
                           double,                    // Float64
                           bool,                      // Bool
                           DateTimeMicros,            // DateTimeMicros
                           std::vector<std::uint8_t>, // Bytes
                           TableValue>;               // Table

ValueType value_type_of(const Value& v);
ScalarValue scalar_of(const Value& v); // precondition: not a Table
Value to_value(const ScalarValue& v);

// One fully self-described name/type/value pair. A Table entry always holds
// exactly one value with multiplicity Single.
struct MetadataEntry {
    std::string name;
    ValueType type = ValueType::String;
    Multiplicity multiplicity = Multiplicity::Single;
    std::vector<Value> values; // never empty

    bool operator==(const MetadataEntry&) const = default;
};

MetadataEntry make_entry(std::string name, Value value);
MetadataEntry make_repeated_entry(std::string name, ValueType type, std::vector<Value> values);

// ---------------------------------------------------------------------------
// Relations

enum class TargetKind : std::uint8_t {
    ItemIdTarget = 0,
    SeriesIdTarget = 1,
};

inline constexpr std::uint16_t kRelationPreviousVersion = 1;
inline constexpr std::uint16_t kRelationRenditionOf = 2;
inline constexpr std::uint16_t kRelationReferences = 3;
inline constexpr std::uint16_t kRelationFirstUserType = 1000;

struct Relation {
    TargetKind target_kind = TargetKind::ItemIdTarget;
    std::uint16_t relation_type = 0; // nonzero; 1..3 reserved, >=1000 user-defined
    std::uint64_t target = 0;

    bool operator==(const Relation&) const = default;
};

// ---------------------------------------------------------------------------
// Signatures

enum class SignatureAlgorithm : std::uint8_t {
    HmacSha256 = 0,
    Ed25519 = 1,
};

// One covered byte range over the logical payload of a section. Offsets are
// logical, so physical extent reorganization never invalidates a record.
struct CoveredRange {
    SectionKind section = SectionKind::Content;
    std::uint64_t offset = 0;
    std::uint64_t length = 0;

    bool operator==(const CoveredRange&) const = default;
};

struct SignatureRecord {
    std::uint8_t algorithm = 0; // SignatureAlgorithm; raw so unknown ids round-trip
    std::string signer_id;
    DateTimeMicros signed_at;
    std::vector<CoveredRange> covered;
    std::vector<std::uint8_t> signature_bytes;

    bool operator==(const SignatureRecord&) const = default;
};

// ---------------------------------------------------------------------------
// Whole-item model

inline constexpr std::array<std::uint8_t, 4> kMagic = {'C', 'I', 'F', '1'};
inline constexpr std::uint16_t kFormatVersion = 1;
inline constexpr std::uint32_t kMinPageSize = 512;
inline constexpr std::uint32_t kMaxPageSize = 65536;
inline constexpr std::uint32_t kDefaultPageSize = 1024;

bool page_size_valid(std::uint32_t page_size);

// The decoded value of one container file. Physical layout (page size,
// extents, padding) is not part of the value: decode(encode(x)) == x.
struct ItemFile {
    std::uint16_t format_version = kFormatVersion;
    ItemId item_id;
    std::uint64_t series_id = 0;
    std::uint32_t version_id = 1;
    std::array<Protection, kSectionCount> protection = {
        Protection::Writable, Protection::Writable, Protection::Writable, Protection::AppendOnly};

    std::vector<MetadataEntry> metadata;
    std::vector<Relation> relations;
    std::vector<std::uint8_t> content;
    std::vector<SignatureRecord> signatures;

    Protection& protection_of(SectionKind kind) { return protection[static_cast<std::size_t>(kind)]; }
    Protection protection_of(SectionKind kind) const { return protection[static_cast<std::size_t>(kind)]; }

    bool operator==(const ItemFile&) const = default;
};

// Header as materialized on page 0.
struct ItemHeader {
    std::uint16_t format_version = kFormatVersion;
    std::uint32_t page_size = kDefaultPageSize;
    ItemId item_id;
    std::uint64_t series_id = 0;
    std::uint32_t version_id = 1;
    std::array<SectionDescriptor, kSectionCount> directory;

    SectionDescriptor& descriptor(SectionKind kind) { return directory[static_cast<std::size_t>(kind)]; }
    const SectionDescriptor& descriptor(SectionKind kind) const {
        return directory[static_cast<std::size_t>(kind)];
    }
};

// Directory capacity: the header must fit page 0, so small pages carry fewer
// extent slots per section.
std::size_t max_extents_per_section(std::uint32_t page_size);

// ---------------------------------------------------------------------------
// Small utilities shared across modules

bool utf8_valid(std::string_view text);
std::string sha256_hex(const std::uint8_t* data, std::size_t len);
std::string sha256_file_hex(const std::string& path);

} // namespace cif
