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

#include "cif/wire.hpp"

#include <zlib.h>

#include <algorithm>
#include <limits>

namespace cif::wire {

void Writer::str16(std::string_view s) {
    if (s.size() > std::numeric_limits<std::uint16_t>::max())
        raise(ErrorCode::InvalidItem, "string exceeds 65535 bytes");
    u16(static_cast<std::uint16_t>(s.size()));
    buf_.insert(buf_.end(), s.begin(), s.end());
}

void Writer::blob32(std::span<const std::uint8_t> data) {
    if (data.size() > std::numeric_limits<std::uint32_t>::max())
        raise(ErrorCode::InvalidItem, "blob exceeds u32 length");
    u32(static_cast<std::uint32_t>(data.size()));
    bytes(data);
}

std::string Reader::str16() {
    const std::uint16_t len = u16();
    auto s = raw(len);
    return std::string(reinterpret_cast<const char*>(s.data()), s.size());
}

std::vector<std::uint8_t> Reader::blob32() {
    const std::uint32_t len = u32();
    auto s = raw(len);
    return std::vector<std::uint8_t>(s.begin(), s.end());
}

std::span<const std::uint8_t> Reader::raw(std::size_t n) {
    if (remaining() < n) raise(overrun_, "record overruns payload");
    auto out = data_.subspan(pos_, n);
    pos_ += n;
    return out;
}

// --- scalar values -----------------------------------------------------------

namespace {

void encode_scalar(Writer& w, ValueType type, const ScalarValue& v) {
    switch (type) {
    case ValueType::String: w.str16(std::get<std::string>(v)); return;
    case ValueType::Int64: w.i64(std::get<std::int64_t>(v)); return;
    case ValueType::Float64: w.f64(std::get<double>(v)); return;
    case ValueType::Bool: w.u8(std::get<bool>(v) ? 1 : 0); return;
    case ValueType::DateTimeMicros: w.u64(std::get<DateTimeMicros>(v).micros); return;
    case ValueType::Bytes: w.blob32(std::get<std::vector<std::uint8_t>>(v)); return;
    case ValueType::Table: break;
    }
    raise(ErrorCode::InvalidItem, "table where scalar expected");
}

ScalarValue decode_scalar(Reader& r, ValueType type) {
    switch (type) {
    case ValueType::String: {
        std::string s = r.str16();
        if (!utf8_valid(s)) raise(ErrorCode::CorruptSection, "string value is not valid UTF-8");
        return s;
    }
    case ValueType::Int64: return r.i64();
    case ValueType::Float64: return r.f64();
    case ValueType::Bool: {
        const std::uint8_t b = r.u8();
        if (b > 1) raise(ErrorCode::CorruptSection, "bool byte out of range");
        return b == 1;
    }
    case ValueType::DateTimeMicros: return DateTimeMicros{r.u64()};
    case ValueType::Bytes: return r.blob32();
    case ValueType::Table: break;
    }
    raise(ErrorCode::CorruptSection, "invalid scalar type tag");
}

ValueType decode_value_type(Reader& r, bool scalar_only) {
    const std::uint8_t t = r.u8();
    if (t > static_cast<std::uint8_t>(ValueType::Table) ||
        (scalar_only && t == static_cast<std::uint8_t>(ValueType::Table)))
        raise(ErrorCode::CorruptSection, "invalid value type tag");
    return static_cast<ValueType>(t);
}

std::string decode_name(Reader& r) {
    std::string name = r.str16();
    if (name.empty() || name.size() > 255 || !utf8_valid(name))
        raise(ErrorCode::CorruptSection, "bad name");
    return name;
}

void encode_table(Writer& w, const TableValue& t) {
    w.u16(static_cast<std::uint16_t>(t.columns.size()));
    for (const TableColumn& col : t.columns) {
        w.str16(col.name);
        w.u8(static_cast<std::uint8_t>(col.type));
    }
    w.u32(static_cast<std::uint32_t>(t.row_count()));
    std::size_t cell = 0;
    for (std::size_t row = 0; row < t.row_count(); ++row)
        for (const TableColumn& col : t.columns) encode_scalar(w, col.type, t.cells[cell++]);
}

TableValue decode_table(Reader& r) {
    TableValue t;
    const std::uint16_t cols = r.u16();
    t.columns.reserve(cols);
    for (std::uint16_t i = 0; i < cols; ++i) {
        TableColumn col;
        col.name = decode_name(r);
        col.type = decode_value_type(r, /*scalar_only=*/true);
        t.columns.push_back(std::move(col));
    }
    const std::uint32_t rows = r.u32();
    t.cells.reserve(static_cast<std::size_t>(rows) * cols);
    for (std::uint32_t row = 0; row < rows; ++row)
        for (const TableColumn& col : t.columns) t.cells.push_back(decode_scalar(r, col.type));
    return t;
}

} // namespace

// --- metadata ----------------------------------------------------------------

void encode_metadata_entry(Writer& w, const MetadataEntry& entry) {
    w.str16(entry.name);
    w.u8(static_cast<std::uint8_t>(entry.type));
    w.u8(static_cast<std::uint8_t>(entry.multiplicity));
    w.u32(static_cast<std::uint32_t>(entry.values.size()));
    for (const Value& v : entry.values) {
        if (entry.type == ValueType::Table)
            encode_table(w, std::get<TableValue>(v));
        else
            encode_scalar(w, entry.type, scalar_of(v));
    }
}

MetadataEntry decode_metadata_entry(Reader& r) {
    MetadataEntry entry;
    entry.name = decode_name(r);
    entry.type = decode_value_type(r, /*scalar_only=*/false);
    const std::uint8_t mult = r.u8();
    if (mult > 1) raise(ErrorCode::CorruptSection, "invalid multiplicity");
    entry.multiplicity = static_cast<Multiplicity>(mult);
    const std::uint32_t count = r.u32();
    if (count == 0) raise(ErrorCode::CorruptSection, "entry has no values");
    if (entry.multiplicity == Multiplicity::Single && count != 1)
        raise(ErrorCode::CorruptSection, "single entry with multiple values");
    if (entry.type == ValueType::Table && count != 1)
        raise(ErrorCode::CorruptSection, "table entry must hold one value");
    entry.values.reserve(count);
    for (std::uint32_t i = 0; i < count; ++i) {
        if (entry.type == ValueType::Table)
            entry.values.emplace_back(decode_table(r));
        else
            entry.values.push_back(to_value(decode_scalar(r, entry.type)));
    }
    return entry;
}

std::vector<std::uint8_t> encode_metadata_payload(const std::vector<MetadataEntry>& entries) {
    Writer w;
    for (const MetadataEntry& e : entries) encode_metadata_entry(w, e);
    return w.take();
}

std::vector<MetadataEntry> decode_metadata_payload(std::span<const std::uint8_t> payload) {
    Reader r(payload, ErrorCode::CorruptSection);
    std::vector<MetadataEntry> entries;
    while (!r.done()) entries.push_back(decode_metadata_entry(r));
    return entries;
}

// --- relations ---------------------------------------------------------------

std::vector<std::uint8_t> encode_relations_payload(const std::vector<Relation>& relations) {
    Writer w;
    for (const Relation& rel : relations) {
        w.u8(static_cast<std::uint8_t>(rel.target_kind));
        w.u16(rel.relation_type);
        w.u64(rel.target);
    }
    return w.take();
}

std::vector<Relation> decode_relations_payload(std::span<const std::uint8_t> payload) {
    Reader r(payload, ErrorCode::CorruptSection);
    std::vector<Relation> out;
    while (!r.done()) {
        Relation rel;
        const std::uint8_t kind = r.u8();
        if (kind > 1) raise(ErrorCode::CorruptSection, "invalid relation target kind");
        rel.target_kind = static_cast<TargetKind>(kind);
        rel.relation_type = r.u16();
        rel.target = r.u64();
        if (rel.relation_type == 0) raise(ErrorCode::CorruptSection, "relation type is zero");
        out.push_back(rel);
    }
    return out;
}

// --- signatures ----------------------------------------------------------------

std::vector<std::uint8_t> encode_signature_record(const SignatureRecord& record) {
    Writer body;
    body.u8(record.algorithm);
    body.str16(record.signer_id);
    body.u64(record.signed_at.micros);
    body.u16(static_cast<std::uint16_t>(record.covered.size()));
    for (const CoveredRange& c : record.covered) {
        body.u8(static_cast<std::uint8_t>(c.section));
        body.u64(c.offset);
        body.u64(c.length);
    }
    body.str16(std::string_view(reinterpret_cast<const char*>(record.signature_bytes.data()),
                                record.signature_bytes.size()));
    Writer w;
    w.u32(static_cast<std::uint32_t>(body.size() + 4)); // total record length, self included
    w.bytes(body.data());
    return w.take();
}

std::vector<std::uint8_t> encode_signatures_payload(const std::vector<SignatureRecord>& records) {
    Writer w;
    for (const SignatureRecord& rec : records) {
        auto bytes = encode_signature_record(rec);
        w.bytes(bytes);
    }
    return w.take();
}

std::vector<SignatureRecord> decode_signatures_payload(std::span<const std::uint8_t> payload) {
    Reader r(payload, ErrorCode::CorruptSection);
    std::vector<SignatureRecord> out;
    while (!r.done()) {
        const std::size_t start = r.pos();
        const std::uint32_t total = r.u32();
        if (total < 4) raise(ErrorCode::CorruptSection, "signature record length too small");
        SignatureRecord rec;
        rec.algorithm = r.u8();
        rec.signer_id = r.str16();
        if (!utf8_valid(rec.signer_id)) raise(ErrorCode::CorruptSection, "signer id not UTF-8");
        rec.signed_at = DateTimeMicros{r.u64()};
        const std::uint16_t ranges = r.u16();
        rec.covered.reserve(ranges);
        for (std::uint16_t i = 0; i < ranges; ++i) {
            CoveredRange c;
            const std::uint8_t kind = r.u8();
            if (kind >= kSectionCount) raise(ErrorCode::CorruptSection, "covered range section invalid");
            c.section = static_cast<SectionKind>(kind);
            c.offset = r.u64();
            c.length = r.u64();
            rec.covered.push_back(c);
        }
        const std::uint16_t sig_len = r.u16();
        auto sig = r.raw(sig_len);
        rec.signature_bytes.assign(sig.begin(), sig.end());
        if (r.pos() - start != total)
            raise(ErrorCode::CorruptSection, "signature record length mismatch");
        out.push_back(std::move(rec));
    }
    return out;
}

// --- header page --------------------------------------------------------------

namespace {

std::size_t header_serialized_size(const ItemHeader& header) {
    std::size_t n = kHeaderFixedBytes;
    for (const SectionDescriptor& d : header.directory)
        n += kDescriptorFixedBytes + d.extents.size() * kExtentBytes;
    return n;
}

std::uint32_t header_crc(std::span<const std::uint8_t> page) {
    // crc32 over the whole page with the crc field (bytes 32..36) zeroed
    uLong crc = crc32(0L, Z_NULL, 0);
    crc = crc32(crc, page.data(), 32);
    const std::uint8_t zeros[4] = {0, 0, 0, 0};
    crc = crc32(crc, zeros, 4);
    crc = crc32(crc, page.data() + 36, static_cast<uInt>(page.size() - 36));
    return static_cast<std::uint32_t>(crc);
}

} // namespace

std::vector<std::uint8_t> encode_header_page(const ItemHeader& header) {
    if (!page_size_valid(header.page_size))
        raise(ErrorCode::PageSizeInvalid, "page size " + std::to_string(header.page_size));
    if (header_serialized_size(header) > header.page_size)
        raise(ErrorCode::InvalidItem, "section directory does not fit the header page");

    Writer w;
    w.bytes(kMagic);
    w.u16(header.format_version);
    w.u16(0); // reserved
    w.u32(header.page_size);
    w.u32(header.version_id);
    w.u64(header.item_id.value);
    w.u64(header.series_id);
    w.u32(0); // crc placeholder
    for (const SectionDescriptor& d : header.directory) {
        w.u8(static_cast<std::uint8_t>(d.kind));
        w.u8(static_cast<std::uint8_t>(d.protection));
        w.u16(static_cast<std::uint16_t>(d.extents.size()));
        w.u64(d.byte_length);
        for (const Extent& e : d.extents) {
            w.u64(e.start_page);
            w.u32(e.page_count);
        }
    }
    std::vector<std::uint8_t> page = w.take();
    page.resize(header.page_size, 0);

    const std::uint32_t crc = header_crc(page);
    for (std::size_t i = 0; i < 4; ++i) page[32 + i] = static_cast<std::uint8_t>(crc >> (8 * i));
    return page;
}

std::uint32_t peek_page_size(std::span<const std::uint8_t> prefix) {
    if (prefix.size() < 4) raise(ErrorCode::Truncated, "shorter than the magic");
    if (!std::equal(kMagic.begin(), kMagic.end(), prefix.begin()))
        raise(ErrorCode::BadMagic, "not a cif container");
    if (prefix.size() < 12) raise(ErrorCode::Truncated, "header prefix incomplete");
    std::uint32_t page_size = 0;
    for (std::size_t i = 0; i < 4; ++i)
        page_size |= static_cast<std::uint32_t>(prefix[8 + i]) << (8 * i);
    if (!page_size_valid(page_size)) raise(ErrorCode::CorruptDirectory, "invalid page size in header");
    return page_size;
}

ItemHeader decode_header_page(std::span<const std::uint8_t> page0, std::uint64_t file_pages) {
    if (page0.size() < 4) raise(ErrorCode::Truncated, "shorter than the magic");
    if (!std::equal(kMagic.begin(), kMagic.end(), page0.begin()))
        raise(ErrorCode::BadMagic, "not a cif container");
    if (page0.size() < kHeaderFixedBytes) raise(ErrorCode::Truncated, "header page too short");

    Reader r(page0, ErrorCode::CorruptDirectory);
    r.raw(4); // magic
    ItemHeader header;
    header.format_version = r.u16();
    const std::uint16_t reserved = r.u16();
    header.page_size = r.u32();
    header.version_id = r.u32();
    header.item_id = ItemId{r.u64()};
    header.series_id = r.u64();
    const std::uint32_t stored_crc = r.u32();

    if (header.format_version < 1) raise(ErrorCode::CorruptDirectory, "format version 0");
    if (reserved != 0) raise(ErrorCode::CorruptDirectory, "reserved header bytes nonzero");
    if (!page_size_valid(header.page_size))
        raise(ErrorCode::CorruptDirectory, "invalid page size in header");
    if (page0.size() != header.page_size)
        raise(ErrorCode::Truncated, "header page incomplete");
    if (header_crc(page0) != stored_crc)
        raise(ErrorCode::CorruptDirectory, "header checksum mismatch");
    if (!header.item_id) raise(ErrorCode::CorruptDirectory, "item id is zero");
    if (header.version_id < 1) raise(ErrorCode::CorruptDirectory, "version id is zero");
    if (header.version_id == 1 && header.series_id != header.item_id.value)
        raise(ErrorCode::CorruptDirectory, "first version must have series id == item id");

    const std::size_t max_extents = max_extents_per_section(header.page_size);
    bool seen[kSectionCount] = {false, false, false, false};
    for (std::size_t i = 0; i < kSectionCount; ++i) {
        SectionDescriptor d;
        const std::uint8_t kind = r.u8();
        if (kind >= kSectionCount) raise(ErrorCode::CorruptDirectory, "descriptor kind invalid");
        if (seen[kind]) raise(ErrorCode::CorruptDirectory, "duplicate descriptor kind");
        seen[kind] = true;
        d.kind = static_cast<SectionKind>(kind);
        const std::uint8_t prot = r.u8();
        if (prot > static_cast<std::uint8_t>(Protection::ReadOnly))
            raise(ErrorCode::CorruptDirectory, "protection byte invalid");
        d.protection = static_cast<Protection>(prot);
        const std::uint16_t extent_count = r.u16();
        if (extent_count > max_extents) raise(ErrorCode::CorruptDirectory, "too many extents");
        d.byte_length = r.u64();
        d.extents.reserve(extent_count);
        for (std::uint16_t k = 0; k < extent_count; ++k) {
            Extent e;
            e.start_page = r.u64();
            e.page_count = r.u32();
            if (e.page_count == 0) raise(ErrorCode::CorruptDirectory, "empty extent");
            if (e.start_page == 0) raise(ErrorCode::CorruptDirectory, "extent overlaps header page");
            if (e.start_page + e.page_count > file_pages)
                raise(ErrorCode::CorruptDirectory, "extent beyond end of file");
            d.extents.push_back(e);
        }
        if (d.byte_length > d.allocated_pages() * header.page_size)
            raise(ErrorCode::CorruptDirectory, "byte length exceeds allocation");
        header.directory[kind] = std::move(d);
    }
    if (header.descriptor(SectionKind::Signatures).protection == Protection::Writable)
        raise(ErrorCode::CorruptDirectory, "signatures section may not be writable");

    // remaining header page bytes must be zero
    while (!r.done())
        if (r.u8() != 0) raise(ErrorCode::CorruptDirectory, "trailing header bytes nonzero");

    // extents of all sections must be pairwise disjoint
    std::vector<std::pair<std::uint64_t, std::uint64_t>> spans;
    for (const SectionDescriptor& d : header.directory)
        for (const Extent& e : d.extents) spans.emplace_back(e.start_page, e.start_page + e.page_count);
    std::sort(spans.begin(), spans.end());
    for (std::size_t i = 1; i < spans.size(); ++i)
        if (spans[i].first < spans[i - 1].second)
            raise(ErrorCode::CorruptDirectory, "overlapping extents");

    return header;
}

} // namespace cif::wire
