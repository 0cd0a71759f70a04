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

#include "cif/codec.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "cif/errors.hpp"
#include "cif/wire.hpp"

namespace cif {

namespace {

void validate_name(const std::string& name, const char* what) {
    if (name.empty() || name.size() > 255)
        raise(ErrorCode::InvalidItem, std::string(what) + " name must be 1..255 bytes");
    if (!utf8_valid(name)) raise(ErrorCode::InvalidItem, std::string(what) + " name is not UTF-8");
}

void validate_scalar(const ScalarValue& v, ValueType expected) {
    if (value_type_of(v) != expected) raise(ErrorCode::InvalidItem, "value does not match entry type");
    if (const auto* s = std::get_if<std::string>(&v)) {
        if (s->size() > 65535) raise(ErrorCode::InvalidItem, "string value exceeds 65535 bytes");
        if (!utf8_valid(*s)) raise(ErrorCode::InvalidItem, "string value is not UTF-8");
    }
}

void validate_entry(const MetadataEntry& entry) {
    validate_name(entry.name, "metadata");
    if (entry.values.empty()) raise(ErrorCode::InvalidItem, "entry '" + entry.name + "' has no values");
    if (entry.multiplicity == Multiplicity::Single && entry.values.size() != 1)
        raise(ErrorCode::InvalidItem, "single entry '" + entry.name + "' has multiple values");
    if (entry.type == ValueType::Table) {
        if (entry.values.size() != 1 || entry.multiplicity != Multiplicity::Single)
            raise(ErrorCode::InvalidItem, "table entry '" + entry.name + "' must hold exactly one table");
        const auto* table = std::get_if<TableValue>(&entry.values.front());
        if (table == nullptr) raise(ErrorCode::InvalidItem, "table entry holds a non-table value");
        std::set<std::string> col_names;
        for (const TableColumn& col : table->columns) {
            validate_name(col.name, "table column");
            if (col.type == ValueType::Table)
                raise(ErrorCode::InvalidItem, "table column type must be scalar");
            if (!col_names.insert(col.name).second)
                raise(ErrorCode::InvalidItem, "duplicate table column '" + col.name + "'");
        }
        if (table->columns.empty() && !table->cells.empty())
            raise(ErrorCode::InvalidItem, "table cells without columns");
        if (!table->columns.empty() && table->cells.size() % table->columns.size() != 0)
            raise(ErrorCode::InvalidItem, "table rows are ragged");
        std::size_t cell = 0;
        for (std::size_t row = 0; row < table->row_count(); ++row)
            for (const TableColumn& col : table->columns) validate_scalar(table->cells[cell++], col.type);
        return;
    }
    for (const Value& v : entry.values) validate_scalar(scalar_of(v), entry.type);
}

void validate_relation(const Relation& rel) {
    if (rel.relation_type == 0) raise(ErrorCode::InvalidItem, "relation type is zero");
    if (rel.relation_type > kRelationReferences && rel.relation_type < kRelationFirstUserType)
        raise(ErrorCode::InvalidItem, "relation types 4..999 are reserved");
    if (rel.relation_type == kRelationPreviousVersion && rel.target_kind != TargetKind::ItemIdTarget)
        raise(ErrorCode::InvalidItem, "previous-version relation must target an item id");
    if (rel.target == 0) raise(ErrorCode::InvalidItem, "relation target is zero");
}

void validate_signature_record(const SignatureRecord& rec) {
    if (rec.signer_id.size() > 255 || !utf8_valid(rec.signer_id))
        raise(ErrorCode::InvalidItem, "signer id invalid");
    if (rec.covered.size() > 65535) raise(ErrorCode::InvalidItem, "too many covered ranges");
    for (const CoveredRange& c : rec.covered)
        if (c.section == SectionKind::Signatures)
            raise(ErrorCode::InvalidItem, "signatures may not cover the signatures section");
    if (rec.signature_bytes.size() > 65535)
        raise(ErrorCode::InvalidItem, "signature bytes too long");
}

} // namespace

void validate_item(const ItemFile& item) {
    if (item.format_version < 1) raise(ErrorCode::InvalidItem, "format version must be >= 1");
    if (!item.item_id) raise(ErrorCode::InvalidItem, "item id is zero");
    if (item.version_id < 1) raise(ErrorCode::InvalidItem, "version id must be >= 1");
    if (item.version_id == 1 && item.series_id != item.item_id.value)
        raise(ErrorCode::InvalidItem, "first version requires series id == item id");
    if (item.series_id == 0) raise(ErrorCode::InvalidItem, "series id is zero");
    if (item.protection_of(SectionKind::Signatures) == Protection::Writable)
        raise(ErrorCode::InvalidItem, "signatures section may not be writable");

    std::set<std::string> names;
    for (const MetadataEntry& e : item.metadata) {
        validate_entry(e);
        if (!names.insert(e.name).second)
            raise(ErrorCode::InvalidItem, "duplicate metadata name '" + e.name + "'");
    }
    for (const Relation& rel : item.relations) validate_relation(rel);
    for (const SignatureRecord& rec : item.signatures) validate_signature_record(rec);
}

std::vector<std::uint8_t> section_payload(const ItemFile& item, SectionKind kind) {
    switch (kind) {
    case SectionKind::Metadata: return wire::encode_metadata_payload(item.metadata);
    case SectionKind::Relations: return wire::encode_relations_payload(item.relations);
    case SectionKind::Content: return item.content;
    case SectionKind::Signatures: return wire::encode_signatures_payload(item.signatures);
    }
    raise(ErrorCode::UnknownSection, "bad section kind");
}

std::vector<std::uint8_t> encode_item(const ItemFile& item, std::uint32_t page_size) {
    if (!page_size_valid(page_size))
        raise(ErrorCode::PageSizeInvalid, "page size " + std::to_string(page_size));
    validate_item(item);

    ItemHeader header;
    header.format_version = item.format_version;
    header.page_size = page_size;
    header.item_id = item.item_id;
    header.series_id = item.series_id;
    header.version_id = item.version_id;

    std::array<std::vector<std::uint8_t>, kSectionCount> payloads;
    std::uint64_t next_page = 1;
    for (SectionKind kind : kAllSections) {
        const auto idx = static_cast<std::size_t>(kind);
        payloads[idx] = section_payload(item, kind);
        SectionDescriptor& d = header.directory[idx];
        d.kind = kind;
        d.protection = item.protection_of(kind);
        d.byte_length = payloads[idx].size();
        if (!payloads[idx].empty()) {
            const std::uint64_t pages = (payloads[idx].size() + page_size - 1) / page_size;
            d.extents.push_back(Extent{next_page, static_cast<std::uint32_t>(pages)});
            next_page += pages;
        }
    }

    std::vector<std::uint8_t> out(next_page * page_size, 0);
    const auto page0 = wire::encode_header_page(header);
    std::copy(page0.begin(), page0.end(), out.begin());
    for (SectionKind kind : kAllSections) {
        const auto idx = static_cast<std::size_t>(kind);
        if (payloads[idx].empty()) continue;
        const std::uint64_t offset = header.directory[idx].extents.front().start_page * page_size;
        std::copy(payloads[idx].begin(), payloads[idx].end(), out.begin() + offset);
    }
    return out;
}

std::vector<std::uint8_t> gather_section(std::span<const std::uint8_t> file_bytes,
                                         const SectionDescriptor& descriptor,
                                         std::uint32_t page_size) {
    std::vector<std::uint8_t> payload;
    payload.reserve(descriptor.byte_length);
    std::uint64_t left = descriptor.byte_length;
    for (const Extent& e : descriptor.extents) {
        if (left == 0) break;
        const std::uint64_t extent_bytes = static_cast<std::uint64_t>(e.page_count) * page_size;
        const std::uint64_t take = std::min(left, extent_bytes);
        const std::uint64_t offset = e.start_page * page_size;
        payload.insert(payload.end(), file_bytes.begin() + offset, file_bytes.begin() + offset + take);
        left -= take;
    }
    if (left != 0) raise(ErrorCode::CorruptDirectory, "extents shorter than byte length");
    return payload;
}

DecodedItem decode_item(std::span<const std::uint8_t> bytes) {
    const std::uint32_t page_size = wire::peek_page_size(bytes);
    if (bytes.size() < page_size) raise(ErrorCode::Truncated, "shorter than one page");
    if (bytes.size() % page_size != 0)
        raise(ErrorCode::Truncated, "length is not a whole number of pages");
    const std::uint64_t file_pages = bytes.size() / page_size;

    DecodedItem out;
    out.page_size = page_size;
    out.header = wire::decode_header_page(bytes.first(page_size), file_pages);

    ItemFile& item = out.item;
    item.format_version = out.header.format_version;
    item.item_id = out.header.item_id;
    item.series_id = out.header.series_id;
    item.version_id = out.header.version_id;
    for (SectionKind kind : kAllSections)
        item.protection_of(kind) = out.header.descriptor(kind).protection;

    const auto metadata = gather_section(bytes, out.header.descriptor(SectionKind::Metadata), page_size);
    item.metadata = wire::decode_metadata_payload(metadata);
    std::set<std::string> names;
    for (const MetadataEntry& e : item.metadata)
        if (!names.insert(e.name).second)
            raise(ErrorCode::CorruptSection, "duplicate metadata name '" + e.name + "'");

    const auto relations = gather_section(bytes, out.header.descriptor(SectionKind::Relations), page_size);
    item.relations = wire::decode_relations_payload(relations);

    item.content = gather_section(bytes, out.header.descriptor(SectionKind::Content), page_size);

    const auto sigs = gather_section(bytes, out.header.descriptor(SectionKind::Signatures), page_size);
    item.signatures = wire::decode_signatures_payload(sigs);

    return out;
}

} // namespace cif
