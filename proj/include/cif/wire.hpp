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

#include <cstring>
#include <span>
#include <vector>

#include "cif/errors.hpp"
#include "cif/types.hpp"

// On-wire encoding of the container. All integers are little-endian and
// fixed-width; section payloads are count-free record streams so that an
// append never rewrites earlier payload bytes. Byte-level layout is
// documented in docs/format.md.

namespace cif::wire {

class Writer {
public:
    void u8(std::uint8_t v) { buf_.push_back(v); }
    void u16(std::uint16_t v) { put(v); }
    void u32(std::uint32_t v) { put(v); }
    void u64(std::uint64_t v) { put(v); }
    void i64(std::int64_t v) { put(static_cast<std::uint64_t>(v)); }
    void f64(double v) {
        std::uint64_t bits;
        std::memcpy(&bits, &v, sizeof(bits));
        put(bits);
    }
    void bytes(std::span<const std::uint8_t> data) { buf_.insert(buf_.end(), data.begin(), data.end()); }
    void str16(std::string_view s); // u16 length prefix, then UTF-8 bytes
    void blob32(std::span<const std::uint8_t> data); // u32 length prefix

    const std::vector<std::uint8_t>& data() const { return buf_; }
    std::vector<std::uint8_t> take() { return std::move(buf_); }
    std::size_t size() const { return buf_.size(); }

private:
    template <typename T>
    void put(T v) {
        for (std::size_t i = 0; i < sizeof(T); ++i)
            buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    std::vector<std::uint8_t> buf_;
};

// Bounds-checked cursor over a byte span. Overruns raise the error code the
// reader was constructed with (CorruptSection for payloads, CorruptDirectory
// for the header page).
class Reader {
public:
    Reader(std::span<const std::uint8_t> data, ErrorCode overrun_code)
        : data_(data), overrun_(overrun_code) {}

    std::uint8_t u8() { return take<std::uint8_t>(); }
    std::uint16_t u16() { return take<std::uint16_t>(); }
    std::uint32_t u32() { return take<std::uint32_t>(); }
    std::uint64_t u64() { return take<std::uint64_t>(); }
    std::int64_t i64() { return static_cast<std::int64_t>(take<std::uint64_t>()); }
    double f64() {
        const std::uint64_t bits = take<std::uint64_t>();
        double v;
        std::memcpy(&v, &bits, sizeof(v));
        return v;
    }
    std::string str16();
    std::vector<std::uint8_t> blob32();
    std::span<const std::uint8_t> raw(std::size_t n);

    std::size_t remaining() const { return data_.size() - pos_; }
    bool done() const { return pos_ == data_.size(); }
    std::size_t pos() const { return pos_; }

private:
    template <typename T>
    T take() {
        if (remaining() < sizeof(T)) raise(overrun_, "record overruns payload");
        T v = 0;
        for (std::size_t i = 0; i < sizeof(T); ++i)
            v |= static_cast<T>(static_cast<T>(data_[pos_ + i]) << (8 * i));
        pos_ += sizeof(T);
        return v;
    }
    std::span<const std::uint8_t> data_;
    std::size_t pos_ = 0;
    ErrorCode overrun_;
};

// --- section payload codecs -------------------------------------------------

// Self-tagged scalar (u8 type tag, then the value).
void encode_scalar_value(Writer& w, const ScalarValue& v);
ScalarValue decode_scalar_value(Reader& r);

void encode_metadata_entry(Writer& w, const MetadataEntry& entry);
MetadataEntry decode_metadata_entry(Reader& r);
std::vector<std::uint8_t> encode_metadata_payload(const std::vector<MetadataEntry>& entries);
std::vector<MetadataEntry> decode_metadata_payload(std::span<const std::uint8_t> payload);

std::vector<std::uint8_t> encode_relations_payload(const std::vector<Relation>& relations);
std::vector<Relation> decode_relations_payload(std::span<const std::uint8_t> payload);

std::vector<std::uint8_t> encode_signature_record(const SignatureRecord& record);
std::vector<std::uint8_t> encode_signatures_payload(const std::vector<SignatureRecord>& records);
std::vector<SignatureRecord> decode_signatures_payload(std::span<const std::uint8_t> payload);

// --- header page -------------------------------------------------------------

inline constexpr std::size_t kHeaderFixedBytes = 36;     // up to and including the crc32 field
inline constexpr std::size_t kDescriptorFixedBytes = 12; // kind, protection, extent count, byte length
inline constexpr std::size_t kExtentBytes = 12;          // start page u64, page count u32

// Serializes the header into a full zero-padded page (page 0), crc included.
std::vector<std::uint8_t> encode_header_page(const ItemHeader& header);

// Reads just enough of a prospective header to learn the page size.
// Raises Truncated / BadMagic / CorruptDirectory.
std::uint32_t peek_page_size(std::span<const std::uint8_t> prefix);

// Parses and validates page 0 against `file_pages` (total pages in the file).
// Raises BadMagic / Truncated / CorruptDirectory.
ItemHeader decode_header_page(std::span<const std::uint8_t> page0, std::uint64_t file_pages);

} // namespace cif::wire
