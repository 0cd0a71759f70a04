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

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "cif/codec.hpp"
#include "cif/types.hpp"

namespace cif {

enum class OpenMode { Read, Write };

// One open container file. Holds an advisory flock for its lifetime (shared
// for Read, exclusive for Write), which supplies the per-item single-writer /
// multi-reader exclusion both across threads and across processes.
//
// Updates rewrite only the affected section's pages plus the header page;
// the header page is written last.
class ItemFileHandle {
public:
    ItemFileHandle(const ItemFileHandle&) = delete;
    ItemFileHandle& operator=(const ItemFileHandle&) = delete;
    ItemFileHandle(ItemFileHandle&& other) noexcept;
    ItemFileHandle& operator=(ItemFileHandle&& other) noexcept;
    ~ItemFileHandle();

    // Encodes `item` into a brand-new file (written to a temp name, then
    // renamed into place) and opens it.
    static ItemFileHandle create(const std::filesystem::path& path, const ItemFile& item,
                                 std::uint32_t page_size, OpenMode mode = OpenMode::Write);

    static ItemFileHandle open(const std::filesystem::path& path, OpenMode mode);

    const ItemHeader& header() const { return header_; }
    std::uint32_t page_size() const { return header_.page_size; }
    std::uint64_t file_pages() const { return file_pages_; }
    const std::filesystem::path& path() const { return path_; }

    // Logical payload of one section.
    std::vector<std::uint8_t> read_section(SectionKind kind) const;

    // Full decode of the current file state.
    ItemFile read_item() const;

    // Replaces a section's logical payload in place. Enforces the section's
    // protection level; with AppendOnly the old payload must be a byte prefix
    // of the new one. Returns the updated descriptor.
    SectionDescriptor update_section(SectionKind kind, std::span<const std::uint8_t> payload);

    // Appends one signature record. `override_read_only` implements the
    // sign-after-seal store policy; it never loosens the stored protection.
    SectionDescriptor append_signature(const SignatureRecord& record, bool override_read_only);

    // Tighten-only protection change (Writable -> AppendOnly -> ReadOnly).
    void set_protection(SectionKind kind, Protection level);

    // Sets every section ReadOnly. Irreversible.
    void seal();

    bool sealed() const;

private:
    ItemFileHandle() = default;

    void load_header();
    void write_header();
    std::vector<std::uint8_t> read_pages(std::uint64_t start_page, std::uint64_t count) const;
    void write_bytes_at(std::uint64_t offset, std::span<const std::uint8_t> data);
    SectionDescriptor write_section_payload(SectionKind kind, std::span<const std::uint8_t> payload);

    int fd_ = -1;
    OpenMode mode_ = OpenMode::Read;
    std::filesystem::path path_;
    ItemHeader header_;
    std::uint64_t file_pages_ = 0;
};

} // namespace cif
