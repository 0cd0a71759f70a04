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

#include "cif/item_file_handle.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <sys/stat.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <limits>

#include "cif/errors.hpp"
#include "cif/wire.hpp"

namespace cif {

namespace {

[[noreturn]] void raise_errno(const std::string& what) {
    raise(ErrorCode::IoFailure, what + ": " + std::strerror(errno));
}

void pread_exact(int fd, void* buf, std::size_t len, std::uint64_t offset, const std::string& path) {
    std::size_t done = 0;
    while (done < len) {
        const ssize_t got = ::pread(fd, static_cast<char*>(buf) + done, len - done, offset + done);
        if (got < 0) {
            if (errno == EINTR) continue;
            raise_errno("pread " + path);
        }
        if (got == 0) raise(ErrorCode::Truncated, path + " shorter than expected");
        done += static_cast<std::size_t>(got);
    }
}

void pwrite_exact(int fd, const void* buf, std::size_t len, std::uint64_t offset, const std::string& path) {
    std::size_t done = 0;
    while (done < len) {
        const ssize_t put = ::pwrite(fd, static_cast<const char*>(buf) + done, len - done, offset + done);
        if (put < 0) {
            if (errno == EINTR) continue;
            raise_errno("pwrite " + path);
        }
        done += static_cast<std::size_t>(put);
    }
}

} // namespace

ItemFileHandle::ItemFileHandle(ItemFileHandle&& other) noexcept
    : fd_(other.fd_), mode_(other.mode_), path_(std::move(other.path_)),
      header_(std::move(other.header_)), file_pages_(other.file_pages_) {
    other.fd_ = -1;
}

ItemFileHandle& ItemFileHandle::operator=(ItemFileHandle&& other) noexcept {
    if (this != &other) {
        if (fd_ >= 0) ::close(fd_);
        fd_ = other.fd_;
        mode_ = other.mode_;
        path_ = std::move(other.path_);
        header_ = std::move(other.header_);
        file_pages_ = other.file_pages_;
        other.fd_ = -1;
    }
    return *this;
}

ItemFileHandle::~ItemFileHandle() {
    if (fd_ >= 0) ::close(fd_); // flock released with the descriptor
}

ItemFileHandle ItemFileHandle::create(const std::filesystem::path& path, const ItemFile& item,
                                      std::uint32_t page_size, OpenMode mode) {
    const auto bytes = encode_item(item, page_size);

    std::filesystem::create_directories(path.parent_path());
    const std::filesystem::path tmp = path.string() + ".tmp";
    int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
    if (fd < 0) raise_errno("create " + tmp.string());
    try {
        pwrite_exact(fd, bytes.data(), bytes.size(), 0, tmp.string());
        if (::fsync(fd) != 0) raise_errno("fsync " + tmp.string());
    } catch (...) {
        ::close(fd);
        ::unlink(tmp.c_str());
        throw;
    }
    ::close(fd);
    if (::rename(tmp.c_str(), path.c_str()) != 0) {
        ::unlink(tmp.c_str());
        raise_errno("rename " + tmp.string());
    }
    return open(path, mode);
}

ItemFileHandle ItemFileHandle::open(const std::filesystem::path& path, OpenMode mode) {
    ItemFileHandle h;
    h.mode_ = mode;
    h.path_ = path;
    h.fd_ = ::open(path.c_str(), mode == OpenMode::Write ? O_RDWR : O_RDONLY);
    if (h.fd_ < 0) {
        if (errno == ENOENT) raise(ErrorCode::NotFound, "no item file at " + path.string());
        raise_errno("open " + path.string());
    }
    if (::flock(h.fd_, mode == OpenMode::Write ? LOCK_EX : LOCK_SH) != 0)
        raise_errno("flock " + path.string());
    h.load_header();
    return h;
}

void ItemFileHandle::load_header() {
    struct stat st{};
    if (::fstat(fd_, &st) != 0) raise_errno("fstat " + path_.string());
    const auto file_size = static_cast<std::uint64_t>(st.st_size);

    std::uint8_t prefix[12];
    if (file_size < sizeof(prefix)) raise(ErrorCode::Truncated, path_.string() + " shorter than a header");
    pread_exact(fd_, prefix, sizeof(prefix), 0, path_.string());
    const std::uint32_t page_size = wire::peek_page_size(std::span(prefix, sizeof(prefix)));

    if (file_size < page_size) raise(ErrorCode::Truncated, path_.string() + " shorter than one page");
    if (file_size % page_size != 0)
        raise(ErrorCode::Truncated, path_.string() + " is not a whole number of pages");
    file_pages_ = file_size / page_size;

    std::vector<std::uint8_t> page0(page_size);
    pread_exact(fd_, page0.data(), page0.size(), 0, path_.string());
    header_ = wire::decode_header_page(page0, file_pages_);
}

void ItemFileHandle::write_header() {
    const auto page0 = wire::encode_header_page(header_);
    write_bytes_at(0, page0);
}

std::vector<std::uint8_t> ItemFileHandle::read_pages(std::uint64_t start_page, std::uint64_t count) const {
    std::vector<std::uint8_t> buf(count * header_.page_size);
    pread_exact(fd_, buf.data(), buf.size(), start_page * header_.page_size, path_.string());
    return buf;
}

void ItemFileHandle::write_bytes_at(std::uint64_t offset, std::span<const std::uint8_t> data) {
    if (mode_ != OpenMode::Write) raise(ErrorCode::IoFailure, "handle opened read-only");
    pwrite_exact(fd_, data.data(), data.size(), offset, path_.string());
}

std::vector<std::uint8_t> ItemFileHandle::read_section(SectionKind kind) const {
    const SectionDescriptor& d = header_.descriptor(kind);
    std::vector<std::uint8_t> payload;
    payload.reserve(d.byte_length);
    std::uint64_t left = d.byte_length;
    for (const Extent& e : d.extents) {
        if (left == 0) break;
        const std::uint64_t take = std::min<std::uint64_t>(
            left, static_cast<std::uint64_t>(e.page_count) * header_.page_size);
        auto pages = read_pages(e.start_page, e.page_count);
        payload.insert(payload.end(), pages.begin(), pages.begin() + static_cast<std::ptrdiff_t>(take));
        left -= take;
    }
    return payload;
}

ItemFile ItemFileHandle::read_item() const {
    ItemFile item;
    item.format_version = header_.format_version;
    item.item_id = header_.item_id;
    item.series_id = header_.series_id;
    item.version_id = header_.version_id;
    for (SectionKind kind : kAllSections)
        item.protection_of(kind) = header_.descriptor(kind).protection;
    item.metadata = wire::decode_metadata_payload(read_section(SectionKind::Metadata));
    item.relations = wire::decode_relations_payload(read_section(SectionKind::Relations));
    item.content = read_section(SectionKind::Content);
    item.signatures = wire::decode_signatures_payload(read_section(SectionKind::Signatures));
    return item;
}

// Writes `payload` into the section's allocation, growing it with one extent
// at end-of-file when needed. Never touches pages of other sections. Header
// is rewritten last.
SectionDescriptor ItemFileHandle::write_section_payload(SectionKind kind,
                                                        std::span<const std::uint8_t> payload) {
    SectionDescriptor d = header_.descriptor(kind);
    const std::uint32_t ps = header_.page_size;
    const std::uint64_t allocated = d.allocated_pages() * ps;

    if (payload.size() > allocated) {
        const std::uint64_t extra_pages = (payload.size() - allocated + ps - 1) / ps;
        if (d.extents.size() < max_extents_per_section(ps) &&
            extra_pages <= std::numeric_limits<std::uint32_t>::max()) {
            d.extents.push_back(Extent{file_pages_, static_cast<std::uint32_t>(extra_pages)});
            file_pages_ += extra_pages;
        } else {
            // directory slots exhausted: compact into one fresh extent at EOF
            const std::uint64_t pages = (payload.size() + ps - 1) / ps;
            d.extents.clear();
            d.extents.push_back(Extent{file_pages_, static_cast<std::uint32_t>(pages)});
            file_pages_ += pages;
        }
    }

    // scatter the payload across the extents, zero-filling allocated tails
    std::size_t cursor = 0;
    for (const Extent& e : d.extents) {
        const std::uint64_t extent_bytes = static_cast<std::uint64_t>(e.page_count) * ps;
        std::vector<std::uint8_t> buf(extent_bytes, 0);
        if (cursor < payload.size()) {
            const std::size_t take = std::min<std::size_t>(payload.size() - cursor, extent_bytes);
            std::copy_n(payload.begin() + static_cast<std::ptrdiff_t>(cursor), take, buf.begin());
            cursor += take;
        }
        write_bytes_at(e.start_page * ps, buf);
    }

    d.byte_length = payload.size();
    header_.descriptor(kind) = d;
    write_header();
    return d;
}

SectionDescriptor ItemFileHandle::update_section(SectionKind kind, std::span<const std::uint8_t> payload) {
    const SectionDescriptor& d = header_.descriptor(kind);
    switch (d.protection) {
    case Protection::Writable: break;
    case Protection::AppendOnly: {
        const auto old_payload = read_section(kind);
        if (payload.size() < old_payload.size() ||
            !std::equal(old_payload.begin(), old_payload.end(), payload.begin()))
            raise(ErrorCode::ProtectionViolation,
                  std::string(section_name(kind)) + " is append-only and the old payload is not a prefix");
        break;
    }
    case Protection::ReadOnly:
        raise(ErrorCode::ProtectionViolation, std::string(section_name(kind)) + " is read-only");
    }
    return write_section_payload(kind, payload);
}

SectionDescriptor ItemFileHandle::append_signature(const SignatureRecord& record, bool override_read_only) {
    const SectionDescriptor& d = header_.descriptor(SectionKind::Signatures);
    if (d.protection == Protection::ReadOnly && !override_read_only)
        raise(ErrorCode::SealedFile, "signatures section is read-only");
    auto payload = read_section(SectionKind::Signatures);
    const auto encoded = wire::encode_signature_record(record);
    payload.insert(payload.end(), encoded.begin(), encoded.end());
    return write_section_payload(SectionKind::Signatures, payload);
}

void ItemFileHandle::set_protection(SectionKind kind, Protection level) {
    SectionDescriptor& d = header_.descriptor(kind);
    if (static_cast<std::uint8_t>(level) < static_cast<std::uint8_t>(d.protection))
        raise(ErrorCode::ProtectionDowngrade,
              std::string(section_name(kind)) + " cannot go from " +
                  std::string(protection_name(d.protection)) + " back to " +
                  std::string(protection_name(level)));
    if (kind == SectionKind::Signatures && level == Protection::Writable)
        raise(ErrorCode::InvalidItem, "signatures section may not be writable");
    if (level == d.protection) return;
    d.protection = level;
    write_header();
}

void ItemFileHandle::seal() {
    bool changed = false;
    for (SectionKind kind : kAllSections) {
        SectionDescriptor& d = header_.descriptor(kind);
        if (d.protection != Protection::ReadOnly) {
            d.protection = Protection::ReadOnly;
            changed = true;
        }
    }
    if (changed) write_header();
}

bool ItemFileHandle::sealed() const {
    return std::all_of(kAllSections.begin(), kAllSections.end(), [&](SectionKind kind) {
        return header_.descriptor(kind).protection == Protection::ReadOnly;
    });
}

} // namespace cif
