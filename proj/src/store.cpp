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

#include "cif/store.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <algorithm>
#include <cctype>
#include <chrono>
#include <deque>
#include <fstream>
#include <map>
#include <set>

#include "cif/catalog.hpp"
#include "cif/errors.hpp"
#include "cif/wire.hpp"

namespace cif {

namespace fs = std::filesystem;

namespace {

constexpr int kIdCollisionRetries = 16;
constexpr std::string_view kObjectsDir = "objects";

// Advisory cross-process lock around id allocation and counter updates.
class ScopedFileLock {
public:
    explicit ScopedFileLock(const fs::path& path) {
        fd_ = ::open(path.c_str(), O_RDWR | O_CREAT, 0644);
        if (fd_ < 0) raise(ErrorCode::IoFailure, "cannot open lock file " + path.string());
        if (::flock(fd_, LOCK_EX) != 0) {
            ::close(fd_);
            raise(ErrorCode::IoFailure, "cannot lock " + path.string());
        }
    }
    ~ScopedFileLock() {
        if (fd_ >= 0) ::close(fd_);
    }
    ScopedFileLock(const ScopedFileLock&) = delete;
    ScopedFileLock& operator=(const ScopedFileLock&) = delete;

private:
    int fd_ = -1;
};

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    auto e = s.find_last_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    return s.substr(b, e - b + 1);
}

bool parse_bool(const std::string& v, const std::string& key) {
    if (v == "true") return true;
    if (v == "false") return false;
    raise(ErrorCode::IoFailure, "config key " + key + " expects true/false, got '" + v + "'");
}

bool is_hex_pair(const std::string& s) {
    return s.size() == 2 && std::isxdigit(static_cast<unsigned char>(s[0])) &&
           std::isxdigit(static_cast<unsigned char>(s[1])) &&
           !std::isupper(static_cast<unsigned char>(s[0])) &&
           !std::isupper(static_cast<unsigned char>(s[1]));
}

} // namespace

std::filesystem::path store_config_path(const fs::path& root) { return root / "store.conf"; }

Store Store::init(const fs::path& root, const StoreConfig& config) {
    if (!page_size_valid(config.default_page_size))
        raise(ErrorCode::PageSizeInvalid, "default page size " + std::to_string(config.default_page_size));
    if (fs::exists(store_config_path(root)))
        raise(ErrorCode::IoFailure, "store already initialized at " + root.string());
    fs::create_directories(root / kObjectsDir);

    std::ofstream out(store_config_path(root));
    if (!out) raise(ErrorCode::IoFailure, "cannot write " + store_config_path(root).string());
    out << "default_page_size=" << config.default_page_size << "\n";
    out << "worm_mode=" << (config.worm_mode ? "true" : "false") << "\n";
    out << "id_allocation=" << (config.id_allocation == IdAllocation::Random ? "random" : "sequential")
        << "\n";
    out << "allow_sign_after_seal=" << (config.allow_sign_after_seal ? "true" : "false") << "\n";
    out.close();

    return open(root);
}

Store Store::open(const fs::path& root) {
    std::ifstream in(store_config_path(root));
    if (!in) raise(ErrorCode::NotFound, "no store at " + root.string());

    Store store;
    store.root_ = root;
    store.rng_.seed(std::random_device{}());

    std::string line;
    while (std::getline(in, line)) {
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) raise(ErrorCode::IoFailure, "bad config line: " + line);
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key == "default_page_size") {
            store.config_.default_page_size = static_cast<std::uint32_t>(std::stoul(value));
            if (!page_size_valid(store.config_.default_page_size))
                raise(ErrorCode::IoFailure, "config default_page_size invalid");
        } else if (key == "worm_mode") {
            store.config_.worm_mode = parse_bool(value, key);
        } else if (key == "id_allocation") {
            if (value == "random") store.config_.id_allocation = IdAllocation::Random;
            else if (value == "sequential") store.config_.id_allocation = IdAllocation::Sequential;
            else raise(ErrorCode::IoFailure, "config id_allocation expects random/sequential");
        } else if (key == "allow_sign_after_seal") {
            store.config_.allow_sign_after_seal = parse_bool(value, key);
        } else {
            raise(ErrorCode::IoFailure, "unknown config key: " + key);
        }
    }
    return store;
}

fs::path Store::path_for(ItemId id) {
    const std::string hex = to_hex(id);
    fs::path p;
    for (std::size_t i = 0; i < 16; i += 2) p /= hex.substr(i, 2);
    return p;
}

fs::path Store::absolute_path(ItemId id) const { return root_ / kObjectsDir / path_for(id); }

bool Store::exists(ItemId id) const { return fs::exists(absolute_path(id)); }

void Store::require_writable() const {
    if (config_.worm_mode) raise(ErrorCode::StoreSealed, "store is in WORM mode");
}

void Store::reseed_ids(std::uint64_t seed) { rng_.seed(seed); }

ItemId Store::allocate_id() {
    ScopedFileLock lock(root_ / "store.lock");
    if (config_.id_allocation == IdAllocation::Sequential) {
        const fs::path counter_path = root_ / "next_id";
        std::uint64_t next = 1;
        if (std::ifstream in(counter_path); in) in >> next;
        std::ofstream out(counter_path, std::ios::trunc);
        if (!out) raise(ErrorCode::IoFailure, "cannot write id counter");
        out << (next + 1) << "\n";
        return ItemId{next};
    }
    for (int attempt = 0; attempt < kIdCollisionRetries; ++attempt) {
        const std::uint64_t v = rng_();
        if (v == 0) continue;
        const ItemId id{v};
        if (!exists(id)) return id;
    }
    raise(ErrorCode::IdCollision, "could not allocate a fresh random id");
}

ItemId Store::write_new_item(ItemFile item, std::optional<std::uint32_t> page_size) {
    require_writable();
    const std::uint32_t ps = page_size.value_or(config_.default_page_size);
    if (!page_size_valid(ps)) raise(ErrorCode::PageSizeInvalid, "page size " + std::to_string(ps));

    const ItemId id = allocate_id();
    item.item_id = id;
    if (item.series_id == 0) item.series_id = id.value;
    ItemFileHandle::create(absolute_path(id), item, ps, OpenMode::Read);
    notify(id);
    return id;
}

ItemId Store::create_item(const std::vector<MetadataEntry>& metadata,
                          std::span<const std::uint8_t> content,
                          std::optional<std::uint32_t> page_size,
                          const std::vector<Relation>& relations) {
    ItemFile item;
    item.version_id = 1;
    item.metadata = metadata;
    item.relations = relations;
    item.content.assign(content.begin(), content.end());
    return write_new_item(std::move(item), page_size);
}

ItemId Store::create_version(ItemId predecessor, const std::vector<MetadataEntry>& metadata,
                             std::span<const std::uint8_t> content) {
    require_writable();
    const ItemFile pred = read_item(predecessor); // NotFound when missing

    ItemFile item;
    item.series_id = pred.series_id;
    item.version_id = pred.version_id + 1;
    item.metadata = metadata;
    item.relations.push_back(
        Relation{TargetKind::ItemIdTarget, kRelationPreviousVersion, predecessor.value});
    item.content.assign(content.begin(), content.end());
    return write_new_item(std::move(item), std::nullopt);
}

ItemId Store::add_rendition(ItemId of, const std::string& format_label,
                            std::span<const std::uint8_t> content) {
    require_writable();
    if (!exists(of)) raise(ErrorCode::NotFound, "no item " + to_hex(of));

    ItemFile item;
    item.version_id = 1;
    item.metadata.push_back(make_entry("format", format_label));
    item.relations.push_back(Relation{TargetKind::ItemIdTarget, kRelationRenditionOf, of.value});
    item.content.assign(content.begin(), content.end());
    return write_new_item(std::move(item), std::nullopt);
}

ItemFile Store::read_item(ItemId id) const {
    return ItemFileHandle::open(absolute_path(id), OpenMode::Read).read_item();
}

void Store::update_metadata(ItemId id, const std::vector<MetadataEntry>& entries) {
    require_writable();
    {
        // validate against the full item model before touching the file
        auto handle = ItemFileHandle::open(absolute_path(id), OpenMode::Write);
        ItemFile item = handle.read_item();
        item.metadata = entries;
        validate_item(item);
        handle.update_section(SectionKind::Metadata, wire::encode_metadata_payload(entries));
    }
    notify(id);
}

void Store::seal_item(ItemId id) {
    require_writable();
    ItemFileHandle::open(absolute_path(id), OpenMode::Write).seal();
}

std::vector<MetadataEntry> Store::resolve_effective_metadata(ItemId id) const {
    const ItemFile own = read_item(id); // NotFound when missing

    std::vector<MetadataEntry> result;
    std::set<std::string> seen_names;
    std::set<std::uint64_t> visited{id.value};
    std::deque<ItemId> queue;

    auto absorb = [&](const ItemFile& item) {
        for (const MetadataEntry& e : item.metadata)
            if (seen_names.insert(e.name).second) result.push_back(e);
        for (const Relation& rel : item.relations)
            if (rel.relation_type == kRelationRenditionOf && rel.target_kind == TargetKind::ItemIdTarget &&
                visited.insert(rel.target).second)
                queue.push_back(ItemId{rel.target});
    };

    absorb(own);
    while (!queue.empty()) {
        const ItemId next = queue.front();
        queue.pop_front();
        if (!exists(next)) continue; // dangling relation: nothing to inherit
        absorb(read_item(next));
    }
    return result;
}

UpsertInfo Store::upsert_info(ItemId id) const {
    const ItemFile item = read_item(id);
    UpsertInfo info;
    info.effective = resolve_effective_metadata(id);
    for (const Relation& rel : item.relations)
        if (rel.relation_type == kRelationRenditionOf && rel.target_kind == TargetKind::ItemIdTarget)
            info.rendition_targets.push_back(ItemId{rel.target});

    for (const MetadataEntry& e : info.effective) {
        if (e.name != "content_type" || e.type != ValueType::String || e.values.empty()) continue;
        const auto& ct = std::get<std::string>(e.values.front());
        if (ct.rfind("text/", 0) == 0)
            info.content_text = std::string(item.content.begin(), item.content.end());
        break;
    }
    return info;
}

void Store::scan_store(const std::function<void(ItemId, const fs::path&)>& fn) const {
    const fs::path objects = root_ / kObjectsDir;
    if (!fs::exists(objects)) raise(ErrorCode::IoFailure, "store has no objects directory");

    // depth-first in sorted order so the scan is deterministic
    std::function<void(const fs::path&, const std::string&, int)> walk = [&](const fs::path& dir,
                                                                             const std::string& hex,
                                                                             int depth) {
        std::vector<fs::directory_entry> entries;
        for (const auto& entry : fs::directory_iterator(dir)) entries.push_back(entry);
        std::sort(entries.begin(), entries.end(),
                  [](const auto& a, const auto& b) { return a.path().filename() < b.path().filename(); });
        for (const auto& entry : entries) {
            const std::string name = entry.path().filename().string();
            if (!is_hex_pair(name)) continue; // temp files and strays are not items
            if (depth < 7 && entry.is_directory()) {
                walk(entry.path(), hex + name, depth + 1);
            } else if (depth == 7 && entry.is_regular_file()) {
                if (const auto id = item_id_from_hex(hex + name)) fn(*id, entry.path());
            }
        }
    };
    walk(objects, "", 0);
}

std::vector<ItemId> Store::scan_ids() const {
    std::vector<ItemId> ids;
    scan_store([&](ItemId id, const fs::path&) { ids.push_back(id); });
    return ids;
}

std::size_t Store::sign_item(ItemId id, const std::vector<CoveredRange>& covered,
                             SignatureAlgorithm algorithm, std::span<const std::uint8_t> key,
                             const std::string& signer_id) {
    require_writable();
    auto handle = ItemFileHandle::open(absolute_path(id), OpenMode::Write);
    const auto now = std::chrono::duration_cast<std::chrono::microseconds>(
                         std::chrono::system_clock::now().time_since_epoch())
                         .count();
    return cif::sign_item(handle, covered, algorithm, key, signer_id,
                          DateTimeMicros{static_cast<std::uint64_t>(now)},
                          config_.allow_sign_after_seal);
}

VerifyStatus Store::verify_signature(ItemId id, std::size_t record_index,
                                     std::span<const std::uint8_t> key) const {
    const auto handle = ItemFileHandle::open(absolute_path(id), OpenMode::Read);
    return verify_item(handle, record_index, key);
}

void Store::attach_catalog(Catalog* catalog) {
    catalog_ = catalog;
    if (catalog_ != nullptr)
        catalog_->bind_resolver([this](ItemId id) { return upsert_info(id); });
}

void Store::notify(ItemId id) {
    if (catalog_ != nullptr) catalog_->notify_upsert(id, upsert_info(id));
}

} // namespace cif
