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
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "cif/item_file_handle.hpp"
#include "cif/signatures.hpp"
#include "cif/types.hpp"

namespace cif {

class Catalog;

enum class IdAllocation { Random, Sequential };

struct StoreConfig {
    std::uint32_t default_page_size = kDefaultPageSize;
    bool worm_mode = false;
    IdAllocation id_allocation = IdAllocation::Random;
    bool allow_sign_after_seal = true;
};

// What the catalog needs to know about one item: its effective (inheritance-
// resolved) metadata, which items it is a rendition of, and its content when
// the content is declared text.
struct UpsertInfo {
    std::vector<MetadataEntry> effective;
    std::vector<ItemId> rendition_targets;
    std::optional<std::string> content_text;
};

// Sharded file-system store. Item files live under <root>/objects/ at the
// path derived from their id; <root>/store.conf holds the StoreConfig and
// <root>/store.lock serializes id allocation across processes.
class Store {
public:
    static Store init(const std::filesystem::path& root, const StoreConfig& config = {});
    static Store open(const std::filesystem::path& root);

    const StoreConfig& config() const { return config_; }
    const std::filesystem::path& root() const { return root_; }

    // Relative sharded path: most-significant hex pair is the outermost
    // directory, least-significant pair is the filename.
    static std::filesystem::path path_for(ItemId id);
    std::filesystem::path absolute_path(ItemId id) const;
    bool exists(ItemId id) const;

    ItemId create_item(const std::vector<MetadataEntry>& metadata,
                       std::span<const std::uint8_t> content,
                       std::optional<std::uint32_t> page_size = std::nullopt,
                       const std::vector<Relation>& relations = {});
    ItemId create_version(ItemId predecessor, const std::vector<MetadataEntry>& metadata,
                          std::span<const std::uint8_t> content);
    ItemId add_rendition(ItemId of, const std::string& format_label,
                         std::span<const std::uint8_t> content);

    ItemFile read_item(ItemId id) const;
    void update_metadata(ItemId id, const std::vector<MetadataEntry>& entries);
    void seal_item(ItemId id);

    // Own entries unioned with entries inherited over rendition relations;
    // the nearer item wins on a name conflict.
    std::vector<MetadataEntry> resolve_effective_metadata(ItemId id) const;

    // Everything the catalog indexes for `id`.
    UpsertInfo upsert_info(ItemId id) const;

    // Yields every item id exactly once, walking the sharded tree in path
    // order. The callback also receives the file path (used by fsck).
    void scan_store(const std::function<void(ItemId, const std::filesystem::path&)>& fn) const;
    std::vector<ItemId> scan_ids() const;

    std::size_t sign_item(ItemId id, const std::vector<CoveredRange>& covered,
                          SignatureAlgorithm algorithm, std::span<const std::uint8_t> key,
                          const std::string& signer_id);
    VerifyStatus verify_signature(ItemId id, std::size_t record_index,
                                  std::span<const std::uint8_t> key) const;

    // Wires catalog notifications for every mutating call. Pass nullptr to
    // detach.
    void attach_catalog(Catalog* catalog);

    // Deterministic id sequence for tests.
    void reseed_ids(std::uint64_t seed);

private:
    Store() = default;

    ItemId allocate_id();
    void require_writable() const;
    ItemId write_new_item(ItemFile item, std::optional<std::uint32_t> page_size);
    void notify(ItemId id);

    std::filesystem::path root_;
    StoreConfig config_;
    Catalog* catalog_ = nullptr;
    std::mt19937_64 rng_;
};

std::filesystem::path store_config_path(const std::filesystem::path& root);

} // namespace cif
