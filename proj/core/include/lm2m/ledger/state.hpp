#pragma once

#include "lm2m/util/bytes.hpp"

#include <functional>
#include <map>
#include <optional>
#include <string>

namespace lm2m::ledger {

/// Confirmed world state. Keys are "<contract>/<contract key>".
using StateMap = std::map<std::string, Bytes, std::less<>>;

/// Visitor over a key range; return false to stop early.
using ScanFn = std::function<bool(std::string_view key, ByteView value)>;

/// Copy-free layered write set. Reads fall through to the parent layer (or
/// the base map); writes and deletions stay local until merged.
class Overlay {
public:
    explicit Overlay(const StateMap& base) : base_(&base) {}
    /// A new layer reading through `parent`.
    static Overlay over(const Overlay& parent)
    {
        Overlay o;
        o.parent_ = &parent;
        return o;
    }

    Overlay(Overlay&&) = default;
    Overlay& operator=(Overlay&&) = default;
    Overlay(const Overlay&) = delete;
    Overlay& operator=(const Overlay&) = delete;

    std::optional<Bytes> get(std::string_view key) const;
    void put(std::string_view key, ByteView value);
    void erase(std::string_view key);
    /// Ascending key order, merged across layers.
    void scan(std::string_view prefix, const ScanFn& fn) const;

    /// Moves this layer's writes into `parent`.
    void merge_into(Overlay& parent) &&;
    /// Applies this layer's writes to a map.
    void apply_to(StateMap& target) const;

    bool empty() const { return writes_.empty(); }

private:
    Overlay() = default;

    const StateMap* base_ = nullptr;
    const Overlay* parent_ = nullptr;
    std::map<std::string, std::optional<Bytes>, std::less<>> writes_;
};

} // namespace lm2m::ledger
