#include "lm2m/ledger/state.hpp"

namespace lm2m::ledger {

std::optional<Bytes> Overlay::get(std::string_view key) const
{
    if (auto it = writes_.find(key); it != writes_.end()) return it->second;
    if (parent_ != nullptr) return parent_->get(key);
    if (auto it = base_->find(key); it != base_->end()) return it->second;
    return std::nullopt;
}

void Overlay::put(std::string_view key, ByteView value)
{
    writes_.insert_or_assign(std::string(key), Bytes(value.begin(), value.end()));
}

void Overlay::erase(std::string_view key) { writes_.insert_or_assign(std::string(key), std::nullopt); }

void Overlay::scan(std::string_view prefix, const ScanFn& fn) const
{
    auto in_range = [&](std::string_view k) { return k.substr(0, prefix.size()) == prefix; };

    if (writes_.empty()) {
        if (parent_ != nullptr) {
            parent_->scan(prefix, fn);
            return;
        }
        for (auto it = base_->lower_bound(prefix); it != base_->end() && in_range(it->first); ++it) {
            if (!fn(it->first, it->second)) return;
        }
        return;
    }

    std::map<std::string, Bytes, std::less<>> merged;
    if (parent_ != nullptr) {
        parent_->scan(prefix, [&](std::string_view k, ByteView v) {
            merged.emplace(std::string(k), Bytes(v.begin(), v.end()));
            return true;
        });
    } else {
        for (auto it = base_->lower_bound(prefix); it != base_->end() && in_range(it->first); ++it) {
            merged.emplace(it->first, it->second);
        }
    }
    for (auto it = writes_.lower_bound(prefix); it != writes_.end() && in_range(it->first); ++it) {
        if (it->second) {
            merged.insert_or_assign(it->first, *it->second);
        } else {
            merged.erase(it->first);
        }
    }
    for (const auto& [k, v] : merged) {
        if (!fn(k, v)) return;
    }
}

void Overlay::merge_into(Overlay& parent) &&
{
    for (auto& [k, v] : writes_) parent.writes_.insert_or_assign(k, std::move(v));
    writes_.clear();
}

void Overlay::apply_to(StateMap& target) const
{
    for (const auto& [k, v] : writes_) {
        if (v) {
            target.insert_or_assign(k, *v);
        } else {
            target.erase(k);
        }
    }
}

} // namespace lm2m::ledger
