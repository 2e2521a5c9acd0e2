#include "lm2m/ledger/contract.hpp"

namespace lm2m::ledger {

std::string_view to_string(ContractErrc c)
{
    switch (c) {
    case ContractErrc::Revert: return "Revert";
    case ContractErrc::NotFound: return "NotFound";
    case ContractErrc::BadArguments: return "BadArguments";
    case ContractErrc::UnknownFunction: return "UnknownFunction";
    case ContractErrc::NotView: return "NotView";
    }
    return "Unknown";
}

void GasMeter::charge(std::uint64_t amount)
{
    if (!metered()) return;
    if (amount > limit_ - used_) {
        used_ = limit_;
        throw OutOfGas{};
    }
    used_ += amount;
}

Storage::Storage(std::string_view contract, Overlay& layer, GasMeter& gas)
    : ns_(std::string(contract) + "/"), layer_(&layer), gas_(&gas)
{
}

Storage::Storage(std::string_view contract, const StateMap& confirmed)
    : ns_(std::string(contract) + "/"), confirmed_(&confirmed)
{
}

std::string Storage::full_key(std::string_view key) const
{
    std::string k = ns_;
    k.append(key);
    return k;
}

std::optional<Bytes> Storage::get(std::string_view key)
{
    if (layer_ == nullptr) {
        auto it = confirmed_->find(full_key(key));
        if (it == confirmed_->end()) return std::nullopt;
        return it->second;
    }
    auto v = layer_->get(full_key(key));
    if (v) gas_->charge_read(v->size());
    return v;
}

void Storage::put(std::string_view key, ByteView value)
{
    if (layer_ == nullptr) throw ContractError(ContractErrc::NotView, "state change in read-only call");
    gas_->charge_store(key.size() + value.size());
    layer_->put(full_key(key), value);
}

void Storage::erase(std::string_view key)
{
    if (layer_ == nullptr) throw ContractError(ContractErrc::NotView, "state change in read-only call");
    layer_->erase(full_key(key));
}

void Storage::scan(std::string_view prefix, const ScanFn& fn)
{
    const auto full_prefix = full_key(prefix);
    const auto strip = ns_.size();
    if (layer_ == nullptr) {
        for (auto it = confirmed_->lower_bound(full_prefix);
             it != confirmed_->end() && std::string_view(it->first).substr(0, full_prefix.size()) == full_prefix;
             ++it) {
            if (!fn(std::string_view(it->first).substr(strip), it->second)) return;
        }
        return;
    }
    layer_->scan(full_prefix, [&](std::string_view k, ByteView v) {
        gas_->charge_read(v.size());
        return fn(k.substr(strip), v);
    });
}

} // namespace lm2m::ledger
