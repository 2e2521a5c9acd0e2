#pragma once

#include "lm2m/util/bytes.hpp"
#include "lm2m/util/codec.hpp"

#include <array>
#include <compare>
#include <optional>
#include <string>
#include <vector>

namespace lm2m {
class KeyValueConfig;
}

namespace lm2m::ledger {

struct Hash32 {
    std::array<std::uint8_t, 32> bytes{};

    static Hash32 from_hex(std::string_view hex);
    std::string hex() const { return to_hex(bytes); }
    bool is_zero() const;
    unsigned leading_zero_bits() const;

    auto operator<=>(const Hash32&) const = default;
};

struct Hash32Hasher {
    std::size_t operator()(const Hash32& h) const noexcept
    {
        std::size_t v = 0;
        for (int i = 0; i < 8; ++i) v = (v << 8) | h.bytes[i];
        return v;
    }
};

/// Default gas limit and price for submitted transactions.
inline constexpr std::uint64_t kDefaultGasLimit = 4712388;
inline constexpr std::uint64_t kDefaultGasPrice = 40;

struct Transaction {
    Hash32 tx_id;
    std::string contract;
    std::string function;
    Bytes args;
    std::string caller;
    std::uint64_t gas_limit = kDefaultGasLimit;
    std::uint64_t gas_price = kDefaultGasPrice;
    std::uint64_t nonce = 0;

    /// Canonical bytes of every field except tx_id.
    Bytes body_bytes() const;
    Hash32 compute_id() const { return digest_of(body_bytes()); }
    /// Sets tx_id from the body.
    Transaction& seal();

    void encode(codec::Writer& w) const;
    static Transaction decode(codec::Reader& r);

    bool operator==(const Transaction&) const = default;

    static Hash32 digest_of(ByteView data);
};

struct Block {
    std::uint64_t height = 0;
    Hash32 prev_hash;
    std::uint64_t timestamp_ms = 0;
    std::vector<Transaction> txs;
    std::uint64_t pow_nonce = 0;
    Hash32 hash;

    /// Everything hashed except the trailing nonce.
    Bytes prefix_bytes() const;
    Hash32 compute_hash() const;
    /// Canonical serialization: hashed fields followed by the stored hash.
    Bytes serialize() const;
    /// Requires the input to be consumed exactly.
    static Block deserialize(ByteView data);

    bool operator==(const Block&) const = default;
};

enum class TxStatus : std::uint8_t { Applied = 0, Reverted = 1, OutOfGas = 2 };

std::string_view to_string(TxStatus s);

struct Receipt {
    Hash32 tx_id;
    TxStatus status = TxStatus::Applied;
    std::uint64_t gas_used = 0;
    std::uint64_t block_height = 0;
    std::optional<std::string> revert_reason;

    bool operator==(const Receipt&) const = default;
};

struct ChainConfig {
    std::uint32_t difficulty_bits = 12;
    std::uint64_t block_interval_ms = 500;
    std::uint64_t gas_base = 21000;
    std::uint64_t gas_per_stored_byte = 625;
    std::uint64_t gas_per_read_byte = 3;

    static ChainConfig desk() { return {}; }
    /// 30 s blocks, the public-testnet confirmation time.
    static ChainConfig paper_emulation();
    /// Reads `profile` (desk|paper-emulation) then individual keys.
    static ChainConfig from(const KeyValueConfig& kv);

    /// Throws std::invalid_argument.
    void validate() const;
};

} // namespace lm2m::ledger
