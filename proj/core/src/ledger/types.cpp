#include "lm2m/ledger/types.hpp"

#include "lm2m/util/config.hpp"
#include "lm2m/util/crypto.hpp"

#include <bit>
#include <stdexcept>

namespace lm2m::ledger {

Hash32 Hash32::from_hex(std::string_view hex)
{
    auto raw = lm2m::from_hex(hex);
    if (raw.size() != 32) throw std::invalid_argument("hash must be 32 bytes");
    Hash32 h;
    std::copy(raw.begin(), raw.end(), h.bytes.begin());
    return h;
}

bool Hash32::is_zero() const
{
    for (auto b : bytes)
        if (b != 0) return false;
    return true;
}

unsigned Hash32::leading_zero_bits() const
{
    unsigned n = 0;
    for (auto b : bytes) {
        if (b == 0) {
            n += 8;
            continue;
        }
        n += static_cast<unsigned>(std::countl_zero(b));
        break;
    }
    return n;
}

Hash32 Transaction::digest_of(ByteView data)
{
    Hash32 h;
    h.bytes = crypto::sha256(data);
    return h;
}

Bytes Transaction::body_bytes() const
{
    codec::Writer w;
    w.str(contract).str(function).bytes(args).str(caller).u64(gas_limit).u64(gas_price).u64(nonce);
    return w.take();
}

Transaction& Transaction::seal()
{
    tx_id = compute_id();
    return *this;
}

void Transaction::encode(codec::Writer& w) const
{
    w.fixed(tx_id.bytes).raw(body_bytes());
}

Transaction Transaction::decode(codec::Reader& r)
{
    Transaction tx;
    tx.tx_id.bytes = r.fixed<32>();
    tx.contract = r.str();
    tx.function = r.str();
    tx.args = r.bytes();
    tx.caller = r.str();
    tx.gas_limit = r.u64();
    tx.gas_price = r.u64();
    tx.nonce = r.u64();
    return tx;
}

Bytes Block::prefix_bytes() const
{
    codec::Writer w;
    w.u64(height).fixed(prev_hash.bytes).u64(timestamp_ms);
    w.u32(static_cast<std::uint32_t>(txs.size()));
    for (const auto& tx : txs) {
        codec::Writer tw;
        tx.encode(tw);
        w.bytes(tw.data());
    }
    return w.take();
}

Hash32 Block::compute_hash() const
{
    codec::Writer nonce;
    nonce.u64(pow_nonce);
    Hash32 h;
    h.bytes = crypto::Sha256{}.update(prefix_bytes()).update(nonce.data()).finish();
    return h;
}

Bytes Block::serialize() const
{
    codec::Writer w;
    w.raw(prefix_bytes()).u64(pow_nonce).fixed(hash.bytes);
    return w.take();
}

Block Block::deserialize(ByteView data)
{
    codec::Reader r(data);
    Block b;
    b.height = r.u64();
    b.prev_hash.bytes = r.fixed<32>();
    b.timestamp_ms = r.u64();
    const auto count = r.u32();
    // every transaction frame is at least 4 bytes
    if (count > r.remaining() / 4) throw codec::DecodeError("transaction count exceeds block size");
    b.txs.reserve(count);
    for (std::uint32_t i = 0; i < count; ++i) {
        const auto frame = r.bytes();
        codec::Reader tr(frame);
        b.txs.push_back(Transaction::decode(tr));
        tr.expect_end();
    }
    b.pow_nonce = r.u64();
    b.hash.bytes = r.fixed<32>();
    r.expect_end();
    return b;
}

std::string_view to_string(TxStatus s)
{
    switch (s) {
    case TxStatus::Applied: return "Applied";
    case TxStatus::Reverted: return "Reverted";
    case TxStatus::OutOfGas: return "OutOfGas";
    }
    return "Unknown";
}

ChainConfig ChainConfig::paper_emulation()
{
    ChainConfig c;
    c.block_interval_ms = 30000;
    return c;
}

ChainConfig ChainConfig::from(const KeyValueConfig& kv)
{
    const auto profile = kv.get_or("profile", "desk");
    ChainConfig c;
    if (profile == "paper-emulation") {
        c = paper_emulation();
    } else if (profile != "desk") {
        throw std::invalid_argument("unknown chain profile '" + profile + "'");
    }
    const auto bits = kv.get_u64_or("difficulty_bits", c.difficulty_bits);
    if (bits > 32) throw std::invalid_argument("difficulty_bits must be <= 32");
    c.difficulty_bits = static_cast<std::uint32_t>(bits);
    c.block_interval_ms = kv.get_u64_or("block_interval_ms", c.block_interval_ms);
    c.gas_base = kv.get_u64_or("gas_base", c.gas_base);
    c.gas_per_stored_byte = kv.get_u64_or("gas_per_stored_byte", c.gas_per_stored_byte);
    c.gas_per_read_byte = kv.get_u64_or("gas_per_read_byte", c.gas_per_read_byte);
    c.validate();
    return c;
}

void ChainConfig::validate() const
{
    if (difficulty_bits > 32) throw std::invalid_argument("difficulty_bits must be <= 32");
}

} // namespace lm2m::ledger
