#include "oracles/oracle_values.hpp"
#include "support/stack.hpp"

#include "lm2m/contracts/api.hpp"
#include "lm2m/contracts/stores.hpp"
#include "lm2m/ledger/journal.hpp"
#include "lm2m/ledger/ledger.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <thread>

using namespace lm2m;
using namespace lm2m::ledger;
using lm2m::testing::fast_chain;

namespace {

std::unique_ptr<Ledger> make_ledger(ChainConfig cfg = fast_chain(), std::optional<std::filesystem::path> journal = {},
                                    bool follower = false, Ledger::Clock clock = {})
{
    return contracts::open_ledger(Ledger::Options{cfg, std::move(journal), follower, std::move(clock)});
}

Transaction signed_tx(Transaction tx, const std::string& caller, std::uint64_t nonce)
{
    tx.caller = caller;
    tx.nonce = nonce;
    tx.seal();
    return tx;
}

contracts::ClientRecord record(const std::string& ep, std::size_t uri_pad = 0)
{
    return contracts::ClientRecord{ep,
                                   "coap://127.0.0.1:5683",
                                   "coap://127.0.0.1:5684" + std::string(uri_pad ? 1 : 0, '/') + std::string(uri_pad, 'x'),
                                   ep + "-bs",
                                   Bytes(32, 1),
                                   ep + "-dm",
                                   Bytes(32, 2)};
}

contracts::AnomalyRecord anomaly(std::uint64_t ts, const std::string& text) { return {ts, "dev-1", text}; }

Receipt mined(Ledger& l, const Hash32& id)
{
    auto r = l.get_receipt(id);
    EXPECT_TRUE(std::holds_alternative<Receipt>(r));
    return std::get<Receipt>(r);
}

class TempDir {
public:
    TempDir()
    {
        path_ = std::filesystem::temp_directory_path() /
                ("lm2m-ledger-" + std::to_string(::getpid()) + "-" + std::to_string(counter_++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() { std::filesystem::remove_all(path_); }
    std::filesystem::path file(const std::string& name) const { return path_ / name; }

private:
    static inline int counter_ = 0;
    std::filesystem::path path_;
};

void resolve_pow(Block& b, unsigned bits)
{
    for (b.pow_nonce = 0;; ++b.pow_nonce) {
        b.hash = b.compute_hash();
        if (b.hash.leading_zero_bits() >= bits)
            return;
    }
}

/// Ten blocks with one anomaly each.
std::unique_ptr<Ledger> ten_block_chain(std::optional<std::filesystem::path> journal = {})
{
    auto l = make_ledger(fast_chain(), std::move(journal));
    for (std::uint64_t i = 1; i <= 10; ++i) {
        l->submit_transaction(signed_tx(contracts::tx::add_anomaly(anomaly(i, "event " + std::to_string(i))), "alice", i));
        l->mine_block();
    }
    return l;
}

} // namespace

TEST(Hash32, HexAndLeadingZeros)
{
    Hash32 h;
    EXPECT_TRUE(h.is_zero());
    EXPECT_EQ(h.hex(), std::string(64, '0'));
    EXPECT_EQ(h.leading_zero_bits(), 256u);
    h.bytes[1] = 0x10;
    EXPECT_EQ(h.leading_zero_bits(), 11u);
    auto parsed = Hash32::from_hex(oracle::kTxId);
    EXPECT_EQ(parsed.hex(), oracle::kTxId);
    EXPECT_THROW(Hash32::from_hex("abcd"), std::invalid_argument);
}

TEST(Transaction, IdAndBlockHashMatchIndependentDerivation)
{
    Transaction tx;
    tx.contract = "AnomalyStore";
    tx.function = "addAnomaly";
    tx.args = {1, 2, 3};
    tx.caller = "alice";
    tx.nonce = 1;
    tx.seal();
    EXPECT_EQ(tx.tx_id.hex(), oracle::kTxId);
    EXPECT_EQ(tx.gas_limit, 4712388u);
    EXPECT_EQ(tx.gas_price, 40u);

    Block b;
    b.height = 0;
    b.timestamp_ms = 1000;
    b.txs = {tx};
    b.pow_nonce = 7;
    EXPECT_EQ(b.compute_hash().hex(), oracle::kBlockHash);

    b.hash = b.compute_hash();
    auto bytes = b.serialize();
    EXPECT_EQ(Block::deserialize(bytes), b);
    bytes.push_back(0);
    EXPECT_THROW(Block::deserialize(bytes), codec::DecodeError);
}

TEST(Ledger, GenesisWithZeroDifficulty)
{
    auto cfg = fast_chain();
    cfg.difficulty_bits = 0;
    auto l = make_ledger(cfg);
    auto b = l->mine_block();
    EXPECT_EQ(b.height, 0u);
    EXPECT_EQ(b.prev_hash.hex(), std::string(64, '0'));
    EXPECT_EQ(b.hash, b.compute_hash());
    auto b1 = l->mine_block();
    EXPECT_EQ(b1.prev_hash, b.hash);
}

TEST(Ledger, ProofOfWorkMeetsDifficulty)
{
    auto cfg = fast_chain();
    cfg.difficulty_bits = 12;
    auto l = make_ledger(cfg);
    for (int i = 0; i < 3; ++i)
        EXPECT_GE(l->mine_block().hash.leading_zero_bits(), 12u);
}

TEST(Ledger, MiningTakesAtLeastTheBlockInterval)
{
    auto cfg = fast_chain();
    cfg.block_interval_ms = 150;
    auto l = make_ledger(cfg);
    auto t0 = std::chrono::steady_clock::now();
    l->mine_block();
    EXPECT_GE(std::chrono::steady_clock::now() - t0, std::chrono::milliseconds(150));
}

TEST(Ledger, SubmitValidation)
{
    auto l = make_ledger();
    auto tx = signed_tx(contracts::tx::add_anomaly(anomaly(1, "x")), "alice", 1);
    auto id = l->submit_transaction(tx);
    EXPECT_EQ(id, tx.tx_id);
    try {
        l->submit_transaction(tx);
        FAIL();
    } catch (const LedgerError& e) {
        EXPECT_EQ(e.code(), LedgerErrc::BadNonce);
    }
    try {
        l->submit_transaction(signed_tx(contracts::tx::add_anomaly(anomaly(2, "y")), "alice", 3));
        FAIL();
    } catch (const LedgerError& e) {
        EXPECT_EQ(e.code(), LedgerErrc::BadNonce);
    }
    auto zero_gas = contracts::tx::add_anomaly(anomaly(2, "y"));
    zero_gas.gas_limit = 0;
    EXPECT_THROW(l->submit_transaction(signed_tx(zero_gas, "alice", 2)), LedgerError);
    auto forged = signed_tx(contracts::tx::add_anomaly(anomaly(2, "y")), "alice", 2);
    forged.args.push_back(0);
    try {
        l->submit_transaction(forged);
        FAIL();
    } catch (const LedgerError& e) {
        EXPECT_EQ(e.code(), LedgerErrc::MalformedTransaction);
    }
    EXPECT_EQ(l->next_nonce("alice"), 2u);
    l->mine_block();
    try {
        l->submit_transaction(tx);
        FAIL();
    } catch (const LedgerError& e) {
        EXPECT_EQ(e.code(), LedgerErrc::BadNonce);
    }
}

TEST(Ledger, ReceiptLookup)
{
    auto l = make_ledger();
    auto id = l->submit_transaction(signed_tx(contracts::tx::add_anomaly(anomaly(1, "x")), "alice", 1));
    EXPECT_TRUE(std::holds_alternative<PendingTx>(l->get_receipt(id)));
    auto b = l->mine_block();
    auto r = mined(*l, id);
    EXPECT_EQ(r.status, TxStatus::Applied);
    EXPECT_EQ(r.block_height, b.height);
    EXPECT_GE(r.gas_used, l->config().gas_base);
    try {
        l->get_receipt(Transaction::digest_of(as_view("nothing")));
        FAIL();
    } catch (const LedgerError& e) {
        EXPECT_EQ(e.code(), LedgerErrc::NotFound);
    }
}

TEST(Ledger, UnknownContractIsMinedAsReverted)
{
    auto l = make_ledger();
    Transaction tx;
    tx.contract = "Foo";
    tx.function = "bar";
    auto id = l->submit_transaction(signed_tx(tx, "alice", 1));
    auto before = l->state_snapshot();
    auto b = l->mine_block();
    ASSERT_EQ(b.txs.size(), 1u);
    auto r = mined(*l, id);
    EXPECT_EQ(r.status, TxStatus::Reverted);
    EXPECT_EQ(r.revert_reason, "unknown contract");
    EXPECT_EQ(l->state_snapshot(), before);
}

TEST(Ledger, ReadOnlyCalls)
{
    auto l = make_ledger();
    contracts::Queries q(*l);
    EXPECT_TRUE(q.all_anomalies().empty());
    codec::Writer w;
    w.str("missing");
    try {
        l->call("ClientStore", "getClient", w.data());
        FAIL();
    } catch (const ContractError& e) {
        EXPECT_EQ(e.code(), ContractErrc::NotFound);
    }
    try {
        l->call("Nope", "x", {});
        FAIL();
    } catch (const LedgerError& e) {
        EXPECT_EQ(e.code(), LedgerErrc::UnknownContract);
    }
    try {
        l->call("ClientStore", "addClient", {});
        FAIL();
    } catch (const ContractError& e) {
        EXPECT_EQ(e.code(), ContractErrc::NotView);
    }
    auto blocks = l->block_count();
    auto rec = record("ep1");
    l->submit_transaction(signed_tx(contracts::tx::add_client(rec), "alice", 1));
    EXPECT_FALSE(q.get_client("ep1")); // not yet mined
    l->mine_block();
    EXPECT_EQ(q.get_client("ep1"), rec);
    EXPECT_EQ(l->block_count(), blocks + 1);
}

TEST(Ledger, RevertedTransactionLeavesStateUntouched)
{
    auto l = make_ledger();
    l->submit_transaction(signed_tx(contracts::tx::add_client(record("dev-1")), "alice", 1));
    l->mine_block();
    auto before = l->state_snapshot();
    auto id = l->submit_transaction(signed_tx(contracts::tx::add_client(record("dev-1")), "alice", 2));
    l->mine_block();
    auto r = mined(*l, id);
    EXPECT_EQ(r.status, TxStatus::Reverted);
    EXPECT_EQ(r.revert_reason, "client exists");
    EXPECT_GE(r.gas_used, l->config().gas_base);
    EXPECT_EQ(l->state_snapshot(), before);
}

TEST(Ledger, OutOfGasConsumesLimitAndRollsBack)
{
    auto l = make_ledger();
    auto before = l->state_snapshot();
    auto tx = contracts::tx::add_client(record("dev-1"));
    tx.gas_limit = l->config().gas_base + 10;
    auto id = l->submit_transaction(signed_tx(tx, "alice", 1));
    l->mine_block();
    auto r = mined(*l, id);
    EXPECT_EQ(r.status, TxStatus::OutOfGas);
    EXPECT_EQ(r.gas_used, tx.gas_limit);
    EXPECT_EQ(l->state_snapshot(), before);
}

TEST(Ledger, GasGrowsWithStoredBytes)
{
    auto l = make_ledger();
    auto small = l->submit_transaction(signed_tx(contracts::tx::add_client(record("a", 0)), "alice", 1));
    auto large = l->submit_transaction(signed_tx(contracts::tx::add_client(record("b", 100)), "alice", 2));
    l->mine_block();
    auto rs = mined(*l, small), rl = mined(*l, large);
    ASSERT_EQ(rs.status, TxStatus::Applied);
    ASSERT_EQ(rl.status, TxStatus::Applied);
    EXPECT_GE(rs.gas_used, l->config().gas_base);
    // 101 more bytes stored in the record, each at gas_per_stored_byte
    EXPECT_GE(rl.gas_used - rs.gas_used, 101 * l->config().gas_per_stored_byte);
}

TEST(Ledger, StateIndependentOfBlockBoundaries)
{
    std::vector<Transaction> txs;
    std::uint64_t n = 0;
    for (int i = 0; i < 6; ++i) {
        txs.push_back(signed_tx(contracts::tx::add_client(record("d" + std::to_string(i))), "alice", ++n));
        txs.push_back(signed_tx(contracts::tx::add_anomaly(anomaly(100 + i, "a")), "alice", ++n));
    }
    txs.push_back(signed_tx(contracts::tx::remove_client("d2"), "alice", ++n));
    txs.push_back(signed_tx(contracts::tx::remove_client("d2"), "alice", ++n)); // reverts

    auto one = make_ledger();
    for (const auto& t : txs)
        one->submit_transaction(t);
    one->mine_block();

    auto many = make_ledger();
    for (std::size_t i = 0; i < txs.size(); ++i) {
        many->submit_transaction(txs[i]);
        if (i % 3 == 0)
            many->mine_block();
    }
    many->mine_block();
    EXPECT_EQ(one->state_snapshot(), many->state_snapshot());
    EXPECT_NE(one->block_count(), many->block_count());
}

TEST(Ledger, TimestampsNeverDecrease)
{
    std::uint64_t now = 5000;
    auto l = make_ledger(fast_chain(), {}, false, [&] { return now; });
    auto a = l->mine_block();
    now = 1000;
    auto b = l->mine_block();
    EXPECT_EQ(a.timestamp_ms, 5000u);
    EXPECT_EQ(b.timestamp_ms, 5000u);
    EXPECT_TRUE(l->verify_chain());
}

TEST(Verify, UntamperedChainIsValid)
{
    auto l = ten_block_chain();
    auto v = l->verify_chain();
    EXPECT_TRUE(v.ok) << v.reason;
    EXPECT_FALSE(v.first_bad_height);
}

TEST(Verify, ByteFlipInBlockThree)
{
    auto l = ten_block_chain();
    auto blocks = l->blocks();
    auto bytes = blocks[3].serialize();
    bytes[8 + 32 + 8 + 4 + 4 + 40] ^= 0x01; // inside the first transaction frame
    try {
        blocks[3] = Block::deserialize(bytes);
    } catch (const codec::DecodeError&) {
        FAIL() << "mutation should stay decodable for this position";
    }
    auto v = replay_chain(blocks, l->executor()).verdict;
    EXPECT_FALSE(v.ok);
    EXPECT_EQ(v.first_bad_height, 3u);
}

TEST(Verify, RecomputedBlockThreeBreaksBlockFour)
{
    auto l = ten_block_chain();
    auto blocks = l->blocks();
    auto& tx = blocks[3].txs.at(0);
    tx.args = contracts::tx::add_anomaly(anomaly(4, "forged")).args;
    tx.seal();
    resolve_pow(blocks[3], l->config().difficulty_bits);
    auto v = replay_chain(blocks, l->executor()).verdict;
    EXPECT_FALSE(v.ok);
    EXPECT_EQ(v.first_bad_height, 4u) << v.reason;
}

TEST(Journal, ReplayReproducesChain)
{
    TempDir dir;
    auto path = dir.file("chain.bin");
    StateMap state;
    std::vector<Block> blocks;
    {
        auto l = ten_block_chain(path);
        state = l->state_snapshot();
        blocks = l->blocks();
    }
    auto reopened = make_ledger(fast_chain(), path);
    EXPECT_EQ(reopened->state_snapshot(), state);
    EXPECT_EQ(reopened->blocks(), blocks);
    EXPECT_EQ(reopened->next_nonce("alice"), 11u);
    EXPECT_EQ(contracts::Queries(*reopened).all_anomalies().size(), 10u);
    EXPECT_TRUE(verify_journal(journal::read_file(path), reopened->executor()));

    // the journal is exactly length-prefixed block serializations
    auto raw = journal::read_file(path);
    std::size_t expected = 0;
    for (const auto& b : blocks)
        expected += 4 + b.serialize().size();
    EXPECT_EQ(raw.size(), expected);
}

TEST(Journal, TamperedFileIsRejected)
{
    TempDir dir;
    auto path = dir.file("chain.bin");
    ten_block_chain(path);
    auto raw = journal::read_file(path);
    raw[raw.size() / 2] ^= 0x40;
    auto bad = dir.file("bad.bin");
    {
        std::ofstream out(bad, std::ios::binary);
        out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    }
    try {
        make_ledger(fast_chain(), bad);
        FAIL();
    } catch (const LedgerError& e) {
        EXPECT_EQ(e.code(), LedgerErrc::CorruptJournal);
    }
    EXPECT_FALSE(verify_journal(raw, Executor(fast_chain(), contracts::default_contracts())));
}

TEST(Journal, TruncatedTailRejectedByWriterToleratedByFollower)
{
    TempDir dir;
    auto path = dir.file("chain.bin");
    ten_block_chain(path);
    auto raw = journal::read_file(path);
    raw.resize(raw.size() - 5);
    {
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    }
    EXPECT_THROW(make_ledger(fast_chain(), path), LedgerError);
    auto follower = make_ledger(fast_chain(), path, true);
    EXPECT_EQ(follower->block_count(), 9u);
}

TEST(Journal, FollowerTailsWriter)
{
    TempDir dir;
    auto path = dir.file("chain.bin");
    auto writer = make_ledger(fast_chain(), path);
    writer->mine_block();
    auto follower = make_ledger(fast_chain(), path, true);
    EXPECT_EQ(follower->block_count(), 1u);
    try {
        follower->submit_transaction(signed_tx(contracts::tx::add_anomaly(anomaly(1, "x")), "bob", 1));
        FAIL();
    } catch (const LedgerError& e) {
        EXPECT_EQ(e.code(), LedgerErrc::ReadOnly);
    }
    EXPECT_THROW(follower->mine_block(), LedgerError);

    writer->submit_transaction(signed_tx(contracts::tx::add_client(record("dev-9")), "alice", 1));
    writer->mine_block();
    EXPECT_EQ(follower->sync_journal(), 1u);
    EXPECT_TRUE(contracts::Queries(*follower).client_exists("dev-9"));
    EXPECT_EQ(follower->state_snapshot(), writer->state_snapshot());
    EXPECT_EQ(follower->sync_journal(), 0u);
}

TEST(Ledger, ConcurrentSubmittersWithAutoMining)
{
    auto l = make_ledger();
    l->start_auto_mining();
    contracts::Submitter sub(*l, "svc");
    std::vector<std::jthread> threads;
    std::mutex mu;
    std::vector<Hash32> ids;
    for (int t = 0; t < 4; ++t)
        threads.emplace_back([&, t] {
            for (int i = 0; i < 10; ++i) {
                auto id = sub.submit(contracts::tx::add_anomaly(anomaly(1 + t * 100 + i, "c")));
                std::lock_guard lock(mu);
                ids.push_back(id);
            }
        });
    threads.clear();
    for (const auto& id : ids) {
        auto r = l->wait_for_receipt(id, std::chrono::seconds(30));
        ASSERT_TRUE(r);
        EXPECT_EQ(r->status, TxStatus::Applied);
    }
    EXPECT_EQ(contracts::Queries(*l).anomaly_count(), 40u);
    l->stop();
    EXPECT_TRUE(l->verify_chain());
}

TEST(ChainConfig, ProfilesAndValidation)
{
    EXPECT_EQ(ChainConfig::desk().block_interval_ms, 500u);
    EXPECT_EQ(ChainConfig::desk().difficulty_bits, 12u);
    EXPECT_EQ(ChainConfig::paper_emulation().block_interval_ms, 30000u);
    auto kv = KeyValueConfig::parse("profile=paper-emulation\ndifficulty_bits=8\n");
    auto c = ChainConfig::from(kv);
    EXPECT_EQ(c.block_interval_ms, 30000u);
    EXPECT_EQ(c.difficulty_bits, 8u);
    EXPECT_THROW(ChainConfig::from(KeyValueConfig::parse("profile=mainnet\n")), std::invalid_argument);
    ChainConfig bad;
    bad.difficulty_bits = 33;
    EXPECT_THROW(bad.validate(), std::invalid_argument);
}
