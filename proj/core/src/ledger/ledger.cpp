#include "lm2m/ledger/ledger.hpp"

#include "lm2m/ledger/journal.hpp"
#include "lm2m/util/crypto.hpp"

#include <spdlog/spdlog.h>

namespace lm2m::ledger {

std::string_view to_string(LedgerErrc c)
{
    switch (c) {
    case LedgerErrc::BadNonce: return "BadNonce";
    case LedgerErrc::MalformedTransaction: return "MalformedTransaction";
    case LedgerErrc::UnknownContract: return "UnknownContract";
    case LedgerErrc::NotFound: return "NotFound";
    case LedgerErrc::ReadOnly: return "ReadOnly";
    case LedgerErrc::CorruptJournal: return "CorruptJournal";
    }
    return "Unknown";
}

namespace {

std::uint64_t system_clock_ms()
{
    using namespace std::chrono;
    return static_cast<std::uint64_t>(duration_cast<milliseconds>(system_clock::now().time_since_epoch()).count());
}

/// Searches nonces until the block hash has enough leading zero bits.
void solve_pow(Block& block, std::uint32_t difficulty_bits)
{
    crypto::Sha256 prefix;
    prefix.update(block.prefix_bytes());
    for (std::uint64_t nonce = 0;; ++nonce) {
        codec::Writer w;
        w.u64(nonce);
        Hash32 h;
        h.bytes = prefix.clone().update(w.data()).finish();
        if (h.leading_zero_bits() >= difficulty_bits) {
            block.pow_nonce = nonce;
            block.hash = h;
            return;
        }
    }
}

} // namespace

Ledger::Ledger(Options options, ContractSet contracts)
    : options_(std::move(options)),
      executor_(options_.config, std::move(contracts)),
      follower_replayer_(executor_)
{
    options_.config.validate();
    if (!options_.clock_ms) options_.clock_ms = system_clock_ms;
    if (!options_.journal) return;

    const auto bytes = journal::read_file(*options_.journal);
    auto parsed = journal::parse(bytes, !options_.follower);
    std::vector<Receipt> receipts;
    for (const auto& block : parsed.blocks) {
        if (auto err = follower_replayer_.apply(block, state_, receipts)) {
            throw LedgerError(LedgerErrc::CorruptJournal,
                              "journal block " + std::to_string(block.height) + ": " + *err);
        }
        blocks_.push_back(block);
    }
    if (parsed.error) throw LedgerError(LedgerErrc::CorruptJournal, *parsed.error);
    journal_offset_ = parsed.consumed;
    for (auto& r : receipts) receipts_.emplace(r.tx_id, std::move(r));
    for (const auto& [caller, nonce] : follower_replayer_.nonces()) last_nonce_[caller] = nonce;
    if (!blocks_.empty()) {
        spdlog::debug("ledger: replayed {} blocks from {}", blocks_.size(), options_.journal->string());
    }
}

Ledger::~Ledger() { stop(); }

Hash32 Ledger::submit_transaction(Transaction tx)
{
    if (options_.follower) throw LedgerError(LedgerErrc::ReadOnly, "follower ledger does not accept transactions");
    if (tx.contract.empty() || tx.function.empty() || tx.caller.empty()) {
        throw LedgerError(LedgerErrc::MalformedTransaction, "transaction lacks contract, function or caller");
    }
    if (tx.gas_limit == 0) throw LedgerError(LedgerErrc::MalformedTransaction, "gas_limit must be positive");
    if (tx.tx_id != tx.compute_id()) throw LedgerError(LedgerErrc::MalformedTransaction, "tx_id does not match body");

    {
        std::shared_lock sl(state_mutex_);
        if (receipts_.contains(tx.tx_id)) throw LedgerError(LedgerErrc::BadNonce, "transaction already mined");
    }
    std::lock_guard lock(pending_mutex_);
    if (pending_ids_.contains(tx.tx_id)) throw LedgerError(LedgerErrc::BadNonce, "transaction already pending");
    auto& last = last_nonce_[tx.caller];
    if (tx.nonce != last + 1) {
        throw LedgerError(LedgerErrc::BadNonce, "expected nonce " + std::to_string(last + 1) + " for caller '" +
                                                    tx.caller + "', got " + std::to_string(tx.nonce));
    }
    last = tx.nonce;
    const auto id = tx.tx_id;
    pending_ids_.insert(id);
    pending_.push_back(std::move(tx));
    pending_cv_.notify_all();
    return id;
}

Block Ledger::mine_block()
{
    if (options_.follower) throw LedgerError(LedgerErrc::ReadOnly, "follower ledger does not mine");
    std::lock_guard writer(writer_mutex_);
    const auto started = std::chrono::steady_clock::now();

    std::vector<Transaction> txs;
    {
        std::lock_guard lock(pending_mutex_);
        txs.swap(pending_);
    }

    Block block;
    std::uint64_t prev_timestamp = 0;
    {
        std::shared_lock sl(state_mutex_);
        block.height = blocks_.size();
        if (!blocks_.empty()) {
            block.prev_hash = blocks_.back().hash;
            prev_timestamp = blocks_.back().timestamp_ms;
        }
    }

    // Only this context mutates state_, so reading it without the lock is safe.
    Overlay writes(state_);
    std::vector<Receipt> receipts;
    receipts.reserve(txs.size());
    for (const auto& tx : txs) receipts.push_back(executor_.execute(tx, writes, block.height));

    block.timestamp_ms = std::max(options_.clock_ms(), prev_timestamp);
    block.txs = std::move(txs);
    solve_pow(block, executor_.config().difficulty_bits);

    std::this_thread::sleep_until(started + std::chrono::milliseconds(executor_.config().block_interval_ms));
    publish(block, std::move(receipts), std::move(writes));
    return block;
}

void Ledger::publish(Block block, std::vector<Receipt> receipts, Overlay&& writes)
{
    if (options_.journal) journal::append(*options_.journal, block);
    {
        std::unique_lock ul(state_mutex_);
        writes.apply_to(state_);
        for (auto& r : receipts) receipts_.insert_or_assign(r.tx_id, std::move(r));
        blocks_.push_back(std::move(block));
    }
    {
        std::lock_guard lock(pending_mutex_);
        for (const auto& tx : blocks_.back().txs) pending_ids_.erase(tx.tx_id);
    }
    std::lock_guard lock(notify_mutex_);
    receipt_cv_.notify_all();
}

Bytes Ledger::call(std::string_view contract, std::string_view function, ByteView args) const
{
    std::shared_lock sl(state_mutex_);
    return executor_.call(state_, contract, function, args);
}

VerifyResult Ledger::verify_chain() const
{
    std::vector<Block> chain;
    StateMap live;
    std::unordered_map<Hash32, Receipt, Hash32Hasher> live_receipts;
    {
        std::shared_lock sl(state_mutex_);
        chain = blocks_;
        live = state_;
        live_receipts = receipts_;
    }
    auto outcome = replay_chain(chain, executor_);
    if (!outcome.verdict.ok) return outcome.verdict;
    for (const auto& r : outcome.receipts) {
        auto it = live_receipts.find(r.tx_id);
        if (it == live_receipts.end() || it->second != r) {
            return VerifyResult::bad(r.block_height, "receipt differs from replay for tx " + r.tx_id.hex());
        }
    }
    if (outcome.state != live) return VerifyResult::bad(chain.size(), "replayed state differs from live state");
    return {};
}

TxLookup Ledger::get_receipt(const Hash32& tx_id) const
{
    {
        std::shared_lock sl(state_mutex_);
        if (auto it = receipts_.find(tx_id); it != receipts_.end()) return it->second;
    }
    {
        std::lock_guard lock(pending_mutex_);
        if (pending_ids_.contains(tx_id)) return PendingTx{tx_id};
    }
    // mined between the two lookups
    std::shared_lock sl(state_mutex_);
    if (auto it = receipts_.find(tx_id); it != receipts_.end()) return it->second;
    throw LedgerError(LedgerErrc::NotFound, "unknown transaction " + tx_id.hex());
}

std::optional<Receipt> Ledger::wait_for_receipt(const Hash32& tx_id, std::chrono::milliseconds timeout) const
{
    const auto deadline = std::chrono::steady_clock::now() + timeout;
    auto mined = [&]() -> std::optional<Receipt> {
        std::shared_lock sl(state_mutex_);
        if (auto it = receipts_.find(tx_id); it != receipts_.end()) return it->second;
        return std::nullopt;
    };
    std::unique_lock lock(notify_mutex_);
    while (true) {
        if (auto r = mined()) return r;
        if (receipt_cv_.wait_until(lock, deadline) == std::cv_status::timeout) return mined();
    }
}

std::uint64_t Ledger::next_nonce(std::string_view caller) const
{
    std::lock_guard lock(pending_mutex_);
    auto it = last_nonce_.find(std::string(caller));
    return (it == last_nonce_.end() ? 0 : it->second) + 1;
}

std::size_t Ledger::pending_count() const
{
    std::lock_guard lock(pending_mutex_);
    return pending_.size();
}

std::size_t Ledger::block_count() const
{
    std::shared_lock sl(state_mutex_);
    return blocks_.size();
}

std::vector<Block> Ledger::blocks() const
{
    std::shared_lock sl(state_mutex_);
    return blocks_;
}

StateMap Ledger::state_snapshot() const
{
    std::shared_lock sl(state_mutex_);
    return state_;
}

void Ledger::start_auto_mining()
{
    if (options_.follower) throw LedgerError(LedgerErrc::ReadOnly, "follower ledger does not mine");
    if (background_.joinable()) return;
    background_ = std::jthread([this] {
        while (true) {
            {
                std::unique_lock lock(pending_mutex_);
                pending_cv_.wait(lock, [&] { return stopping_ || !pending_.empty(); });
                if (stopping_) return;
            }
            try {
                mine_block();
            } catch (const std::exception& e) {
                spdlog::error("ledger: mining failed: {}", e.what());
            }
        }
    });
}

void Ledger::start_following(std::chrono::milliseconds poll_interval)
{
    if (!options_.journal) throw LedgerError(LedgerErrc::ReadOnly, "following requires a journal path");
    if (background_.joinable()) return;
    background_ = std::jthread([this, poll_interval] {
        while (true) {
            try {
                sync_journal();
            } catch (const std::exception& e) {
                spdlog::error("ledger: journal sync failed: {}", e.what());
            }
            std::unique_lock lock(pending_mutex_);
            if (pending_cv_.wait_for(lock, poll_interval, [&] { return stopping_; })) return;
        }
    });
}

void Ledger::stop()
{
    {
        std::lock_guard lock(pending_mutex_);
        stopping_ = true;
    }
    pending_cv_.notify_all();
    if (background_.joinable()) background_.join();
}

std::size_t Ledger::sync_journal()
{
    if (!options_.journal) return 0;
    std::lock_guard writer(writer_mutex_);
    const auto bytes = journal::read_file(*options_.journal, journal_offset_);
    auto parsed = journal::parse(bytes, false);
    for (const auto& block : parsed.blocks) {
        std::vector<Receipt> receipts;
        {
            std::unique_lock ul(state_mutex_);
            if (auto err = follower_replayer_.apply(block, state_, receipts)) {
                throw LedgerError(LedgerErrc::CorruptJournal,
                                  "journal block " + std::to_string(block.height) + ": " + *err);
            }
            for (auto& r : receipts) receipts_.insert_or_assign(r.tx_id, std::move(r));
            blocks_.push_back(block);
        }
        journal_offset_ += 4 + block.serialize().size();
    }
    if (parsed.error) throw LedgerError(LedgerErrc::CorruptJournal, *parsed.error);
    if (!parsed.blocks.empty()) {
        std::lock_guard lock(notify_mutex_);
        receipt_cv_.notify_all();
    }
    return parsed.blocks.size();
}

} // namespace lm2m::ledger
