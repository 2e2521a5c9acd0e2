#pragma once

#include "lm2m/ledger/executor.hpp"
#include "lm2m/ledger/verify.hpp"

#include <chrono>
#include <condition_variable>
#include <filesystem>
#include <functional>
#include <shared_mutex>
#include <thread>
#include <unordered_map>
#include <unordered_set>
#include <variant>

namespace lm2m::ledger {

enum class LedgerErrc {
    BadNonce,
    MalformedTransaction,
    UnknownContract,
    NotFound,
    ReadOnly,
    CorruptJournal,
};

std::string_view to_string(LedgerErrc c);

class LedgerError : public std::runtime_error {
public:
    LedgerError(LedgerErrc code, const std::string& what) : std::runtime_error(what), code_(code) {}
    LedgerErrc code() const { return code_; }

private:
    LedgerErrc code_;
};

/// Transaction accepted but not yet mined.
struct PendingTx {
    Hash32 tx_id;
};

using TxLookup = std::variant<PendingTx, Receipt>;

/// Embedded single-node chain.
///
/// One writer context (mine_block, or the background miner) applies
/// transactions; submit_transaction() and call() may run concurrently with
/// it from any thread. Reads only observe mined state.
///
/// A ledger opened with `follower = true` never mines: it tails the journal
/// written by another process and rejects submissions.
class Ledger {
public:
    using Clock = std::function<std::uint64_t()>;

    struct Options {
        ChainConfig config;
        std::optional<std::filesystem::path> journal;
        bool follower = false;
        /// Milliseconds since the Unix epoch; defaults to the system clock.
        Clock clock_ms;
    };

    /// Replays and verifies an existing journal. Throws LedgerError{CorruptJournal}.
    Ledger(Options options, ContractSet contracts);
    ~Ledger();

    Ledger(const Ledger&) = delete;
    Ledger& operator=(const Ledger&) = delete;

    /// Throws LedgerError{BadNonce | MalformedTransaction | ReadOnly}.
    Hash32 submit_transaction(Transaction tx);

    /// Executes all pending transactions into a new block. Takes at least
    /// block_interval_ms of wall time.
    Block mine_block();

    /// Read-only query against confirmed state. Throws LedgerError{UnknownContract}
    /// or ContractError.
    Bytes call(std::string_view contract, std::string_view function, ByteView args) const;

    /// Full structural check plus replay from genesis compared with live state.
    VerifyResult verify_chain() const;

    /// Throws LedgerError{NotFound}.
    TxLookup get_receipt(const Hash32& tx_id) const;

    /// Blocks until the transaction is mined or the timeout elapses.
    std::optional<Receipt> wait_for_receipt(const Hash32& tx_id, std::chrono::milliseconds timeout) const;

    /// Next acceptable nonce for `caller`, counting pending transactions.
    std::uint64_t next_nonce(std::string_view caller) const;

    std::size_t pending_count() const;
    std::size_t block_count() const;
    std::vector<Block> blocks() const;
    StateMap state_snapshot() const;
    const ChainConfig& config() const { return executor_.config(); }
    const Executor& executor() const { return executor_; }
    bool follower() const { return options_.follower; }

    /// Background miner: produces a block whenever transactions are pending.
    void start_auto_mining();
    /// Background journal tailing for followers.
    void start_following(std::chrono::milliseconds poll_interval);
    /// Stops background threads; idempotent.
    void stop();

    /// Follower step: applies complete blocks appended to the journal since
    /// the last sync. Returns the number of new blocks.
    std::size_t sync_journal();

private:
    void publish(Block block, std::vector<Receipt> receipts, Overlay&& writes);

    Options options_;
    Executor executor_;

    std::mutex writer_mutex_; // one mining / syncing context at a time

    mutable std::shared_mutex state_mutex_;
    StateMap state_;
    std::vector<Block> blocks_;
    std::unordered_map<Hash32, Receipt, Hash32Hasher> receipts_;
    ChainReplayer follower_replayer_;
    std::size_t journal_offset_ = 0;

    mutable std::mutex pending_mutex_;
    std::vector<Transaction> pending_;
    std::unordered_set<Hash32, Hash32Hasher> pending_ids_;
    std::unordered_map<std::string, std::uint64_t> last_nonce_;

    mutable std::mutex notify_mutex_;
    mutable std::condition_variable receipt_cv_;
    std::condition_variable pending_cv_;
    bool stopping_ = false;
    std::jthread background_;
};

} // namespace lm2m::ledger
