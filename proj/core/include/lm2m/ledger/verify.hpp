#pragma once

#include "lm2m/ledger/executor.hpp"

#include <map>
#include <span>

namespace lm2m::ledger {

struct VerifyResult {
    bool ok = true;
    /// Lowest height at which an invariant fails. A final-state mismatch
    /// after a clean replay reports the chain length (one past the tip).
    std::optional<std::uint64_t> first_bad_height;
    std::string reason;

    explicit operator bool() const { return ok; }
    static VerifyResult bad(std::uint64_t height, std::string why) { return {false, height, std::move(why)}; }
};

/// Incremental validator: checks each block against the current tip and
/// replays its transactions.
class ChainReplayer {
public:
    explicit ChainReplayer(const Executor& executor) : executor_(&executor) {}

    /// Returns the failure reason, leaving `state` untouched, or applies the
    /// block and appends its receipts.
    std::optional<std::string> apply(const Block& block, StateMap& state, std::vector<Receipt>& receipts);

    std::uint64_t next_height() const { return next_height_; }
    const Hash32& tip_hash() const { return tip_hash_; }
    std::uint64_t tip_timestamp() const { return tip_timestamp_; }
    const std::map<std::string, std::uint64_t, std::less<>>& nonces() const { return nonces_; }

private:
    const Executor* executor_;
    std::uint64_t next_height_ = 0;
    Hash32 tip_hash_{};
    std::uint64_t tip_timestamp_ = 0;
    std::map<std::string, std::uint64_t, std::less<>> nonces_;
};

struct ReplayOutcome {
    VerifyResult verdict;
    StateMap state;
    std::vector<Receipt> receipts;
};

/// Replays from genesis, stopping at the first invalid block.
ReplayOutcome replay_chain(std::span<const Block> blocks, const Executor& executor);

/// Strict parse of journal bytes followed by a full replay.
VerifyResult verify_journal(ByteView journal_bytes, const Executor& executor);

} // namespace lm2m::ledger
