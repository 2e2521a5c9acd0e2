#include "lm2m/ledger/verify.hpp"

#include "lm2m/ledger/journal.hpp"

namespace lm2m::ledger {

std::optional<std::string> ChainReplayer::apply(const Block& block, StateMap& state, std::vector<Receipt>& receipts)
{
    if (block.height != next_height_) return "height " + std::to_string(block.height) + " out of sequence";
    if (block.prev_hash != tip_hash_) return "prev_hash does not match predecessor";
    if (block.height > 0 && block.timestamp_ms < tip_timestamp_) return "timestamp earlier than predecessor";
    if (block.compute_hash() != block.hash) return "block hash mismatch";
    if (block.hash.leading_zero_bits() < executor_->config().difficulty_bits) return "insufficient proof of work";

    auto nonces = nonces_;
    for (const auto& tx : block.txs) {
        if (tx.compute_id() != tx.tx_id) return "transaction id mismatch";
        if (tx.gas_limit == 0) return "transaction with zero gas limit";
        auto& last = nonces[tx.caller];
        if (tx.nonce != last + 1) return "nonce out of sequence for caller '" + tx.caller + "'";
        last = tx.nonce;
    }

    Overlay layer(state);
    std::vector<Receipt> block_receipts;
    block_receipts.reserve(block.txs.size());
    for (const auto& tx : block.txs) block_receipts.push_back(executor_->execute(tx, layer, block.height));
    layer.apply_to(state);
    receipts.insert(receipts.end(), block_receipts.begin(), block_receipts.end());

    nonces_ = std::move(nonces);
    tip_hash_ = block.hash;
    tip_timestamp_ = block.timestamp_ms;
    ++next_height_;
    return std::nullopt;
}

ReplayOutcome replay_chain(std::span<const Block> blocks, const Executor& executor)
{
    ReplayOutcome out;
    ChainReplayer replayer(executor);
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        if (auto err = replayer.apply(blocks[i], out.state, out.receipts)) {
            out.verdict = VerifyResult::bad(i, *err);
            return out;
        }
    }
    return out;
}

VerifyResult verify_journal(ByteView journal_bytes, const Executor& executor)
{
    auto parsed = journal::parse(journal_bytes, true);
    auto outcome = replay_chain(parsed.blocks, executor);
    if (!outcome.verdict.ok) return outcome.verdict;
    if (parsed.error) return VerifyResult::bad(parsed.blocks.size(), *parsed.error);
    return {};
}

} // namespace lm2m::ledger
