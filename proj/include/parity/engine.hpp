#pragma once

// Event-sourced engine. Every mutation is a Command; applying it produces an
// Event carrying the resulting state hash. Commands are applied one at a
// time under an exclusive lock against a copy of the state, so a failed
// command leaves nothing behind and readers never see a half-applied one.

#include <cstdint>
#include <fstream>
#include <iosfwd>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "parity/config.hpp"
#include "parity/json.hpp"
#include "parity/ledger.hpp"
#include "parity/parity_line.hpp"
#include "parity/price_csv.hpp"

namespace parity {

inline constexpr const char* kSnapshotFormat = "parity-snapshot/1";

struct Command {
    std::string type;
    Date date;
    std::string investor;
    Json payload = Json::object();
};

struct Event {
    std::uint64_t seq = 0;
    Command command;
    std::string state_hash;
};

Json event_to_json(const Event& e);
Event event_from_json(const Json& j);
/// One JSON object per line; blank lines are skipped.
std::vector<Event> read_event_log(std::istream& in);

struct EngineState {
    std::uint64_t seq = 0;
    Date clock;
    LedgerState ledger;
    std::optional<FundPrices> prices;
    std::optional<FundTripled> funds;
    FundHistoryd fund_history;
    std::optional<FundTripled> line_anchor;  // fund points at the last refit
    std::optional<ParityLined> line;
    std::uint64_t line_version = 0;
    std::optional<CombinedPortfoliod> combined;
    ReceivedAssets inbox;
    PriceStore price_store;
};

Json state_to_json(const EngineState& s);
EngineState state_from_json(const Json& j);

struct Applied {
    Event event;
    Json result;  // command-specific: the account, the cycle report, ...
};

class Engine {
public:
    explicit Engine(EngineConfig config = {});
    Engine(const Engine&) = delete;
    Engine& operator=(const Engine&) = delete;

    const EngineConfig& config() const { return config_; }

    /// Appends events to `path` (JSON lines) from now on.
    void attach_log(const std::string& path);

    Applied apply(const Command& command);

    // Reads: each takes a shared lock and returns a copy.
    EngineState state() const;
    std::uint64_t seq() const;
    std::string state_hash() const;
    Json snapshot() const;
    std::vector<Event> events() const;
    std::vector<CycleReport> reports() const;
    std::optional<InvestorAccount> account(const std::string& id) const;
    std::optional<ParityLined> line() const;

    AllocationRecordd quote(const InvestorPreferenced& pref) const;
    Json line_info() const;
    Json frontier(std::optional<int> points = std::nullopt) const;
    Json account_view(const std::string& id) const;
    /// action: "deposit" (amount, optional preference change),
    /// "preference" (investor), "withdraw" (investor, fraction).
    Json fee_preview(const std::string& action, const std::string& investor, std::optional<Decimal> amount,
                     bool with_preference_change) const;

    void write_snapshot(const std::string& path) const;

    /// Fresh engine rebuilt from `events`; throws Conflict on the first event
    /// whose recomputed hash differs from the recorded one.
    static std::unique_ptr<Engine> replay(const EngineConfig& config, const std::vector<Event>& events);
    /// Engine resumed from a snapshot (hash verified), then `events` with a
    /// higher sequence number applied on top.
    static std::unique_ptr<Engine> restore(const EngineConfig& config, const Json& snapshot,
                                           const std::vector<Event>& events = {});

private:
    Json apply_locked(EngineState& s, const Command& c);
    void maybe_snapshot() const;

    EngineConfig config_;
    mutable std::shared_mutex mutex_;
    EngineState state_;
    std::string hash_;
    std::vector<Event> events_;
    std::vector<CycleReport> reports_;
    CycleReport pending_report_;
    std::unique_ptr<std::ofstream> log_;
};

}  // namespace parity
