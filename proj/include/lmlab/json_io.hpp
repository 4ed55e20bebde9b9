#pragma once

#include <stdexcept>
#include <string>

#include <json.hpp>

#include "lmlab/design.hpp"
#include "lmlab/mining.hpp"
#include "lmlab/pool.hpp"
#include "lmlab/sim.hpp"
#include "lmlab/strategy.hpp"

namespace lmlab {

// Malformed input documents. Deliberately not an lmlab::Error: the CLI maps
// it to the input-error exit code.
struct FormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using json = nlohmann::json;

void to_json(json& j, const PoolConfig& c);
void from_json(const json& j, PoolConfig& c);
void to_json(json& j, const TokenAmounts& t);
void from_json(const json& j, TokenAmounts& t);
void to_json(json& j, const ProviderWallet& w);
void from_json(const json& j, ProviderWallet& w);
void to_json(json& j, const RewardSchedule& s);
void from_json(const json& j, RewardSchedule& s);
void to_json(json& j, const RewardStatement& s);
void from_json(const json& j, RewardStatement& s);
void to_json(json& j, const Allocation& a);
void from_json(const json& j, Allocation& a);
void to_json(json& j, const OpponentAggregate& o);
void from_json(const json& j, OpponentAggregate& o);
void to_json(json& j, const DesignSpec& d);
void from_json(const json& j, DesignSpec& d);
void to_json(json& j, const SimScenario& s);
void from_json(const json& j, SimScenario& s);
void to_json(json& j, const SimReport& r);
void from_json(const json& j, SimReport& r);

std::string to_string(Policy p);
std::string to_string(Reallocation r);
std::string to_string(SwapSide s);
Policy parse_policy(const std::string& s);
Reallocation parse_reallocation(const std::string& s);
SwapSide parse_side(const std::string& s);

// Shortest decimal with 12 significant digits.
std::string format_number(double v);

/// Per-slot CSV: slot, price, reward_<id> for each provider in arrival
/// order, withheld, turnover.
std::string report_csv(const SimReport& report);

/// Plot table for a schedule: bin, price_lo, price_hi, reward.
std::string schedule_table_csv(const RewardSchedule& schedule, const PoolConfig& config);

json read_json_file(const std::string& path);

}  // namespace lmlab
