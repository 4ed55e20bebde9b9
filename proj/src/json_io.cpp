#include "lmlab/json_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace lmlab {

namespace {

int parse_bin_key(const std::string& key) {
  std::size_t used = 0;
  int bin = 0;
  try {
    bin = std::stoi(key, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != key.size()) throw FormatError("bin key '" + key + "' is not an integer");
  return bin;
}

template <typename T>
json bin_object(const std::map<int, T>& m) {
  json j = json::object();
  for (const auto& [bin, v] : m) j[std::to_string(bin)] = v;
  return j;
}

template <typename T>
std::map<int, T> parse_bin_object(const json& j) {
  if (!j.is_object()) throw FormatError("expected an object keyed by bin index");
  std::map<int, T> out;
  for (const auto& [key, v] : j.items()) out[parse_bin_key(key)] = v.template get<T>();
  return out;
}

json range_array(const BinRange& r) { return json::array({r.lo, r.hi}); }

BinRange parse_range(const json& j) {
  if (!j.is_array() || j.size() != 2) throw FormatError("bin range must be [lo, hi]");
  return {j[0].get<int>(), j[1].get<int>()};
}

}  // namespace

std::string to_string(Policy p) {
  switch (p) {
    case Policy::Proportional: return "proportional";
    case Policy::BestResponse: return "best_response";
    case Policy::Fixed: return "fixed";
  }
  return "?";
}

std::string to_string(Reallocation r) {
  switch (r) {
    case Reallocation::Never: return "never";
    case Reallocation::EverySlot: return "every_slot";
    case Reallocation::OnBinShift: return "on_bin_shift";
  }
  return "?";
}

std::string to_string(SwapSide s) { return s == SwapSide::XIn ? "x_in" : "y_in"; }

Policy parse_policy(const std::string& s) {
  if (s == "proportional") return Policy::Proportional;
  if (s == "best_response") return Policy::BestResponse;
  if (s == "fixed") return Policy::Fixed;
  throw FormatError("unknown policy '" + s + "'");
}

Reallocation parse_reallocation(const std::string& s) {
  if (s == "never") return Reallocation::Never;
  if (s == "every_slot") return Reallocation::EverySlot;
  if (s == "on_bin_shift") return Reallocation::OnBinShift;
  throw FormatError("unknown reallocation rule '" + s + "'");
}

SwapSide parse_side(const std::string& s) {
  if (s == "x_in") return SwapSide::XIn;
  if (s == "y_in") return SwapSide::YIn;
  throw FormatError("unknown trade side '" + s + "'");
}

void to_json(json& j, const PoolConfig& c) { j = {{"p0", c.p0}, {"d", c.d}, {"i_min", c.i_min}, {"i_max", c.i_max}}; }

void from_json(const json& j, PoolConfig& c) {
  c.p0 = j.at("p0").get<double>();
  c.d = j.at("d").get<double>();
  c.i_min = j.at("i_min").get<int>();
  c.i_max = j.at("i_max").get<int>();
}

void to_json(json& j, const TokenAmounts& t) { j = {{"x", t.x}, {"y", t.y}}; }

void from_json(const json& j, TokenAmounts& t) {
  t.x = j.value("x", 0.0);
  t.y = j.value("y", 0.0);
}

void to_json(json& j, const ProviderWallet& w) { j = {{"x", w.x}, {"y", w.y}}; }

void from_json(const json& j, ProviderWallet& w) {
  w.x = j.value("x", 0.0);
  w.y = j.value("y", 0.0);
}

void to_json(json& j, const RewardSchedule& s) {
  j = {{"slot_reward", s.slot_reward}, {"per_bin", bin_object(s.per_bin)}};
}

void from_json(const json& j, RewardSchedule& s) {
  s.slot_reward = j.at("slot_reward").get<double>();
  s.per_bin = parse_bin_object<double>(j.at("per_bin"));
}

void to_json(json& j, const RewardStatement& s) {
  j = {{"per_provider", s.per_provider}, {"withheld", s.withheld}};
}

void from_json(const json& j, RewardStatement& s) {
  s.per_provider = j.at("per_provider").get<std::map<std::string, double>>();
  s.withheld = j.at("withheld").get<double>();
}

void to_json(json& j, const Allocation& a) { j = {{"per_bin", bin_object(a.per_bin)}}; }

void from_json(const json& j, Allocation& a) { a.per_bin = parse_bin_object<TokenAmounts>(j.at("per_bin")); }

void to_json(json& j, const OpponentAggregate& o) { j = {{"x", bin_object(o.x)}, {"y", bin_object(o.y)}}; }

void from_json(const json& j, OpponentAggregate& o) {
  o.x = j.contains("x") ? parse_bin_object<double>(j.at("x")) : std::map<int, double>{};
  o.y = j.contains("y") ? parse_bin_object<double>(j.at("y")) : std::map<int, double>{};
}

void to_json(json& j, const DesignSpec& d) {
  j = json::object();
  j["slot_reward"] = d.slot_reward;
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, LowSlippageParams>) {
          j["kind"] = "low_slippage";
          j["params"] = {{"center_bin", p.center_bin}, {"alpha", p.alpha}, {"support", range_array(p.support)}};
        } else if constexpr (std::is_same_v<T, PriceStabilizationParams>) {
          j["kind"] = "price_stabilization";
          j["params"] = {{"p_a", p.p_a}, {"p_b", p.p_b}, {"beta", p.beta}};
        } else if constexpr (std::is_same_v<T, V2EquivalentParams>) {
          j["kind"] = "v2_equivalent";
          j["params"] = {{"price", p.price}, {"window", range_array(p.window)}};
          if (p.right_share) j["params"]["right_share"] = *p.right_share;
        } else {
          j["kind"] = "mixture";
          json comps = json::array();
          for (const auto& c : p.components) comps.push_back(c);
          j["params"] = {{"components", comps}, {"weights", p.weights}};
        }
      },
      d.params);
}

void from_json(const json& j, DesignSpec& d) {
  d.slot_reward = j.value("slot_reward", 0.0);
  const std::string kind = j.at("kind").get<std::string>();
  const json& p = j.at("params");
  if (kind == "low_slippage") {
    d.params = LowSlippageParams{p.at("center_bin").get<int>(), p.at("alpha").get<double>(), parse_range(p.at("support"))};
  } else if (kind == "price_stabilization") {
    d.params = PriceStabilizationParams{p.at("p_a").get<double>(), p.at("p_b").get<double>(), p.at("beta").get<double>()};
  } else if (kind == "v2_equivalent") {
    V2EquivalentParams v{p.at("price").get<double>(), parse_range(p.at("window")), std::nullopt};
    if (p.contains("right_share") && !p.at("right_share").is_null()) v.right_share = p.at("right_share").get<double>();
    d.params = v;
  } else if (kind == "mixture") {
    MixtureParams m;
    for (const auto& c : p.at("components")) {
      DesignSpec component = c.get<DesignSpec>();
      component.slot_reward = d.slot_reward;
      m.components.push_back(std::move(component));
    }
    m.weights = p.at("weights").get<std::vector<double>>();
    d.params = std::move(m);
  } else {
    throw FormatError("unknown design kind '" + kind + "'");
  }
}

void to_json(json& j, const SimScenario& s) {
  j = json::object();
  j["pool"] = s.pool;
  j["initial_price"] = s.initial_price;
  if (const auto* schedule = std::get_if<RewardSchedule>(&s.rewards)) {
    j["schedule"] = *schedule;
  } else {
    j["design"] = std::get<DesignSpec>(s.rewards);
  }
  json providers = json::array();
  for (const auto& p : s.providers) {
    json e = {{"id", p.id}, {"wallet", p.wallet}, {"policy", to_string(p.policy)}};
    if (p.policy == Policy::Fixed) e["allocation"] = p.fixed_allocation;
    providers.push_back(e);
  }
  j["providers"] = providers;
  if (!s.arrival_order.empty()) j["arrival_order"] = s.arrival_order;
  j["slots"] = s.slots;
  json trades = json::array();
  for (const auto& t : s.trades) trades.push_back({{"slot", t.slot}, {"side", to_string(t.side)}, {"amount", t.amount}});
  j["trades"] = trades;
  j["reallocation"] = to_string(s.reallocation);
  j["seed"] = s.seed;
  j["tol"] = s.tol;
  if (s.random_providers) {
    const auto& r = *s.random_providers;
    j["random_providers"] = {{"count", r.count},       {"x_range", {r.x_min, r.x_max}},
                             {"y_range", {r.y_min, r.y_max}}, {"policy", to_string(r.policy)},
                             {"id_prefix", r.id_prefix}};
  }
}

void from_json(const json& j, SimScenario& s) {
  s.pool = j.at("pool").get<PoolConfig>();
  s.initial_price = j.at("initial_price").get<double>();
  if (j.contains("schedule")) {
    s.rewards = j.at("schedule").get<RewardSchedule>();
  } else if (j.contains("design")) {
    s.rewards = j.at("design").get<DesignSpec>();
  } else {
    throw FormatError("scenario needs either 'schedule' or 'design'");
  }
  s.providers.clear();
  for (const auto& e : j.value("providers", json::array())) {
    ProviderSpec p;
    p.id = e.at("id").get<std::string>();
    p.wallet = e.value("wallet", json::object()).get<ProviderWallet>();
    p.policy = parse_policy(e.value("policy", std::string("proportional")));
    if (e.contains("allocation")) p.fixed_allocation = e.at("allocation").get<Allocation>();
    s.providers.push_back(std::move(p));
  }
  s.arrival_order = j.value("arrival_order", std::vector<std::string>{});
  s.slots = j.value("slots", 1);
  s.trades.clear();
  for (const auto& t : j.value("trades", json::array())) {
    s.trades.push_back({t.at("slot").get<int>(), parse_side(t.at("side").get<std::string>()), t.at("amount").get<double>()});
  }
  s.reallocation = parse_reallocation(j.value("reallocation", std::string("never")));
  s.seed = j.value("seed", std::uint64_t{0});
  s.tol = j.value("tol", 1e-8);
  s.random_providers.reset();
  if (j.contains("random_providers")) {
    const json& r = j.at("random_providers");
    RandomProviders rp;
    rp.count = r.at("count").get<int>();
    const auto xr = r.value("x_range", std::vector<double>{0.0, 1.0});
    const auto yr = r.value("y_range", std::vector<double>{0.0, 1.0});
    if (xr.size() != 2 || yr.size() != 2) throw FormatError("random_providers ranges must be [min, max]");
    rp.x_min = xr[0];
    rp.x_max = xr[1];
    rp.y_min = yr[0];
    rp.y_max = yr[1];
    rp.policy = parse_policy(r.value("policy", std::string("proportional")));
    rp.id_prefix = r.value("id_prefix", std::string("rand"));
    s.random_providers = rp;
  }
}

void to_json(json& j, const SimReport& r) {
  j = json::object();
  j["providers"] = r.providers;
  j["schedule"] = r.schedule;
  j["initial_price"] = r.initial_price;
  json initial = json::object();
  for (const auto& [id, a] : r.initial_allocations) initial[id] = a;
  j["initial_allocations"] = initial;
  json slots = json::array();
  for (const auto& s : r.slots) {
    json trades = json::array();
    for (const auto& t : s.trades) {
      trades.push_back({{"side", to_string(t.side)},
                        {"amount_in", t.amount_in},
                        {"amount_used", t.amount_used},
                        {"amount_out", t.amount_out}});
    }
    slots.push_back({{"slot", s.slot},
                     {"price", s.price},
                     {"trades", trades},
                     {"rewards", s.rewards},
                     {"liquidity", bin_object(s.liquidity)},
                     {"turnover", s.turnover}});
  }
  j["slots"] = slots;
  j["cumulative_rewards"] = r.cumulative_rewards;
  j["turnover"] = r.turnover;
  j["price_path"] = r.price_path;
}

void from_json(const json& j, SimReport& r) {
  r.providers = j.at("providers").get<std::vector<std::string>>();
  r.schedule = j.at("schedule").get<RewardSchedule>();
  r.initial_price = j.at("initial_price").get<double>();
  r.initial_allocations.clear();
  for (const auto& [id, a] : j.at("initial_allocations").items()) r.initial_allocations[id] = a.get<Allocation>();
  r.slots.clear();
  for (const auto& s : j.at("slots")) {
    SlotRecord rec;
    rec.slot = s.at("slot").get<int>();
    rec.price = s.at("price").get<double>();
    for (const auto& t : s.at("trades")) {
      rec.trades.push_back({parse_side(t.at("side").get<std::string>()), t.at("amount_in").get<double>(),
                            t.at("amount_used").get<double>(), t.at("amount_out").get<double>()});
    }
    rec.rewards = s.at("rewards").get<RewardStatement>();
    rec.liquidity = parse_bin_object<double>(s.at("liquidity"));
    rec.turnover = s.at("turnover").get<std::map<std::string, double>>();
    r.slots.push_back(std::move(rec));
  }
  r.cumulative_rewards = j.at("cumulative_rewards").get<std::map<std::string, double>>();
  r.turnover = j.at("turnover").get<std::map<std::string, double>>();
  r.price_path = j.at("price_path").get<std::vector<double>>();
}

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

std::string report_csv(const SimReport& report) {
  std::ostringstream out;
  out << "slot,price";
  for (const auto& id : report.providers) out << ",reward_" << id;
  out << ",withheld,turnover\n";
  for (const auto& s : report.slots) {
    out << s.slot << ',' << format_number(s.price);
    for (const auto& id : report.providers) out << ',' << format_number(s.rewards.reward_of(id));
    out << ',' << format_number(s.rewards.withheld) << ',' << format_number(s.total_turnover()) << '\n';
  }
  return out.str();
}

std::string schedule_table_csv(const RewardSchedule& schedule, const PoolConfig& config) {
  std::ostringstream out;
  out << "bin,price_lo,price_hi,reward\n";
  for (const auto& [bin, r] : schedule.per_bin) {
    out << bin << ',' << format_number(tick_price(bin, config)) << ',' << format_number(tick_price(bin + 1, config))
        << ',' << format_number(r) << '\n';
  }
  return out.str();
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::ios_base::failure("cannot open '" + path + "'");
  return json::parse(in);
}

}  // namespace lmlab
