#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "lmlab/design.hpp"
#include "lmlab/json_io.hpp"
#include "lmlab/sim.hpp"
#include "lmlab/strategy.hpp"

namespace py = pybind11;
using namespace lmlab;

namespace {

// Python values cross the boundary in the same JSON shapes the CLI reads.
json to_json_value(const py::handle& obj) {
  const py::object dumps = py::module_::import("json").attr("dumps");
  return json::parse(dumps(obj).cast<std::string>());
}

py::object to_python(const json& j) {
  const py::object loads = py::module_::import("json").attr("loads");
  return loads(j.dump());
}

template <typename T>
T load(const py::handle& obj) {
  return to_json_value(obj).get<T>();
}

PoolConfig load_pool(const py::handle& obj) {
  if (obj.is_none()) return PoolConfig{};
  auto cfg = load<PoolConfig>(obj);
  cfg.validate();
  return cfg;
}

}  // namespace

PYBIND11_MODULE(lmlab, m) {
  m.doc() = "Liquidity mining lab: tick geometry, reward schedules, LP strategies and simulations";

  py::register_exception<Error>(m, "Error", PyExc_ValueError);
  py::register_exception<FormatError>(m, "FormatError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const json::exception& e) {
      PyErr_SetString(py::module_::import("lmlab").attr("FormatError").ptr(), e.what());
    }
  });

  m.def(
      "tick_price", [](int i, const py::object& pool) { return tick_price(i, load_pool(pool)); }, py::arg("i"),
      py::arg("pool") = py::none());
  m.def(
      "bin_of", [](double p, const py::object& pool) { return bin_of(Price(p), load_pool(pool)); }, py::arg("price"),
      py::arg("pool") = py::none());
  m.def(
      "tokens_for_liquidity",
      [](int i, double delta_l, double p_c, const py::object& pool) {
        const auto t = tokens_for_liquidity(i, delta_l, Price(p_c), load_pool(pool));
        return py::make_tuple(t.x, t.y);
      },
      py::arg("bin"), py::arg("liquidity"), py::arg("price"), py::arg("pool") = py::none(),
      "Tokens (x, y) backing `liquidity` in `bin` at `price`.");
  m.def(
      "liquidity_for_tokens",
      [](int i, double x, double y, double p_c, const py::object& pool) {
        return liquidity_for_tokens(i, {x, y}, Price(p_c), load_pool(pool));
      },
      py::arg("bin"), py::arg("x"), py::arg("y"), py::arg("price"), py::arg("pool") = py::none());
  m.def(
      "swap",
      [](const py::object& pool, double price, const std::map<int, double>& liquidity, const std::string& side,
         double amount) {
        PoolState s(load_pool(pool), Price(price));
        for (const auto& [bin, l] : liquidity) {
          if (l > 0.0) s.add_liquidity("pool", bin, l);
        }
        const auto r = swap_exact_in(s, parse_side(side), amount);
        py::dict out;
        out["amount_out"] = r.amount_out;
        out["amount_in_used"] = r.amount_in_used;
        out["amount_unfilled"] = r.amount_unfilled;
        out["price"] = r.state.current_price().value();
        return out;
      },
      py::arg("pool"), py::arg("price"), py::arg("liquidity"), py::arg("side"), py::arg("amount"),
      "Exact-input swap against per-bin liquidity; side is 'x_in' or 'y_in'.");

  m.def(
      "validate_schedule",
      [](const py::object& schedule, const py::object& pool) {
        const auto s = load<RewardSchedule>(schedule);
        std::vector<std::string> out;
        const auto problems = pool.is_none() ? validate_schedule(s) : validate_schedule(s, load_pool(pool));
        for (const auto& v : problems) out.push_back(v.message);
        return out;
      },
      py::arg("schedule"), py::arg("pool") = py::none(), "Violation messages; empty when valid.");
  m.def(
      "accrue_slot",
      [](const py::object& pool, double price, const std::map<std::string, std::map<int, double>>& positions,
         const py::object& schedule) {
        PoolState s(load_pool(pool), Price(price));
        for (const auto& [id, bins] : positions) {
          for (const auto& [bin, l] : bins) {
            if (l > 0.0) s.add_liquidity(id, bin, l);
          }
        }
        return to_python(accrue_slot(s, load<RewardSchedule>(schedule)));
      },
      py::arg("pool"), py::arg("price"), py::arg("positions"), py::arg("schedule"));

  m.def(
      "proportional_allocation",
      [](const py::object& wallet, const py::object& schedule, double price, const py::object& pool) {
        return to_python(
            proportional_allocation(load<ProviderWallet>(wallet), load<RewardSchedule>(schedule), Price(price),
                                    load_pool(pool)));
      },
      py::arg("wallet"), py::arg("schedule"), py::arg("price"), py::arg("pool") = py::none());
  m.def(
      "best_response",
      [](const py::object& wallet, const py::object& opponents, const py::object& schedule, double price,
         const py::object& pool, double tol) {
        BestResponseOptions opts;
        opts.tol = tol;
        return to_python(best_response(load<ProviderWallet>(wallet), load<OpponentAggregate>(opponents),
                                       load<RewardSchedule>(schedule), Price(price), load_pool(pool), opts));
      },
      py::arg("wallet"), py::arg("opponents"), py::arg("schedule"), py::arg("price"), py::arg("pool") = py::none(),
      py::arg("tol") = 1e-8);
  m.def(
      "brute_force_best_response",
      [](const py::object& wallet, const py::object& opponents, const py::object& schedule, double price,
         const py::object& pool, double grid_step) {
        return to_python(brute_force_best_response(load<ProviderWallet>(wallet), load<OpponentAggregate>(opponents),
                                                   load<RewardSchedule>(schedule), Price(price), load_pool(pool),
                                                   grid_step));
      },
      py::arg("wallet"), py::arg("opponents"), py::arg("schedule"), py::arg("price"), py::arg("pool") = py::none(),
      py::arg("grid_step") = 1e-3);
  m.def(
      "expected_reward",
      [](const py::object& allocation, const py::object& opponents, const py::object& schedule, double price,
         const py::object& pool) {
        return expected_reward(load<Allocation>(allocation), load<OpponentAggregate>(opponents),
                               load<RewardSchedule>(schedule), Price(price), load_pool(pool));
      },
      py::arg("allocation"), py::arg("opponents"), py::arg("schedule"), py::arg("price"), py::arg("pool") = py::none());
  m.def(
      "nash_gap",
      [](const py::dict& profile, const py::dict& wallets, const py::object& schedule, double price,
         const py::object& pool, double tol) {
        std::map<std::string, Allocation> p;
        for (const auto& [id, a] : profile) p[id.cast<std::string>()] = load<Allocation>(a);
        std::map<std::string, ProviderWallet> w;
        for (const auto& [id, a] : wallets) w[id.cast<std::string>()] = load<ProviderWallet>(a);
        return nash_gap(p, w, load<RewardSchedule>(schedule), Price(price), load_pool(pool), tol);
      },
      py::arg("profile"), py::arg("wallets"), py::arg("schedule"), py::arg("price"), py::arg("pool") = py::none(),
      py::arg("tol") = 1e-8);

  m.def(
      "design",
      [](const py::object& spec, const py::object& pool) {
        return to_python(realize(load<DesignSpec>(spec), load_pool(pool)));
      },
      py::arg("spec"), py::arg("pool") = py::none(), "Realize a DesignSpec dict into a schedule dict.");

  m.def(
      "run_scenario",
      [](const py::object& scenario) {
        const auto s = load<SimScenario>(scenario);
        SimReport report;
        {
          py::gil_scoped_release release;
          report = run_scenario(s);
        }
        return to_python(report);
      },
      py::arg("scenario"));
  m.def(
      "report_csv", [](const py::object& report) { return report_csv(load<SimReport>(report)); }, py::arg("report"));
  m.def(
      "stability_probe",
      [](const py::object& scenario, int shift, std::optional<std::string> focus) {
        const auto p = stability_probe(load<SimScenario>(scenario), shift, focus);
        py::dict out;
        out["turnover_required"] = p.turnover_required;
        out["reward_loss_if_static"] = p.reward_loss_if_static;
        py::list rows;
        for (const auto& r : p.per_provider) {
          py::dict row;
          row["id"] = r.id;
          row["reward_static"] = r.reward_static;
          row["reward_reoptimized"] = r.reward_reoptimized;
          row["reward_loss_if_static"] = r.reward_loss_if_static;
          row["turnover_required"] = r.turnover_required;
          rows.append(row);
        }
        out["per_provider"] = rows;
        return out;
      },
      py::arg("scenario"), py::arg("price_shift"), py::arg("focus") = py::none());
}
