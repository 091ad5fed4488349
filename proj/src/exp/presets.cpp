#include <algorithm>

#include "gmfg/contraction.hpp"
#include "gmfg/errors.hpp"
#include "gmfg/experiment.hpp"

namespace gmfg::exp {

const std::vector<Preset>& presets() {
  static const std::vector<Preset> p = {
      {"table1", "GMF-Q Q-table error against GMF-V (T=5000) for T in {1000,3000,5000,10000}",
       {{"run.kind", "table1"}, {"sweep.inner_T", "1000,3000,5000,10000"}, {"reference.T", "5000"}}},
      {"fig2_inner", "GMF-Q convergence for several inner iteration counts",
       {{"run.kind", "convergence"}, {"sweep.inner_T", "1000,2000,5000,10000"}}},
      {"fig3_states", "GMF-Q convergence for |S|=|A| in {10,20} and three initial populations",
       {{"run.kind", "convergence"}, {"sweep.s_max", "9,19"}, {"sweep.initial", "uniform,point,dirichlet"}}},
      {"fig4_heatmap", "Final Q-tables of GMF-Q (T=10000) and GMF-V (T=5000)",
       {{"run.kind", "heatmap"}, {"inner.T", "10000"}, {"reference.T", "5000"}, {"evaluation.seeds", "0"}}},
      {"fig5_naive", "Naive versus GMF-Q step sizes over 100 outer iterations, 30 paths",
       {{"run.kind", "convergence"}, {"sweep.algorithm", "naive,gmf_q"}, {"outer.K", "100"},
        {"evaluation.seeds", "0..29"}}},
      {"fig6_compare", "Exploitability of GMF-Q, MF-Q and IL in the N-player auction",
       {{"run.kind", "nplayer"}, {"nplayer.cases", "20x10,20x20,40x10"}, {"nplayer.checkpoints", "5,10,15,20"}}},
      {"fig6_reduced", "Exploitability comparison on the reduced game N=8, |S|=|A|=5",
       {{"run.kind", "nplayer"}, {"nplayer.cases", "8x5"}, {"nplayer.checkpoints", "20"}}},
  };
  return p;
}

Config preset_config(const std::string& name) {
  const auto& all = presets();
  const auto it = std::find_if(all.begin(), all.end(), [&](const Preset& p) { return p.name == name; });
  if (it == all.end()) throw ConfigError("unknown preset '" + name + "'");
  Config c = Config::defaults();
  c.set("run.preset", name);
  for (const auto& [k, v] : it->overrides) c.set(k, v);
  return c;
}

AuctionParams auction_params(const Config& cfg) {
  AuctionParams p;
  p.s_max = static_cast<int>(cfg.integer("model.s_max"));
  p.rho = cfg.real("model.rho");
  p.M = static_cast<int>(cfg.integer("model.M"));
  p.discount = cfg.real("model.discount");
  p.value_levels = cfg.reals("model.values");
  p.value_probs = cfg.reals("model.value_probs");
  const auto& rep = cfg.text("model.replenish");
  if (rep == "zero") p.replenish = zero_replenishment(p.s_max);
  else if (rep != "coin") throw ConfigError("config: model.replenish must be coin or zero");
  for (long long b : cfg.integers("model.bids")) p.bid_levels.push_back(static_cast<int>(b));
  try {
    p.validate();
  } catch (const UsageError& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return p;
}

std::shared_ptr<GmfgModel> make_model(const Config& cfg, std::uint64_t seed) {
  const auto& kind = cfg.text("model.kind");
  if (kind == "auction") return std::make_shared<AuctionModel>(auction_params(cfg));
  if (kind == "random") {
    RandomModelSpec spec;
    spec.states = cfg.count("model.random_states");
    spec.actions = cfg.count("model.random_actions");
    spec.coupling = cfg.real("model.random_coupling");
    spec.discount = cfg.real("model.discount");
    Rng rng = Rng(seed).split(Stream::model);
    return make_random_model(spec, rng);
  }
  throw ConfigError("config: model.kind must be auction or random");
}

InnerConfig inner_config(const Config& cfg) {
  InnerConfig in;
  in.T = cfg.count("inner.T");
  try {
    in.mode = inner_mode_from_string(cfg.text("inner.mode"));
  } catch (const UsageError& e) {
    throw ConfigError(e.what());
  }
  in.h = cfg.real("inner.h");
  in.explore.start = cfg.real("inner.explore_start");
  in.explore.end = cfg.real("inner.explore_end");
  in.explore.decay_fraction = cfg.real("inner.explore_fraction");
  in.q_init = cfg.real("inner.q_init");
  try {
    in.validate();
  } catch (const UsageError& e) {
    throw ConfigError(e.what());
  }
  return in;
}

OuterConfig outer_config(const Config& cfg, const GmfgModel& model, std::uint64_t seed) {
  OuterConfig out;
  out.K = cfg.count("outer.K");
  out.c = cfg.real("outer.c");
  out.epsilon = cfg.real("outer.epsilon");
  out.stop_tol = cfg.real("outer.stop_tol");
  out.warm_start = cfg.flag("outer.warm_start");
  out.theorem2.eta = cfg.real("theorem2.eta");
  out.theorem2.delta = cfg.real("theorem2.delta");
  out.theorem2.D = cfg.real("theorem2.D");
  out.theorem2.alpha = cfg.real("theorem2.alpha");
  out.theorem2.dhat = cfg.real("theorem2.dhat");
  try {
    out.net_mode = net_mode_from_string(cfg.text("outer.net_mode"));
  } catch (const UsageError& e) {
    throw ConfigError(e.what());
  }
  const auto& sched = cfg.text("outer.schedule");
  if (sched == "theorem2") out.schedule = ScheduleMode::theorem2;
  else if (sched != "fixed") throw ConfigError("config: outer.schedule must be fixed or theorem2");
  const auto& init = cfg.text("outer.initial");
  const auto& S = model.state_space();
  const auto& A = model.action_space();
  if (init == "point") {
    out.initial = JointDistribution::point_mass(S, A, 0, 0);
  } else if (init == "dirichlet") {
    Rng rng = Rng(seed).split(Stream::init, 99);
    out.initial = random_joint(S, A, rng);
  } else if (init != "uniform") {
    throw ConfigError("config: outer.initial must be uniform, point or dirichlet");
  }
  try {
    out.validate();
  } catch (const UsageError& e) {
    throw ConfigError(e.what());
  }
  return out;
}

}  // namespace gmfg::exp
