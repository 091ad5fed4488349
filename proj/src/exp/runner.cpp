#include <algorithm>
#include <chrono>
#include <ctime>
#include <exception>
#include <fstream>
#include <map>
#include <sstream>

#include "gmfg/errors.hpp"
#include "gmfg/experiment.hpp"
#include "gmfg/exploitability.hpp"
#include "gmfg/nplayer.hpp"
#include "gmfg/serialize.hpp"

namespace gmfg::exp {

namespace fs = std::filesystem;

namespace {

struct Variant {
  std::string name;
  Config cfg;
};

std::vector<std::string> or_default(const Config& cfg, const std::string& sweep, const std::string& base) {
  auto w = cfg.words(sweep);
  if (w.empty()) w.push_back(cfg.text(base));
  return w;
}

std::vector<Variant> convergence_variants(const Config& base) {
  std::vector<Variant> out;
  for (const auto& alg : or_default(base, "sweep.algorithm", "solver.algorithm"))
    for (const auto& T : or_default(base, "sweep.inner_T", "inner.T"))
      for (const auto& s : or_default(base, "sweep.s_max", "model.s_max"))
        for (const auto& init : or_default(base, "sweep.initial", "outer.initial")) {
          Variant v{"", base};
          v.cfg.set("solver.algorithm", alg);
          v.cfg.set("inner.T", T);
          v.cfg.set("model.s_max", s);
          v.cfg.set("outer.initial", init);
          const long long states = v.cfg.integer("model.s_max") + 1;
          v.name = alg + "_T" + T + "_S" + std::to_string(states) + "_" + init;
          out.push_back(std::move(v));
        }
  return out;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << content;
  if (!f) throw std::runtime_error("write failed for " + path.string());
}

std::string q_csv(const QTable& q) {
  std::string out(kQTableHeader);
  out += '\n';
  for (std::size_t s = 0; s < q.num_states(); ++s)
    for (std::size_t a = 0; a < q.num_actions(); ++a)
      out += std::to_string(s) + "," + std::to_string(a) + "," + format_real(q.at(s, a)) + "\n";
  return out;
}

std::string trace_csv(const std::vector<TraceRow>& rows, const std::vector<std::string>& snapshots, bool timing) {
  std::string out(kTraceHeader);
  out += '\n';
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    out += std::to_string(r.k) + "," + format_real(r.w1_step) + "," + format_real(r.tv_step) + "," +
           format_real(r.linf_step) + "," + format_real(r.l1_step) + "," + format_real(r.mean_reward) + "," +
           (i < snapshots.size() ? snapshots[i] : std::string()) + "," +
           (timing ? format_real(r.elapsed_ms) : std::string()) + "\n";
  }
  return out;
}

std::string now_utc() {
  const std::time_t t = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

struct Context {
  Config cfg;
  fs::path dir;
  std::string preset;
  std::string hash;
};

// Sidecar with the non-deterministic run metadata; the CSV stays byte-stable.
void write_meta(const Context& ctx, const fs::path& csv, std::uint64_t seed) {
  write_file(fs::path(csv).replace_extension(".meta"), "preset = " + ctx.preset + "\nseed = " + std::to_string(seed) +
                                                            "\nconfig_hash = " + ctx.hash + "\nstart_time = " + now_utc() + "\n");
}

SolveResult solve(const Config& cfg, const GmfgModel& model, std::uint64_t seed, std::size_t T_override = 0,
                  Algorithm forced = Algorithm::gmf_q, bool force = false) {
  Algorithm alg;
  try {
    alg = force ? forced : algorithm_from_string(cfg.text("solver.algorithm"));
  } catch (const UsageError& e) {
    throw ConfigError(e.what());
  }
  InnerConfig inner = inner_config(cfg);
  if (T_override) inner.T = T_override;
  OuterConfig outer = outer_config(cfg, model, seed);
  outer.keep_q_history = cfg.flag("output.q_snapshots");
  Rng rng(seed);
  switch (alg) {
    case Algorithm::gmf_q: return gmf_q(model, inner, outer, rng);
    case Algorithm::gmf_v: return gmf_v(model, inner.T, outer, rng);
    case Algorithm::naive: return naive(model, inner, outer, rng);
  }
  throw ConfigError("config: unknown algorithm");
}

void emit_solve(const Context& ctx, const std::string& variant, std::uint64_t seed, const SolveResult& res,
                std::vector<fs::path>& files) {
  const std::string stem = variant + "_seed" + std::to_string(seed);
  std::vector<std::string> snaps;
  if (ctx.cfg.flag("output.q_snapshots")) {
    fs::create_directories(ctx.dir / "q_snapshots");
    for (std::size_t k = 0; k < res.q_history.size(); ++k) {
      const fs::path rel = fs::path("q_snapshots") / (stem + "_k" + std::to_string(k + 1) + ".csv");
      write_file(ctx.dir / rel, q_csv(res.q_history[k]));
      snaps.push_back(rel.generic_string());
    }
  }
  const fs::path trace = ctx.dir / ("trace_" + stem + ".csv");
  write_file(trace, trace_csv(res.trace, snaps, ctx.cfg.flag("output.timing")));
  write_meta(ctx, trace, seed);
  files.push_back(trace);
  if (ctx.cfg.flag("output.q_tables")) {
    const fs::path q = ctx.dir / ("q_" + stem + ".csv");
    write_file(q, q_csv(res.q));
    files.push_back(q);
  }
}

struct SeedOutput {
  std::vector<fs::path> files;
  std::vector<std::string> rows;  // delta_q or exploitability rows
};

void run_convergence(const Context& ctx, std::uint64_t seed, SeedOutput& out) {
  for (const auto& v : convergence_variants(ctx.cfg)) {
    const auto model = make_model(v.cfg, seed);
    emit_solve(ctx, v.name, seed, solve(v.cfg, *model, seed), out.files);
  }
}

void run_table1(const Context& ctx, std::uint64_t seed, SeedOutput& out) {
  const auto model = make_model(ctx.cfg, seed);
  const std::size_t T_ref = ctx.cfg.count("reference.T");
  Algorithm ref_alg;
  try {
    ref_alg = algorithm_from_string(ctx.cfg.text("reference.algorithm"));
  } catch (const UsageError& e) {
    throw ConfigError(e.what());
  }
  const auto ref = solve(ctx.cfg, *model, seed, T_ref, ref_alg, true);
  emit_solve(ctx, to_string(ref_alg) + "_T" + std::to_string(T_ref), seed, ref, out.files);
  for (const auto& T : or_default(ctx.cfg, "sweep.inner_T", "inner.T")) {
    Config c = ctx.cfg;
    c.set("inner.T", T);
    const auto res = solve(c, *model, seed, 0, Algorithm::gmf_q, true);
    emit_solve(ctx, "gmf_q_T" + T, seed, res, out.files);
    out.rows.push_back(std::to_string(seed) + "," + T + "," + std::to_string(T_ref) + "," +
                       format_real(delta_q(res.q, ref.q)));
  }
}

void run_heatmap(const Context& ctx, std::uint64_t seed, SeedOutput& out) {
  const auto model = make_model(ctx.cfg, seed);
  const std::size_t T = ctx.cfg.count("inner.T"), T_ref = ctx.cfg.count("reference.T");
  emit_solve(ctx, "gmf_q_T" + std::to_string(T), seed, solve(ctx.cfg, *model, seed, 0, Algorithm::gmf_q, true),
             out.files);
  emit_solve(ctx, "gmf_v_T" + std::to_string(T_ref), seed,
             solve(ctx.cfg, *model, seed, T_ref, Algorithm::gmf_v, true), out.files);
}

std::pair<std::size_t, std::size_t> parse_case(const std::string& s) {
  const auto x = s.find('x');
  try {
    if (x == std::string::npos) throw std::invalid_argument(s);
    const long long N = std::stoll(s.substr(0, x)), S = std::stoll(s.substr(x + 1));
    if (N < 1 || S < 2) throw std::invalid_argument(s);
    return {static_cast<std::size_t>(N), static_cast<std::size_t>(S)};
  } catch (const std::logic_error&) {
    throw ConfigError("config: nplayer.cases entries look like NxS, got '" + s + "'");
  }
}

void run_nplayer(const Context& ctx, std::uint64_t seed, SeedOutput& out) {
  nplayer::ClearingMode clearing;
  nplayer::ExploitabilityConfig ecfg;
  try {
    clearing = nplayer::clearing_mode_from_string(ctx.cfg.text("nplayer.clearing"));
    ecfg.mode = nplayer::eval_mode_from_string(ctx.cfg.text("evaluation.mode"));
  } catch (const UsageError& e) {
    throw ConfigError(e.what());
  }
  ecfg.eps0 = ctx.cfg.real("evaluation.eps0");
  ecfg.samples = ctx.cfg.count("evaluation.samples");
  ecfg.horizon = ctx.cfg.count("evaluation.horizon");
  ecfg.seed = seed;
  const auto selection = ctx.cfg.text("nplayer.mfq_selection");
  if (selection != "boltzmann" && selection != "epsilon_greedy")
    throw ConfigError("config: nplayer.mfq_selection must be boltzmann or epsilon_greedy");
  const auto checkpoints = ctx.cfg.integers("nplayer.checkpoints");
  for (const auto& spec : ctx.cfg.words("nplayer.cases")) {
    const auto [N, S] = parse_case(spec);
    Config c = ctx.cfg;
    c.set("model.s_max", std::to_string(S - 1));
    c.set("model.bids", "");
    const auto params = auction_params(c);
    const nplayer::AuctionGame game(params, N, clearing);
    const InnerConfig inner = inner_config(c);
    for (const auto& alg : c.words("nplayer.algorithms")) {
      for (long long k : checkpoints) {
        if (k < 1) throw ConfigError("config: nplayer.checkpoints must be >= 1");
        const std::size_t steps = static_cast<std::size_t>(k) * inner.T;
        std::vector<Policy> profile;
        Rng rng(seed);
        if (alg == "gmf_q") {
          Config g = c;
          g.set("outer.K", std::to_string(k));
          const auto res = gmf_q(game.model(), inner, outer_config(g, game.model(), seed), rng);
          profile.assign(N, res.policy);
        } else if (alg == "il" || alg == "mfq") {
          nplayer::TrainConfig tc;
          tc.rounds = steps;
          tc.inner = inner;
          if (alg == "il") {
            profile = nplayer::il_train(game, tc, rng).policies;
          } else {
            nplayer::MfqConfig mc;
            mc.train = tc;
            mc.bins = c.count("nplayer.bins");
            mc.c = c.real("nplayer.mfq_c");
            mc.selection =
                selection == "boltzmann" ? nplayer::MfqSelection::boltzmann : nplayer::MfqSelection::epsilon_greedy;
            profile = nplayer::mfq_train(game, mc, rng).policies;
          }
        } else {
          throw ConfigError("config: nplayer.algorithms entries must be gmf_q, mfq or il, got '" + alg + "'");
        }
        const auto e = nplayer::exploitability(game, profile, ecfg);
        out.rows.push_back(alg + "," + std::to_string(N) + "," + std::to_string(S) + "," +
                           std::to_string(game.num_actions()) + "," + std::to_string(seed) + "," +
                           std::to_string(steps) + "," + format_real(e.value) + "," +
                           format_real(e.ci_half_width) + "," + std::to_string(e.samples) + "," +
                           nplayer::to_string(e.mode));
      }
    }
  }
}

}  // namespace

RunReport run_preset(const std::string& name, const RunOptions& options) {
  return run_config(preset_config(name), options);
}

RunReport run_config(const Config& base, const RunOptions& options) {
  Context ctx{base, {}, base.text("run.preset"), ""};
  for (const auto& o : options.overrides) ctx.cfg.apply_override(o);
  const auto seeds = options.seeds.empty() ? ctx.cfg.seeds("evaluation.seeds") : options.seeds;
  const std::string kind = ctx.cfg.text("run.kind");
  if (kind != "convergence" && kind != "table1" && kind != "heatmap" && kind != "nplayer")
    throw ConfigError("config: run.kind must be convergence, table1, heatmap or nplayer");
  // Validate the builders once before fanning out.
  {
    const auto model = make_model(ctx.cfg, seeds.front());
    inner_config(ctx.cfg);
    outer_config(ctx.cfg, *model, seeds.front());
    if (kind == "convergence") convergence_variants(ctx.cfg);
  }
  ctx.hash = hex64(ctx.cfg.hash());
  ctx.dir = !options.out.empty()             ? options.out
            : !ctx.cfg.text("output.dir").empty() ? fs::path(ctx.cfg.text("output.dir"))
                                                  : fs::path("runs") / ctx.preset;
  std::error_code ec;
  fs::create_directories(ctx.dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory " + ctx.dir.string() + ": " + ec.message());

  RunReport report{ctx.dir, {}};
  write_file(ctx.dir / "config.ini", ctx.cfg.canonical());
  std::string seed_list;
  for (auto s : seeds) seed_list += (seed_list.empty() ? "" : ",") + std::to_string(s);
  write_file(ctx.dir / "run.meta", "preset = " + ctx.preset + "\nconfig_hash = " + ctx.hash + "\nseeds = " +
                                       seed_list + "\nstart_time = " + now_utc() + "\n");

  std::vector<SeedOutput> outputs(seeds.size());
  std::vector<std::exception_ptr> errors(seeds.size());
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(seeds.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      if (kind == "convergence") run_convergence(ctx, seeds[i], outputs[i]);
      else if (kind == "table1") run_table1(ctx, seeds[i], outputs[i]);
      else if (kind == "heatmap") run_heatmap(ctx, seeds[i], outputs[i]);
      else run_nplayer(ctx, seeds[i], outputs[i]);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  std::string rows;
  for (const auto& o : outputs) {
    report.files.insert(report.files.end(), o.files.begin(), o.files.end());
    for (const auto& r : o.rows) rows += r + "\n";
  }
  if (kind == "table1") {
    write_file(ctx.dir / "delta_q.csv", std::string(kDeltaQHeader) + "\n" + rows);
    report.files.push_back(ctx.dir / "delta_q.csv");
  } else if (kind == "nplayer") {
    write_file(ctx.dir / "exploitability.csv", std::string(kExploitabilityHeader) + "\n" + rows);
    report.files.push_back(ctx.dir / "exploitability.csv");
  }
  for (auto& f : summarize(ctx.dir)) report.files.push_back(std::move(f));
  return report;
}

}  // namespace gmfg::exp
