// Serial reference kernels against their OpenMP counterparts.

#include <benchmark/benchmark.h>

#include <map>
#include <vector>

#include "gmfg/auction.hpp"
#include "gmfg/contraction.hpp"
#include "gmfg/exploitability.hpp"
#include "gmfg/propagate.hpp"
#include "gmfg/solvers.hpp"

namespace {

using namespace gmfg;

struct Frozen {
  MdpKernel kernel;
  std::vector<double> policy, mu, V;
};

// Random model with n states and n / 4 actions, frozen at a random population.
const Frozen& frozen(std::size_t n) {
  static std::map<std::size_t, Frozen> cache;
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  Rng rng(n);
  RandomModelSpec spec;
  spec.states = n;
  spec.actions = std::max<std::size_t>(2, n / 4);
  auto model = make_random_model(spec, rng);
  const auto L = random_joint(model->state_space(), model->action_space(), rng);
  Frozen f;
  f.kernel = model->kernel(L);
  f.policy.assign(n * spec.actions, 1.0 / static_cast<double>(spec.actions));
  f.mu = L.state_marginal_weights();
  f.V.resize(n);
  for (double& v : f.V) v = rng.uniform();
  return cache.emplace(n, std::move(f)).first->second;
}

template <auto Fn>
void BM_propagate(benchmark::State& state) {
  const auto& f = frozen(static_cast<std::size_t>(state.range(0)));
  std::vector<double> out(f.mu.size());
  for (auto _ : state) {
    Fn(f.kernel, f.policy, f.mu, out);
    benchmark::DoNotOptimize(out.data());
  }
}

template <auto Fn>
void BM_bellman(benchmark::State& state) {
  const auto& f = frozen(static_cast<std::size_t>(state.range(0)));
  std::vector<double> Q(f.policy.size());
  for (auto _ : state) {
    Fn(f.kernel, f.V, Q);
    benchmark::DoNotOptimize(Q.data());
  }
}

template <auto Fn>
void BM_best_response(benchmark::State& state) {
  AuctionParams p;
  p.s_max = static_cast<int>(state.range(1)) - 1;
  const nplayer::AuctionGame game(p, static_cast<std::size_t>(state.range(0)));
  const std::vector<Policy> profile(game.num_players(),
                                    Policy::uniform(game.model().state_space(), game.model().action_space()));
  nplayer::kernels::BestResponseTables t;
  for (auto _ : state) {
    Fn(game, profile, t);
    benchmark::DoNotOptimize(t.P.data());
  }
}

BENCHMARK(BM_propagate<kernels::propagate_serial>)->Name("propagate/serial")->Arg(64)->Arg(256);
BENCHMARK(BM_propagate<kernels::propagate_parallel>)->Name("propagate/parallel")->Arg(64)->Arg(256);
BENCHMARK(BM_bellman<kernels::bellman_sweep_serial>)->Name("bellman_sweep/serial")->Arg(64)->Arg(256);
BENCHMARK(BM_bellman<kernels::bellman_sweep_parallel>)->Name("bellman_sweep/parallel")->Arg(64)->Arg(256);
BENCHMARK(BM_best_response<nplayer::kernels::build_best_response_serial>)
    ->Name("best_response/serial")
    ->Args({3, 5})
    ->Unit(benchmark::kMillisecond);
BENCHMARK(BM_best_response<nplayer::kernels::build_best_response_parallel>)
    ->Name("best_response/parallel")
    ->Args({3, 5})
    ->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
