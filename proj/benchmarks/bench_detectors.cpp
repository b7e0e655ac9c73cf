#include <benchmark/benchmark.h>

#include <cmath>

#include "neurodetect/channel_likelihood.hpp"
#include "neurodetect/deepsic.hpp"
#include "neurodetect/gmm.hpp"
#include "neurodetect/likelihood_model.hpp"
#include "neurodetect/sic.hpp"

using namespace neurodetect;

namespace {

SymbolBlock awgn_block(const FiniteMemoryChannel& ch, int length) {
  RngStream rng(1, 0);
  return transmit_block(ch, Constellation::bpsk(), length, rng);
}

void BM_ViterbiTraceback(benchmark::State& state) {
  const Constellation cons = Constellation::bpsk();
  const FiniteMemoryChannel ch(NoiseKind::awgn, make_decay_vector(0.5, 4), 4.0);
  const CostFn cost = exact_cost(ch, cons);
  const SymbolBlock tx = awgn_block(ch, static_cast<int>(state.range(0)));
  for (auto _ : state) {
    auto decided = viterbi(tx.observations, cost, 4, 2, ViterbiMode::traceback);
    benchmark::DoNotOptimize(decided);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ViterbiTraceback)->Arg(1000)->Arg(10000);

void BM_Bcjr(benchmark::State& state) {
  const Constellation cons = Constellation::bpsk();
  const FiniteMemoryChannel ch(NoiseKind::awgn, make_decay_vector(0.5, 4), 4.0);
  const FunctionNodeFn node = exact_function_node(ch, cons);
  const SymbolBlock tx = awgn_block(ch, static_cast<int>(state.range(0)));
  for (auto _ : state) {
    auto posteriors = bcjr(tx.observations, node, 4, 2);
    benchmark::DoNotOptimize(posteriors);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Bcjr)->Arg(1000)->Arg(10000);

void BM_SicDetect(benchmark::State& state) {
  const Constellation cons = Constellation::bpsk();
  Eigen::MatrixXd gains(4, 4);
  for (int i = 0; i < 4; ++i) {
    for (int k = 0; k < 4; ++k) {
      gains(i, k) = std::exp(-std::abs(i - k));
    }
  }
  const MimoChannel ch(NoiseKind::awgn, gains, 0.1);
  RngStream rng(2, 0);
  const Dataset data = generate_dataset(ch, cons, 64, rng);
  for (auto _ : state) {
    for (std::size_t i = 0; i < data.size(); ++i) {
      auto decided = iterative_sic(data.observations[i], gains, 0.1, cons, 5);
      benchmark::DoNotOptimize(decided);
    }
  }
  state.SetItemsProcessed(state.iterations() * 64);
}
BENCHMARK(BM_SicDetect);

void BM_MlpForward(benchmark::State& state) {
  const MlpSpec spec = likelihood_classifier_spec(4, 2);
  RngStream rng(3, 0);
  const MlpParams params = init_params(spec, rng);
  const Eigen::VectorXd x = Eigen::VectorXd::Constant(1, 0.7);
  for (auto _ : state) {
    auto probs = forward(spec, params, x);
    benchmark::DoNotOptimize(probs);
  }
}
BENCHMARK(BM_MlpForward);

void BM_GmmFit(benchmark::State& state) {
  RngStream rng(4, 0);
  std::vector<double> samples;
  for (int i = 0; i < 5000; ++i) {
    samples.push_back(rng.gaussian() + (rng.uniform_int(2) ? 2.0 : -2.0));
  }
  for (auto _ : state) {
    auto model = fit_gmm(samples, 16);
    benchmark::DoNotOptimize(model);
  }
}
BENCHMARK(BM_GmmFit);

void BM_DeepSicForward(benchmark::State& state) {
  const DeepSicNet net = make_deepsic_net(4, 4, 2, 5, DeepSicArch::end_to_end, 5);
  Eigen::VectorXd y(4);
  y << 0.5, -1.0, 0.2, 1.5;
  for (auto _ : state) {
    auto estimates = deepsic_forward(net, y);
    benchmark::DoNotOptimize(estimates);
  }
}
BENCHMARK(BM_DeepSicForward);

void BM_PoissonDraw(benchmark::State& state) {
  RngStream rng(6, 0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(rng.poisson(35.0));
  }
}
BENCHMARK(BM_PoissonDraw);

}  // namespace

BENCHMARK_MAIN();
