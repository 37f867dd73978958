#include <algorithm>
#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "ivuq/baseline_fit.hpp"
#include "ivuq/ensemble.hpp"
#include "ivuq/ivim_model.hpp"
#include "ivuq/neuralnet.hpp"
#include "ivuq/prob_heads.hpp"
#include "ivuq/rng.hpp"
#include "ivuq/synthdata.hpp"
#include "ivuq/uq_metrics.hpp"

namespace {

using namespace ivuq;

TrainingSet corpus(std::size_t n) {
  CorpusOptions o;
  o.n = n;
  o.seed = 99;
  return sample_training_set(o);
}

DenseNetwork network(const HeadSpec& spec) {
  return init_network(ivim_layer_sizes(BValueSchedule::standard().size(), spec.output_width()), 7);
}

void BM_SampleCorpus(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(corpus(static_cast<std::size_t>(state.range(0))));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SampleCorpus)->Arg(1 << 12);

void BM_Forward(benchmark::State& state) {
  const HeadSpec spec = HeadSpec::mdn(10);
  const DenseNetwork net = network(spec);
  const TrainingSet set = corpus(static_cast<std::size_t>(state.range(0)));
  std::vector<std::size_t> idx(set.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  const Matrix x = input_matrix(set, idx);
  for (auto _ : state) benchmark::DoNotOptimize(forward(net, x));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Forward)->Arg(1)->Arg(128)->Arg(4096);

void BM_LossAndBackward(benchmark::State& state) {
  const HeadSpec spec = state.range(0) == 0 ? HeadSpec::gaussian() : HeadSpec::mdn(static_cast<std::size_t>(state.range(0)));
  const DenseNetwork net = network(spec);
  const TrainingSet set = corpus(128);
  std::vector<std::size_t> idx(set.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  const Matrix x = input_matrix(set, idx);
  const Matrix y = label_matrix(set, idx);
  const BatchLoss loss = make_batch_loss(spec);
  ForwardCache cache;
  Matrix upstream;
  std::vector<double> grad(net.params().size());
  for (auto _ : state) {
    forward(net, x, cache);
    benchmark::DoNotOptimize(loss(cache.output, y, &upstream));
    backward(net, cache, upstream, grad);
  }
  state.SetItemsProcessed(state.iterations() * 128);
}
BENCHMARK(BM_LossAndBackward)->Arg(0)->Arg(1)->Arg(10);

void BM_CrpsSorted(benchmark::State& state) {
  Rng rng(3);
  std::normal_distribution<double> normal;
  std::vector<double> s(static_cast<std::size_t>(state.range(0)));
  for (double& v : s) v = normal(rng);
  std::sort(s.begin(), s.end());
  for (auto _ : state) benchmark::DoNotOptimize(crps_sorted(s, 0.3));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_CrpsSorted)->RangeMultiplier(10)->Range(100, 100000)->Complexity(benchmark::oN);

void BM_SampleMixture(benchmark::State& state) {
  Mixture1D mix;
  for (int c = 0; c < 10; ++c) {
    mix.weights.push_back(0.1);
    mix.means.push_back(0.1 * c);
    mix.stddevs.push_back(0.05);
  }
  Rng rng(5);
  std::vector<double> out;
  for (auto _ : state) {
    sample_mixture(mix, 500, rng, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * 500);
}
BENCHMARK(BM_SampleMixture);

void BM_BaselineFit(benchmark::State& state) {
  FitOptions o;
  o.refine = state.range(0) != 0;
  const TrainingSet set = corpus(256);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(fit_segmented(set.record(i), o));
    i = (i + 1) % set.size();
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_BaselineFit)->Arg(0)->Arg(1);

void BM_PredictBatch(benchmark::State& state) {
  DeepEnsemble ens;
  ens.spec = HeadSpec::mdn(10);
  for (std::uint64_t m = 0; m < 5; ++m) {
    ens.members.push_back(network(ens.spec));
    ens.seeds.push_back(m);
  }
  const TrainingSet set = corpus(256);
  std::vector<std::size_t> idx(set.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  const Matrix x = input_matrix(set, idx);
  PredictOptions o;
  o.samples_per_member = static_cast<std::size_t>(state.range(0));
  o.keep_samples = true;
  for (auto _ : state) benchmark::DoNotOptimize(predict_batch(ens, x, o));
  state.SetItemsProcessed(state.iterations() * 256);
}
BENCHMARK(BM_PredictBatch)->Arg(20)->Arg(100);

}  // namespace

BENCHMARK_MAIN();
