// Serial reference vs OpenMP kernels. Pair each benchmark with its serial
// twin and compare wall times; set OMP_NUM_THREADS to vary the thread count.

#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "atp/diffusion.hpp"
#include "atp/features.hpp"
#include "atp/pattern.hpp"
#include "atp/serial.hpp"
#include "atp/thresholds.hpp"
#include "atp/wavelet.hpp"

namespace {

atp::GrayImage noise(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> d(0.0, 255.0);
  atp::GrayImage img(n, n);
  for (double& v : img.pixels()) v = d(gen);
  return img;
}

const std::vector<double> kThresholds{547.5502, 350.2337, 224.0222, 143.2933, 91.6558};

template <auto Fn>
void BM_Diffuse(benchmark::State& state) {
  const auto img = noise(static_cast<std::size_t>(state.range(0)), 1);
  const atp::DiffusionParams p{40.0, 15, 0.25};
  for (auto _ : state) benchmark::DoNotOptimize(Fn(img, p));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(img.size()) * 15);
}

template <auto Fn>
void BM_Haar(benchmark::State& state) {
  const auto img = noise(static_cast<std::size_t>(state.range(0)), 2);
  for (auto _ : state) benchmark::DoNotOptimize(Fn(img));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(img.size()));
}

template <auto Fn>
void BM_Pattern(benchmark::State& state) {
  const auto img = noise(static_cast<std::size_t>(state.range(0)), 3);
  for (auto _ : state) benchmark::DoNotOptimize(Fn(img, kThresholds));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(img.size()));
}

template <auto Fn>
void BM_ExtractBatch(benchmark::State& state) {
  std::vector<atp::GrayImage> images;
  for (int i = 0; i < state.range(0); ++i) images.push_back(noise(96, 10 + i));
  atp::FeatureConfig fc;
  fc.thresholds = atp::bundled_thresholds();
  for (auto _ : state) benchmark::DoNotOptimize(Fn(images, fc));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

atp::GrayImage diffuse_omp(const atp::GrayImage& i, const atp::DiffusionParams& p) { return atp::diffuse(i, p); }
atp::GrayImage diffuse_ser(const atp::GrayImage& i, const atp::DiffusionParams& p) { return atp::serial::diffuse(i, p); }
atp::HaarBands haar_omp(const atp::GrayImage& i) { return atp::haar_dwt2(i); }
atp::HaarBands haar_ser(const atp::GrayImage& i) { return atp::serial::haar_dwt2(i); }
atp::GrayImage pattern_omp(const atp::GrayImage& i, std::span<const double> t) { return atp::atp_transform(i, t); }
atp::GrayImage pattern_ser(const atp::GrayImage& i, std::span<const double> t) {
  return atp::serial::atp_transform(i, t);
}
std::vector<atp::FeatureVector> batch_omp(std::span<const atp::GrayImage> i, const atp::FeatureConfig& c) {
  return atp::extract_batch(i, c);
}
std::vector<atp::FeatureVector> batch_ser(std::span<const atp::GrayImage> i, const atp::FeatureConfig& c) {
  return atp::serial::extract_batch(i, c);
}

}  // namespace

BENCHMARK(BM_Diffuse<diffuse_ser>)->Name("diffuse/serial")->Arg(96)->Arg(512);
BENCHMARK(BM_Diffuse<diffuse_omp>)->Name("diffuse/omp")->Arg(96)->Arg(512);
BENCHMARK(BM_Haar<haar_ser>)->Name("haar_dwt2/serial")->Arg(96)->Arg(1024);
BENCHMARK(BM_Haar<haar_omp>)->Name("haar_dwt2/omp")->Arg(96)->Arg(1024);
BENCHMARK(BM_Pattern<pattern_ser>)->Name("atp_transform/serial")->Arg(48)->Arg(512);
BENCHMARK(BM_Pattern<pattern_omp>)->Name("atp_transform/omp")->Arg(48)->Arg(512);
BENCHMARK(BM_ExtractBatch<batch_ser>)->Name("extract_batch/serial")->Arg(16);
BENCHMARK(BM_ExtractBatch<batch_omp>)->Name("extract_batch/omp")->Arg(16);

BENCHMARK_MAIN();
