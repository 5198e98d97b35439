#include <benchmark/benchmark.h>

#include "quatmark/image.hpp"
#include "quatmark/rng.hpp"
#include "quatmark/watermark.hpp"

namespace {

using namespace quatmark;

RgbImage noise_host(std::size_t side) {
  RgbImage img(side, side);
  for (int c = 0; c < 3; ++c)
    for (std::size_t i = 0; i < img.channel(c).size(); ++i)
      img.channel(c).values()[i] = to_byte(counter_uniform(11 + static_cast<std::uint64_t>(c), i)) / 255.0;
  return img;
}

EmbedConfig config(std::size_t threads) {
  EmbedConfig cfg;
  cfg.threshold = 0.02;
  cfg.threads = threads;
  return cfg;
}

void BM_EmbedBlock(benchmark::State& state) {
  const RgbImage host = noise_host(4);
  const QuatMatrix block = encode_quaternion(host);
  const EmbedConfig cfg = config(1);
  int bit = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(embed_block(block, bit, cfg));
    bit ^= 1;
  }
}
BENCHMARK(BM_EmbedBlock);

void BM_ExtractBlock(benchmark::State& state) {
  const QuatMatrix block = encode_quaternion(noise_host(4));
  for (auto _ : state) benchmark::DoNotOptimize(extract_block(block));
}
BENCHMARK(BM_ExtractBlock);

void BM_Embed512(benchmark::State& state) {
  const RgbImage host = noise_host(512);
  const BitMatrix payload = random_bits(64, 64, 3);
  const EmbedConfig cfg = config(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(embed(host, payload, WatermarkKey{0x1234}, cfg));
}
BENCHMARK(BM_Embed512)->Arg(1)->Arg(0)->Unit(benchmark::kMillisecond)->UseRealTime();

}  // namespace
