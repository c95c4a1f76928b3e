#include <benchmark/benchmark.h>

#include "kftrack/ablation.hpp"
#include "kftrack/suites.hpp"

using namespace kftrack;

namespace {

void BM_KalmanPredictUpdate(benchmark::State& state) {
  const MotionConfig cfg;
  KalmanState s = kf_init(BBox::from_center(100, 100, 30, 20), cfg);
  double x = 100.0;
  for (auto _ : state) {
    x += 1.5;
    const Prediction p = kf_predict(s, cfg);
    s = kf_update(p.state, BBox::from_center(x, 100, 30, 20), cfg);
    benchmark::DoNotOptimize(s.mean);
  }
}
BENCHMARK(BM_KalmanPredictUpdate);

void BM_MaskToBBox(benchmark::State& state) {
  const auto side = static_cast<std::int64_t>(state.range(0));
  const RleMask m = RleMask::rectangle(256, 256, 40, 60, 40 + side - 1, 60 + side - 1);
  for (auto _ : state) benchmark::DoNotOptimize(mask_to_bbox(m));
}
BENCHMARK(BM_MaskToBBox)->Arg(8)->Arg(32)->Arg(128);

void BM_MotionAwareBank(benchmark::State& state) {
  MemoryHistory h;
  for (int f = 0; f < 200; ++f) {
    MemoryEntry e;
    e.frame_index = f;
    e.s_mask = (f % 5 == 0) ? 0.2 : 0.9;
    e.s_obj = 1.0;
    e.s_kf = 0.8;
    h.append(e);
  }
  const MemoryGate g;
  for (auto _ : state) benchmark::DoNotOptimize(build_bank_motion_aware(h.entries(), g));
}
BENCHMARK(BM_MotionAwareBank);

void BM_TrackSequence(benchmark::State& state) {
  const Scenario sc = suites::fast_motion_suite(1, 5)[0];
  const Sequence seq = generate_sequence(sc);
  const TrackerConfig cfg = state.range(0) ? TrackerConfig::full() : TrackerConfig::baseline();
  for (auto _ : state) {
    SimProposalSource src(sc, seq);
    benchmark::DoNotOptimize(track(src, seq.frames[0].boxes[0], cfg));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(seq.num_frames()));
  state.SetLabel(state.range(0) ? "full" : "baseline");
}
BENCHMARK(BM_TrackSequence)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
