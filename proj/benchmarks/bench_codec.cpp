#include <benchmark/benchmark.h>

#include "panelist/codec.hpp"
#include "panelist/prompts.hpp"

using namespace panelist;

namespace {

void BM_ParseLikert(benchmark::State& state) {
  const std::string answers[] = {"Agree", "  \"Strongly disagree\".", "I would say neutral.",
                                 "Hmm, no idea"};
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(parse_likert(answers[i++ % 4], LikertScale::Agreement));
}
BENCHMARK(BM_ParseLikert);

void BM_ParsePrediction(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(parse_prediction("I believe it will be over the limit.", FamiliarityDomain::High));
  }
}
BENCHMARK(BM_ParsePrediction);

void BM_RenderTask2(benchmark::State& state) {
  const PromptEngine engine;
  Case c;
  c.id = "bench";
  c.domain = FamiliarityDomain::High;
  c.features = {{"name", "Alex"},       {"weight", "70 kg"},       {"units_of_alcohol", "4"},
                {"duration", "2 hours"}, {"gender", "Female"},      {"stomach_content", "Empty"}};
  const Condition cond{FamiliarityDomain::High, ExplanationType::Causal};
  for (auto _ : state) benchmark::DoNotOptimize(engine.render_task2(c, cond));
}
BENCHMARK(BM_RenderTask2);

}  // namespace
