#include <doctest.h>

#include <cmath>

#include "dyadfuse/ingest.hpp"
#include "dyadfuse/model_io.hpp"
#include "dyadfuse/synth.hpp"
#include "support.hpp"

using namespace dyadfuse;
using namespace dyadfuse::synth;

namespace {

SynthSpec small_spec() {
  SynthSpec spec;
  spec.n_dyads = 9;
  spec.seed = 21;
  spec.modalities = {{"facial", 5, 50, 30.0, SignalKind::MeanShift, 5.0, 1.0, 0.2, {}},
                     {"audio", 4, 80, 100.0, SignalKind::FrequencyShift, 2.0, 0.0, 0.5, {}}};
  return spec;
}

}  // namespace

TEST_CASE("generation is deterministic and shaped by the spec") {
  const auto a = generate(small_spec());
  const auto b = generate(small_spec(), 3);
  CHECK(a.dataset.labels == b.dataset.labels);
  for (const auto& [name, t] : a.dataset.modalities) {
    const auto& u = b.dataset.modality(name);
    CHECK(std::equal(t.data().begin(), t.data().end(), u.data().begin(), u.data().end()));
  }
  const auto& facial = a.dataset.modality("facial");
  CHECK(facial.instances() == 9);
  CHECK(facial.channels() == 10);
  CHECK(facial.timesteps() == 50);
  CHECK(facial.channel_names()[5] == "receiver/facial_0");
  CHECK(a.dataset.modality("audio").timesteps() == 80);
  CHECK(validate_dataset(a.dataset).empty());

  auto other = small_spec();
  other.seed = 22;
  CHECK(generate(other).dataset.modality("facial").at(0, 0, 0) != facial.at(0, 0, 0));
}

TEST_CASE("labels are balanced within one") {
  auto spec = small_spec();
  for (std::size_t n : {2, 7, 40}) {
    spec.n_dyads = n;
    const auto ds = generate(spec).dataset;
    const auto lies = std::count(ds.labels.begin(), ds.labels.end(), ClassLabel::Lie);
    CHECK(std::abs(2 * static_cast<long>(lies) - static_cast<long>(n)) <= 1);
  }
  spec.n_lie = 3;
  spec.n_dyads = 10;
  const auto ds = generate(spec).dataset;
  CHECK(std::count(ds.labels.begin(), ds.labels.end(), ClassLabel::Lie) == 3);
}

TEST_CASE("informative channels carry the planted mean shift") {
  auto spec = small_spec();
  spec.n_dyads = 40;
  spec.modalities[0].timesteps = 400;
  const auto out = generate(spec);
  CHECK(out.truth.informative_channels.at("facial") == std::vector<std::size_t>{0});
  CHECK(out.truth.informative_channels.at("audio") == std::vector<std::size_t>{0, 1});
  const auto& t = out.dataset.modality("facial");
  // Second-half minus first-half level on sender channel 0 (informative)
  // and channel 1 (noise), averaged per class.
  auto step = [&](std::size_t i, std::size_t c) {
    double first = 0.0, second = 0.0;
    for (std::size_t u = 0; u < 200; ++u) first += t.at(i, c, u);
    for (std::size_t u = 200; u < 400; ++u) second += t.at(i, c, u);
    return (second - first) / 200.0;
  };
  double lie0 = 0, truth0 = 0, lie1 = 0, truth1 = 0;
  for (std::size_t i = 0; i < 40; ++i) {
    const bool lie = out.dataset.labels[i] == ClassLabel::Lie;
    (lie ? lie0 : truth0) += step(i, 0) / 20.0;
    (lie ? lie1 : truth1) += step(i, 1) / 20.0;
  }
  CHECK(lie0 - truth0 == doctest::Approx(5.0).epsilon(0.1));
  CHECK(std::abs(lie1 - truth1) < 1.0);
}

TEST_CASE("zero effect leaves no class difference in the generator") {
  auto spec = small_spec();
  spec.modalities[0].sender_effect = 0.0;
  spec.modalities[0].receiver_effect = 0.0;
  auto flipped = spec;
  flipped.n_lie = 0;
  const auto a = generate(spec).dataset.modality("facial");
  const auto b = generate(flipped).dataset.modality("facial");
  CHECK(std::equal(a.data().begin(), a.data().end(), b.data().begin(), b.data().end()));
}

TEST_CASE("export then load reproduces the dataset bit for bit") {
  support::TempDir dir;
  const auto ds = generate(small_spec()).dataset;
  export_tables(ds, dir.path());
  const auto back = ingest::load_dataset(ingest::read_manifest(dir / "manifest.json"), 2);
  CHECK(back.dyad_ids == ds.dyad_ids);
  CHECK(back.labels == ds.labels);
  for (const auto& [name, t] : ds.modalities) {
    const auto& u = back.modality(name);
    CHECK(u.channel_names() == t.channel_names());
    CHECK(u.sample_rate_hz() == t.sample_rate_hz());
    CHECK(std::equal(t.data().begin(), t.data().end(), u.data().begin(), u.data().end()));
  }
}

TEST_CASE("sender-only corpora export without receiver tables") {
  support::TempDir dir;
  auto spec = small_spec();
  spec.both_participants = false;
  const auto ds = generate(spec).dataset;
  const auto manifest = export_tables(ds, dir.path());
  CHECK(manifest.modalities.at("facial").scope == ingest::Scope::SenderOnly);
  CHECK_FALSE(manifest.dyads[0].files.at("facial").receiver.has_value());
  const auto back = ingest::load_dataset(ingest::read_manifest(dir / "manifest.json"));
  CHECK(back.modality("audio").channels() == 4);
}

TEST_CASE("spec validation and JSON") {
  auto spec = small_spec();
  spec.modalities[1].sender_effect = -1.0;
  CHECK_THROWS_AS(generate(spec), Error);
  spec = small_spec();
  spec.modalities.push_back(spec.modalities[0]);
  CHECK_THROWS_AS(validate(spec), Error);

  const auto j = nlohmann::json::parse(R"({
    "n_dyads": 12, "seed": 4,
    "modalities": [{"name": "facial", "channel_names": "default", "timesteps": 30,
                    "signal": "bursts", "sender_effect": 3}]})");
  const auto parsed = spec_from_json(j);
  CHECK(parsed.n_dyads == 12);
  CHECK(parsed.modalities[0].channels == 25);
  CHECK(parsed.modalities[0].signal == SignalKind::Bursts);
  CHECK(to_json(spec_from_json(to_json(parsed))) == to_json(parsed));
  CHECK(generate(parsed).dataset.modality("facial").channel_names()[0] == "sender/AU01_r");
  CHECK_THROWS_AS(spec_from_json(nlohmann::json::parse(R"({"modalities": [{"name": "x", "signal": "pulse"}]})")),
                  Error);
  CHECK_THROWS_AS(spec_from_json(nlohmann::json::parse(R"({"n_dyads": 4})")), Error);
}
