#include "gesturegan/errors.hpp"
#include "gesturegan/evaluation.hpp"

namespace gesturegan {
namespace {

std::vector<Utterance> project(const std::vector<CorpusUtterance>& us, AudioFeatureKind kind) {
  std::vector<Utterance> out;
  out.reserve(us.size());
  for (const auto& u : us) out.push_back(u.with_audio(kind));
  return out;
}

}  // namespace

Utterance CorpusUtterance::with_audio(AudioFeatureKind kind) const {
  const auto it = audio.find(kind);
  if (it == audio.end()) {
    throw InvalidInputError("utterance " + name + " has no " + std::string(audio_feature_name(kind)) + " features");
  }
  return {name, text, it->second, poses};
}

std::vector<AblationVariant> ablation_variants(std::string_view kind, const TrainConfig& base) {
  std::vector<AblationVariant> v;
  auto add = [&](std::string name, auto edit) {
    TrainConfig c = base;
    edit(c);
    v.push_back({std::move(name), c});
  };
  if (kind == "audio-features") {
    add("MFCCs", [](TrainConfig& c) { c.audio_features = AudioFeatureKind::Mfcc; });
    add("Mel Spectrogram", [](TrainConfig& c) { c.audio_features = AudioFeatureKind::Mel; });
    add("Prosodic", [](TrainConfig& c) { c.audio_features = AudioFeatureKind::Prosodic; });
    add("MFCCs+Prosodic", [](TrainConfig& c) { c.audio_features = AudioFeatureKind::MfccProsodic; });
    add("Mel Spectrogram+Prosodic", [](TrainConfig& c) { c.audio_features = AudioFeatureKind::MelProsodic; });
  } else if (kind == "framework") {
    auto reset = [](TrainConfig& c) { c.no_text = c.no_audio = c.no_gru = c.no_film = false; };
    add("Full", [&](TrainConfig& c) { reset(c); });
    add("No Text", [&](TrainConfig& c) { reset(c); c.no_text = true; });
    add("No Audio", [&](TrainConfig& c) { reset(c); c.no_audio = true; });
    add("No GRU", [&](TrainConfig& c) { reset(c); c.no_gru = true; });
    add("No FiLM Conditions", [&](TrainConfig& c) { reset(c); c.no_film = true; });
  } else {
    throw ConfigError("unknown ablation kind '" + std::string(kind) + "' (expected audio-features or framework)");
  }
  return v;
}

std::vector<MetricsReport> run_ablation(std::string_view kind, const AblationCorpus& corpus, const TrainConfig& base,
                                        const AblationOptions& options) {
  std::vector<AblationVariant> variants = ablation_variants(kind, base);
  if (!options.only_variant.empty()) {
    std::erase_if(variants, [&](const AblationVariant& v) { return v.name != options.only_variant; });
    if (variants.empty()) throw ConfigError("unknown variant '" + options.only_variant + "' for " + std::string(kind));
  }
  if (corpus.train.empty()) throw InvalidInputError("ablation needs a training split");
  if (corpus.test.empty()) throw InvalidInputError("ablation needs a test split");

  std::vector<MetricsReport> table;
  for (const auto& v : variants) {
    const auto train_set = project(corpus.train, v.config.audio_features);
    const auto val_set = project(corpus.validation, v.config.audio_features);
    const auto test_set = project(corpus.test, v.config.audio_features);
    const int text_dim = static_cast<int>(train_set.front().text.cols());
    TrainState state = make_train_state(v.config, train_set, text_dim);
    const TrainingData train_data = prepare_training_data(train_set, state.model);
    const TrainingData val_data = prepare_training_data(val_set, state.model);
    TrainOptions topt;
    if (options.on_epoch) topt.on_epoch = [&](const EpochReport& r) { options.on_epoch(v.name, r); };
    train(state, train_data, val_set.empty() ? nullptr : &val_data, topt);
    table.push_back(evaluate_model(state.model, corpus.skeleton, test_set, options.n_samples, v.config.seed, v.name));
  }
  return table;
}

}  // namespace gesturegan
