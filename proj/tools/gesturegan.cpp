#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "gesturegan/checkpoint.hpp"
#include "gesturegan/config.hpp"
#include "gesturegan/errors.hpp"
#include "gesturegan/evaluation.hpp"
#include "gesturegan/pipeline.hpp"

namespace gg = gesturegan;

namespace {

struct CommonOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string variant;
};

gg::PipelineConfig load(const CommonOptions& o) {
  gg::PipelineConfig cfg = o.config_path.empty() ? gg::PipelineConfig{} : gg::load_config(o.config_path);
  if (o.seed) cfg.train.seed = *o.seed;
  return cfg;
}

// Applies the named ablation variant (framework or audio-feature) to cfg.
gg::TrainConfig with_variant(const gg::TrainConfig& cfg, const std::string& variant) {
  if (variant.empty()) return cfg;
  for (const char* kind : {"framework", "audio-features"}) {
    for (const auto& v : gg::ablation_variants(kind, cfg)) {
      if (v.name == variant) return v.config;
    }
  }
  throw gg::ConfigError("unknown variant '" + variant + "'");
}

std::vector<gg::Utterance> project(const std::vector<gg::CorpusUtterance>& us, gg::AudioFeatureKind kind) {
  std::vector<gg::Utterance> out;
  for (const auto& u : us) out.push_back(u.with_audio(kind));
  return out;
}

std::string output_path(const gg::PipelineConfig& cfg, const std::string& file) {
  const std::string dir = cfg.resolve(cfg.output_dir);
  std::filesystem::create_directories(dir);
  return (std::filesystem::path(dir) / file).string();
}

int cmd_prepare(const CommonOptions& o) {
  const gg::PipelineConfig cfg = load(o);
  const gg::PrepareReport r = gg::prepare_dataset(cfg);
  for (const auto& w : r.split.warnings) std::cerr << "warning: " << w << "\n";
  std::cout << "prepared " << r.utterances << " utterances: " << r.split.train.size() << " train, "
            << r.split.validation.size() << " validation, " << r.split.test.size() << " test\n";
  return 0;
}

int cmd_train(const CommonOptions& o, const std::string& checkpoint) {
  const gg::PipelineConfig cfg = load(o);
  const gg::TrainConfig tc = with_variant(cfg.train, o.variant);
  const gg::AblationCorpus corpus = gg::load_corpus(cfg);
  if (corpus.train.empty()) throw gg::InvalidInputError("training split is empty");
  const auto train_set = project(corpus.train, tc.audio_features);
  const auto val_set = project(corpus.validation, tc.audio_features);

  gg::TrainState state = gg::make_train_state(tc, train_set, static_cast<int>(train_set.front().text.cols()));
  state.metadata["skeleton"] = gg::write_bvh(
      corpus.skeleton, gg::MotionClip{gg::kFeatureFps, gg::Representation::Euler,
                                      gg::Matrix(0, 3 * corpus.skeleton.size()), gg::Matrix(0, 3)});
  if (!o.variant.empty()) state.metadata["variant"] = o.variant;
  const gg::TrainingData train_data = gg::prepare_training_data(train_set, state.model);
  const gg::TrainingData val_data = gg::prepare_training_data(val_set, state.model);

  gg::TrainOptions opts;
  opts.checkpoint_path = checkpoint.empty() ? output_path(cfg, "model.ggck") : checkpoint;
  opts.best_path = output_path(cfg, "best.ggck");
  opts.log_csv = output_path(cfg, "train_log.csv");
  opts.on_epoch = [](const gg::EpochReport& r) {
    std::cout << "epoch " << r.epoch << " L_G=" << r.generator << " L_mse=" << r.mse << " L_D=" << r.discriminator
              << " val_mse=" << r.validation_mse << std::endl;
  };
  gg::train(state, train_data, val_set.empty() ? nullptr : &val_data, opts);
  std::cout << "wrote " << opts.checkpoint_path << "\n";
  return 0;
}

gg::JointHierarchy checkpoint_skeleton(const gg::TrainState& state) {
  const auto it = state.metadata.find("skeleton");
  if (it == state.metadata.end()) throw gg::CheckpointError("checkpoint carries no skeleton");
  return gg::parse_bvh(it->second).hierarchy;
}

int cmd_generate(const CommonOptions& o, const std::string& checkpoint, const std::string& audio_path,
                 const std::string& transcript_path, const std::string& out_path) {
  const auto t0 = std::chrono::steady_clock::now();
  const gg::PipelineConfig cfg = load(o);
  const gg::TrainState state = gg::load_checkpoint(checkpoint);
  const gg::JointHierarchy skeleton = checkpoint_skeleton(state);
  auto provider = gg::make_embedding_provider(cfg);
  const gg::SpeechInputs speech =
      gg::extract_speech(gg::read_wav_file(audio_path), gg::read_transcript_file(transcript_path), *provider);
  if (speech.text.cols() != state.model.dims.text_dim) {
    throw gg::InvalidInputError("embedding width " + std::to_string(speech.text.cols()) +
                                " does not match the checkpoint's " + std::to_string(state.model.dims.text_dim));
  }
  const gg::Matrix features = gg::model_speech(speech, state.model, state.config.audio_features);
  gg::Rng rng(gg::mix_seed(cfg.train.seed, 0x6000000));
  gg::Vector noise(state.model.dims.noise_dim);
  for (int i = 0; i < noise.size(); ++i) noise[i] = rng.normal();
  const gg::MotionClip clip = gg::generate_sequence(state.model, features, noise, state.model.stats.pose_mean);
  gg::write_bvh_file(out_path, skeleton, gg::to_bvh_clip(skeleton, clip));
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::cout << "generated " << clip.frame_count() << " frames to " << out_path << "\n";
  std::printf("wall time: %.3f s\n", secs);
  return 0;
}

void write_metrics(const std::string& path, const std::vector<gg::MetricsReport>& rows) {
  std::ostringstream os;
  os << gg::metrics_csv_header() << "\n";
  for (const auto& r : rows) os << gg::metrics_csv_row(r) << "\n";
  std::cout << os.str();
  if (!path.empty()) {
    std::ofstream f(path);
    if (!f) throw gg::InvalidInputError("cannot write " + path);
    f << os.str();
  }
}

int cmd_evaluate(const CommonOptions& o, const std::string& checkpoint, const std::string& out) {
  const gg::PipelineConfig cfg = load(o);
  const gg::TrainState state = gg::load_checkpoint(checkpoint);
  const gg::AblationCorpus corpus = gg::load_corpus(cfg);
  const auto test_set = project(corpus.test, state.config.audio_features);
  const std::string name = o.variant.empty() ? "model" : o.variant;
  const gg::MetricsReport r =
      gg::evaluate_model(state.model, corpus.skeleton, test_set, cfg.eval_samples, cfg.train.seed, name);
  write_metrics(out, {r});
  return 0;
}

int cmd_ablate(const CommonOptions& o, const std::string& kind, const std::string& out) {
  const gg::PipelineConfig cfg = load(o);
  const gg::AblationCorpus corpus = gg::load_corpus(cfg);
  gg::AblationOptions opts;
  opts.n_samples = cfg.eval_samples;
  opts.only_variant = o.variant;
  opts.on_epoch = [](const std::string& v, const gg::EpochReport& r) {
    std::cerr << v << " epoch " << r.epoch << " L_G=" << r.generator << " L_D=" << r.discriminator << std::endl;
  };
  write_metrics(out, gg::run_ablation(kind, corpus, cfg.train, opts));
  return 0;
}

// Reads one word per line from stdin and writes stub vectors as GGF1.
int cmd_embed_stub(std::uint64_t seed, int dim) {
  std::vector<std::string> words;
  std::string line;
  while (std::getline(std::cin, line)) words.push_back(line);
  gg::StubEmbeddingProvider p(seed, dim);
  gg::write_ggf1(std::cout, p.embed(words));
  std::cout.flush();
  return std::cout ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Speech-driven co-speech gesture generation"};
  app.require_subcommand(1);
  CommonOptions common;
  std::uint64_t seed_value = 0;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", common.config_path, "key=value configuration file");
    sub->add_option("--seed", common.seed, "random seed (overrides the config)");
    sub->add_option("--variant", common.variant, "ablation variant name, e.g. \"No GRU\"");
  };

  std::string checkpoint, audio, transcript, output, kind;
  int dim = gg::kTextDim;

  auto* prepare = app.add_subcommand("prepare", "build feature caches and the split manifest");
  add_common(prepare);
  auto* train = app.add_subcommand("train", "train on the prepared training split");
  add_common(train);
  train->add_option("--checkpoint", checkpoint, "final checkpoint path");
  auto* generate = app.add_subcommand("generate", "WAV + transcript + checkpoint to BVH");
  add_common(generate);
  generate->add_option("--checkpoint", checkpoint)->required();
  generate->add_option("--audio", audio)->required();
  generate->add_option("--transcript", transcript)->required();
  generate->add_option("--output,-o", output)->required();
  auto* evaluate = app.add_subcommand("evaluate", "objective metrics on the test split");
  add_common(evaluate);
  evaluate->add_option("--checkpoint", checkpoint)->required();
  evaluate->add_option("--output,-o", output, "metrics CSV path");
  auto* ablate = app.add_subcommand("ablate", "train and evaluate every variant of an ablation");
  add_common(ablate);
  ablate->add_option("--kind", kind, "audio-features or framework")->required();
  ablate->add_option("--output,-o", output, "metrics CSV path");
  auto* embed = app.add_subcommand("embed-stub", "stdin words to GGF1 stub vectors on stdout");
  embed->add_option("--seed", seed_value);
  embed->add_option("--dim", dim);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (*prepare) return cmd_prepare(common);
    if (*train) return cmd_train(common, checkpoint);
    if (*generate) return cmd_generate(common, checkpoint, audio, transcript, output);
    if (*evaluate) return cmd_evaluate(common, checkpoint, output);
    if (*ablate) return cmd_ablate(common, kind, output);
    if (*embed) return cmd_embed_stub(seed_value, dim);
  } catch (const gg::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.is_validation() ? 1 : 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
