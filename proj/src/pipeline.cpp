#include "gesturegan/pipeline.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "gesturegan/errors.hpp"

namespace gesturegan {
namespace fs = std::filesystem;
namespace {

constexpr AudioFeatureKind kAllAudioKinds[] = {AudioFeatureKind::Mfcc, AudioFeatureKind::Mel,
                                               AudioFeatureKind::Prosodic, AudioFeatureKind::MfccProsodic,
                                               AudioFeatureKind::MelProsodic};

std::string cache_suffix(AudioFeatureKind k) {
  std::string s(audio_feature_name(k));
  std::replace(s.begin(), s.end(), '+', '_');
  return s;
}

std::string cache_file(const fs::path& dir, const std::string& name, const std::string& stream) {
  return (dir / (name + "." + stream + ".ggf1")).string();
}

Matrix fit_rows(const Matrix& m, int rows) {
  if (m.rows() >= rows) return m.topRows(rows);
  // Repeats the last row; only reached when a stream is a frame short.
  Matrix out = Matrix::Zero(rows, m.cols());
  out.topRows(m.rows()) = m;
  if (m.rows() > 0) {
    for (Eigen::Index r = m.rows(); r < rows; ++r) out.row(r) = m.row(m.rows() - 1);
  }
  return out;
}

}  // namespace

std::unique_ptr<EmbeddingProvider> make_embedding_provider(const PipelineConfig& cfg) {
  if (cfg.embedding == EmbeddingKind::Pretrained) {
    return std::make_unique<SubprocessEmbeddingProvider>(cfg.embedding_command, cfg.embedding_dim);
  }
  return std::make_unique<StubEmbeddingProvider>(cfg.embedding_seed, cfg.embedding_dim);
}

SpeechInputs extract_speech(const AudioTrack& audio, const Transcript& transcript, EmbeddingProvider& provider,
                            int frames) {
  SpeechInputs s;
  for (AudioFeatureKind k : kAllAudioKinds) s.audio[k] = audio_features(audio, k).frames;
  const int n = frames >= 0 ? frames : static_cast<int>(s.audio.at(AudioFeatureKind::Mfcc).rows());
  for (auto& [k, m] : s.audio) m = fit_rows(m, n);
  const Matrix vectors = embed_words(transcript, provider);
  s.text = align_text_to_frames(transcript, vectors, n).frames;
  return s;
}

ProcessedUtterance process_utterance(const std::string& name, const std::string& bvh_path,
                                     const std::string& wav_path, const std::string& transcript_path,
                                     const JointSelection& joints, EmbeddingProvider& provider) {
  const BvhData bvh = read_bvh_file(bvh_path);
  const BvhData upper = select_joints(bvh.hierarchy, bvh.clip, joints);
  const MotionClip euler20 = resample_fps(upper.clip, kFeatureFps);
  const MotionClip expmap = to_expmap(upper.hierarchy, euler20);

  const AudioTrack audio = read_wav_file(wav_path);
  const Transcript transcript = read_transcript_file(transcript_path);
  SpeechInputs speech = extract_speech(audio, transcript, provider);
  const int frames = std::min(expmap.frame_count(), speech.frames());
  if (frames < 1) throw TooShortError(name + ": no overlapping frames between motion and audio");
  speech.text = speech.text.topRows(frames).eval();
  for (auto& [k, m] : speech.audio) m = m.topRows(frames).eval();

  ProcessedUtterance out;
  out.skeleton = upper.hierarchy;
  out.utterance.name = name;
  out.utterance.text = std::move(speech.text);
  out.utterance.audio = std::move(speech.audio);
  out.utterance.poses = expmap.frames.topRows(frames);
  return out;
}

PrepareReport prepare_dataset(const PipelineConfig& cfg) {
  const fs::path motion_dir = cfg.resolve(cfg.motion_dir);
  const fs::path audio_dir = cfg.resolve(cfg.audio_dir);
  const fs::path transcript_dir = cfg.resolve(cfg.transcript_dir);
  const fs::path cache_dir = cfg.resolve(cfg.cache_dir);
  for (const fs::path& p : {motion_dir, audio_dir, transcript_dir}) {
    if (!fs::is_directory(p)) throw InvalidInputError("directory does not exist: " + p.string());
  }
  std::vector<std::string> names;
  for (const auto& e : fs::directory_iterator(motion_dir)) {
    if (e.is_regular_file() && e.path().extension() == ".bvh") names.push_back(e.path().stem().string());
  }
  std::sort(names.begin(), names.end());
  if (names.empty()) throw InvalidInputError("no .bvh files in " + motion_dir.string());
  fs::create_directories(cache_dir);

  auto provider = make_embedding_provider(cfg);
  const JointSelection joints{cfg.joints};
  std::vector<UtteranceRecord> records;
  std::string skeleton_text;
  for (const std::string& name : names) {
    UtteranceRecord rec;
    rec.name = name;
    rec.motion_path = (motion_dir / (name + ".bvh")).string();
    rec.audio_path = (audio_dir / (name + ".wav")).string();
    rec.transcript_path = (transcript_dir / (name + ".json")).string();
    for (const auto& p : {rec.audio_path, rec.transcript_path}) {
      if (!fs::exists(p)) throw InvalidInputError(name + ": missing " + p);
    }
    ProcessedUtterance u =
        process_utterance(name, rec.motion_path, rec.audio_path, rec.transcript_path, joints, *provider);
    const std::string skel = write_bvh(u.skeleton, MotionClip{kFeatureFps, Representation::Euler,
                                                              Matrix(0, 3 * u.skeleton.size()), Matrix(0, 3)});
    if (skeleton_text.empty()) skeleton_text = skel;
    else if (skel != skeleton_text) throw InvalidInputError(name + ": skeleton differs from earlier recordings");

    write_ggf1_file(cache_file(cache_dir, name, "text"), u.utterance.text);
    write_ggf1_file(cache_file(cache_dir, name, "pose"), u.utterance.poses);
    for (const auto& [k, m] : u.utterance.audio) write_ggf1_file(cache_file(cache_dir, name, cache_suffix(k)), m);
    rec.duration = u.utterance.poses.rows() / kFeatureFps;
    records.push_back(rec);
  }
  {
    std::ofstream skel(cache_dir / "skeleton.bvh");
    skel << skeleton_text;
  }

  PrepareReport report;
  report.utterances = static_cast<int>(records.size());
  report.split = split_dataset(records, cfg.train.seed);
  std::ofstream manifest(cache_dir / "split.tsv");
  if (!manifest) throw InvalidInputError("cannot write split manifest in " + cache_dir.string());
  manifest.precision(9);
  auto emit = [&](const std::vector<UtteranceRecord>& rs, const char* bucket) {
    for (const auto& r : rs) manifest << r.name << '\t' << bucket << '\t' << r.duration << '\n';
  };
  emit(report.split.train, "train");
  emit(report.split.validation, "validation");
  emit(report.split.test, "test");
  return report;
}

AblationCorpus load_corpus(const PipelineConfig& cfg) {
  const fs::path cache_dir = cfg.resolve(cfg.cache_dir);
  const fs::path manifest_path = cache_dir / "split.tsv";
  std::ifstream manifest(manifest_path);
  if (!manifest) throw InvalidInputError("no split manifest at " + manifest_path.string() + " (run prepare first)");
  AblationCorpus corpus;
  corpus.skeleton = read_bvh_file((cache_dir / "skeleton.bvh").string()).hierarchy;
  std::string line;
  int number = 0;
  while (std::getline(manifest, line)) {
    ++number;
    if (line.empty()) continue;
    std::istringstream is(line);
    std::string name, bucket;
    if (!std::getline(is, name, '\t') || !std::getline(is, bucket, '\t')) {
      throw FormatError(manifest_path.string() + " line " + std::to_string(number) + ": malformed entry");
    }
    CorpusUtterance u;
    u.name = name;
    u.text = read_ggf1_file(cache_file(cache_dir, name, "text"));
    u.poses = read_ggf1_file(cache_file(cache_dir, name, "pose"));
    for (AudioFeatureKind k : kAllAudioKinds) u.audio[k] = read_ggf1_file(cache_file(cache_dir, name, cache_suffix(k)));
    if (bucket == "train") corpus.train.push_back(std::move(u));
    else if (bucket == "validation") corpus.validation.push_back(std::move(u));
    else if (bucket == "test") corpus.test.push_back(std::move(u));
    else throw FormatError(manifest_path.string() + " line " + std::to_string(number) + ": unknown split " + bucket);
  }
  return corpus;
}

Matrix model_speech(const SpeechInputs& s, const GestureModel& model, AudioFeatureKind kind) {
  Utterance u;
  u.text = s.text;
  u.audio = s.audio.at(kind);
  u.poses = Matrix::Zero(s.frames(), model.dims.pose_dim);
  return speech_features(u, model.dims);
}

MotionClip to_bvh_clip(const JointHierarchy& skeleton, const MotionClip& expmap_clip) {
  return to_euler(skeleton, expmap_clip);
}

}  // namespace gesturegan
