#pragma once

#include <functional>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gesturegan/motion.hpp"
#include "gesturegan/training.hpp"

namespace gesturegan {

// Joint trajectories: T rows of J world positions, joint j in columns 3j..3j+2.
using TrajectorySet = Matrix;

TrajectorySet joint_trajectories(const JointHierarchy& h, const MotionClip& clip);

struct MotionStatistics {
  double acceleration = 0.0;  // units/s^2
  double jerk = 0.0;          // units/s^3
};

// Mean Euclidean magnitude of the per-joint acceleration and jerk, from
// repeated first differences scaled by fps. Needs at least 4 frames.
MotionStatistics motion_statistics(const TrajectorySet& tr, double fps = kFeatureFps);

// Root of the mean squared coordinate difference over frames, joints and axes.
double rmse(const TrajectorySet& gen, const TrajectorySet& ref);

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;  // population
};

MeanStd mean_std(std::span<const double> values);

struct MetricsReport {
  std::string variant;
  MeanStd acceleration;
  MeanStd jerk;
  MeanStd rmse;
  int samples = 0;
};

struct TrajectoryPair {
  TrajectorySet generated;
  TrajectorySet reference;
};

MetricsReport evaluate_pairs(std::span<const TrajectoryPair> pairs, const std::string& variant = {});

// Generates n_samples clips (cycling over the test utterances, fresh seeded
// noise per sample) and compares their joint trajectories with the references.
MetricsReport evaluate_model(const GestureModel& model, const JointHierarchy& skeleton,
                             std::span<const Utterance> test, int n_samples = 50, std::uint64_t seed = 0,
                             const std::string& variant = {});

std::string metrics_csv_header();
std::string metrics_csv_row(const MetricsReport& r);

// Utterance with every audio feature kind, so ablations can swap inputs.
struct CorpusUtterance {
  std::string name;
  Matrix text;
  std::map<AudioFeatureKind, Matrix> audio;
  Matrix poses;
  Utterance with_audio(AudioFeatureKind kind) const;
};

struct AblationCorpus {
  JointHierarchy skeleton;
  std::vector<CorpusUtterance> train;
  std::vector<CorpusUtterance> validation;
  std::vector<CorpusUtterance> test;
};

struct AblationVariant {
  std::string name;
  TrainConfig config;
};

// kind is "audio-features" or "framework".
std::vector<AblationVariant> ablation_variants(std::string_view kind, const TrainConfig& base);

struct AblationOptions {
  int n_samples = 50;
  std::string only_variant;  // empty: all variants
  std::function<void(const std::string& variant, const EpochReport&)> on_epoch;
};

std::vector<MetricsReport> run_ablation(std::string_view kind, const AblationCorpus& corpus, const TrainConfig& base,
                                        const AblationOptions& options = {});

}  // namespace gesturegan
