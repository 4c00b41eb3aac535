#include <doctest.h>

#include <cmath>

#include "gesturegan/errors.hpp"
#include "gesturegan/evaluation.hpp"
#include "support/oracles.hpp"
#include "support/synthetic.hpp"

using namespace gesturegan;

namespace {

TrajectorySet polynomial(int frames, int joints, double v, double a, double j = 0.0) {
  TrajectorySet tr(frames, 3 * joints);
  for (int t = 0; t < frames; ++t) {
    const double s = t / 20.0;
    for (int c = 0; c < 3 * joints; ++c) {
      const double dir = (c % 3 == 0) ? 1.0 : (c % 3 == 1 ? -0.5 : 0.25);
      tr(t, c) = c + dir * (v * s + 0.5 * a * s * s + j * s * s * s / 6.0);
    }
  }
  return tr;
}

}  // namespace

TEST_CASE("motion statistics fixtures") {
  const double norm = std::sqrt(1.0 + 0.25 + 0.0625);
  const MotionStatistics still = motion_statistics(polynomial(30, 15, 0, 0));
  CHECK(still.acceleration < 1e-9);
  CHECK(still.jerk < 1e-9);
  const MotionStatistics linear = motion_statistics(polynomial(30, 15, 7.0, 0));
  CHECK(linear.acceleration < 1e-9);
  CHECK(linear.jerk < 1e-9);
  const MotionStatistics quad = motion_statistics(polynomial(30, 15, 2.0, 9.0));
  CHECK(std::abs(quad.acceleration - 9.0 * norm) < 1e-9);
  CHECK(quad.jerk < 1e-7);
  const MotionStatistics cubic = motion_statistics(polynomial(30, 15, 0, 0, 4.0));
  CHECK(std::abs(cubic.jerk - 4.0 * norm) < 1e-7);
  CHECK_THROWS_AS(motion_statistics(polynomial(3, 15, 1, 1)), TooShortError);
}

TEST_CASE("motion statistics ignore translation") {
  const TrajectorySet a = testdata::random_matrix(50, 45, 1, -10, 10);
  const MotionStatistics s = motion_statistics(a);
  const MotionStatistics t = motion_statistics(a.array() + 123.0);
  CHECK(std::abs(s.acceleration - t.acceleration) < 1e-9 * s.acceleration);
  CHECK(std::abs(s.jerk - t.jerk) < 1e-9 * s.jerk);
}

TEST_CASE("rmse properties") {
  const TrajectorySet a = testdata::random_matrix(40, 45, 2, -20, 20);
  const TrajectorySet b = testdata::random_matrix(40, 45, 3, -20, 20);
  const TrajectorySet c = testdata::random_matrix(40, 45, 4, -20, 20);
  CHECK(rmse(a, a) == 0.0);
  CHECK(std::abs(rmse(a, b) - oracle::rmse(a, b)) < 1e-10);
  CHECK(rmse(a, b) == rmse(b, a));
  CHECK(rmse(a, c) <= rmse(a, b) + rmse(b, c) + 1e-12);

  TrajectorySet offset = a;
  for (int j = 0; j < 15; ++j) offset.col(3 * j).array() += 3.0;
  CHECK(rmse(offset, a) == doctest::Approx(std::sqrt(3.0)).epsilon(1e-12));

  const Mat3 r = oracle::euler_matrix("ZXY", 30, -40, 75);
  TrajectorySet ra = a, rb = b;
  for (int t = 0; t < 40; ++t) {
    for (int j = 0; j < 15; ++j) {
      ra.block(t, 3 * j, 1, 3) = (r * a.block(t, 3 * j, 1, 3).transpose()).transpose();
      rb.block(t, 3 * j, 1, 3) = (r * b.block(t, 3 * j, 1, 3).transpose()).transpose();
    }
  }
  CHECK(std::abs(rmse(ra, rb) - rmse(a, b)) < 1e-9);
  CHECK_THROWS_AS(rmse(a, a.leftCols(42)), InvalidInputError);
}

TEST_CASE("population statistics") {
  const std::vector<double> v{1, 2, 3, 4};
  const MeanStd m = mean_std(v);
  CHECK(m.mean == 2.5);
  CHECK(m.std == doctest::Approx(std::sqrt(1.25)));
}

TEST_CASE("self-comparison of references") {
  const JointHierarchy h = testdata::full_skeleton();
  const BvhData up = select_joints(h, testdata::synthetic_motion(h, 120, 60, 2), JointSelection::upper_body_default());
  const MotionClip clip = to_expmap(up.hierarchy, resample_fps(up.clip, 20));
  const TrajectorySet tr = joint_trajectories(up.hierarchy, clip);
  CHECK(tr.rows() == 40);
  CHECK(tr.cols() == 45);
  const std::vector<TrajectoryPair> pairs{{tr, tr}, {tr, tr}};
  const MetricsReport r = evaluate_pairs(pairs, "ground truth");
  const MotionStatistics s = motion_statistics(tr);
  CHECK(r.rmse.mean == 0.0);
  CHECK(r.acceleration.mean == doctest::Approx(s.acceleration));
  CHECK(r.jerk.mean == doctest::Approx(s.jerk));
  CHECK(r.acceleration.std == doctest::Approx(0.0));
  CHECK(r.samples == 2);
  CHECK_THROWS_AS(evaluate_pairs({}), InvalidInputError);
  CHECK(metrics_csv_header() == "variant,acc_mean,acc_std,jerk_mean,jerk_std,rmse_mean,rmse_std");
  CHECK(metrics_csv_row(r).rfind("ground truth,", 0) == 0);
}

TEST_CASE("model evaluation is seeded") {
  const JointHierarchy h = testdata::full_skeleton();
  const BvhData up = select_joints(h, testdata::synthetic_motion(h, 3, 60, 0), JointSelection::upper_body_default());
  const auto us = testdata::synthetic_utterances(2, 2.5, 5, 8);
  TrainConfig cfg;
  const TrainState s = make_train_state(cfg, us, 8);
  const MetricsReport a = evaluate_model(s.model, up.hierarchy, us, 4, 1, "init");
  const MetricsReport b = evaluate_model(s.model, up.hierarchy, us, 4, 1, "init");
  CHECK(a.samples == 4);
  CHECK(a.rmse.mean == b.rmse.mean);
  CHECK(a.jerk.mean == b.jerk.mean);
  CHECK(a.rmse.mean > 0.0);
  CHECK(a.acceleration.std >= 0.0);
  CHECK_THROWS_AS(evaluate_model(s.model, up.hierarchy, {}, 4), InvalidInputError);
}

TEST_CASE("ablation variant tables") {
  std::vector<std::string> names;
  for (const auto& v : ablation_variants("framework", TrainConfig{})) names.push_back(v.name);
  CHECK(names == std::vector<std::string>{"Full", "No Text", "No Audio", "No GRU", "No FiLM Conditions"});
  names.clear();
  for (const auto& v : ablation_variants("audio-features", TrainConfig{})) names.push_back(v.name);
  CHECK(names ==
        std::vector<std::string>{"MFCCs", "Mel Spectrogram", "Prosodic", "MFCCs+Prosodic", "Mel Spectrogram+Prosodic"});
  const auto fw = ablation_variants("framework", TrainConfig{});
  CHECK(fw[1].config.no_text);
  CHECK(fw[3].config.no_gru);
  CHECK(fw[4].config.no_film);
  CHECK_THROWS_AS(ablation_variants("optimizer", TrainConfig{}), ConfigError);
}

TEST_CASE("ablation runs are reproducible") {
  const JointHierarchy h = testdata::full_skeleton();
  AblationCorpus corpus;
  corpus.skeleton =
      select_joints(h, testdata::synthetic_motion(h, 3, 60, 0), JointSelection::upper_body_default()).hierarchy;
  int i = 0;
  for (auto* part : {&corpus.train, &corpus.test}) {
    for (const auto& u : testdata::synthetic_utterances(1, 2.5, 30 + i++, 8)) {
      CorpusUtterance c{u.name, u.text, {}, u.poses};
      for (auto k : {AudioFeatureKind::Mfcc, AudioFeatureKind::Prosodic}) c.audio[k] = Matrix::Zero(u.frames(), 1);
      c.audio[AudioFeatureKind::Mfcc] = u.audio;
      c.audio[AudioFeatureKind::Prosodic] = u.audio.leftCols(4);
      part->push_back(c);
    }
  }
  TrainConfig cfg;
  cfg.epochs = 1;
  cfg.batch_size = 8;
  AblationOptions opts;
  opts.n_samples = 2;
  opts.only_variant = "Prosodic";
  const auto a = run_ablation("audio-features", corpus, cfg, opts);
  const auto b = run_ablation("audio-features", corpus, cfg, opts);
  REQUIRE(a.size() == 1);
  CHECK(a[0].variant == "Prosodic");
  CHECK(metrics_csv_row(a[0]) == metrics_csv_row(b[0]));
  opts.only_variant = "Mel Spectrogram";
  CHECK_THROWS_AS(run_ablation("audio-features", corpus, cfg, opts), InvalidInputError);
  opts.only_variant = "Bogus";
  CHECK_THROWS_AS(run_ablation("audio-features", corpus, cfg, opts), ConfigError);
}
