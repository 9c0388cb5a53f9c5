// Copyright 2026 The text-scene-motion Authors
// SPDX-License-Identifier: Apache-2.0

#include "tsm/pipeline/metrics.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <map>
#include <random>

#include "tsm/common/error.hpp"

namespace tsm::pipeline {

namespace {

// Eigenvalues below this fraction of the largest are treated as zero.
constexpr double kClamp = 1e-12;

Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (m + m.transpose()));
  if (es.info() != Eigen::Success) throw NumericError("covariance eigendecomposition failed");
  Eigen::VectorXd ev = es.eigenvalues();
  const double floor = kClamp * std::max(1.0, ev.cwiseAbs().maxCoeff());
  for (Eigen::Index i = 0; i < ev.size(); ++i) ev[i] = ev[i] > floor ? std::sqrt(ev[i]) : 0.0;
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

double pair_mean(const Eigen::MatrixXd& x, const std::vector<Eigen::Index>& rows, int pairs,
                 std::mt19937_64& rng) {
  const int n = static_cast<int>(rows.size());
  std::uniform_int_distribution<int> first(0, n - 1), second(0, n - 2);
  double sum = 0.0;
  for (int k = 0; k < pairs; ++k) {
    const int i = first(rng);
    int j = second(rng);
    if (j >= i) ++j;
    sum += (x.row(rows[i]) - x.row(rows[j])).norm();
  }
  return sum / pairs;
}

}  // namespace

Eigen::VectorXd mean_pose_feature(const motion::MotionClip& clip) {
  clip.validate();
  if (clip.frames() == 0) throw EmptyInputError("feature of an empty clip");
  Eigen::VectorXd f = Eigen::VectorXd::Zero(6 + 6 * clip.joints);
  for (std::size_t i = 0; i < clip.frames(); ++i) {
    for (int k = 0; k < 6; ++k) f[k] += clip.global_orient[i].v[k];
    for (int j = 0; j < clip.joints; ++j) {
      for (int k = 0; k < 6; ++k) f[6 + 6 * j + k] += clip.local_pose[i][static_cast<std::size_t>(j)].v[k];
    }
  }
  return f / static_cast<double>(clip.frames());
}

FeatureSet extract_features(const std::vector<motion::MotionClip>& clips,
                            std::vector<std::string> labels) {
  if (clips.empty()) throw EmptyInputError("no clips to featurize");
  if (!labels.empty() && labels.size() != clips.size()) {
    throw ValidationError("one label per clip is required");
  }
  FeatureSet fs;
  fs.extractor = kMeanPoseExtractor;
  fs.labels = std::move(labels);
  for (std::size_t i = 0; i < clips.size(); ++i) {
    const Eigen::VectorXd f = mean_pose_feature(clips[i]);
    if (i == 0) fs.samples.resize(static_cast<Eigen::Index>(clips.size()), f.size());
    if (f.size() != fs.samples.cols()) throw ValidationError("clips differ in joint count");
    fs.samples.row(static_cast<Eigen::Index>(i)) = f.transpose();
  }
  return fs;
}

void fit_gaussian(const Eigen::MatrixXd& samples, Eigen::VectorXd& mean, Eigen::MatrixXd& cov) {
  if (samples.rows() < 2) throw ValidationError("a Gaussian fit needs at least two samples");
  mean = samples.colwise().mean().transpose();
  const Eigen::MatrixXd centered = samples.rowwise() - mean.transpose();
  cov = centered.transpose() * centered / static_cast<double>(samples.rows() - 1);
}

double fid(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.cols() != b.cols()) throw ValidationError("feature sets differ in dimension");
  Eigen::VectorXd ma, mb;
  Eigen::MatrixXd sa, sb;
  fit_gaussian(a, ma, sa);
  fit_gaussian(b, mb, sb);
  const Eigen::MatrixXd ra = psd_sqrt(sa);
  const Eigen::MatrixXd cross = psd_sqrt(ra * sb * ra);
  const double value = (ma - mb).squaredNorm() + sa.trace() + sb.trace() - 2.0 * cross.trace();
  if (!std::isfinite(value)) throw NumericError("FID is not finite");
  return std::max(0.0, value);
}

double fid(const FeatureSet& a, const FeatureSet& b) { return fid(a.samples, b.samples); }

double diversity(const Eigen::MatrixXd& samples, int pairs, std::uint64_t seed) {
  if (samples.rows() < 2) throw ValidationError("diversity needs at least two samples");
  if (pairs < 1) throw ValidationError("pair count must be positive");
  std::vector<Eigen::Index> rows(static_cast<std::size_t>(samples.rows()));
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = static_cast<Eigen::Index>(i);
  std::mt19937_64 rng(seed);
  return pair_mean(samples, rows, pairs, rng);
}

double multimodality(const Eigen::MatrixXd& samples, const std::vector<std::string>& labels,
                     int pairs_per_label, std::uint64_t seed) {
  if (labels.size() != static_cast<std::size_t>(samples.rows())) {
    throw ValidationError("one label per sample is required");
  }
  if (pairs_per_label < 1) throw ValidationError("pair count must be positive");
  std::map<std::string, std::vector<Eigen::Index>> groups;
  for (std::size_t i = 0; i < labels.size(); ++i) groups[labels[i]].push_back(static_cast<Eigen::Index>(i));
  if (groups.empty()) throw EmptyInputError("multimodality of an empty set");
  std::mt19937_64 rng(seed);
  double sum = 0.0;
  for (const auto& [label, rows] : groups) {
    if (rows.size() < 2) throw ValidationError("label '" + label + "' has a single sample");
    sum += pair_mean(samples, rows, pairs_per_label, rng);
  }
  return sum / static_cast<double>(groups.size());
}

}  // namespace tsm::pipeline
