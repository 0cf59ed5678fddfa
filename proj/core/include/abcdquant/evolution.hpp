#pragma once

#include <string>
#include <utility>
#include <vector>

#include "abcdquant/features.hpp"

namespace abcdq {

/// Ordered real feature vector; n = 4 for ABCD trajectories, arbitrary
/// n for generic latent states.
using FeatureVector = std::vector<double>;

/// Affine per-step drift in feature space: delta(z) = W z + bias,
/// applied as z <- z + step_scale * delta(z).
struct DriftModel {
    std::size_t n = 0;
    std::vector<double> w;     // n x n, row-major
    std::vector<double> bias;  // length n
    double step_scale = 1.0;
};

/// K+1 states; steps[0] is the start.
struct FeatureTrajectory {
    std::vector<FeatureVector> steps;
};

struct PcaProjection {
    FeatureVector mean;
    std::vector<double> components;  // 2 x n, row-major, orthonormal rows
    double explained_variance_ratio[2] = {0.0, 0.0};
    std::size_t n = 0;
};

/// Ridge least squares of (end - start) against start with intercept;
/// needs at least n+1 pairs of consistent dimension.
DriftModel fit_drift(const std::vector<std::pair<FeatureVector, FeatureVector>>& pairs);

/// K explicit Euler steps of the drift. clamp_unit confines every state
/// to [0,1]^n (the ABCD variant); a non-finite intermediate raises
/// NumericError naming the step.
FeatureTrajectory rollout(const DriftModel& model, const FeatureVector& start, int k,
                          bool clamp_unit = false);

/// Straight-line interpolation from start to target, clamped to
/// [0,1]^4; the visualization path that needs no fitted model.
FeatureTrajectory abcd_trajectory(const AbcdScores& start, const AbcdScores& target, int k);

/// Top-2 principal components of mean-centered covariance; component
/// signs are fixed so each row's largest-magnitude entry is positive.
PcaProjection pca_fit(const std::vector<FeatureVector>& points);

/// Per-step (pc1, pc2) coordinates, order preserved.
std::vector<std::pair<double, double>> project(const PcaProjection& proj,
                                               const FeatureTrajectory& traj);

/// Trajectory CSV: header step,a,b,c,d when n = 4, else step,f0..f{n-1}.
std::string trajectory_to_csv(const FeatureTrajectory& traj);
FeatureTrajectory trajectory_from_csv(const std::string& csv_text);

/// Projection CSV: header step,pc1,pc2.
std::string projection_to_csv(const std::vector<std::pair<double, double>>& points);

/// Drift model JSON: {n, W (row-major), bias, step_scale}.
std::string drift_model_to_json(const DriftModel& model);
DriftModel drift_model_from_json(const std::string& json_text);

/// Pairs CSV for fitting: header s0..s{n-1},e0..e{n-1}.
std::vector<std::pair<FeatureVector, FeatureVector>> drift_pairs_from_csv(
    const std::string& csv_text);

} // namespace abcdq
