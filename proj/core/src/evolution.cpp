#include "abcdquant/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include <Eigen/Dense>
#include <json.hpp>

#include "abcdquant/csv.hpp"
#include "abcdquant/error.hpp"

namespace abcdq {

namespace {

constexpr double kRidgeLambda = 1e-6;

void check_finite(const FeatureVector& v, const char* what) {
    for (double x : v)
        if (!std::isfinite(x)) throw InvalidInput(std::string(what) + ": non-finite entry");
}

std::string format_value(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

} // namespace

DriftModel fit_drift(const std::vector<std::pair<FeatureVector, FeatureVector>>& pairs) {
    if (pairs.empty()) throw InvalidInput("fit_drift: no pairs");
    const std::size_t n = pairs.front().first.size();
    if (n < 2) throw InvalidInput("fit_drift: feature dimension must be at least 2");
    for (const auto& [s, e] : pairs) {
        if (s.size() != n || e.size() != n)
            throw InvalidInput("fit_drift: inconsistent feature dimensions");
        check_finite(s, "fit_drift");
        check_finite(e, "fit_drift");
    }
    const std::size_t m = pairs.size();
    if (m < n + 1)
        throw InvalidInput("fit_drift: need at least n+1 = " + std::to_string(n + 1) +
                           " pairs, got " + std::to_string(m));

    // X = [start | 1], Y = end - start; ridge on the W block only.
    Eigen::MatrixXd x(m, n + 1), y(m, n);
    for (std::size_t r = 0; r < m; ++r) {
        for (std::size_t c = 0; c < n; ++c) {
            x(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = pairs[r].first[c];
            y(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                pairs[r].second[c] - pairs[r].first[c];
        }
        x(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(n)) = 1.0;
    }
    Eigen::MatrixXd gram = x.transpose() * x;
    for (std::size_t i = 0; i < n; ++i)
        gram(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) += kRidgeLambda;
    const Eigen::MatrixXd coeff = gram.ldlt().solve(x.transpose() * y);
    if (!coeff.allFinite()) throw NumericError("fit_drift: singular normal equations");

    DriftModel model;
    model.n = n;
    model.w.resize(n * n);
    model.bias.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j)
            model.w[i * n + j] =
                coeff(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i));
        model.bias[i] = coeff(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(i));
    }
    return model;
}

FeatureTrajectory rollout(const DriftModel& model, const FeatureVector& start, int k,
                          bool clamp_unit) {
    const std::size_t n = model.n;
    if (k < 1) throw InvalidInput("rollout: need at least one step");
    if (start.size() != n) throw InvalidInput("rollout: start dimension mismatch");
    if (model.w.size() != n * n || model.bias.size() != n)
        throw InvalidInput("rollout: malformed drift model");

    FeatureTrajectory traj;
    traj.steps.reserve(static_cast<std::size_t>(k) + 1);
    FeatureVector z = start;
    if (clamp_unit)
        for (double& v : z) v = std::clamp(v, 0.0, 1.0);
    traj.steps.push_back(z);
    for (int step = 1; step <= k; ++step) {
        FeatureVector next(n);
        for (std::size_t i = 0; i < n; ++i) {
            double delta = model.bias[i];
            for (std::size_t j = 0; j < n; ++j) delta += model.w[i * n + j] * z[j];
            next[i] = z[i] + model.step_scale * delta;
            if (clamp_unit) next[i] = std::clamp(next[i], 0.0, 1.0);
        }
        for (double v : next)
            if (!std::isfinite(v))
                throw NumericError("rollout: diverged at step " + std::to_string(step));
        z = std::move(next);
        traj.steps.push_back(z);
    }
    return traj;
}

FeatureTrajectory abcd_trajectory(const AbcdScores& start, const AbcdScores& target, int k) {
    if (k < 1) throw InvalidInput("abcd_trajectory: need at least one step");
    const double s[4] = {start.a, start.b, start.c, start.d};
    const double t[4] = {target.a, target.b, target.c, target.d};
    FeatureTrajectory traj;
    traj.steps.reserve(static_cast<std::size_t>(k) + 1);
    for (int step = 0; step <= k; ++step) {
        const double f = static_cast<double>(step) / static_cast<double>(k);
        FeatureVector z(4);
        for (int i = 0; i < 4; ++i) z[static_cast<std::size_t>(i)] =
            std::clamp(s[i] + f * (t[i] - s[i]), 0.0, 1.0);
        traj.steps.push_back(std::move(z));
    }
    return traj;
}

PcaProjection pca_fit(const std::vector<FeatureVector>& points) {
    if (points.size() < 3) throw InvalidInput("pca_fit: need at least 3 points");
    const std::size_t n = points.front().size();
    if (n < 2) throw InvalidInput("pca_fit: need dimension >= 2");
    for (const auto& p : points) {
        if (p.size() != n) throw InvalidInput("pca_fit: inconsistent dimensions");
        check_finite(p, "pca_fit");
    }

    const std::size_t m = points.size();
    Eigen::MatrixXd data(m, n);
    for (std::size_t r = 0; r < m; ++r)
        for (std::size_t c = 0; c < n; ++c)
            data(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = points[r][c];
    const Eigen::RowVectorXd mean = data.colwise().mean();
    data.rowwise() -= mean;
    const Eigen::MatrixXd cov =
        data.transpose() * data / static_cast<double>(m - 1);

    const double trace = cov.trace();
    if (!(trace > 1e-24)) throw NumericError("pca_fit: zero-variance input");

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
    if (solver.info() != Eigen::Success)
        throw NumericError("pca_fit: eigendecomposition failed");
    // eigenvalues ascending; take the last two
    const auto& evals = solver.eigenvalues();
    const auto& evecs = solver.eigenvectors();

    PcaProjection proj;
    proj.n = n;
    proj.mean.assign(mean.data(), mean.data() + n);
    proj.components.resize(2 * n);
    for (int comp = 0; comp < 2; ++comp) {
        const Eigen::Index col = static_cast<Eigen::Index>(n) - 1 - comp;
        Eigen::VectorXd v = evecs.col(col);
        Eigen::Index imax = 0;
        v.cwiseAbs().maxCoeff(&imax);
        if (v(imax) < 0.0) v = -v;  // deterministic sign
        for (std::size_t c = 0; c < n; ++c)
            proj.components[static_cast<std::size_t>(comp) * n + c] =
                v(static_cast<Eigen::Index>(c));
        proj.explained_variance_ratio[comp] = std::max(0.0, evals(col)) / trace;
    }
    return proj;
}

std::vector<std::pair<double, double>> project(const PcaProjection& proj,
                                               const FeatureTrajectory& traj) {
    std::vector<std::pair<double, double>> out;
    out.reserve(traj.steps.size());
    for (const auto& z : traj.steps) {
        if (z.size() != proj.n) throw InvalidInput("project: dimension mismatch");
        double pc1 = 0.0, pc2 = 0.0;
        for (std::size_t c = 0; c < proj.n; ++c) {
            const double centered = z[c] - proj.mean[c];
            pc1 += centered * proj.components[c];
            pc2 += centered * proj.components[proj.n + c];
        }
        out.emplace_back(pc1, pc2);
    }
    return out;
}

std::string trajectory_to_csv(const FeatureTrajectory& traj) {
    if (traj.steps.empty()) throw InvalidInput("trajectory_to_csv: empty trajectory");
    const std::size_t n = traj.steps.front().size();
    CsvTable table;
    table.header.push_back("step");
    if (n == 4) {
        table.header.insert(table.header.end(), {"a", "b", "c", "d"});
    } else {
        for (std::size_t i = 0; i < n; ++i) table.header.push_back("f" + std::to_string(i));
    }
    for (std::size_t s = 0; s < traj.steps.size(); ++s) {
        std::vector<std::string> row{std::to_string(s)};
        for (double v : traj.steps[s]) row.push_back(format_value(v));
        table.rows.push_back(std::move(row));
    }
    return to_csv(table);
}

FeatureTrajectory trajectory_from_csv(const std::string& csv_text) {
    const CsvTable table = parse_csv(csv_text);
    if (table.header.empty() || table.header.front() != "step")
        throw InvalidInput("trajectory CSV must start with a 'step' column");
    if (table.rows.empty()) throw InvalidInput("trajectory CSV has no rows");
    FeatureTrajectory traj;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        FeatureVector z;
        for (std::size_t c = 1; c < table.header.size(); ++c)
            z.push_back(parse_cell_double(table.rows[r][c], r + 1, table.header[c]));
        traj.steps.push_back(std::move(z));
    }
    return traj;
}

std::string projection_to_csv(const std::vector<std::pair<double, double>>& points) {
    CsvTable table;
    table.header = {"step", "pc1", "pc2"};
    for (std::size_t s = 0; s < points.size(); ++s)
        table.rows.push_back(
            {std::to_string(s), format_value(points[s].first), format_value(points[s].second)});
    return to_csv(table);
}

std::string drift_model_to_json(const DriftModel& model) {
    nlohmann::ordered_json j;
    j["n"] = model.n;
    j["W"] = model.w;
    j["bias"] = model.bias;
    j["step_scale"] = model.step_scale;
    return j.dump(2) + "\n";
}

DriftModel drift_model_from_json(const std::string& text) {
    try {
        const auto j = nlohmann::json::parse(text);
        DriftModel model;
        model.n = j.at("n").get<std::size_t>();
        model.w = j.at("W").get<std::vector<double>>();
        model.bias = j.at("bias").get<std::vector<double>>();
        model.step_scale = j.value("step_scale", 1.0);
        if (model.w.size() != model.n * model.n || model.bias.size() != model.n)
            throw InvalidInput("drift model JSON: W/bias sizes do not match n");
        return model;
    } catch (const nlohmann::json::exception& e) {
        throw InvalidInput(std::string("drift model JSON: ") + e.what());
    }
}

std::vector<std::pair<FeatureVector, FeatureVector>> drift_pairs_from_csv(
    const std::string& csv_text) {
    const CsvTable table = parse_csv(csv_text);
    std::size_t n = 0;
    while (table.has_column("s" + std::to_string(n)) &&
           table.has_column("e" + std::to_string(n)))
        ++n;
    if (n == 0)
        throw InvalidInput("pairs CSV needs columns s0..s{n-1} and e0..e{n-1}");

    std::vector<std::size_t> scol(n), ecol(n);
    for (std::size_t i = 0; i < n; ++i) {
        scol[i] = table.column("s" + std::to_string(i));
        ecol[i] = table.column("e" + std::to_string(i));
    }
    std::vector<std::pair<FeatureVector, FeatureVector>> pairs;
    pairs.reserve(table.rows.size());
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        FeatureVector s(n), e(n);
        for (std::size_t i = 0; i < n; ++i) {
            s[i] = parse_cell_double(table.rows[r][scol[i]], r + 1, "s" + std::to_string(i));
            e[i] = parse_cell_double(table.rows[r][ecol[i]], r + 1, "e" + std::to_string(i));
        }
        pairs.emplace_back(std::move(s), std::move(e));
    }
    return pairs;
}

} // namespace abcdq
