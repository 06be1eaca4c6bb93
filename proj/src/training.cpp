#include "esnmor/training.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace esnmor {

const std::vector<double> kLambdaGrid = {1e-9, 1e-8, 1e-7, 1e-6, 1e-5,
                                         1e-4, 1e-3, 1e-2, 1e-1};

void Dataset::validate() const {
  if (inputs.cols() != targets.cols())
    throw std::invalid_argument("Dataset: inputs/targets length mismatch");
  if (!(train_end > 0 && train_end <= val_end && val_end <= steps()))
    throw std::invalid_argument("Dataset: need 0 < train_end <= val_end <= K");
}

Matrix ridge_fit(const Matrix& x, const Matrix& d, double lambda) {
  if (x.rows() != d.rows())
    throw std::invalid_argument("ridge_fit: row count mismatch");
  if (x.rows() < 1) throw std::invalid_argument("ridge_fit: empty system");
  if (lambda < 0.0) throw std::invalid_argument("ridge_fit: lambda must be >= 0");

  Matrix gram = x.transpose() * x;
  gram.diagonal().array() += lambda;
  const Matrix rhs = x.transpose() * d;

  // info() == NumericalIssue only flags sign irregularities from rounding on
  // near-semidefinite systems; the residual check below is the real gate.
  Eigen::LDLT<Matrix> solver(gram);
  if (lambda == 0.0) {
    const Vector pivots = solver.vectorD().cwiseAbs();
    const double eps = std::numeric_limits<double>::epsilon();
    if (pivots.minCoeff() <= gram.rows() * eps * pivots.maxCoeff())
      throw std::runtime_error(
          "ridge_fit: X^T X is numerically singular; use lambda > 0");
  }
  // Iterative refinement keeps the residual contract on ill-conditioned Gram
  // matrices (small lambda relative to the spectrum of X^T X).
  Matrix w = solver.solve(rhs);
  const double target = 1e-8 * rhs.norm();
  double residual = (gram * w - rhs).norm();
  for (int pass = 0; pass < 5 && residual > target; ++pass) {
    w += solver.solve(rhs - gram * w);
    residual = (gram * w - rhs).norm();
  }
  if (rhs.norm() > 0.0 && !(residual <= target))
    throw std::runtime_error("ridge_fit: solve residual too large");
  return w;
}

std::optional<double> r2_score(const Vector& pred, const Vector& truth) {
  if (pred.size() != truth.size() || truth.size() < 2)
    throw std::invalid_argument("r2_score: need matching series, K >= 2");
  const double mean = truth.mean();
  const double ss_tot = (truth.array() - mean).square().sum();
  if (ss_tot == 0.0) return std::nullopt;
  const double ss_res = (truth - pred).squaredNorm();
  return 1.0 - ss_res / ss_tot;
}

namespace {

// Per-output R^2 of the linear readout `w` (N x n_outputs) over state columns
// [begin, end) of the harvested trajectory.
std::vector<std::optional<double>> split_r2(const Matrix& states,
                                            const Matrix& targets,
                                            const Matrix& w, Index begin,
                                            Index end) {
  std::vector<std::optional<double>> out;
  if (end - begin < 2) return out;
  const Matrix pred =
      w.transpose() * states.middleCols(begin, end - begin);  // n_out x len
  for (Index o = 0; o < targets.rows(); ++o) {
    out.push_back(r2_score(pred.row(o).transpose(),
                           targets.row(o).segment(begin, end - begin).transpose()));
  }
  return out;
}

double mean_defined(const std::vector<std::optional<double>>& values) {
  double sum = 0.0;
  int count = 0;
  for (const auto& v : values)
    if (v) {
      sum += *v;
      ++count;
    }
  return count ? sum / count : -std::numeric_limits<double>::infinity();
}

}  // namespace

std::pair<EchoStateNetwork, FitReport> train_readout(
    const EchoStateNetwork& esn, const Dataset& data, Index washout,
    std::optional<double> lambda) {
  data.validate();
  if (data.inputs.rows() != esn.hyper.n_inputs ||
      data.targets.rows() != esn.hyper.n_outputs)
    throw std::invalid_argument("train_readout: dataset/network shape mismatch");
  if (washout >= data.train_end)
    throw std::invalid_argument("train_readout: washout >= train_end");

  // Free-run harvest over the whole dataset; with no output feedback the
  // states are independent of the readout, so one pass serves fitting and
  // both evaluations.
  const StateTrajectory traj =
      esn_run(esn, data.inputs, Vector::Zero(esn.size()));

  const auto fit_rows = [&](Index begin, Index end, double lam) {
    const Matrix x = traj.states.middleCols(begin, end - begin).transpose();
    const Matrix d = data.targets.middleCols(begin, end - begin).transpose();
    return ridge_fit(x, d, lam);  // N x n_outputs
  };

  double chosen = lambda.value_or(kDefaultLambda);
  Matrix w;
  if (!lambda && data.has_validation()) {
    double best = -std::numeric_limits<double>::infinity();
    for (double cand : kLambdaGrid) {
      const Matrix w_cand = fit_rows(washout, data.train_end, cand);
      const double score = mean_defined(
          split_r2(traj.states, data.targets, w_cand, data.train_end,
                   data.val_end));
      if (score > best) {
        best = score;
        chosen = cand;
      }
    }
    // Refit on train + validation with the selected lambda.
    w = fit_rows(washout, data.val_end, chosen);
  } else {
    w = fit_rows(washout, data.train_end, chosen);
  }

  EchoStateNetwork trained = esn;
  trained.w_ro = w.transpose();

  FitReport report;
  report.lambda = chosen;
  report.washout = washout;
  report.train_r2 =
      split_r2(traj.states, data.targets, w, washout, data.train_end);
  report.test_r2 =
      split_r2(traj.states, data.targets, w, data.val_end, data.steps());
  return {std::move(trained), std::move(report)};
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) {
    while (!field.empty() && (field.back() == '\r' || field.back() == ' '))
      field.pop_back();
    while (!field.empty() && field.front() == ' ') field.erase(field.begin());
    fields.push_back(field);
  }
  return fields;
}

}  // namespace

Dataset load_dataset_csv(const std::string& path, Index train_end,
                         Index val_end) {
  std::ifstream file(path);
  if (!file) throw std::runtime_error("cannot open dataset CSV: " + path);

  std::string line;
  if (!std::getline(file, line))
    throw std::runtime_error("dataset CSV is empty: " + path);
  const auto header = split_csv_line(line);

  std::vector<Index> in_cols, out_cols;
  for (Index c = 0; c < static_cast<Index>(header.size()); ++c) {
    if (header[c].rfind("in:", 0) == 0)
      in_cols.push_back(c);
    else if (header[c].rfind("out:", 0) == 0)
      out_cols.push_back(c);
    else
      throw std::runtime_error("dataset CSV column '" + header[c] +
                               "' lacks an in:/out: tag");
  }
  if (in_cols.empty() || out_cols.empty())
    throw std::runtime_error("dataset CSV needs at least one in: and one out: column");

  std::vector<std::vector<double>> rows;
  while (std::getline(file, line)) {
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != header.size())
      throw std::runtime_error("dataset CSV row has wrong field count");
    std::vector<double> row(fields.size());
    for (size_t i = 0; i < fields.size(); ++i) row[i] = std::stod(fields[i]);
    rows.push_back(std::move(row));
  }

  Dataset data;
  const Index k_steps = static_cast<Index>(rows.size());
  data.inputs.resize(static_cast<Index>(in_cols.size()), k_steps);
  data.targets.resize(static_cast<Index>(out_cols.size()), k_steps);
  for (Index k = 0; k < k_steps; ++k) {
    for (size_t i = 0; i < in_cols.size(); ++i)
      data.inputs(static_cast<Index>(i), k) = rows[k][in_cols[i]];
    for (size_t i = 0; i < out_cols.size(); ++i)
      data.targets(static_cast<Index>(i), k) = rows[k][out_cols[i]];
  }
  data.train_end = train_end;
  data.val_end = val_end;
  data.validate();
  return data;
}

}  // namespace esnmor
