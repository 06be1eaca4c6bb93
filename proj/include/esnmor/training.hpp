#pragma once

#include <optional>
#include <string>
#include <vector>

#include "esnmor/esn.hpp"
#include "esnmor/types.hpp"

namespace esnmor {

// Input/target series plus split indices: [0, train_end) trains,
// [train_end, val_end) validates, [val_end, K) tests.
struct Dataset {
  Matrix inputs;   // n_inputs x K
  Matrix targets;  // n_outputs x K
  Index train_end = 0;
  Index val_end = 0;

  Index steps() const { return inputs.cols(); }
  bool has_validation() const { return val_end > train_end; }
  void validate() const;
};

struct FitReport {
  double lambda = 0.0;
  std::vector<std::optional<double>> train_r2;  // nullopt = zero-variance truth
  std::vector<std::optional<double>> test_r2;
  Index washout = 0;
};

// Solves (X^T X + lambda I) W = X^T D symmetrically. X is K x N (one state
// row per timestep), D is K x n_outputs. lambda = 0 requires X^T X invertible.
Matrix ridge_fit(const Matrix& x, const Matrix& d, double lambda);

// 1 - SS_res/SS_tot; nullopt when the truth has zero variance.
std::optional<double> r2_score(const Vector& pred, const Vector& truth);

inline constexpr Index kDefaultWashout = 200;
inline constexpr double kDefaultLambda = 1e-6;

// Harvests reservoir states from x0 = 0 over the dataset, discards the first
// `washout` training states, fits w_ro by ridge regression and evaluates R^2
// on the train and test splits. The reservoir weights are never touched.
//
// When the dataset has a validation split and `lambda` is not given, lambda
// is picked from kLambdaGrid by validation R^2 and the readout refit on
// train+validation.
std::pair<EchoStateNetwork, FitReport> train_readout(
    const EchoStateNetwork& esn, const Dataset& data,
    Index washout = kDefaultWashout,
    std::optional<double> lambda = std::nullopt);

extern const std::vector<double> kLambdaGrid;  // {1e-9 ... 1e-1}

// CSV with a header row; columns tagged "in:<name>" / "out:<name>", one row
// per timestep. Split indices come from the caller, not the file.
Dataset load_dataset_csv(const std::string& path, Index train_end,
                         Index val_end);

}  // namespace esnmor
