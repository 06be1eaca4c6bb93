#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "esnmor/deim.hpp"
#include "esnmor/esn.hpp"
#include "esnmor/pod.hpp"
#include "esnmor/training.hpp"
#include "esnmor/types.hpp"

namespace esnmor {

// Anything the memory-capacity scorer or the timing harness can drive:
// a state vector advanced one input at a time.
class StepModel {
 public:
  virtual ~StepModel() = default;
  virtual Index state_dim() const = 0;
  virtual Index input_dim() const = 0;
  virtual void reset() = 0;
  // Advances by one input column and returns the new state.
  virtual const Vector& step(const Vector& u) = 0;
};

std::unique_ptr<StepModel> make_step_model(const EchoStateNetwork& esn);
std::unique_ptr<StepModel> make_step_model(const PodEsn& pe);
std::unique_ptr<StepModel> make_step_model(const DeimEsn& de);

enum class SignalKind { white_noise, aprbs, uniform };

struct SignalSpec {
  SignalKind kind = SignalKind::white_noise;
  Index length = 0;
  std::uint64_t seed = 0;
  // white_noise
  double mean = 0.0;
  double std_dev = 1.0;
  // aprbs / uniform
  double lo = 0.0;
  double hi = 1.0;
  Index min_period = 1;  // aprbs hold >= min_period, drawn from [p, 2p]
};

Vector gen_signal(const SignalSpec& spec);

// y[k] = 0.3 y[k-1] + 0.05 y[k-1] sum_{i=1..order} y[k-i]
//        + 1.5 u[k-order+1] u[k] + 0.1, zero initial history.
Vector narma_sim(const Vector& u, int order = 10);

// inputs eta[k], targets eta[k-n]; the first n steps are dropped so every
// column has a defined target.
Dataset delay_dataset(const Vector& eta, Index n);

// Squared Pearson correlation; nullopt when either series is constant.
std::optional<double> determination_coefficient(const Vector& y,
                                                const Vector& d);

struct McResult {
  std::vector<double> r_n;  // delay 1..n_mc
  double mc = 0.0;
  Index n_mc = 0;
};

inline constexpr Index kDefaultNMc = 100;

// Drives the model once with eta, harvests states, fits one ridge readout
// per delay on the first post-washout half and scores R_n on the second.
// Undefined coefficients (zero variance) score 0.
McResult memory_capacity(StepModel& model, const Vector& eta,
                         Index n_mc = kDefaultNMc,
                         Index washout = kDefaultWashout,
                         double lambda = kDefaultLambda);

}  // namespace esnmor
