#include "esnmor/tasks.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <stdexcept>

#include "esnmor/kernels.hpp"
#include "esnmor/rng.hpp"

namespace esnmor {

namespace {

class EsnStepModel final : public StepModel {
 public:
  explicit EsnStepModel(const EchoStateNetwork& esn) : esn_(esn) { reset(); }
  Index state_dim() const override { return esn_.size(); }
  Index input_dim() const override { return esn_.hyper.n_inputs; }
  void reset() override {
    x_ = Vector::Zero(esn_.size());
    next_.resize(esn_.size());
  }
  const Vector& step(const Vector& u) override {
    kernels::step_full(esn_.w_rr, esn_.w_ir, esn_.w_br, esn_.hyper.leak_rate,
                       x_, u, next_, /*parallel=*/true);
    x_.swap(next_);
    return x_;
  }

 private:
  EchoStateNetwork esn_;
  Vector x_, next_;
};

class PodStepModel final : public StepModel {
 public:
  explicit PodStepModel(const PodEsn& pe) : pe_(pe) { reset(); }
  Index state_dim() const override { return pe_.size(); }
  Index input_dim() const override { return pe_.n_inputs(); }
  void reset() override {
    z_ = Vector::Zero(pe_.size());
    next_.resize(pe_.size());
    scratch_.resize(pe_.full_size());
  }
  const Vector& step(const Vector& u) override {
    kernels::step_pod(pe_.w_rr_t, pe_.w_ir, pe_.w_br, pe_.tt, pe_.gamma, z_, u,
                      scratch_, next_, /*parallel=*/true);
    z_.swap(next_);
    return z_;
  }

 private:
  PodEsn pe_;
  Vector z_, next_, scratch_;
};

class DeimStepModel final : public StepModel {
 public:
  explicit DeimStepModel(const DeimEsn& de) : de_(de) { reset(); }
  Index state_dim() const override { return de_.size(); }
  Index input_dim() const override { return de_.base.n_inputs(); }
  void reset() override {
    z_ = Vector::Zero(de_.size());
    next_.resize(de_.size());
    scratch_.resize(de_.points());
  }
  const Vector& step(const Vector& u) override {
    kernels::step_deim(de_.w_rr_t_piv, de_.w_ir_piv, de_.w_br_piv, de_.lift,
                       de_.base.gamma, z_, u, scratch_, next_,
                       /*parallel=*/true);
    z_.swap(next_);
    return z_;
  }

 private:
  DeimEsn de_;
  Vector z_, next_, scratch_;
};

}  // namespace

std::unique_ptr<StepModel> make_step_model(const EchoStateNetwork& esn) {
  return std::make_unique<EsnStepModel>(esn);
}
std::unique_ptr<StepModel> make_step_model(const PodEsn& pe) {
  return std::make_unique<PodStepModel>(pe);
}
std::unique_ptr<StepModel> make_step_model(const DeimEsn& de) {
  return std::make_unique<DeimStepModel>(de);
}

Vector gen_signal(const SignalSpec& spec) {
  if (spec.length < 1) throw std::invalid_argument("gen_signal: length >= 1");
  Rng rng(spec.seed);
  Vector out(spec.length);
  switch (spec.kind) {
    case SignalKind::white_noise:
      if (!(spec.std_dev >= 0.0))
        throw std::invalid_argument("gen_signal: std_dev must be >= 0");
      for (Index k = 0; k < spec.length; ++k)
        out[k] = spec.mean + spec.std_dev * rng.normal();
      break;
    case SignalKind::uniform:
      if (spec.lo > spec.hi)
        throw std::invalid_argument("gen_signal: lo > hi");
      for (Index k = 0; k < spec.length; ++k)
        out[k] = rng.uniform(spec.lo, spec.hi);
      break;
    case SignalKind::aprbs: {
      if (spec.lo > spec.hi)
        throw std::invalid_argument("gen_signal: lo > hi");
      if (spec.min_period < 1)
        throw std::invalid_argument("gen_signal: min_period >= 1");
      Index k = 0;
      while (k < spec.length) {
        const Index hold = rng.uniform_int(spec.min_period, 2 * spec.min_period);
        const double level = rng.uniform(spec.lo, spec.hi);
        for (Index j = 0; j < hold && k < spec.length; ++j, ++k)
          out[k] = level;
      }
      break;
    }
  }
  return out;
}

Vector narma_sim(const Vector& u, int order) {
  if (order < 1) throw std::invalid_argument("narma_sim: order >= 1");
  const Index k_steps = u.size();
  Vector y(k_steps);
  const auto past_y = [&](Index k, Index back) {
    return k >= back ? y[k - back] : 0.0;
  };
  const auto past_u = [&](Index k, Index back) {
    return k >= back ? u[k - back] : 0.0;
  };
  for (Index k = 0; k < k_steps; ++k) {
    double sum = 0.0;
    for (int i = 1; i <= order; ++i) sum += past_y(k, i);
    y[k] = 0.3 * past_y(k, 1) + 0.05 * past_y(k, 1) * sum +
           1.5 * past_u(k, order - 1) * u[k] + 0.1;
    if (!std::isfinite(y[k]) || std::abs(y[k]) > kDivergenceLimit)
      throw DivergenceError(k, "narma_sim: recursion diverged at step " +
                                   std::to_string(k));
  }
  return y;
}

Dataset delay_dataset(const Vector& eta, Index n) {
  if (n < 0 || n >= eta.size())
    throw std::invalid_argument("delay_dataset: need 0 <= n < K");
  const Index len = eta.size() - n;
  Dataset data;
  data.inputs.resize(1, len);
  data.targets.resize(1, len);
  for (Index k = 0; k < len; ++k) {
    data.inputs(0, k) = eta[k + n];
    data.targets(0, k) = eta[k];
  }
  data.train_end = len;
  data.val_end = len;
  return data;
}

std::optional<double> determination_coefficient(const Vector& y,
                                                const Vector& d) {
  if (y.size() != d.size() || y.size() < 2)
    throw std::invalid_argument("determination_coefficient: bad series");
  const Index n = y.size();
  const Vector yc = (y.array() - y.mean()).matrix();
  const Vector dc = (d.array() - d.mean()).matrix();
  const double var_y = yc.squaredNorm() / n;
  const double var_d = dc.squaredNorm() / n;
  if (var_y == 0.0 || var_d == 0.0) return std::nullopt;
  const double cov = yc.dot(dc) / n;
  return (cov * cov) / (var_y * var_d);
}

McResult memory_capacity(StepModel& model, const Vector& eta, Index n_mc,
                         Index washout, double lambda) {
  if (model.input_dim() != 1)
    throw std::invalid_argument("memory_capacity: model must be single-input");
  const Index k_steps = eta.size();
  if (washout < n_mc)
    throw std::invalid_argument("memory_capacity: washout must cover n_mc");
  if (k_steps <= washout + 4)
    throw std::invalid_argument("memory_capacity: signal too short");

  // Single drive; the 100 per-delay readouts are independent least-squares
  // problems over the same states.
  const Index dim = model.state_dim();
  Matrix states(dim, k_steps);
  model.reset();
  Vector u(1);
  for (Index k = 0; k < k_steps; ++k) {
    u[0] = eta[k];
    states.col(k) = model.step(u);
  }
  if (!states.allFinite())
    throw DivergenceError(k_steps, "memory_capacity: model diverged");

  const Index usable = k_steps - washout;
  const Index train_len = usable / 2;
  const Index test_begin = washout + train_len;
  const Index test_len = k_steps - test_begin;

  const Matrix x_train = states.middleCols(washout, train_len).transpose();
  Matrix gram = x_train.transpose() * x_train;
  gram.diagonal().array() += lambda;
  Eigen::LDLT<Matrix> solver(gram);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("memory_capacity: Gram factorization failed");

  const Matrix x_test = states.middleCols(test_begin, test_len).transpose();

  McResult result;
  result.n_mc = n_mc;
  result.r_n.reserve(n_mc);
  for (Index n = 1; n <= n_mc; ++n) {
    Vector d_train(train_len), d_test(test_len);
    for (Index k = 0; k < train_len; ++k) d_train[k] = eta[washout + k - n];
    for (Index k = 0; k < test_len; ++k) d_test[k] = eta[test_begin + k - n];
    const Vector w = solver.solve(x_train.transpose() * d_train);
    const Vector pred = x_test * w;
    const auto r = determination_coefficient(pred, d_test);
    result.r_n.push_back(r.value_or(0.0));
    result.mc += result.r_n.back();
  }
  return result;
}

}  // namespace esnmor
