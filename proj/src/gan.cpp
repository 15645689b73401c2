/* Copyright 2026 The glp Authors.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include <algorithm>
#include <cmath>

#include "glp/error.hpp"
#include "glp/models.hpp"

namespace glp {

namespace {

double softplus(double x) noexcept { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); }
double sigmoid(double x) noexcept { return 1.0 / (1.0 + std::exp(-x)); }

Eigen::MatrixXd act_grad(Activation a, const Eigen::MatrixXd& pre) {
  return pre.unaryExpr([a](double x) { return activate_grad(a, x); });
}

Eigen::MatrixXd act_grad2(Activation a, const Eigen::MatrixXd& pre) {
  return pre.unaryExpr([a](double x) { return activate_grad2(a, x); });
}

}  // namespace

Eigen::MatrixXd to_matrix(const Dataset& d) {
  require(!d.empty(), "to_matrix: empty dataset");
  const auto dim = static_cast<Eigen::Index>(d[0].size());
  Eigen::MatrixXd m(dim, static_cast<Eigen::Index>(d.size()));
  for (std::size_t i = 0; i < d.size(); ++i) {
    const auto v = d[i].values();
    std::copy(v.begin(), v.end(), m.col(static_cast<Eigen::Index>(i)).data());
  }
  return m;
}

Dataset from_matrix(const Eigen::MatrixXd& m, int side) {
  require(m.rows() == static_cast<Eigen::Index>(kChannels) * side * side, "from_matrix: row count does not match side");
  require(m.cols() >= 1, "from_matrix: no samples");
  std::vector<Image> images;
  images.reserve(static_cast<std::size_t>(m.cols()));
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    std::vector<double> px(static_cast<std::size_t>(m.rows()));
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      const double v = m(r, c);
      px[static_cast<std::size_t>(r)] = std::isnan(v) ? 0.0 : std::clamp(v, 0.0, 1.0);
    }
    images.emplace_back(side, std::move(px));
  }
  return Dataset(std::move(images));
}

// ---------------------------------------------------------------------------

PenaltyResult gradient_penalty_at(const Mlp& disc, const Eigen::MatrixXd& x_hat) {
  require(disc.output_dim() == 1, "gradient_penalty: discriminator must have a scalar output");
  const std::size_t L = disc.num_layers();
  const auto B = x_hat.cols();
  require(B >= 1, "gradient_penalty: empty batch");
  const ForwardCache fwd = mlp_forward(disc, x_hat);

  std::vector<Eigen::MatrixXd> w(L);
  for (std::size_t l = 0; l < L; ++l) w[l] = disc.effective_weight(l);

  // First-order pass: grad_x D for every column.
  Eigen::MatrixXd delta = act_grad(disc.layers()[L - 1].activation, fwd.pre[L - 1]);
  Eigen::MatrixXd g;
  for (std::size_t l = L; l-- > 0;) {
    Eigen::MatrixXd back = w[l].transpose() * delta;
    if (l > 0) {
      delta = back.cwiseProduct(act_grad(disc.layers()[l - 1].activation, fwd.pre[l - 1]));
    } else {
      g = std::move(back);
    }
  }

  PenaltyResult out;
  out.grad_norms.resize(static_cast<std::size_t>(B));
  Eigen::MatrixXd r(g.rows(), B);
  double total = 0.0;
  for (Eigen::Index i = 0; i < B; ++i) {
    const double n = g.col(i).norm();
    out.grad_norms[static_cast<std::size_t>(i)] = n;
    total += (n - 1.0) * (n - 1.0);
    const double scale = n > 0.0 ? 2.0 * (n - 1.0) / (n * static_cast<double>(B)) : 0.0;
    r.col(i) = scale * g.col(i);
  }
  out.value = total / static_cast<double>(B);

  // sum_i <r_i, grad_x D(x_i)> is the directional derivative of D along r_i:
  // push r forward as a tangent, then reverse through (primal, tangent).
  std::vector<Eigen::MatrixXd> t_in(L), z(L);
  t_in[0] = r;
  for (std::size_t l = 0; l < L; ++l) {
    z[l] = w[l] * t_in[l];
    if (l + 1 < L) t_in[l + 1] = act_grad(disc.layers()[l].activation, fwd.pre[l]).cwiseProduct(z[l]);
  }

  out.grads = MlpGradients::zeros_like(disc);
  Eigen::MatrixXd t_bar = Eigen::MatrixXd::Ones(1, B);
  Eigen::MatrixXd a_bar = Eigen::MatrixXd::Zero(1, B);
  for (std::size_t l = L; l-- > 0;) {
    const Activation act = disc.layers()[l].activation;
    const Eigen::MatrixXd d1 = act_grad(act, fwd.pre[l]);
    const Eigen::MatrixXd z_bar = d1.cwiseProduct(t_bar);
    const Eigen::MatrixXd pre_bar =
        act_grad2(act, fwd.pre[l]).cwiseProduct(z[l]).cwiseProduct(t_bar) + d1.cwiseProduct(a_bar);
    out.grads.weight[l] = z_bar * t_in[l].transpose() + pre_bar * fwd.inputs[l].transpose();
    out.grads.bias[l] = pre_bar.rowwise().sum();
    if (l > 0) {
      t_bar = w[l].transpose() * z_bar;
      a_bar = w[l].transpose() * pre_bar;
    }
  }
  chain_spectral_norm(disc, out.grads);
  return out;
}

PenaltyResult gradient_penalty(const Mlp& disc, const Eigen::MatrixXd& x_real,
                               const Eigen::MatrixXd& x_fake, Rng& rng) {
  require(x_real.rows() == x_fake.rows() && x_real.cols() == x_fake.cols(),
          "gradient_penalty: real and fake batches differ in shape");
  Eigen::MatrixXd x_hat(x_real.rows(), x_real.cols());
  for (Eigen::Index i = 0; i < x_real.cols(); ++i) {
    const double eps = rng.uniform();
    x_hat.col(i) = eps * x_real.col(i) + (1.0 - eps) * x_fake.col(i);
  }
  return gradient_penalty_at(disc, x_hat);
}

// ---------------------------------------------------------------------------

GanTrainer::GanTrainer(std::size_t data_dim, const GanConfig& cfg) : cfg_(cfg), rng_(cfg.seed, 3) {
  require(data_dim >= 1, "GanTrainer: empty data dimension");
  require(cfg.latent_dim >= 1 && cfg.hidden >= 1 && cfg.batch_size >= 1, "GanTrainer: invalid sizes");
  require(cfg.gp_lambda >= 0.0, "GanTrainer: gp_lambda must be >= 0");
  Rng g_init(cfg.seed, 1);
  Rng d_init(cfg.seed, 2);
  gen_ = Mlp::random({cfg.latent_dim, cfg.hidden, cfg.hidden, data_dim},
                     {Activation::leaky_relu, Activation::leaky_relu, Activation::sigmoid}, g_init);
  disc_ = Mlp::random({data_dim, cfg.hidden, cfg.hidden, 1},
                      {Activation::leaky_relu, Activation::leaky_relu, Activation::identity}, d_init);
  if (cfg.spectral_norm) disc_.enable_spectral_norm(d_init);
}

Eigen::MatrixXd GanTrainer::latent_batch() {
  Eigen::MatrixXd z(static_cast<Eigen::Index>(cfg_.latent_dim), static_cast<Eigen::Index>(cfg_.batch_size));
  for (Eigen::Index c = 0; c < z.cols(); ++c)
    for (Eigen::Index r = 0; r < z.rows(); ++r) z(r, c) = rng_.normal();
  return z;
}

Eigen::MatrixXd GanTrainer::data_batch(const Eigen::MatrixXd& data) {
  Eigen::MatrixXd b(data.rows(), static_cast<Eigen::Index>(cfg_.batch_size));
  for (Eigen::Index c = 0; c < b.cols(); ++c) {
    b.col(c) = data.col(static_cast<Eigen::Index>(rng_.below(static_cast<std::uint64_t>(data.cols()))));
  }
  return b;
}

void GanTrainer::discriminator_step(const Eigen::MatrixXd& data, double& d_loss) {
  if (disc_.spectral_norm()) disc_.power_iterate();
  const Eigen::MatrixXd real = data_batch(data);
  const Eigen::MatrixXd fake = mlp_predict(gen_, latent_batch());
  const ForwardCache cr = mlp_forward(disc_, real);
  const ForwardCache cf = mlp_forward(disc_, fake);
  const double inv_b = 1.0 / static_cast<double>(cfg_.batch_size);

  Eigen::MatrixXd up_r(1, real.cols()), up_f(1, fake.cols());
  double loss = 0.0;
  if (cfg_.loss == GanLoss::non_saturating) {
    for (Eigen::Index i = 0; i < real.cols(); ++i) {
      const double lr = cr.output(0, i), lf = cf.output(0, i);
      loss += (softplus(-lr) + softplus(lf)) * inv_b;
      up_r(0, i) = (sigmoid(lr) - 1.0) * inv_b;
      up_f(0, i) = sigmoid(lf) * inv_b;
    }
  } else {
    loss = (cf.output.sum() - cr.output.sum()) * inv_b;
    up_r.setConstant(-inv_b);
    up_f.setConstant(inv_b);
  }
  MlpGradients grads = mlp_grad(disc_, cr, up_r);
  grads += mlp_grad(disc_, cf, up_f);
  if (cfg_.loss == GanLoss::wasserstein_gp && cfg_.gp_lambda > 0.0) {
    PenaltyResult gp = gradient_penalty(disc_, real, fake, rng_);
    loss += cfg_.gp_lambda * gp.value;
    gp.grads *= cfg_.gp_lambda;
    grads += gp.grads;
  }
  if (!std::isfinite(loss)) throw TrainingDiverged(step_, "discriminator loss is not finite");
  adam_step(disc_, grads, d_opt_, cfg_.adam);
  d_loss = loss;
}

double GanTrainer::generator_step() {
  const ForwardCache cg = mlp_forward(gen_, latent_batch());
  const ForwardCache cd = mlp_forward(disc_, cg.output);
  const double inv_b = 1.0 / static_cast<double>(cfg_.batch_size);
  Eigen::MatrixXd up(1, cd.output.cols());
  double loss = 0.0;
  for (Eigen::Index i = 0; i < cd.output.cols(); ++i) {
    const double lf = cd.output(0, i);
    if (cfg_.loss == GanLoss::non_saturating) {
      loss += softplus(-lf) * inv_b;
      up(0, i) = (sigmoid(lf) - 1.0) * inv_b;
    } else {
      loss -= lf * inv_b;
      up(0, i) = -inv_b;
    }
  }
  if (!std::isfinite(loss)) throw TrainingDiverged(step_, "generator loss is not finite");
  const MlpGradients through_disc = mlp_grad(disc_, cd, up);
  const MlpGradients grads = mlp_grad(gen_, cg, through_disc.input);
  adam_step(gen_, grads, g_opt_, cfg_.adam);
  return loss;
}

void GanTrainer::train(const Eigen::MatrixXd& data, std::size_t n) {
  require(data.cols() >= 1, "train_gan: empty dataset");
  require(static_cast<std::size_t>(data.rows()) == gen_.output_dim(), "train_gan: data dimension mismatch");
  const std::size_t d_steps = cfg_.resolved_d_steps();
  for (std::size_t k = 0; k < n; ++k) {
    double d_loss_sum = 0.0;
    for (std::size_t j = 0; j < d_steps; ++j) {
      double d_loss = 0.0;
      discriminator_step(data, d_loss);
      d_loss_sum += d_loss;
    }
    const double g_loss = generator_step();
    ++step_;
    trace_.push_back({step_, d_loss_sum / static_cast<double>(d_steps), g_loss});
    if (on_step) on_step(*this);
  }
}

Generator make_generator(const GanTrainer& trainer, int side) {
  return Generator(GanModel{trainer.generator(), trainer.config().latent_dim}, side, trainer.trace());
}

Generator train_gan(const Dataset& d, const GanConfig& cfg) {
  require(!d.empty(), "train_gan: empty dataset");
  GanTrainer trainer(d[0].size(), cfg);
  trainer.train(to_matrix(d), cfg.steps);
  return make_generator(trainer, d.side());
}

}  // namespace glp
