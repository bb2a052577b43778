#include <doctest.h>

#include <cmath>
#include <numbers>

#include "diffcps/diffusion/policy.hpp"
#include "diffcps/diffusion/schedule.hpp"
#include "diffcps/errors.hpp"

using namespace diffcps;

namespace {

// High-precision (mpmath, 40 digits) evaluation of the closed form at
// T = 5, beta_min = 0.1, beta_max = 10.
constexpr double kBetas[5] = {0.195874558333440344, 0.458818193384797110, 0.635781020428476680,
                              0.754878187960882642, 0.835031379177368554};
constexpr double kAlphaBars[5] = {0.804125441666559655, 0.435178059266356699, 0.158500108677908335,
                                  0.0388518338475259209, 0.00640933344625638185};

DiffusionPolicyConfig tiny_config(int steps = 5) {
  DiffusionPolicyConfig c;
  c.state_dim = 1;
  c.action_dim = 2;
  c.steps = steps;
  c.time_embed_dim = 4;
  c.hidden_dim = 5;
  c.hidden_layers = 1;
  return c;
}

DiffusionPolicy zero_policy(int steps = 5) {
  const auto c = tiny_config(steps);
  return DiffusionPolicy(c, nn::Mlp({c.action_dim + c.state_dim + c.time_embed_dim, 5, c.action_dim}));
}

double scalar_mish(double x) { return x * std::tanh(std::log1p(std::exp(x))); }

}  // namespace

TEST_SUITE("diffusion") {
  TEST_CASE("schedule matches the high-precision closed form") {
    const NoiseSchedule s = make_vp_schedule(5, 0.1, 10.0);
    REQUIRE(s.steps() == 5);
    for (int i = 1; i <= 5; ++i) {
      CHECK(s.beta(i) == doctest::Approx(kBetas[i - 1]).epsilon(1e-14));
      CHECK(s.alpha_bar(i) == doctest::Approx(kAlphaBars[i - 1]).epsilon(1e-13));
      CHECK(s.alpha(i) + s.beta(i) == doctest::Approx(1.0).epsilon(1e-15));
    }
    CHECK(s.alpha_bar(0) == 1.0);
    CHECK(make_vp_schedule(5).beta(1) == s.beta(1));
  }

  TEST_CASE("schedule argument errors") {
    CHECK_THROWS_AS(make_vp_schedule(0, 0.1, 10.0), ConfigError);
    CHECK_THROWS_AS(make_vp_schedule(-3, 0.1, 10.0), ConfigError);
    CHECK_THROWS_AS(make_vp_schedule(5, 10.0, 0.1), ConfigError);
    CHECK_THROWS_AS(make_vp_schedule(5, 0.0, 1.0), ConfigError);
    const NoiseSchedule s = make_vp_schedule(5);
    CHECK_THROWS_AS(s.beta(0), UsageError);
    CHECK_THROWS_AS(s.alpha(6), UsageError);
  }

  TEST_CASE("random schedules keep beta in (0,1) and alpha_bar decreasing") {
    Rng rng(2024);
    std::uniform_int_distribution<int> steps(1, 200);
    std::uniform_real_distribution<double> lo(1e-3, 1.0);
    std::uniform_real_distribution<double> gap(1e-3, 30.0);
    for (int trial = 0; trial < 1000; ++trial) {
      const double bmin = lo(rng);
      const NoiseSchedule s = make_vp_schedule(steps(rng), bmin, bmin + gap(rng));
      double prod = 1.0;
      for (int i = 1; i <= s.steps(); ++i) {
        CHECK(s.beta(i) > 0.0);
        CHECK(s.beta(i) < 1.0);
        CHECK(s.alpha(i) > 0.0);
        CHECK(s.alpha(i) < 1.0);
        CHECK(s.alpha_bar(i) < s.alpha_bar(i - 1));
        prod *= s.alpha(i);
        CHECK(std::abs(prod - s.alpha_bar(i)) <= 1e-12);
      }
    }
  }

  TEST_CASE("q_sample closed form") {
    const NoiseSchedule s = make_vp_schedule(5);
    Eigen::MatrixXd a0(2, 1), eps(2, 1);
    a0 << 0.3, -0.7;
    CHECK(q_sample(a0, 3, Eigen::MatrixXd::Zero(2, 1), s).isApprox(std::sqrt(s.alpha_bar(3)) * a0, 1e-15));
    CHECK_THROWS_AS(q_sample(a0, 0, a0, s), UsageError);
    CHECK_THROWS_AS(q_sample(a0, 6, a0, s), UsageError);
  }

  TEST_CASE("q_sample with alpha_bar 0.8") {
    // A one-step schedule whose alpha_bar_1 is exactly representable near 0.8:
    // exponent = beta_min + 0.5 (beta_max - beta_min) = -log(0.8).
    const double x = -std::log(0.8);
    const NoiseSchedule s = make_vp_schedule(1, x / 2, 3 * x / 2);
    REQUIRE(s.alpha_bar(1) == doctest::Approx(0.8).epsilon(1e-15));
    Eigen::MatrixXd a0(2, 1), eps(2, 1);
    a0 << 1.0, 0.0;
    eps << 0.0, 1.0;
    const Eigen::MatrixXd out = q_sample(a0, 1, eps, s);
    // sqrt(0.8), sqrt(0.2) to 18 digits.
    CHECK(out(0, 0) == doctest::Approx(0.894427190999915879).epsilon(1e-14));
    CHECK(out(1, 0) == doctest::Approx(0.447213595499957939).epsilon(1e-14));
  }

  TEST_CASE("q_sample second moment is variance preserving") {
    const NoiseSchedule s = make_vp_schedule(5);
    Rng rng(11);
    const int n = 20000;
    Eigen::MatrixXd a0(2, n);
    a0.row(0).setConstant(0.6);
    a0.row(1).setConstant(0.8);
    for (int i = 1; i <= 5; ++i) {
      const Eigen::MatrixXd ai = q_sample(a0, i, standard_normal(2, n, rng), s);
      const double ab = s.alpha_bar(i);
      const double expected = ab * 1.0 + (1.0 - ab) * 2.0;
      // Var ||m + s eps||^2 = 4 s^2 ||m||^2 + 2 d s^4 with s^2 = 1 - ab.
      const double var = 4.0 * (1.0 - ab) * ab + 2.0 * 2.0 * (1.0 - ab) * (1.0 - ab);
      const double mean = ai.colwise().squaredNorm().mean();
      CHECK(std::abs(mean - expected) < 3.0 * std::sqrt(var / n));
    }
  }

  TEST_CASE("q_sample approaches a standard normal as alpha_bar vanishes") {
    const NoiseSchedule s = make_vp_schedule(50, 0.1, 40.0);
    REQUIRE(s.alpha_bar(50) < 1e-8);
    Rng rng(5);
    const int n = 40000;
    const Eigen::MatrixXd a0 = Eigen::MatrixXd::Constant(2, n, 0.9);
    const Eigen::MatrixXd out = q_sample(a0, 50, standard_normal(2, n, rng), s);
    const Eigen::Vector2d mean = out.rowwise().mean();
    const Eigen::MatrixXd centered = out.colwise() - mean;
    const Eigen::Matrix2d cov = centered * centered.transpose() / static_cast<double>(n);
    CHECK(mean.cwiseAbs().maxCoeff() < 4.0 / std::sqrt(n));
    CHECK((cov - Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff() < 0.05);
  }

  TEST_CASE("posterior mean identities") {
    const NoiseSchedule s = make_vp_schedule(5);
    Rng rng(8);
    for (int trial = 0; trial < 100; ++trial) {
      const Eigen::MatrixXd a0 = Eigen::MatrixXd::Random(2, 3);
      const Eigen::MatrixXd eps = standard_normal(2, 3, rng);
      const Eigen::MatrixXd a1 = q_sample(a0, 1, eps, s);
      CHECK((posterior_mean(a1, eps, 1, s) - a0).cwiseAbs().maxCoeff() <= 1e-10);
    }
    const Eigen::MatrixXd ai = Eigen::MatrixXd::Random(2, 4);
    for (int i = 1; i <= 5; ++i) {
      CHECK(posterior_mean(ai, Eigen::MatrixXd::Zero(2, 4), i, s).isApprox(ai / std::sqrt(s.alpha(i)), 1e-15));
    }
    CHECK_THROWS_AS(posterior_mean(ai, ai, 0, s), UsageError);
  }

  TEST_CASE("posterior mean matches a scalar evaluation") {
    const NoiseSchedule s = make_vp_schedule(7, 0.3, 12.0);
    Rng rng(19);
    std::uniform_int_distribution<int> step(1, 7);
    for (int trial = 0; trial < 200; ++trial) {
      const int i = step(rng);
      const Eigen::MatrixXd ai = standard_normal(3, 1, rng);
      const Eigen::MatrixXd eh = standard_normal(3, 1, rng);
      const Eigen::MatrixXd got = posterior_mean(ai, eh, i, s);
      // Rebuild the schedule terms from the closed form directly.
      double abar = 1.0, beta = 0.0;
      for (int k = 1; k <= i; ++k) {
        beta = 1.0 - std::exp(-0.3 / 7.0 - 0.5 * (12.0 - 0.3) * (2.0 * k - 1.0) / 49.0);
        abar *= 1.0 - beta;
      }
      for (int r = 0; r < 3; ++r) {
        const double want = (ai(r, 0) - beta / std::sqrt(1.0 - abar) * eh(r, 0)) / std::sqrt(1.0 - beta);
        CHECK(got(r, 0) == doctest::Approx(want).epsilon(1e-12));
      }
    }
  }

  TEST_CASE("time embedding is sinusoidal and distinguishes steps") {
    const Vector e = time_embedding(3, 4);
    CHECK(e(0) == doctest::Approx(std::sin(3.0)));
    CHECK(e(1) == doctest::Approx(std::sin(3e-4)));
    CHECK(e(2) == doctest::Approx(std::cos(3.0)));
    CHECK(e(3) == doctest::Approx(std::cos(3e-4)));
    for (int i = 1; i <= 50; ++i) {
      for (int j = i + 1; j <= 50; ++j) CHECK((time_embedding(i, 16) - time_embedding(j, 16)).norm() > 1e-3);
    }
    CHECK_THROWS_AS(time_embedding(1, 3), ConfigError);
  }

  TEST_CASE("policy rejects a noise net of the wrong shape") {
    CHECK_THROWS_AS(DiffusionPolicy(tiny_config(), nn::Mlp({6, 5, 2})), ConfigError);
    CHECK_THROWS_AS(DiffusionPolicy(tiny_config(), nn::Mlp({7, 5, 3})), ConfigError);
    Rng rng(0);
    DiffusionPolicy p(tiny_config(), rng);
    CHECK(p.noise_net().output_dim() == 2);
    CHECK(p.noise_net().input_dim() == 2 + 1 + 4);
  }

  TEST_CASE("reverse sampling is deterministic under a seed and stays in the box") {
    Rng init(3);
    DiffusionPolicyConfig c = tiny_config();
    c.max_action = 0.7;
    DiffusionPolicy p(c, init);
    const Matrix states = Matrix::Random(1, 500);
    Rng r1(42), r2(42);
    const Matrix a = p.sample(states, r1);
    const Matrix b = p.sample(states, r2);
    CHECK(a == b);
    CHECK(a.cwiseAbs().maxCoeff() <= 0.7);
    CHECK(a.allFinite());
  }

  TEST_CASE("zero noise net propagates the analytic Gaussian chain") {
    // With eps_theta == 0 each step is a^(i-1) = a^i / sqrt(alpha_i) + sqrt(beta_i) z,
    // so a^0 per coordinate is N(0, v) with v built by the recursion below,
    // then clamped. Check the mean and the clamped fraction.
    DiffusionPolicy p = zero_policy();
    const NoiseSchedule& s = p.schedule();
    double v = 1.0;
    for (int i = 5; i >= 1; --i) v = v / s.alpha(i) + (i > 1 ? s.beta(i) : 0.0);
    const double inside = std::erf(1.0 / std::sqrt(2.0 * v));  // P(|X| < 1)

    const int n = 10000;
    Rng rng(99);
    const Matrix a = p.sample(Matrix(Matrix::Zero(1, n)), rng);
    const double mean = a.row(0).mean();
    const double sd = std::sqrt((a.row(0).array() - mean).square().mean());
    CHECK(std::abs(mean) < 3.0 * sd / std::sqrt(n));
    const double frac_inside = (a.array().abs() < 1.0).cast<double>().mean();
    const double se = std::sqrt(inside * (1 - inside) / (2.0 * n));
    CHECK(std::abs(frac_inside - inside) < 3.0 * se);
  }

  TEST_CASE("ddpm loss of a zero net is the action dimension in expectation") {
    DiffusionPolicy p = zero_policy();
    const int n = 20000;
    Rng rng(4);
    const Matrix states = Matrix::Zero(1, n);
    const Matrix actions = Matrix::Random(2, n);
    const double loss = ddpm_loss(p, states, actions, rng);
    // ||eps||^2 is chi-squared with 2 degrees of freedom: variance 4.
    CHECK(std::abs(loss - 2.0) < 3.0 * std::sqrt(4.0 / n));
    CHECK_THROWS_AS(ddpm_loss(p, Matrix::Zero(1, 0), Matrix::Zero(2, 0), rng), UsageError);
  }

  TEST_CASE("perfect denoiser has zero loss") {
    // With T = 1 and dataset actions at the origin, eps = a^1 / sqrt(1 - abar_1),
    // which a single linear layer reproduces exactly.
    DiffusionPolicyConfig c = tiny_config(1);
    nn::Mlp net({2 + 1 + 4, 2});
    const double k = 1.0 / std::sqrt(1.0 - make_vp_schedule(1).alpha_bar(1));
    net.weight(0).value(0, 0) = k;
    net.weight(0).value(1, 1) = k;
    DiffusionPolicy p(c, net);
    Rng rng(6);
    const double loss = ddpm_loss(p, Matrix::Zero(1, 64), Matrix::Zero(2, 64), rng);
    CHECK(loss >= 0.0);
    CHECK(loss < 1e-28);
  }

  TEST_CASE("denoise loss matches a straight-line evaluation") {
    Rng init(31);
    DiffusionPolicy p(tiny_config(), init);
    Rng rng(32);
    const int n = 6;
    const Matrix states = Matrix::Random(1, n);
    const Matrix actions = Matrix::Random(2, n);
    const DenoiseNoise noise = p.draw_denoise_noise(n, rng);
    const double got = p.denoise_loss(states, actions, noise);

    const nn::Mlp& net = p.noise_net();
    const auto& W0 = net.weight(0).value;
    const auto& b0 = net.bias(0).value;
    const auto& W1 = net.weight(1).value;
    const auto& b1 = net.bias(1).value;
    double total = 0.0;
    for (int j = 0; j < n; ++j) {
      const int i = noise.steps[j];
      double abar = 1.0;
      for (int k = 1; k <= i; ++k) abar *= std::exp(-0.1 / 5.0 - 0.5 * 9.9 * (2.0 * k - 1.0) / 25.0);
      double in[7];
      for (int r = 0; r < 2; ++r) in[r] = std::sqrt(abar) * actions(r, j) + std::sqrt(1 - abar) * noise.eps(r, j);
      in[2] = states(0, j);
      in[3] = std::sin(i * 1.0);
      in[4] = std::sin(i * 1e-4);
      in[5] = std::cos(i * 1.0);
      in[6] = std::cos(i * 1e-4);
      double hidden[5];
      for (int h = 0; h < 5; ++h) {
        double z = b0(h, 0);
        for (int q = 0; q < 7; ++q) z += W0(h, q) * in[q];
        hidden[h] = scalar_mish(z);
      }
      for (int r = 0; r < 2; ++r) {
        double out = b1(r, 0);
        for (int h = 0; h < 5; ++h) out += W1(r, h) * hidden[h];
        total += (out - noise.eps(r, j)) * (out - noise.eps(r, j));
      }
    }
    CHECK(got == doctest::Approx(total / n).epsilon(1e-12));
    CHECK(got >= 0.0);
  }

  TEST_CASE("denoise loss only writes gradients when asked") {
    Rng init(1);
    DiffusionPolicy p(tiny_config(), init);
    Rng rng(2);
    const DenoiseNoise noise = p.draw_denoise_noise(8, rng);
    const Matrix s = Matrix::Zero(1, 8), a = Matrix::Random(2, 8);
    p.denoise_loss(s, a, noise);
    for (const auto& t : p.noise_net().params()) CHECK(t.grad.isZero(0.0));
    p.denoise_loss(s, a, noise, 1.0);
    const Matrix g1 = p.noise_net().weight(0).grad;
    CHECK(!g1.isZero(0.0));
    p.noise_net().zero_grad();
    p.denoise_loss(s, a, noise, 3.0);
    CHECK(p.noise_net().weight(0).grad.isApprox(3.0 * g1, 1e-13));
  }
}
