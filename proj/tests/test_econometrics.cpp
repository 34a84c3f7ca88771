#include <cmath>
#include <vector>

#include "doctest.h"
#include "fixtures/reference_values.hpp"
#include "goxlens/econometrics.hpp"
#include "test_support.hpp"

using namespace goxlens;

TEST_SUITE("ols") {
  TEST_CASE("noiseless line is recovered exactly") {
    const int n = 50;
    VecXd x = VecXd::LinSpaced(n, -3.0, 5.0);
    VecXd y = 2.0 * x.array() + 3.0;
    const auto fit = ols(y, MatXd(x), true);
    CHECK(fit.coefficients(0) == doctest::Approx(3.0).epsilon(1e-10));
    CHECK(fit.slope(0) == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(std::abs(fit.adj_r_squared - 1.0) < 1e-10);
  }

  TEST_CASE("noisy slope matches the normal equations") {
    const int n = 10000;
    VecXd x = testing::white_noise(n, 1);
    VecXd y = x + testing::white_noise(n, 2);
    const auto fit = ols(y, MatXd(x), true);
    MatXd D(n, 2);
    D.col(0).setOnes();
    D.col(1) = x;
    const VecXd normal_eq = (D.transpose() * D).ldlt().solve(D.transpose() * y);
    CHECK(fit.slope(0) == doctest::Approx(normal_eq(1)).epsilon(1e-10));
    CHECK(fit.slope(0) > 0.97);
    CHECK(fit.slope(0) < 1.03);
  }

  TEST_CASE("matches statsmodels on a frozen sample") {
    const MatXd X = testing::as_matrix(ref::ols_x, 80, 2);
    const VecXd y = Eigen::Map<const VecXd>(ref::ols_y.data(), 80);
    const auto fit = ols(y, X, true);
    for (int j = 0; j < 3; ++j) {
      CHECK(fit.coefficients(j) == doctest::Approx(ref::ols_coef[j]).epsilon(1e-10));
      CHECK(fit.std_errors(j) == doctest::Approx(ref::ols_se[j]).epsilon(1e-9));
      CHECK(fit.p_values(j) == doctest::Approx(ref::ols_p[j]).epsilon(1e-7));
    }
    CHECK(fit.adj_r_squared == doctest::Approx(ref::ols_adj_r2).epsilon(1e-10));
  }

  TEST_CASE("residuals are orthogonal to the regressors") {
    const int n = 500;
    MatXd X(n, 3);
    X.col(0) = testing::white_noise(n, 3);
    X.col(1) = 100.0 * testing::white_noise(n, 4);
    X.col(2) = testing::random_walk(n, 5);
    VecXd y = X * Eigen::Vector3d(1, -0.02, 0.5) + testing::white_noise(n, 6);
    const auto fit = ols(y, X, true);
    const double scale = X.cwiseAbs().maxCoeff() * fit.residuals.cwiseAbs().maxCoeff();
    CHECK((X.transpose() * fit.residuals).cwiseAbs().maxCoeff() <= 1e-6 * n * scale);
    CHECK(std::abs(fit.residuals.sum()) <= 1e-6 * n * scale);
  }

  TEST_CASE("rescaling a regressor rescales its coefficient and keeps the fit") {
    const int n = 300;
    MatXd X(n, 2);
    X.col(0) = testing::white_noise(n, 7);
    X.col(1) = testing::white_noise(n, 8);
    VecXd y = 0.5 * X.col(0) - 2.0 * X.col(1) + testing::white_noise(n, 9);
    MatXd Xs = X;
    Xs.col(1) = 1000.0 * Xs.col(1).array() + 7.0;
    const auto a = ols(y, X, true);
    const auto b = ols(y, Xs, true);
    CHECK(b.slope(1) == doctest::Approx(a.slope(1) / 1000.0).epsilon(1e-9));
    CHECK(b.adj_r_squared == doctest::Approx(a.adj_r_squared).epsilon(1e-12));
    CHECK((y - b.residuals - (y - a.residuals)).cwiseAbs().maxCoeff() < 1e-9);
  }

  TEST_CASE("rank-deficient design is flagged and solved at minimum norm") {
    const int n = 100;
    MatXd X(n, 3);
    X.col(0) = testing::white_noise(n, 10);
    X.col(1) = testing::white_noise(n, 11);
    X.col(2) = X.col(0) + X.col(1);
    VecXd y = X.col(2) + 0.1 * testing::white_noise(n, 12);
    const auto fit = ols(y, X, true);
    CHECK(fit.rank_deficient);
    CHECK(fit.rank == 3);
    CHECK(std::isfinite(fit.slope(2)));
  }

  TEST_CASE("too few observations is an error") {
    MatXd X = MatXd::Random(3, 2);
    VecXd y = VecXd::Random(3);
    CHECK_THROWS_AS(ols(y, X, true), InsufficientDataError);
  }
}

TEST_SUITE("adf") {
  TEST_CASE("matches statsmodels with AIC lag selection") {
    const VecXd y = Eigen::Map<const VecXd>(ref::adf_series.data(), static_cast<Eigen::Index>(ref::adf_series.size()));
    const auto r = adf(y, schwert_max_lag(y.size()), LagRule::aic);
    CHECK(r.lag == ref::adf_lag);
    CHECK(r.nobs == ref::adf_nobs);
    CHECK(r.statistic == doctest::Approx(ref::adf_stat).epsilon(1e-9));
    CHECK(r.critical_1pct == doctest::Approx(ref::adf_crit[0]).epsilon(1e-9));
    CHECK(r.critical_5pct == doctest::Approx(ref::adf_crit[1]).epsilon(1e-9));
    CHECK(r.critical_10pct == doctest::Approx(ref::adf_crit[2]).epsilon(1e-9));
    CHECK(r.p_value == doctest::Approx(ref::adf_p).epsilon(1e-6));
    CHECK(r.reject_at_5pct);
  }

  TEST_CASE("matches statsmodels with a fixed lag") {
    const VecXd y = Eigen::Map<const VecXd>(ref::adf_series.data(), static_cast<Eigen::Index>(ref::adf_series.size()));
    const auto r = adf(y, 3, LagRule::fixed);
    CHECK(r.lag == 3);
    CHECK(r.statistic == doctest::Approx(ref::adf_fixed3_stat).epsilon(1e-9));
  }

  TEST_CASE("asymptotic critical values") {
    CHECK(critical::kAdfConstant.at(0, 1e12) == doctest::Approx(-3.43).epsilon(1e-3));
    CHECK(critical::kAdfConstant.at(1, 1e12) == doctest::Approx(-2.86).epsilon(1e-3));
    CHECK(critical::kAdfConstant.at(2, 1e12) == doctest::Approx(-2.57).epsilon(2e-3));
  }

  TEST_CASE("stationary AR(1) is rejected") {
    const auto r = adf(testing::ar1(1000, 0.5, 42), 10, LagRule::aic);
    CHECK(r.reject_at_5pct);
    CHECK((r.reject_at_5pct == (r.statistic < r.critical_5pct)));
  }

  TEST_CASE("constant series is degenerate") {
    VecXd y = VecXd::Constant(100, 3.0);
    CHECK_THROWS_AS(adf(y, 4), DegenerateInputError);
  }

  TEST_CASE("short series is rejected") {
    CHECK_THROWS_AS(adf(testing::white_noise(30, 1), 10), InsufficientDataError);
  }
}

TEST_SUITE("var") {
  TEST_CASE("matches statsmodels VAR(2) and orthogonalized IRF") {
    const MatXd Y = testing::as_matrix(ref::var_data, 400, 3);
    const auto m = var_fit(Y, 2);
    const MatXd A1 = testing::as_matrix(ref::var_A1, 3, 3);
    const MatXd A2 = testing::as_matrix(ref::var_A2, 3, 3);
    const MatXd S = testing::as_matrix(ref::var_sigma, 3, 3);
    for (int i = 0; i < 3; ++i) {
      CHECK(m.intercept(i) == doctest::Approx(ref::var_intercept[static_cast<std::size_t>(i)]).epsilon(1e-9));
      for (int j = 0; j < 3; ++j) {
        CHECK(m.coefficients[0](i, j) == doctest::Approx(A1(i, j)).epsilon(1e-9));
        CHECK(m.coefficients[1](i, j) == doctest::Approx(A2(i, j)).epsilon(1e-9));
        CHECK(m.sigma_u(i, j) == doctest::Approx(S(i, j)).epsilon(1e-9));
      }
    }
    const auto ir = irf(m, 5);
    for (int h = 0; h <= 5; ++h)
      for (int j = 0; j < 3; ++j)
        for (int i = 0; i < 3; ++i)
          CHECK(ir(h, j, i) == doctest::Approx(ref::var_oirf[static_cast<std::size_t>(h * 9 + j * 3 + i)]).epsilon(1e-8));
  }

  TEST_CASE("VAR(1) coefficients are recovered from a long simulation") {
    MatXd A(2, 2);
    A << 0.5, 0.1, 0.0, 0.3;
    const MatXd Y = testing::simulate_var(VecXd::Zero(2), {A}, MatXd::Identity(2, 2), 5000, 77);
    const auto m = var_fit(Y, 1);
    CHECK((m.coefficients[0] - A).cwiseAbs().maxCoeff() < 0.05);
    CHECK(m.sigma_u.isApprox(m.sigma_u.transpose()));
    Eigen::SelfAdjointEigenSolver<MatXd> es(m.sigma_u);
    CHECK(es.eigenvalues().minCoeff() >= 0);
  }

  TEST_CASE("i.i.d. noise gives small coefficients in most seeds") {
    int ok = 0;
    for (int s = 0; s < 100; ++s) {
      MatXd Y(5000, 2);
      Y.col(0) = testing::white_noise(5000, 1000 + s);
      Y.col(1) = testing::white_noise(5000, 2000 + s);
      if (var_fit(Y, 1).coefficients[0].cwiseAbs().maxCoeff() < 0.05) ++ok;
    }
    CHECK(ok >= 90);
  }

  TEST_CASE("deterministic recursion leaves zero residuals") {
    MatXd A(2, 2);
    A << 0.5, 0.2, -0.1, 0.3;
    MatXd Y(200, 2);
    Y.row(0) << 1.0, -2.0;
    for (int t = 1; t < 200; ++t) Y.row(t) = (Eigen::Vector2d(0.3, -0.1) + A * Y.row(t - 1).transpose()).transpose();
    const auto m = var_fit(Y, 1);
    CHECK(m.residuals.cwiseAbs().maxCoeff() < 1e-8);
  }

  TEST_CASE("re-simulating with residuals reproduces the sample") {
    MatXd A1(2, 2), A2(2, 2);
    A1 << 0.4, 0.1, 0.2, 0.3;
    A2 << -0.1, 0.0, 0.05, 0.1;
    const MatXd Y = testing::simulate_var(Eigen::Vector2d(1.0, -0.5), {A1, A2}, MatXd::Identity(2, 2), 600, 3);
    const auto m = var_fit(Y, 2);
    MatXd R = Y;
    for (Eigen::Index t = 2; t < Y.rows(); ++t) {
      VecXd y = m.intercept + m.residuals.row(t - 2).transpose();
      y += m.coefficients[0] * R.row(t - 1).transpose() + m.coefficients[1] * R.row(t - 2).transpose();
      R.row(t) = y.transpose();
    }
    CHECK((R - Y).cwiseAbs().maxCoeff() < 1e-8);
  }

  TEST_CASE("insufficient observations") {
    CHECK_THROWS_AS(var_fit(MatXd::Random(10, 3), 3), InsufficientDataError);
  }

  TEST_CASE("AIC with a single candidate") {
    CHECK(select_lag_aic(MatXd::Random(100, 2), 1) == 1);
  }

  TEST_CASE("AIC picks lag 1 on white noise") {
    int ones = 0;
    for (int s = 0; s < 50; ++s) {
      MatXd Y(1000, 2);
      Y.col(0) = testing::white_noise(1000, 300 + s);
      Y.col(1) = testing::white_noise(1000, 400 + s);
      if (select_lag_aic(Y, 6) == 1) ++ones;
    }
    CHECK(ones >= 45);
  }
}

TEST_SUITE("granger") {
  TEST_CASE("matches statsmodels ssr F test") {
    const MatXd D = testing::as_matrix(ref::granger_data, 300, 2);
    const auto g = granger(D, 1, 0, 2);
    CHECK(g.f_statistic == doctest::Approx(ref::granger_f).epsilon(1e-9));
    CHECK(g.p_value == doctest::Approx(ref::granger_p).epsilon(1e-7));
  }

  TEST_CASE("constructed lead-lag is detected") {
    const int n = 1000;
    MatXd D(n, 2);
    D.col(0) = testing::white_noise(n, 5);
    D.col(1) = testing::white_noise(n, 6);
    for (int t = 1; t < n; ++t) D(t, 1) += 0.8 * D(t - 1, 0);
    const auto g = granger(D, 0, 1, 1);
    CHECK(g.p_value < 0.01);
    CHECK(g.pass);
  }

  TEST_CASE("zero cause has no explanatory power") {
    const int n = 300;
    MatXd D(n, 2);
    D.col(0).setZero();
    D.col(1) = testing::ar1(n, 0.4, 8);
    const auto g = granger(D, 0, 1, 2);
    CHECK(std::abs(g.f_statistic) < 1e-8);
    CHECK_FALSE(g.pass);
    CHECK(g.p_value >= 0.0);
    CHECK(g.p_value <= 1.0);
  }

  TEST_CASE("exact fit is degenerate") {
    MatXd D(100, 2);
    D.col(0) = VecXd::LinSpaced(100, 0, 1);
    D.col(1) = D.col(0);
    CHECK_THROWS_AS(granger(D, 0, 1, 1), DegenerateInputError);
  }
}

TEST_SUITE("johansen") {
  TEST_CASE("matches statsmodels coint_johansen(det_order=0)") {
    const MatXd Y = testing::as_matrix(ref::joh_data, 200, 3);
    const auto r = johansen(Y, 2);
    for (int i = 0; i < 3; ++i) {
      CHECK(r.eigenvalues(i) == doctest::Approx(ref::joh_eig[static_cast<std::size_t>(i)]).epsilon(1e-8));
      CHECK(r.trace(i) == doctest::Approx(ref::joh_trace[static_cast<std::size_t>(i)]).epsilon(1e-8));
      CHECK(r.max_eigen(i) == doctest::Approx(ref::joh_maxeig[static_cast<std::size_t>(i)]).epsilon(1e-8));
    }
    CHECK(r.rank == 1);
  }

  TEST_CASE("trace identity and monotonicity") {
    const MatXd Y = testing::as_matrix(ref::joh_data, 200, 3);
    const auto r = johansen(Y, 1);
    for (Eigen::Index q = 0; q < 3; ++q) {
      double s = 0;
      for (Eigen::Index i = q; i < 3; ++i) s += std::log(1 - r.eigenvalues(i));
      CHECK(std::abs(-static_cast<double>(r.nobs) * s - r.trace(q)) < 1e-10);
      CHECK(r.eigenvalues(q) >= 0);
      CHECK(r.eigenvalues(q) < 1);
      if (q > 0) CHECK(r.trace(q) < r.trace(q - 1));
    }
  }

  TEST_CASE("exact linear combination names the collinear variable") {
    const int n = 300;
    MatXd Y(n, 3);
    Y.col(0) = testing::random_walk(n, 1);
    Y.col(1) = testing::random_walk(n, 2);
    Y.col(2) = Y.col(0) + Y.col(1);
    try {
      johansen(Y, 1, {"wash", "nonwash", "total"});
      FAIL("expected SingularMatrixError");
    } catch (const SingularMatrixError& e) {
      REQUIRE(e.collinear.size() == 1);
      CHECK(e.collinear[0] == 2);
      CHECK(std::string(e.what()).find("total") != std::string::npos);
    }
  }
}

TEST_SUITE("engle_granger") {
  TEST_CASE("matches statsmodels coint") {
    const MatXd Y = testing::as_matrix(ref::joh_data, 200, 3);
    const auto r = engle_granger(Y.col(1), Y.col(0));
    CHECK(r.adf_statistic == doctest::Approx(ref::eg_stat).epsilon(1e-9));
    CHECK(r.p_value == doctest::Approx(ref::eg_p).epsilon(1e-6));
    CHECK(r.critical_1pct == doctest::Approx(ref::eg_crit[0]).epsilon(1e-9));
    CHECK(r.critical_5pct == doctest::Approx(ref::eg_crit[1]).epsilon(1e-9));
    CHECK(r.critical_10pct == doctest::Approx(ref::eg_crit[2]).epsilon(1e-9));
  }

  TEST_CASE("identical series sit at the table floor") {
    const VecXd x = testing::random_walk(200, 4);
    const auto r = engle_granger(x, x);
    CHECK(r.collinear);
    CHECK(r.p_value == 0.0);
  }

  TEST_CASE("constant regressor is an error") {
    CHECK_THROWS_AS(engle_granger(testing::random_walk(100, 1), VecXd::Constant(100, 2.0)), DegenerateInputError);
  }

  TEST_CASE("p-value surface is monotone and bounded") {
    double prev = 0.0;
    for (double s = -20.0; s <= 2.0; s += 0.05) {
      const double p = critical::kEngleGrangerConstant2P.p_value(s);
      CHECK(p >= prev - 1e-12);
      CHECK(p <= 1.0);
      prev = p;
    }
  }
}

TEST_SUITE("irf") {
  TEST_CASE("no propagation without lag coefficients") {
    VarModel<double> m;
    m.intercept = VecXd::Zero(3);
    m.coefficients = {MatXd::Zero(3, 3), MatXd::Zero(3, 3)};
    m.sigma_u = MatXd::Identity(3, 3);
    m.mean_abs = VecXd::Ones(3);
    const auto ir = irf(m, 6);
    CHECK(ir.responses[0].isApprox(MatXd::Identity(3, 3)));
    for (int h = 1; h <= 6; ++h) CHECK(ir.responses[static_cast<std::size_t>(h)].cwiseAbs().maxCoeff() == 0.0);
  }

  TEST_CASE("responses match shocked minus baseline simulation") {
    MatXd A(2, 2);
    A << 0.6, 0.2, -0.3, 0.4;
    VarModel<double> m;
    m.intercept = Eigen::Vector2d(0.5, -1.0);
    m.coefficients = {A};
    m.sigma_u = MatXd::Identity(2, 2);
    m.mean_abs = VecXd::Ones(2);
    const auto ir = irf(m, 10);
    for (int shock = 0; shock < 2; ++shock) {
      VecXd base = VecXd::Zero(2);
      VecXd hit = VecXd::Unit(2, shock);
      for (int h = 0; h <= 10; ++h) {
        if (h > 0) {
          base = m.intercept + A * base;
          hit = m.intercept + A * hit;
        }
        for (int j = 0; j < 2; ++j) CHECK(std::abs((hit - base)(j) - ir(h, j, shock)) < 1e-8);
      }
    }
  }

  TEST_CASE("ordering changes which variable moves at impact") {
    MatXd S(2, 2);
    S << 1.0, 0.5, 0.5, 2.0;
    VarModel<double> m;
    m.intercept = VecXd::Zero(2);
    m.coefficients = {MatXd::Zero(2, 2)};
    m.sigma_u = S;
    m.mean_abs = VecXd::Ones(2);
    const auto a = irf(m, 1, {0, 1});
    const auto b = irf(m, 1, {1, 0});
    CHECK(a(0, 0, 1) == 0.0);
    CHECK(b(0, 1, 0) == 0.0);
    CHECK((a.impact * a.impact.transpose()).isApprox(S));
    CHECK((b.impact * b.impact.transpose()).isApprox(S));
  }

  TEST_CASE("linear in shock size") {
    MatXd A(2, 2);
    A << 0.3, 0.1, 0.2, 0.2;
    VarModel<double> m;
    m.intercept = VecXd::Zero(2);
    m.coefficients = {A};
    m.sigma_u = MatXd::Identity(2, 2);
    m.mean_abs = VecXd::Ones(2);
    auto m4 = m;
    m4.sigma_u *= 4.0;
    const auto a = irf(m, 5), b = irf(m4, 5);
    for (int h = 0; h <= 5; ++h) CHECK(b.responses[static_cast<std::size_t>(h)].isApprox(2.0 * a.responses[static_cast<std::size_t>(h)]));
  }

  TEST_CASE("zero-level variable gives the percent sentinel") {
    VarModel<double> m;
    m.intercept = VecXd::Zero(2);
    m.coefficients = {MatXd::Identity(2, 2) * 0.5};
    m.sigma_u = MatXd::Identity(2, 2);
    m.mean_abs = Eigen::Vector2d(0.0, 2.0);
    const auto ir = irf(m, 2);
    CHECK(std::isinf(ir.percent(1, 0, 0)));
    CHECK(ir.percent(1, 0, 0) > 0);
    CHECK(std::isnan(ir.percent(1, 0, 1)));
    CHECK(ir.percent(1, 1, 1) == doctest::Approx(100.0 * 0.5 / 2.0));
  }

  TEST_CASE("singular covariance gets a ridge") {
    VarModel<double> m;
    m.intercept = VecXd::Zero(2);
    m.coefficients = {MatXd::Zero(2, 2)};
    m.sigma_u = MatXd::Ones(2, 2);
    m.mean_abs = VecXd::Ones(2);
    const auto ir = irf(m, 1);
    CHECK(ir.ridge > 0);
    CHECK(ir.ridge == doctest::Approx(2e-10));
  }

  TEST_CASE("indefinite covariance is a factorization error") {
    VarModel<double> m;
    m.intercept = VecXd::Zero(2);
    m.coefficients = {MatXd::Zero(2, 2)};
    m.sigma_u = (MatXd(2, 2) << 1.0, 0.0, 0.0, -1.0).finished();
    m.mean_abs = VecXd::Ones(2);
    CHECK_THROWS_AS(irf(m, 1), AnalysisError);
  }

  TEST_CASE("companion spectral radius") {
    VarModel<double> m;
    m.intercept = VecXd::Zero(1);
    m.coefficients = {MatXd::Constant(1, 1, 1.2)};
    m.sigma_u = MatXd::Identity(1, 1);
    m.mean_abs = VecXd::Ones(1);
    CHECK(m.spectral_radius() == doctest::Approx(1.2));
    CHECK_FALSE(irf(m, 3).stable());
  }
}
