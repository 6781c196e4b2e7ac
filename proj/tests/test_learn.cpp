#include <catch2/catch.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>

#include "gaitmask/cross_validation.hpp"
#include "gaitmask/model_io.hpp"
#include "gaitmask/pca.hpp"
#include "gaitmask/scaler.hpp"
#include "gaitmask/svm.hpp"
#include "oracles.hpp"

using namespace gaitmask;

namespace {

Eigen::MatrixXd random_matrix(Rng& rng, int rows, int cols, double lo = -5.0, double hi = 5.0) {
  Eigen::MatrixXd X(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) X(r, c) = rng.uniform(lo, hi);
  return X;
}

// Two well-separated Gaussian blobs: one per class.
std::pair<Eigen::MatrixXd, std::vector<int>> blobs(Rng& rng, int per_class, int dim,
                                                   double separation) {
  Eigen::MatrixXd X(2 * per_class, dim);
  std::vector<int> y(static_cast<std::size_t>(2 * per_class));
  for (int i = 0; i < 2 * per_class; ++i) {
    int cls = i < per_class ? 0 : 1;
    for (int d = 0; d < dim; ++d)
      X(i, d) = rng.normal(cls == 0 ? 0.0 : separation, 1.0);
    y[static_cast<std::size_t>(i)] = cls;
  }
  return {X, y};
}

void check_dual_feasibility(const BinarySvm& m) {
  for (Eigen::Index i = 0; i < m.alpha.size(); ++i) {
    REQUIRE(m.alpha[i] >= 0.0);
    REQUIRE(m.alpha[i] <= m.C);
  }
  REQUIRE(std::abs(m.sum_alpha_y) <= 1e-6);
}

}  // namespace

TEST_CASE("scaler standardizes columns") {
  SECTION("column [1, 3] -> [-1, 1]") {
    Eigen::MatrixXd X(2, 1);
    X << 1.0, 3.0;
    ScalerModel m = fit_scaler(X);
    Eigen::MatrixXd out = m.apply(X);
    CHECK(out(0, 0) == Approx(-1.0));
    CHECK(out(1, 0) == Approx(1.0));
  }

  SECTION("constant column is centered, not divided") {
    Eigen::MatrixXd X(3, 1);
    X << 4.0, 4.0, 4.0;
    Eigen::MatrixXd out = fit_scaler(X).apply(X);
    for (int i = 0; i < 3; ++i) CHECK(out(i, 0) == 0.0);
  }

  SECTION("training columns end up with |mean| < 1e-9 and unit std") {
    Rng rng(21);
    Eigen::MatrixXd X = random_matrix(rng, 20, 5);
    Eigen::MatrixXd out = fit_scaler(X).apply(X);
    for (int c = 0; c < 5; ++c) {
      CHECK(out.col(c).mean() == Approx(0.0).margin(1e-9));
      double sd = std::sqrt(out.col(c).squaredNorm() / 20.0 - std::pow(out.col(c).mean(), 2));
      CHECK(sd == Approx(1.0).margin(1e-9));
    }
  }

  SECTION("fewer than 2 rows -> EmptyMatrix") {
    Eigen::MatrixXd X(1, 2);
    X << 1.0, 2.0;
    try {
      fit_scaler(X);
      FAIL("expected EmptyMatrix");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::empty_matrix);
    }
  }
}

TEST_CASE("PCA matches the brute-force covariance oracle") {
  SECTION("noise-free rank-1 line y = x") {
    Eigen::MatrixXd X(5, 2);
    X << 0, 0, 1, 1, 2, 2, 3, 3, 4, 4;
    PCAModel m = fit_pca(X, 0.95);
    REQUIRE(m.k == 1);
    double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    CHECK(std::abs(m.components(0, 0)) == Approx(inv_sqrt2));
    CHECK(std::abs(m.components(1, 0)) == Approx(inv_sqrt2));
    CHECK(m.explained_variance[0] == Approx(m.total_variance));
  }

  SECTION("full-rank transform/inverse round trip") {
    Rng rng(22);
    Eigen::MatrixXd X = random_matrix(rng, 12, 4);
    PCAModel m = fit_pca(X, 1.0);
    Eigen::MatrixXd rec = m.inverse_transform(m.transform(X));
    CHECK((rec - X).cwiseAbs().maxCoeff() < 1e-8);
  }

  SECTION("20 random small matrices: variances equal Jacobi eigenvalues within 1e-8") {
    Rng rng(23);
    for (int rep = 0; rep < 20; ++rep) {
      int rows = 4 + static_cast<int>(rng.below(7));   // 4..10
      int cols = 2 + static_cast<int>(rng.below(5));   // 2..6
      Eigen::MatrixXd X = random_matrix(rng, rows, cols);
      PCAModel m = fit_pca(X, 1.0);
      auto ev = oracle::jacobi_eigenvalues(oracle::explicit_covariance(X));
      REQUIRE(m.k <= static_cast<int>(ev.size()));
      for (int i = 0; i < m.k; ++i)
        CHECK(m.explained_variance[i] == Approx(ev[static_cast<std::size_t>(i)]).margin(1e-8));
      // orthonormality
      Eigen::MatrixXd gram = m.components.transpose() * m.components;
      for (int a = 0; a < m.k; ++a)
        for (int b = 0; b < m.k; ++b)
          CHECK(gram(a, b) == Approx(a == b ? 1.0 : 0.0).margin(1e-8));
      // non-increasing variances
      for (int i = 1; i < m.k; ++i)
        CHECK(m.explained_variance[i] <= m.explained_variance[i - 1] + 1e-12);
    }
  }

  SECTION("the Gram route (rows < cols) agrees with the oracle too") {
    Rng rng(24);
    for (int rep = 0; rep < 10; ++rep) {
      Eigen::MatrixXd X = random_matrix(rng, 4, 6);
      PCAModel m = fit_pca(X, 1.0);
      auto ev = oracle::jacobi_eigenvalues(oracle::explicit_covariance(X));
      for (int i = 0; i < m.k; ++i)
        CHECK(m.explained_variance[i] == Approx(ev[static_cast<std::size_t>(i)]).margin(1e-8));
    }
  }

  SECTION("transforming the training mean gives the zero vector") {
    Rng rng(25);
    Eigen::MatrixXd X = random_matrix(rng, 9, 5);
    PCAModel m = fit_pca(X, 0.95);
    Eigen::MatrixXd mean_row = m.mean.transpose();
    Eigen::MatrixXd out = m.transform(mean_row);
    CHECK(out.cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("SVM meets its contracts") {
  SECTION("two 1D points: boundary at the midpoint") {
    Eigen::MatrixXd X(2, 1);
    X << 0.0, 1.0;
    std::vector<int> y = {0, 1};  // A = 0, B = 1
    SVMModel m = train_svm(X, y, 10.0, 1.0);
    Eigen::RowVectorXd q(1);
    q << 0.25;
    CHECK(m.predict(q) == 0);
    q << 0.75;
    CHECK(m.predict(q) == 1);
    for (const auto& bin : m.machines) check_dual_feasibility(bin);
  }

  SECTION("XOR trains to accuracy 1.0 with C=100, gamma=1") {
    Eigen::MatrixXd X(4, 2);
    X << 0, 0, 1, 1, 0, 1, 1, 0;
    std::vector<int> y = {0, 0, 1, 1};
    SVMModel m = train_svm(X, y, 100.0, 1.0);
    std::vector<int> pred = m.predict(X);
    CHECK(accuracy(pred, y) == 1.0);
    for (const auto& bin : m.machines) check_dual_feasibility(bin);
  }

  SECTION("single class -> SingleClass") {
    Eigen::MatrixXd X(2, 1);
    X << 0.0, 1.0;
    try {
      train_svm(X, {3, 3}, 1.0, 1.0);
      FAIL("expected SingleClass");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::single_class);
    }
  }

  SECTION("non-positive hyperparameters are rejected") {
    Eigen::MatrixXd X(2, 1);
    X << 0.0, 1.0;
    try {
      train_svm(X, {0, 1}, -1.0, 1.0);
      FAIL("expected NonPositiveHyperparameter");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::non_positive_hyperparameter);
    }
  }

  SECTION("three-class one-vs-one with vote ties resolving to the lowest class") {
    Rng rng(26);
    Eigen::MatrixXd X(9, 2);
    std::vector<int> y;
    for (int cls = 0; cls < 3; ++cls)
      for (int i = 0; i < 3; ++i) {
        X(cls * 3 + i, 0) = 10.0 * cls + rng.normal(0, 0.2);
        X(cls * 3 + i, 1) = rng.normal(0, 0.2);
        y.push_back(cls);
      }
    SVMModel m = train_svm(X, y, 10.0, 0.5);
    REQUIRE(m.machines.size() == 3u);  // 3 choose 2
    CHECK(accuracy(m.predict(X), y) == 1.0);
  }

  SECTION("predictions are invariant to permuting the training rows") {
    Rng rng(27);
    auto [X, y] = blobs(rng, 12, 3, 8.0);
    SVMModel m1 = train_svm(X, y, 10.0, 0.3);

    std::vector<int> perm(static_cast<std::size_t>(X.rows()));
    for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = static_cast<int>(i);
    Rng shuffle_rng(99);
    shuffle_rng.shuffle(perm);
    Eigen::MatrixXd Xp(X.rows(), X.cols());
    std::vector<int> yp(perm.size());
    for (std::size_t i = 0; i < perm.size(); ++i) {
      Xp.row(static_cast<Eigen::Index>(i)) = X.row(perm[i]);
      yp[i] = y[static_cast<std::size_t>(perm[i])];
    }
    SVMModel m2 = train_svm(Xp, yp, 10.0, 0.3);

    Eigen::MatrixXd probe = random_matrix(rng, 30, 3, -2.0, 10.0);
    CHECK(m1.predict(probe) == m2.predict(probe));
  }

  SECTION("linearly separable data with large C trains to accuracy 1.0") {
    Rng rng(28);
    auto [X, y] = blobs(rng, 15, 2, 10.0);
    SVMModel m = train_svm(X, y, 1000.0, 0.5);
    CHECK(accuracy(m.predict(X), y) == 1.0);
  }
}

TEST_CASE("the fit hook observes every binary fit") {
  int fits = 0;
  bool all_feasible = true;
  svm_fit_hook() = [&fits, &all_feasible](const BinarySvm& m) {
    ++fits;
    for (Eigen::Index i = 0; i < m.alpha.size(); ++i)
      if (m.alpha[i] < 0.0 || m.alpha[i] > m.C) all_feasible = false;
    if (std::abs(m.sum_alpha_y) > 1e-6) all_feasible = false;
  };
  Rng rng(29);
  auto [X, y] = blobs(rng, 10, 2, 6.0);
  cross_validate(X, y, {{1.0, 0.5}, {10.0, 0.5}}, 5, 7);
  svm_fit_hook() = nullptr;
  CHECK(fits == 10);  // 2 grid points x 5 folds x 1 pair
  CHECK(all_feasible);
}

TEST_CASE("cross-validation selects by mean fold accuracy") {
  SECTION("separable blobs reach mean fold accuracy 1.0") {
    Rng rng(30);
    auto [X, y] = blobs(rng, 20, 3, 10.0);
    CVReport report = cross_validate(X, y, default_grid(X), 10, 42);
    double best = 0.0;
    for (const auto& e : report.grid) best = std::max(best, e.mean_accuracy);
    CHECK(best == 1.0);
    CHECK(report.folds_used == 10);
  }

  SECTION("a single grid entry is selected") {
    Rng rng(31);
    auto [X, y] = blobs(rng, 6, 2, 5.0);
    CVReport report = cross_validate(X, y, {{3.0, 0.7}}, 3, 1);
    CHECK(report.selected_C == 3.0);
    CHECK(report.selected_gamma == 0.7);
  }

  SECTION("ties resolve to the smallest C then smallest gamma") {
    Rng rng(32);
    auto [X, y] = blobs(rng, 10, 2, 12.0);  // everything separable: all-tie grid
    CVReport report =
        cross_validate(X, y, {{10.0, 1.0}, {1.0, 1.0}, {1.0, 0.1}, {10.0, 0.1}}, 5, 2);
    CHECK(report.selected_C == 1.0);
    CHECK(report.selected_gamma == 0.1);
  }

  SECTION("same seed gives a bit-identical report") {
    Rng rng(33);
    auto [X, y] = blobs(rng, 8, 2, 4.0);
    CVReport a = cross_validate(X, y, default_grid(X), 4, 9);
    CVReport b = cross_validate(X, y, default_grid(X), 4, 9);
    REQUIRE(a.grid.size() == b.grid.size());
    for (std::size_t i = 0; i < a.grid.size(); ++i)
      CHECK(a.grid[i].mean_accuracy == b.grid[i].mean_accuracy);
    CHECK(a.selected_C == b.selected_C);
    CHECK(a.selected_gamma == b.selected_gamma);
  }

  SECTION("folds reduce to the minimum class count and are reported") {
    Eigen::MatrixXd X(7, 1);
    X << 0, 0.1, 0.2, 0.3, 10, 10.1, 10.2;
    std::vector<int> y = {0, 0, 0, 0, 1, 1, 1};
    CVReport report = cross_validate(X, y, {{1.0, 1.0}}, 10, 5);
    CHECK(report.requested_folds == 10);
    CHECK(report.folds_used == 3);
  }
}

TEST_CASE("cv reports export as CSV with the selected row flagged") {
  Rng rng(36);
  auto [X, y] = blobs(rng, 6, 2, 8.0);
  CVReport report = cross_validate(X, y, {{1.0, 0.5}, {10.0, 0.5}}, 3, 4);
  std::string csv = cv_report_csv(report);
  CHECK(csv.rfind("C,gamma,mean_accuracy,selected\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
  CHECK(csv.find(",1\n") != std::string::npos);
}

TEST_CASE("accuracy is the exact hit ratio") {
  CHECK(accuracy({0, 1, 0}, {0, 1, 1}) == Approx(2.0 / 3.0));
  CHECK(accuracy({1, 1}, {1, 1}) == 1.0);
  CHECK(accuracy({0, 0}, {1, 1}) == 0.0);
  try {
    accuracy({0}, {0, 1});
    FAIL("expected LengthMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::length_mismatch);
  }
  try {
    accuracy({}, {});
    FAIL("expected Empty");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::empty_input);
  }
}

TEST_CASE("scaling all features by 10 leaves test predictions unchanged") {
  Rng rng(34);
  auto [X, y] = blobs(rng, 15, 4, 7.0);
  Eigen::MatrixXd probe = random_matrix(rng, 20, 4, -3.0, 10.0);

  auto run = [&y](const Eigen::MatrixXd& Xtrain, const Eigen::MatrixXd& Xtest) {
    ScalerModel scaler = fit_scaler(Xtrain);
    Eigen::MatrixXd tr = scaler.apply(Xtrain);
    Eigen::MatrixXd te = scaler.apply(Xtest);
    PCAModel pca = fit_pca(tr, 0.95);
    SVMModel svm = train_svm(pca.transform(tr), y, 10.0, 0.5);
    return svm.predict(pca.transform(te));
  };
  std::vector<int> base = run(X, probe);
  std::vector<int> scaled = run(10.0 * X, 10.0 * probe);
  CHECK(base == scaled);
}

TEST_CASE("trained pipeline serializes and round-trips predictions") {
  Rng rng(35);
  auto [X, y] = blobs(rng, 10, 3, 6.0);
  TrainedPipeline tp;
  tp.encoding = Encoding::flatten;
  tp.class_names = {"A", "B"};
  tp.scaler = fit_scaler(X);
  Eigen::MatrixXd scaled = tp.scaler.apply(X);
  tp.pca = fit_pca(scaled, 0.95);
  tp.svm = train_svm(tp.pca.transform(scaled), y, 10.0, 0.4);

  auto dir = std::filesystem::temp_directory_path() / "gaitmask_model";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  save_trained_pipeline(dir / "model.json", tp);
  TrainedPipeline back = load_trained_pipeline(dir / "model.json");

  Eigen::MatrixXd probe = random_matrix(rng, 25, 3, -2.0, 8.0);
  CHECK(tp.predict(probe) == back.predict(probe));
  CHECK(back.class_names == tp.class_names);
  CHECK(back.encoding == tp.encoding);
}
