#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>

#include "matbridge/transfer.hpp"

using namespace matbridge;

TEST_CASE("transfer_eval known values", "[transfer]") {
  CHECK(transfer_eval(TransferKind::tansig, 0.0) == 0.0);
  CHECK(transfer_eval(TransferKind::logsig, 0.0) == 0.5);
  CHECK(transfer_eval(TransferKind::purelin, 3.2) == 3.2);
  // direct evaluation of tanh(1)
  CHECK(transfer_eval(TransferKind::tansig, 1.0) ==
        Catch::Approx(0.7615941559557649).epsilon(1e-15));
}

TEST_CASE("transfer_eval ranges", "[transfer]") {
  for (double x : {-9.0, -2.5, -0.1, 0.7, 4.0, 8.8}) {
    const double t = transfer_eval(TransferKind::tansig, x);
    CHECK(t > -1.0);
    CHECK(t < 1.0);
    const double s = transfer_eval(TransferKind::logsig, x);
    CHECK(s > 0.0);
    CHECK(s < 1.0);
    CHECK(transfer_eval(TransferKind::purelin, x) == x);
  }
}

TEST_CASE("logsig saturation guard", "[transfer]") {
  CHECK(transfer_eval(TransferKind::logsig, -701.0) == 0.0);
  CHECK(transfer_eval(TransferKind::logsig, 701.0) == 1.0);
}

TEST_CASE("transfer_eval rejects non-finite input", "[transfer]") {
  const double inf = std::numeric_limits<double>::infinity();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (TransferKind k : {TransferKind::tansig, TransferKind::logsig, TransferKind::purelin}) {
    CHECK_THROWS_AS(transfer_eval(k, inf), DomainError);
    CHECK_THROWS_AS(transfer_eval(k, nan), DomainError);
    CHECK_THROWS_AS(transfer_deriv(k, -inf), DomainError);
  }
}

TEST_CASE("transfer_deriv known values", "[transfer]") {
  CHECK(transfer_deriv(TransferKind::tansig, 0.0) == 1.0);
  CHECK(transfer_deriv(TransferKind::purelin, -7.7) == 1.0);
  CHECK(transfer_deriv(TransferKind::logsig, 0.0) == Catch::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("transfer_deriv matches central differences", "[transfer]") {
  const double h = 1e-6;
  for (TransferKind k : {TransferKind::tansig, TransferKind::logsig, TransferKind::purelin}) {
    for (double x = -10.0; x <= 10.0; x += 0.37) {
      const double fd =
          (transfer_eval(k, x + h) - transfer_eval(k, x - h)) / (2.0 * h);
      const double an = transfer_deriv(k, x);
      CHECK(std::abs(an - fd) <= 1e-6 * std::max(1.0, std::abs(an)));
    }
  }
}

TEST_CASE("transfer identities", "[transfer]") {
  for (double x = -10.0; x <= 10.0; x += 0.173) {
    CHECK(std::abs(transfer_eval(TransferKind::tansig, -x) +
                   transfer_eval(TransferKind::tansig, x)) <= 1e-15);
    CHECK(std::abs(transfer_eval(TransferKind::logsig, x) +
                   transfer_eval(TransferKind::logsig, -x) - 1.0) <= 1e-15);
    // tansig(x) = 2*logsig(2x) - 1
    CHECK(std::abs(transfer_eval(TransferKind::tansig, x) -
                   (2.0 * transfer_eval(TransferKind::logsig, 2.0 * x) - 1.0)) <= 1e-12);
  }
}

TEST_CASE("transfer names round trip", "[transfer]") {
  for (TransferKind k : {TransferKind::tansig, TransferKind::logsig, TransferKind::purelin}) {
    CHECK(transfer_from_name(transfer_name(k)) == k);
  }
  CHECK_THROWS_AS(transfer_from_name("relu"), ConfigError);
}
