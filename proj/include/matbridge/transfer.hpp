#pragma once

#include <cmath>
#include <string>
#include <string_view>

#include "matbridge/errors.hpp"

namespace matbridge {

// The three layer nonlinearities: hyperbolic tangent, logistic sigmoid, identity.
enum class TransferKind { tansig, logsig, purelin };

inline std::string_view transfer_name(TransferKind kind) {
  switch (kind) {
    case TransferKind::tansig: return "tansig";
    case TransferKind::logsig: return "logsig";
    case TransferKind::purelin: return "purelin";
  }
  return "?";
}

inline TransferKind transfer_from_name(std::string_view name) {
  if (name == "tansig") return TransferKind::tansig;
  if (name == "logsig") return TransferKind::logsig;
  if (name == "purelin") return TransferKind::purelin;
  throw ConfigError("unknown transfer function '" + std::string(name) +
                    "' (expected tansig, logsig or purelin)");
}

inline double transfer_eval(TransferKind kind, double x) {
  if (!std::isfinite(x)) throw DomainError("transfer_eval: non-finite input");
  switch (kind) {
    case TransferKind::tansig:
      return std::tanh(x);
    case TransferKind::logsig:
      // exp(-x) overflows past ~709; clamp to the exact saturation values.
      if (x < -700.0) return 0.0;
      if (x > 700.0) return 1.0;
      return 1.0 / (1.0 + std::exp(-x));
    case TransferKind::purelin:
      return x;
  }
  throw DomainError("transfer_eval: bad kind");
}

inline double transfer_deriv(TransferKind kind, double x) {
  if (!std::isfinite(x)) throw DomainError("transfer_deriv: non-finite input");
  switch (kind) {
    case TransferKind::tansig: {
      const double t = std::tanh(x);
      return 1.0 - t * t;
    }
    case TransferKind::logsig: {
      const double s = transfer_eval(TransferKind::logsig, x);
      return s * (1.0 - s);
    }
    case TransferKind::purelin:
      return 1.0;
  }
  throw DomainError("transfer_deriv: bad kind");
}

}  // namespace matbridge
