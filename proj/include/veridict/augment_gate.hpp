#pragma once

// Accuracy constraints that decide whether scanned content may join the
// training corpus.

#include <string>
#include <string_view>

#include "veridict/error.hpp"

namespace veridict {

struct GateConfig {
  /// Minimum acceptable mean accuracy across models.
  double alpha = 0.70;
  /// Best-fit accuracy at or above which content is accepted outright.
  double accept = 0.90;
  /// Best-fit accuracy at or below which content is never accepted.
  double unaccept = 0.60;

  void validate() const {
    const auto in01 = [](double v) { return v >= 0.0 && v <= 1.0; };
    if (!in01(alpha) || !in01(accept) || !in01(unaccept) || !(unaccept < accept)) {
      throw Error(ErrorKind::InvalidConfig, "gate thresholds must satisfy 0 <= unaccept < accept <= 1, 0 <= alpha <= 1");
    }
  }
};

enum class GateBranch { MaxAccepted, MidBandWithScore, RejectedMean, RejectedMax, RejectedScore };

inline constexpr std::string_view to_string(GateBranch b) noexcept {
  switch (b) {
    case GateBranch::MaxAccepted: return "MaxAccepted";
    case GateBranch::MidBandWithScore: return "MidBandWithScore";
    case GateBranch::RejectedMean: return "RejectedMean";
    case GateBranch::RejectedMax: return "RejectedMax";
    case GateBranch::RejectedScore: return "RejectedScore";
  }
  return "";
}

struct GateDecision {
  bool augment = false;
  GateBranch fired_branch = GateBranch::RejectedMean;
  double mean = 0.0;
  double max = 0.0;
  /// Absent for the single-link gate.
  double score = -1.0;
};

/// How the outlet predicate is parenthesized: the mean condition guards
/// both branches of the disjunction.
inline constexpr std::string_view kGateParse = "mean>=alpha AND (max>=accept OR (unaccept<max<accept AND accept/4<=score<=3*accept/4))";

namespace detail {
inline void check_unit(double v, const char* name) {
  if (!(v >= 0.0 && v <= 1.0)) throw Error(ErrorKind::InvalidConfig, std::string(name) + " must lie in [0, 1]");
}
}  // namespace detail

inline GateDecision outlet_gate(double mean_acc, double max_acc, double score, const GateConfig& config) {
  config.validate();
  detail::check_unit(mean_acc, "mean accuracy");
  detail::check_unit(max_acc, "max accuracy");
  detail::check_unit(score, "score");

  GateDecision d{false, GateBranch::RejectedMean, mean_acc, max_acc, score};
  if (mean_acc < config.alpha) return d;
  if (max_acc >= config.accept) {
    d.augment = true;
    d.fired_branch = GateBranch::MaxAccepted;
  } else if (max_acc > config.unaccept) {
    const bool in_band = config.accept / 4.0 <= score && score <= 3.0 * config.accept / 4.0;
    d.augment = in_band;
    d.fired_branch = in_band ? GateBranch::MidBandWithScore : GateBranch::RejectedScore;
  } else {
    d.fired_branch = GateBranch::RejectedMax;
  }
  return d;
}

inline GateDecision single_link_gate(double mean_acc, double max_acc, const GateConfig& config) {
  config.validate();
  detail::check_unit(mean_acc, "mean accuracy");
  detail::check_unit(max_acc, "max accuracy");

  GateDecision d{false, GateBranch::RejectedMean, mean_acc, max_acc, -1.0};
  if (mean_acc < config.alpha) return d;
  if (max_acc >= config.accept) {
    d.augment = true;
    d.fired_branch = GateBranch::MaxAccepted;
  } else {
    d.fired_branch = GateBranch::RejectedMax;
  }
  return d;
}

}  // namespace veridict
