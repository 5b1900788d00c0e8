#pragma once

#include <stdexcept>
#include <string>

namespace minsurf {

enum class Err {
  ZeroPolynomial,
  NotASquare,
  PoleOnCycle,
  PoleAtSample,
  BranchPoint,
  NotWellDefined,
  InconsistentSpinor,
  NotRegular,
  GridMismatch,
  GeometryTooTight,
  RankDeficient,
  BadBudget,
  BudgetExhausted,
  EmptyBasis,
  NoClosure,
  TooThin,
  PoleInCollar,
  BoostFailed,
  BadConfig,
};

struct Error : std::runtime_error {
  Err kind;
  Error(Err k, const std::string& msg) : std::runtime_error(msg), kind(k) {}
};

const char* err_name(Err k);

}  // namespace minsurf
