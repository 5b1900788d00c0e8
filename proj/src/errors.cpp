#include "minsurf/errors.hpp"

namespace minsurf {

const char* err_name(Err k) {
  switch (k) {
    case Err::ZeroPolynomial: return "ZeroPolynomial";
    case Err::NotASquare: return "NotASquare";
    case Err::PoleOnCycle: return "PoleOnCycle";
    case Err::PoleAtSample: return "PoleAtSample";
    case Err::BranchPoint: return "BranchPoint";
    case Err::NotWellDefined: return "NotWellDefined";
    case Err::InconsistentSpinor: return "InconsistentSpinor";
    case Err::NotRegular: return "NotRegular";
    case Err::GridMismatch: return "GridMismatch";
    case Err::GeometryTooTight: return "GeometryTooTight";
    case Err::RankDeficient: return "RankDeficient";
    case Err::BadBudget: return "BadBudget";
    case Err::BudgetExhausted: return "BudgetExhausted";
    case Err::EmptyBasis: return "EmptyBasis";
    case Err::NoClosure: return "NoClosure";
    case Err::TooThin: return "TooThin";
    case Err::PoleInCollar: return "PoleInCollar";
    case Err::BoostFailed: return "BoostFailed";
    case Err::BadConfig: return "BadConfig";
  }
  return "Unknown";
}

}  // namespace minsurf
