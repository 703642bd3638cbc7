#ifndef SPHEREFORGE_VERDICTS_HPP
#define SPHEREFORGE_VERDICTS_HPP

#include <cmath>
#include <limits>
#include <map>
#include <string>

namespace sphereforge {

enum class SingularityKind { CuspidalEdge, Swallowtail, CuspidalButterfly, ConePoint, CuspidalBeaks, NotAFront, Unclassified };

inline const char* to_string(SingularityKind k)
{
  switch (k) {
    case SingularityKind::CuspidalEdge: return "CuspidalEdge";
    case SingularityKind::Swallowtail: return "Swallowtail";
    case SingularityKind::CuspidalButterfly: return "CuspidalButterfly";
    case SingularityKind::ConePoint: return "ConePoint";
    case SingularityKind::CuspidalBeaks: return "CuspidalBeaks";
    case SingularityKind::NotAFront: return "NotAFront";
    case SingularityKind::Unclassified: return "Unclassified";
  }
  return "?";
}

struct SingularityVerdict {
  SingularityKind kind = SingularityKind::Unclassified;
  double x = std::numeric_limits<double>::quiet_NaN();
  double y = std::numeric_limits<double>::quiet_NaN();
  // Exact certificates as "p/q" strings (Cauchy mode), numeric ones as doubles.
  std::map<std::string, std::string> exact;
  std::map<std::string, double> numeric;
  std::string note;
};

enum class WoodKind { Regular, Fold, Collapse, GoodHigherOrder, MeetingOfFolds, BranchPoint, Degenerate, Unclassified };

inline const char* to_string(WoodKind k)
{
  switch (k) {
    case WoodKind::Regular: return "Regular";
    case WoodKind::Fold: return "Fold";
    case WoodKind::Collapse: return "Collapse";
    case WoodKind::GoodHigherOrder: return "GoodHigherOrder";
    case WoodKind::MeetingOfFolds: return "MeetingOfFolds";
    case WoodKind::BranchPoint: return "BranchPoint";
    case WoodKind::Degenerate: return "Degenerate";
    case WoodKind::Unclassified: return "Unclassified";
  }
  return "?";
}

struct WoodVerdict {
  WoodKind kind = WoodKind::Unclassified;
  int fold_count = 0;  // MeetingOfFolds only
  std::map<std::string, std::string> witness;
};

}  // namespace sphereforge

#endif  // SPHEREFORGE_VERDICTS_HPP
