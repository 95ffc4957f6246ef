#include "auxtest/error.hpp"

namespace auxtest {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::kInput: return "input";
    case ErrorKind::kNotPsd: return "not-psd";
    case ErrorKind::kIncompatibleCovariances: return "incompatible-covariances";
    case ErrorKind::kPrecondition: return "precondition";
    case ErrorKind::kNotInformative: return "auxiliary-not-informative";
    case ErrorKind::kDegenerateAlternative: return "degenerate-alternative";
    case ErrorKind::kRakingDegenerate: return "raking-degenerate";
    case ErrorKind::kDegenerateDesign: return "degenerate-design";
    case ErrorKind::kEmptyConditioning: return "empty-conditioning";
    case ErrorKind::kDegenerateInformation: return "degenerate-information";
    case ErrorKind::kIo: return "io";
  }
  return "unknown";
}

}  // namespace auxtest
