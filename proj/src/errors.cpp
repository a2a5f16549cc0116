#include "phishscan/errors.hpp"

namespace phishscan {

std::string_view errc_name(Errc code) {
  switch (code) {
    case Errc::Io: return "Io";
    case Errc::ZeroRules: return "ZeroRules";
    case Errc::MissingScheme: return "MissingScheme";
    case Errc::MissingHost: return "MissingHost";
    case Errc::EmptyLabel: return "EmptyLabel";
    case Errc::MalformedSnapshot: return "MalformedSnapshot";
    case Errc::EmptyInput: return "EmptyInput";
    case Errc::SingleClass: return "SingleClass";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::Config: return "Config";
    case Errc::Corrupt: return "Corrupt";
    case Errc::Version: return "Version";
    case Errc::PoolExhausted: return "PoolExhausted";
    case Errc::Search: return "Search";
  }
  return "Unknown";
}

Error::Error(Errc code, const std::string& what)
    : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

}  // namespace phishscan
