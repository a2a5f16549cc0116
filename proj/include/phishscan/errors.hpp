#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace phishscan {

enum class Errc {
  Io,
  ZeroRules,
  MissingScheme,
  MissingHost,
  EmptyLabel,
  MalformedSnapshot,
  EmptyInput,
  SingleClass,
  DimensionMismatch,
  Config,
  Corrupt,
  Version,
  PoolExhausted,
  Search,
};

std::string_view errc_name(Errc code);

// Every failure raised by the library carries one of the codes above so
// callers (the CLI in particular) can map it onto an exit status.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what);
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace phishscan
