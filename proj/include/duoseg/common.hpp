#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace duoseg {

// Error taxonomy, mapped to CLI exit codes: ConfigError -> 2 (usage),
// DataError -> 3 (bad input data / files), EngineError -> 4 (runtime).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct EngineError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline void check_config(bool ok, const std::string& msg) {
  if (!ok) throw ConfigError(msg);
}
inline void check_data(bool ok, const std::string& msg) {
  if (!ok) throw DataError(msg);
}
inline void check_engine(bool ok, const std::string& msg) {
  if (!ok) throw EngineError(msg);
}

}  // namespace duoseg
