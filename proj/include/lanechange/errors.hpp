#pragma once

#include <stdexcept>
#include <string>

namespace lanechange {

class ManeuverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ManeuverAborted : public ManeuverError {
 public:
  using ManeuverError::ManeuverError;
};

class TerminalInfeasible : public ManeuverError {
 public:
  using ManeuverError::ManeuverError;
};

class RelaxationFailed : public ManeuverError {
 public:
  using ManeuverError::ManeuverError;
};

class OcpInfeasible : public ManeuverError {
 public:
  using ManeuverError::ManeuverError;
};

class ConstrainedInfeasible : public ManeuverError {
 public:
  using ManeuverError::ManeuverError;
};

class OracleInfeasible : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class OracleNoConverge : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidScenario : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace lanechange
