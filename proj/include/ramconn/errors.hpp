#pragma once

#include <stdexcept>
#include <string>

namespace ramconn {

enum class ErrCode {
    RadicalReducible,
    TowerTooDeep,
    MissingRoot,
    NotInvertible,
    FieldMismatch,
    PoleTooSmall,
    PoleOrderMismatch,
    DegenerateNewtonPolygon,
    NotGenericRamified,
    C1Zero,
    NotIso,
    EmptySolutionSet,
    BoundTooSmall,
    ChartMismatch,
    DegenerateParameters,
    Inconclusive,
    SchemaError,
    FileError,
    PrecisionUnsupported,
    Internal,
};

const char* err_name(ErrCode c);

class Error : public std::runtime_error {
  public:
    Error(ErrCode code, const std::string& msg)
        : std::runtime_error(std::string(err_name(code)) + ": " + msg), code_(code) {}
    ErrCode code() const { return code_; }

  private:
    ErrCode code_;
};

[[noreturn]] inline void fail(ErrCode code, const std::string& msg) { throw Error(code, msg); }

} // namespace ramconn
