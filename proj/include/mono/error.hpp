#ifndef MONO_ERROR_HPP
#define MONO_ERROR_HPP

#include <stdexcept>
#include <string>

namespace mono {

// Engine error taxonomy.  The CLI maps each code to a process exit code,
// so the set here is closed.
enum class ErrorCode {
    RankMismatch,
    NotAUnit,
    FieldExtensionRequired,
    TruncationExhausted,
    InvalidOrder,
    NotDependent,
    NotIndependent,
    NotRepresentable,
    RankDeficient,
    InstanceTooLarge,
    InvalidPreparedForm,
    InvalidTransformation,
    IterationLimit,
    NotApplicable,
    VerifyFailed,
    Internal,
};

class EngineError : public std::runtime_error {
public:
    EngineError(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}
    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

// Raised when a requested constant root leaves the current cyclotomic field.
// Carries the modulus that would make the root representable.
class FieldExtensionRequired : public EngineError {
public:
    FieldExtensionRequired(long needed_modulus, const std::string& what)
        : EngineError(ErrorCode::FieldExtensionRequired, what),
          needed_modulus_(needed_modulus) {}
    long needed_modulus() const { return needed_modulus_; }

private:
    long needed_modulus_;
};

// verify() reports the first failing stage of a certificate replay.
class VerifyFailed : public EngineError {
public:
    VerifyFailed(int stage, const std::string& what)
        : EngineError(ErrorCode::VerifyFailed, what), stage_(stage) {}
    int stage() const { return stage_; }

private:
    int stage_;
};

inline EngineError error(ErrorCode code, const std::string& what) {
    return EngineError(code, what);
}

const char* error_code_name(ErrorCode code);

} // namespace mono

#endif
