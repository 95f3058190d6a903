#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace chainlearn {

/// Rejection reasons for coordinator operations and policy-level input checks.
/// A rejected operation throws ProtocolError and leaves state untouched.
enum class RejectReason {
    NotOwner,
    NotRegistered,
    AlreadyRegistered,
    DuplicateSubmission,
    ModelTypeMismatch,
    AlreadyRecorded,
    NoSubmissions,
    NoOpenRound,
    CapacityMismatch,
    SignatureMismatch,
    HashMismatch,
    InvalidReliability,
};

std::string_view to_string(RejectReason reason);

class ProtocolError : public std::runtime_error {
public:
    ProtocolError(RejectReason reason, const std::string& what)
        : std::runtime_error(std::string(to_string(reason)) + ": " + what), reason_(reason) {}

    RejectReason reason() const noexcept { return reason_; }

private:
    RejectReason reason_;
};

}  // namespace chainlearn
