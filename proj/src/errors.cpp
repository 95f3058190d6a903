#include "chainlearn/errors.hpp"

namespace chainlearn {

std::string_view to_string(RejectReason reason) {
    switch (reason) {
        case RejectReason::NotOwner: return "NotOwner";
        case RejectReason::NotRegistered: return "NotRegistered";
        case RejectReason::AlreadyRegistered: return "AlreadyRegistered";
        case RejectReason::DuplicateSubmission: return "DuplicateSubmission";
        case RejectReason::ModelTypeMismatch: return "ModelTypeMismatch";
        case RejectReason::AlreadyRecorded: return "AlreadyRecorded";
        case RejectReason::NoSubmissions: return "NoSubmissions";
        case RejectReason::NoOpenRound: return "NoOpenRound";
        case RejectReason::CapacityMismatch: return "CapacityMismatch";
        case RejectReason::SignatureMismatch: return "SignatureMismatch";
        case RejectReason::HashMismatch: return "HashMismatch";
        case RejectReason::InvalidReliability: return "InvalidReliability";
    }
    return "UnknownReason";
}

}  // namespace chainlearn
