#include "hfsmbt/bt/error.hpp"

namespace hfsmbt::bt {

const char* to_string(BtErrc code) {
    switch (code) {
        case BtErrc::UnregisteredLeaf:
            return "UnregisteredLeaf";
        case BtErrc::ConditionReturnedRunning:
            return "ConditionReturnedRunning";
        case BtErrc::LeafReturnedIdle:
            return "LeafReturnedIdle";
        case BtErrc::BlackboardKeyMissing:
            return "BlackboardKeyMissing";
        case BtErrc::BlackboardTypeMismatch:
            return "BlackboardTypeMismatch";
        case BtErrc::InvalidThreshold:
            return "InvalidThreshold";
        case BtErrc::InvalidStatus:
            return "InvalidStatus";
        case BtErrc::InvalidTree:
            return "InvalidTree";
        case BtErrc::UnresolvedSubTree:
            return "UnresolvedSubTree";
        case BtErrc::NotNormalizable:
            return "NotNormalizable";
        case BtErrc::PortNotWritable:
            return "PortNotWritable";
    }
    return "Unknown";
}

namespace {

std::string format_message(BtErrc code, const std::string& subject, const std::string& detail) {
    std::string msg = std::string(to_string(code)) + "(" + subject + ")";
    if (!detail.empty()) {
        msg += ": " + detail;
    }
    return msg;
}

}  // namespace

BtError::BtError(BtErrc code, std::string subject, const std::string& detail)
    : std::runtime_error(format_message(code, subject, detail)), code_(code), subject_(std::move(subject)) {}

}  // namespace hfsmbt::bt
