#pragma once

#include <stdexcept>
#include <string>

namespace hfsmbt::bt {

enum class BtErrc {
    UnregisteredLeaf,
    ConditionReturnedRunning,
    LeafReturnedIdle,
    BlackboardKeyMissing,
    BlackboardTypeMismatch,
    InvalidThreshold,
    InvalidStatus,
    InvalidTree,
    UnresolvedSubTree,
    NotNormalizable,
    PortNotWritable,
};

const char* to_string(BtErrc code);

/// Error raised by the behavior-tree engine. @c subject names the offending
/// leaf id, blackboard key, or node kind depending on the code.
class BtError : public std::runtime_error {
public:
    BtError(BtErrc code, std::string subject, const std::string& detail = {});

    [[nodiscard]] BtErrc code() const noexcept { return code_; }
    [[nodiscard]] const std::string& subject() const noexcept { return subject_; }

private:
    BtErrc code_;
    std::string subject_;
};

}  // namespace hfsmbt::bt
