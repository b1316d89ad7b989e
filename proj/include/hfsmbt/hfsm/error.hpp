#pragma once

#include <stdexcept>
#include <string>

namespace hfsmbt::hfsm {

enum class HfsmErrc {
    UndeclaredOutcome,
    UserDataKeyMissing,
    UndeclaredUserDataKey,
    NotActive,
    InvalidMachine,
    UnknownState,
};

const char* to_string(HfsmErrc code);

class HfsmError : public std::runtime_error {
public:
    HfsmError(HfsmErrc code, std::string subject, const std::string& detail = {});

    [[nodiscard]] HfsmErrc code() const noexcept { return code_; }
    [[nodiscard]] const std::string& subject() const noexcept { return subject_; }

private:
    HfsmErrc code_;
    std::string subject_;
};

}  // namespace hfsmbt::hfsm
