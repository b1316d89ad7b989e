#pragma once

/// @file userdata.hpp
/// @brief Data passed from state to state.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hfsmbt/core/value.hpp"

namespace hfsmbt::hfsm {

using UserData = std::map<std::string, Value>;
/// State-local key -> key one level up.
using Remaps = std::map<std::string, std::string>;

/// A state's window onto the userdata: only declared input keys can be read
/// and only declared output keys written. Keys are translated through the
/// remaps of the state and of every enclosing machine.
class UserDataView {
public:
    UserDataView(UserData& store, std::string state, const std::vector<std::string>& inputs,
                 const std::vector<std::string>& outputs, const Remaps* remaps, const UserDataView* parent);

    /// Throws HfsmError(UndeclaredUserDataKey) or (UserDataKeyMissing).
    [[nodiscard]] const Value& get(const std::string& key) const;
    [[nodiscard]] std::optional<Value> find(const std::string& key) const;
    /// Throws HfsmError(UndeclaredUserDataKey).
    void set(const std::string& key, Value value);

    /// Key as stored at the root, without permission checks.
    [[nodiscard]] std::string resolve(const std::string& key) const;
    [[nodiscard]] UserData& store() const { return store_; }

private:
    UserData& store_;
    std::string state_;
    const std::vector<std::string>& inputs_;
    const std::vector<std::string>& outputs_;
    const Remaps* remaps_;
    const UserDataView* parent_;
};

}  // namespace hfsmbt::hfsm
