#pragma once

/// @file blackboard.hpp
/// @brief Shared key/value memory through which nodes and subtrees exchange data.

#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "hfsmbt/bt/error.hpp"
#include "hfsmbt/core/value.hpp"

namespace hfsmbt::bt {

/// Thread-safe blackboard.
///
/// Writes are last-writer-wins. Reading an absent key throws
/// BtError(BlackboardKeyMissing); there is no default value. Writers on other
/// threads (the simulator) may set keys at any time; the tick engine observes
/// them at the next read.
class Blackboard {
public:
    Blackboard() = default;
    Blackboard(const Blackboard&) = delete;
    Blackboard& operator=(const Blackboard&) = delete;

    void set(const std::string& key, Value value);

    [[nodiscard]] Value get(const std::string& key) const;

    /// Typed read. Throws BlackboardTypeMismatch if the stored alternative is
    /// not @p T.
    template <class T>
    [[nodiscard]] T get_as(const std::string& key) const {
        Value v = get(key);
        if (auto* typed = std::get_if<T>(&v)) {
            return std::move(*typed);
        }
        throw BtError(BtErrc::BlackboardTypeMismatch, key,
                      std::string("stored type is ") + value_type_name(v));
    }

    [[nodiscard]] std::optional<Value> find(const std::string& key) const;
    [[nodiscard]] bool contains(const std::string& key) const;
    void erase(const std::string& key);
    void clear();
    [[nodiscard]] std::vector<std::string> keys() const;

private:
    mutable std::mutex mutex_;
    std::map<std::string, Value> entries_;
};

}  // namespace hfsmbt::bt
