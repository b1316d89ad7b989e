#include "hfsmbt/bt/blackboard.hpp"

namespace hfsmbt::bt {

void Blackboard::set(const std::string& key, Value value) {
    std::lock_guard lock(mutex_);
    entries_.insert_or_assign(key, std::move(value));
}

Value Blackboard::get(const std::string& key) const {
    std::lock_guard lock(mutex_);
    auto it = entries_.find(key);
    if (it == entries_.end()) {
        throw BtError(BtErrc::BlackboardKeyMissing, key);
    }
    return it->second;
}

std::optional<Value> Blackboard::find(const std::string& key) const {
    std::lock_guard lock(mutex_);
    auto it = entries_.find(key);
    if (it == entries_.end()) {
        return std::nullopt;
    }
    return it->second;
}

bool Blackboard::contains(const std::string& key) const {
    std::lock_guard lock(mutex_);
    return entries_.contains(key);
}

void Blackboard::erase(const std::string& key) {
    std::lock_guard lock(mutex_);
    entries_.erase(key);
}

void Blackboard::clear() {
    std::lock_guard lock(mutex_);
    entries_.clear();
}

std::vector<std::string> Blackboard::keys() const {
    std::lock_guard lock(mutex_);
    std::vector<std::string> out;
    out.reserve(entries_.size());
    for (const auto& [k, _] : entries_) {
        out.push_back(k);
    }
    return out;
}

}  // namespace hfsmbt::bt
