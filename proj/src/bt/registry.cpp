#include "hfsmbt/bt/registry.hpp"

#include <charconv>
#include <sstream>
#include <vector>

namespace hfsmbt::bt {

namespace {

bool parse_double(const std::string& text, double& out) {
    std::istringstream in(text);
    in >> out;
    return !in.fail() && in.eof();
}

}  // namespace

std::optional<PortValue> LeafContext::binding(const std::string& port) const {
    auto it = node_.ports().find(port);
    if (it == node_.ports().end()) {
        return std::nullopt;
    }
    PortValue pv = it->second;
    // Keys not remapped by a scope fall through to the enclosing one, so all
    // subtrees share one blackboard unless a remap says otherwise.
    for (const KeyScope* scope = scope_; scope != nullptr && pv.is_key; scope = scope->parent) {
        if (scope->remaps == nullptr) {
            continue;
        }
        auto remap = scope->remaps->find(pv.text);
        if (remap != scope->remaps->end()) {
            pv = remap->second;
        }
    }
    return pv;
}

std::optional<Value> LeafContext::try_input(const std::string& port) const {
    auto pv = binding(port);
    if (!pv) {
        return std::nullopt;
    }
    if (!pv->is_key) {
        return Value{pv->text};
    }
    return blackboard_.find(pv->text);
}

Value LeafContext::input(const std::string& port) const {
    auto pv = binding(port);
    if (!pv) {
        throw BtError(BtErrc::BlackboardKeyMissing, port, "port not bound on " + node_.name());
    }
    if (!pv->is_key) {
        return Value{pv->text};
    }
    return blackboard_.get(pv->text);
}

void LeafContext::output(const std::string& port, Value value) {
    auto pv = binding(port);
    if (!pv || !pv->is_key) {
        throw BtError(BtErrc::PortNotWritable, port, "output port must be bound to a {key}");
    }
    blackboard_.set(pv->text, std::move(value));
}

Value convert_literal(const std::string& port, const std::string& text, std::string_view wanted) {
    auto mismatch = [&] {
        return BtError(BtErrc::BlackboardTypeMismatch, port,
                       "literal '" + text + "' is not a " + std::string(wanted));
    };
    if (wanted == "bool") {
        if (text == "true" || text == "1") {
            return true;
        }
        if (text == "false" || text == "0") {
            return false;
        }
        throw mismatch();
    }
    if (wanted == "int") {
        std::int64_t v = 0;
        auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
        if (ec != std::errc{} || ptr != text.data() + text.size()) {
            throw mismatch();
        }
        return v;
    }
    if (wanted == "real") {
        double v = 0;
        if (!parse_double(text, v)) {
            throw mismatch();
        }
        return v;
    }
    if (wanted == "pose") {
        std::vector<std::string> parts;
        std::size_t start = 0;
        while (true) {
            auto end = text.find(';', start);
            parts.push_back(text.substr(start, end == std::string::npos ? std::string::npos : end - start));
            if (end == std::string::npos) {
                break;
            }
            start = end + 1;
        }
        Pose p;
        if (parts.size() < 2 || parts.size() > 3 || !parse_double(parts[0], p.x) ||
            !parse_double(parts[1], p.y) || (parts.size() == 3 && !parse_double(parts[2], p.heading))) {
            throw mismatch();
        }
        return p;
    }
    throw mismatch();
}

void LeafRegistry::register_action(const std::string& id, LeafTick tick, LeafHalt halt,
                                   std::vector<PortSpec> ports) {
    leaves_.insert_or_assign(id, LeafImpl{NodeKind::Action, std::move(tick), std::move(halt), std::move(ports)});
}

void LeafRegistry::register_condition(const std::string& id, LeafTick tick, std::vector<PortSpec> ports) {
    leaves_.insert_or_assign(id, LeafImpl{NodeKind::Condition, std::move(tick), {}, std::move(ports)});
}

const LeafImpl* LeafRegistry::find(const std::string& id) const {
    auto it = leaves_.find(id);
    return it == leaves_.end() ? nullptr : &it->second;
}

std::vector<std::string> LeafRegistry::ids() const {
    std::vector<std::string> out;
    for (const auto& [id, _] : leaves_) {
        out.push_back(id);
    }
    return out;
}

}  // namespace hfsmbt::bt
