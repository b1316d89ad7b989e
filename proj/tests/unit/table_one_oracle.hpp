#pragma once

// Exhaustive check of composite reductions against the node summary table:
//
//   Fallback  Success: a child returns Success   Failure: all children Failure   Running: a child Running
//   Sequence  Success: all children Success      Failure: a child Failure        Running: a child Running
//   Parallel  Success: >= M children Success     Failure: > N - M Failure        Running: else
//
// For every status vector of length 1..4 over {Success, Failure, Running} a
// composite of fixed-status leaves is ticked once through the real engine.
// The table rows are then evaluated over the children that were actually
// ticked; exactly one row must hold and it must equal the engine's result.
// The pure reduce_* functions are checked against the same rows.

#include <functional>
#include <string>
#include <vector>

#include "bt_test_support.hpp"
#include "hfsmbt/bt/engine.hpp"

namespace hfsmbt::bt::testing {

struct TableOneReport {
    std::size_t cases = 0;
    std::vector<std::string> mismatches;
};

inline std::vector<std::vector<NodeStatus>> all_status_vectors(std::size_t max_len) {
    std::vector<std::vector<NodeStatus>> out;
    std::vector<std::vector<NodeStatus>> frontier{{}};
    for (std::size_t len = 1; len <= max_len; ++len) {
        std::vector<std::vector<NodeStatus>> next;
        for (const auto& prefix : frontier) {
            for (NodeStatus s : {S, F, R}) {
                auto v = prefix;
                v.push_back(s);
                next.push_back(v);
            }
        }
        out.insert(out.end(), next.begin(), next.end());
        frontier = std::move(next);
    }
    return out;
}

inline std::string vector_text(const std::vector<NodeStatus>& v) {
    std::string s;
    for (NodeStatus x : v) {
        s += status_letter(x);
    }
    return s;
}

inline TableOneReport check_table_one(std::size_t max_len = 4) {
    TableOneReport report;
    auto fail = [&](const std::string& what, const std::vector<NodeStatus>& v) {
        report.mismatches.push_back(what + " [" + vector_text(v) + "]");
    };

    for (const auto& v : all_status_vectors(max_len)) {
        const std::size_t n = v.size();

        struct Variant {
            NodeKind kind;
            int threshold;
        };
        std::vector<Variant> variants{{NodeKind::Sequence, 0},
                                      {NodeKind::ReactiveSequence, 0},
                                      {NodeKind::Fallback, 0},
                                      {NodeKind::ReactiveFallback, 0}};
        for (int m = 1; m <= static_cast<int>(n); ++m) {
            variants.push_back({NodeKind::Parallel, m});
        }

        for (const auto& variant : variants) {
            ++report.cases;
            LeafRegistry registry;
            ScriptedLeaves leaves(registry);
            auto children = fixed_leaves(leaves, v);
            BtNode tree = BtNode::make(variant.kind, {}, std::move(children), {}, variant.threshold, {});
            Blackboard bb;
            TickContext ctx;
            ctx.tick_index = 1;
            const NodeStatus got = tick_root(tree, TickEnv{bb, registry, ctx, nullptr});

            std::vector<NodeStatus> ticked;
            for (std::size_t i = 0; i < n; ++i) {
                if (leaves.ticks("L" + std::to_string(i)) > 0) {
                    ticked.push_back(v[i]);
                }
            }
            auto any = [&](NodeStatus s) { return std::find(ticked.begin(), ticked.end(), s) != ticked.end(); };
            const bool all_success = ticked.size() == n && std::all_of(v.begin(), v.end(), [](auto s) { return s == S; });
            const bool all_failure = ticked.size() == n && std::all_of(v.begin(), v.end(), [](auto s) { return s == F; });
            const std::string label = std::string(to_string(variant.kind)) +
                                      (variant.kind == NodeKind::Parallel ? "(M=" + std::to_string(variant.threshold) + ")" : "");

            bool row_success = false;
            bool row_failure = false;
            bool row_running = false;
            NodeStatus pure = NodeStatus::Idle;
            switch (variant.kind) {
                case NodeKind::Sequence:
                case NodeKind::ReactiveSequence:
                    row_success = all_success;
                    row_failure = any(F);
                    row_running = any(R);
                    pure = reduce_sequence(v);
                    break;
                case NodeKind::Fallback:
                case NodeKind::ReactiveFallback:
                    row_success = any(S);
                    row_failure = all_failure;
                    row_running = any(R);
                    pure = reduce_fallback(v);
                    break;
                default: {
                    if (ticked.size() != n) {
                        fail(label + " did not tick every child", v);
                    }
                    const auto successes = std::count(v.begin(), v.end(), S);
                    const auto failures = std::count(v.begin(), v.end(), F);
                    row_success = successes >= variant.threshold;
                    row_failure = failures > static_cast<long>(n) - variant.threshold;
                    row_running = !row_success && !row_failure;
                    pure = reduce_parallel(variant.threshold, v);
                    break;
                }
            }
            const int rows = int(row_success) + int(row_failure) + int(row_running);
            if (rows != 1) {
                fail(label + " ticked prefix matches " + std::to_string(rows) + " rows", v);
                continue;
            }
            const NodeStatus expected = row_success ? S : (row_failure ? F : R);
            if (got != expected) {
                fail(label + " engine=" + std::string(to_string(got)) + " table=" + std::string(to_string(expected)), v);
            }
            if (pure != expected) {
                fail(label + " reduce=" + std::string(to_string(pure)) + " table=" + std::string(to_string(expected)), v);
            }
        }
    }
    return report;
}

}  // namespace hfsmbt::bt::testing
