#pragma once
// Recursive goal decomposition: a goal's children are its recipe materials
// (counts scaled by the number of craft units) followed by its tool, down to
// raw leaves. Scheduling is a post-order walk, so every prerequisite lands
// before its dependent and the root goal comes last. Duplicate sub-trees are
// kept; the episode runner de-duplicates at run time by skipping sub-goals
// the inventory already satisfies.

#include "knowledge.hpp"

namespace voxagent {

struct DecompositionError : DataError {
    using DataError::DataError;
};

struct SubGoalNode {
    Goal goal;
    std::vector<SubGoalNode> children;
};

struct SubGoalTree {
    SubGoalNode root;

    json to_json() const { return node_json(root); }

    std::string to_text() const {
        std::string out;
        node_text(root, 0, out);
        return out;
    }

    std::string to_dot() const {
        std::string out = "digraph subgoals {\n  node [shape=box];\n";
        int next_id = 0;
        node_dot(root, next_id, out);
        out += "}\n";
        return out;
    }

private:
    static json node_json(const SubGoalNode& n) {
        json kids = json::array();
        for (auto& c : n.children) kids.push_back(node_json(c));
        json j = n.goal.to_json();
        j["children"] = kids;
        return j;
    }
    static void node_text(const SubGoalNode& n, int depth, std::string& out) {
        out.append(static_cast<size_t>(depth) * 2, ' ');
        out += n.goal.object + " x" + std::to_string(n.goal.count) + "\n";
        for (auto& c : n.children) node_text(c, depth + 1, out);
    }
    static int node_dot(const SubGoalNode& n, int& next_id, std::string& out) {
        int id = next_id++;
        out += "  n" + std::to_string(id) + " [label=\"" + n.goal.object + " x" +
               std::to_string(n.goal.count) + "\"];\n";
        for (auto& c : n.children) {
            int cid = node_dot(c, next_id, out);
            out += "  n" + std::to_string(id) + " -> n" + std::to_string(cid) + ";\n";
        }
        return id;
    }
};

constexpr int kMaxDecomposeDepth = 32;

namespace detail {

inline SubGoalNode decompose_node(const KnowledgeBase& kb, const Goal& goal, int depth) {
    if (depth > kMaxDecomposeDepth)
        throw DecompositionError("decomposition exceeded depth " +
                                 std::to_string(kMaxDecomposeDepth) + " at \"" + goal.object + "\"");
    SubGoalNode node{goal, {}};
    if (goal.material)
        for (auto& [item, n] : *goal.material)
            node.children.push_back(decompose_node(kb, make_goal(kb, item, n), depth + 1));
    if (goal.tool)
        node.children.push_back(decompose_node(kb, make_goal(kb, *goal.tool, 1), depth + 1));
    return node;
}

}  // namespace detail

inline SubGoalTree decompose(const KnowledgeBase& kb, const Goal& goal) {
    return SubGoalTree{detail::decompose_node(kb, goal, 0)};
}

inline SubGoalTree decompose(const KnowledgeBase& kb, const std::string& object, int count = 1) {
    return decompose(kb, make_goal(kb, object, count));
}

// Post-order schedule: children (materials, then tool) before parents.
inline std::vector<Goal> schedule(const SubGoalTree& tree) {
    std::vector<Goal> out;
    std::function<void(const SubGoalNode&)> walk = [&](const SubGoalNode& n) {
        for (auto& c : n.children) walk(c);
        out.push_back(n.goal);
    };
    walk(tree.root);
    return out;
}

}  // namespace voxagent
