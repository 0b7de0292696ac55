#pragma once

// Planner protocol: query rendering, response parsing, and the closed
// feedback loop that turns one sub-goal into executed actions.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "memory.hpp"

namespace voxagent {

struct ChatMessage {
    std::string role;  // system | user | assistant
    std::string content;

    json to_json() const { return {{"role", role}, {"content", content}}; }
};

// Transport-level provider failure: an infrastructure error, distinct from a
// plan that parses badly or fails in the world.
struct ProviderError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

class PlanProvider {
  public:
    virtual ~PlanProvider() = default;
    // One chat completion over the full transcript; returns the raw text.
    // Throws ProviderError when the provider itself is unreachable.
    virtual std::string complete(const std::vector<ChatMessage>& transcript) = 0;
};

struct PlanResponse {
    std::optional<std::string> explanation;
    std::string thoughts;
    std::vector<StructuredAction> actions;
};

// ===================== rendering =====================

inline const std::string& render_instruction() {
    static const std::string text =
        "You serve as an assistant that helps me play a voxel survival game.\n"
        "\n"
        "I will give you the following information:\n"
        "My current state:\n"
        "- inventory: a JSON dict mapping the items I own to their counts\n"
        "- environment: the biome I am in, my y-level, and whether I am on the ground or "
        "underground\n"
        "\n"
        "The goal is to obtain {count} {object}, given {material} and {tool}. Extra info: "
        "{info}\n"
        "- object: the item I want to obtain\n"
        "- count: how many I need\n"
        "- material: a JSON dict of the materials its recipe consumes, or null\n"
        "- tool: the tool the goal depends on, or null; a crafting_table or furnace here means "
        "the recipe is crafted at that station\n"
        "- info: extra knowledge about the object, may be absent\n"
        "\n"
        "Sometimes I will give you one plan that achieved a similar goal before, as:\n"
        "Here is one plan to achieve similar goal for reference: [...]\n"
        "\n"
        "You must follow the following criteria:\n"
        "1) You should respond with a list of structured actions that obtains the goal from my "
        "current state.\n"
        "2) Every action must be one of the actions described below. Do not invent actions.\n"
        "3) A tool must be in my inventory before an action uses it. Crafting stations "
        "(crafting_table, furnace) are used from the inventory and are not consumed.\n"
        "4) I will execute your action list in order. If some action fails, I will stop at that "
        "action and tell you why it failed, and you revise the plan from the failed action. Do "
        "not repeat an action that already succeeded.\n"
        "5) Keep the plan minimal: do not add actions the goal does not need.\n"
        "\n"
        "The actions are:\n\n" +
        action_catalog_text() +
        "\n\n"
        "You should only respond in JSON format as described below:\n"
        "{\n"
        "  \"explanation\": \"explain why the last action failed, set to null for the first "
        "planning\",\n"
        "  \"thoughts\": \"your thoughts on the plan\",\n"
        "  \"action_list\": [\n"
        "    {\"name\": \"the action name\", \"args\": {\"the\": \"action arguments\"}, "
        "\"expectation\": \"what this action should achieve\"}\n"
        "  ]\n"
        "}\n"
        "Wrap the JSON inside a pair of ``` fences. Ensure that you response can be parsed by "
        "Python `json.loads`.";
    return text;
}

inline json inventory_json(const std::map<std::string, int>& inv) {
    json o = json::object();
    for (auto& [k, v] : inv) o[k] = v;
    return o;
}

inline std::string render_state_block(const ActionResult::Snapshot& s) {
    return "My current state:\n- inventory: " + inventory_json(s.inventory).dump() +
           "\n- environment: " + s.biome + " biome, y-level " + std::to_string(s.y_level) +
           (s.ground == GroundStatus::on_ground ? ", on the ground" : ", underground");
}

inline std::string render_goal_sentence(const Goal& g) {
    std::string material = "null";
    if (g.material) {
        json m = json::object();
        for (auto& [k, v] : *g.material) m[k] = v;
        material = m.dump();
    }
    std::string s = "The goal is to obtain " + std::to_string(g.count) + " " + g.object +
                    ", given " + material + " and " + (g.tool ? *g.tool : "null") + ".";
    if (!g.info.empty()) s += " Extra info: " + g.info;
    return s;
}

inline std::string render_first_query(const Goal& goal, const ActionResult::Snapshot& state,
                                      const std::optional<std::vector<StructuredAction>>& reference) {
    std::string q = render_state_block(state) + "\n\n" + render_goal_sentence(goal) + "\n\n";
    if (reference && !reference->empty()) {
        json arr = json::array();
        for (const auto& a : *reference) arr.push_back(a.to_json());
        q += "Here is one plan to achieve similar goal for reference: " + arr.dump() + ".\n\n";
    }
    q += "Begin your plan. Remember to follow the response format.";
    return q;
}

struct FeedbackMessage {
    bool succeeded = false;
    std::string action;
    std::string detail;  // empty under the no-feedback ablation
};

inline FeedbackMessage make_feedback(const StructuredAction& a, const ActionResult& r) {
    FeedbackMessage fb;
    fb.succeeded = r.success;
    fb.action = normalize_action_name(a.name);
    if (r.success) {
        json delta = json::object();
        for (auto& [k, v] : r.inventory_delta) delta[k] = v;
        std::string change =
            r.inventory_delta.empty() ? "no inventory change" : "inventory change: " + delta.dump();
        fb.detail = r.message.empty() ? change : r.message + "; " + change;
    } else {
        fb.detail = std::string(failure_name(r.reason.value_or(FailureReason::api_failure))) + ": " +
                    r.message;
    }
    return fb;
}

// Follow-up query. With feedback, the detail clause carries the reason and the
// refreshed state; the no-feedback ablation keeps only the bare outcome.
inline std::string render_followup(const FeedbackMessage& fb, const std::string& state_block,
                                   bool no_feedback) {
    std::string q = "Action " + fb.action;
    if (fb.succeeded) {
        q += no_feedback ? " succeeded." : " succeeded, and " + fb.detail + ".";
        if (!no_feedback && !state_block.empty()) q += "\n" + state_block + "\n";
        else q += " ";
        q += "Continue your plan. Do not repeat successful action. Remember to follow the "
             "response format.";
    } else {
        q += no_feedback ? " failed." : " failed, because " + fb.detail + ".";
        if (!no_feedback && !state_block.empty()) q += "\n" + state_block + "\n";
        else q += " ";
        q += "Revise your plan from the failed action. Remember to follow the response format.";
    }
    return q;
}

inline std::string render_parse_feedback(const std::string& description) {
    return "Your last response could not be parsed, because " + description +
           ". Revise your plan. Remember to follow the response format.";
}

inline std::string render_empty_feedback() {
    return "Your last response contained no actions. Revise your plan. Remember to follow the "
           "response format.";
}

// ===================== parsing =====================

// Extract {explanation, thoughts, action_list} from raw provider text.
// Throws ParseError (always with a non-empty description) on anything
// malformed; never crashes on hostile input.
inline PlanResponse parse_response(const std::string& text) {
    std::string body = text;
    auto fence = body.find("```");
    if (fence != std::string::npos) {
        size_t start = fence + 3;
        size_t close = body.find("```", start);
        body = close == std::string::npos ? body.substr(start) : body.substr(start, close - start);
    }
    auto lo = body.find('{');
    auto hi = body.rfind('}');
    if (lo == std::string::npos || hi == std::string::npos || hi < lo)
        throw ParseError("the response contains no JSON object");
    json doc = json::parse(body.substr(lo, hi - lo + 1), nullptr, false);
    if (doc.is_discarded()) throw ParseError("the response is not valid JSON");
    if (!doc.is_object()) throw ParseError("the response JSON is not an object");

    PlanResponse r;
    if (doc.contains("explanation")) {
        const json& e = doc.at("explanation");
        if (e.is_string())
            r.explanation = e.get<std::string>();
        else if (!e.is_null())
            throw ParseError("explanation must be text or null");
    }
    if (doc.contains("thoughts")) {
        const json& t = doc.at("thoughts");
        if (t.is_string())
            r.thoughts = t.get<std::string>();
        else if (!t.is_null())
            throw ParseError("thoughts must be text");
    }
    if (!doc.contains("action_list") || !doc.at("action_list").is_array())
        throw ParseError("the response is missing the action_list array");
    int idx = 0;
    for (const auto& a : doc.at("action_list")) {
        try {
            r.actions.push_back(parse_structured_action(a));
        } catch (const ParseError& e) {
            throw ParseError("action_list[" + std::to_string(idx) + "]: " + e.what());
        }
        ++idx;
    }
    return r;
}

// ===================== the closed loop =====================

enum class SubGoalStatus : uint8_t { achieved, query_limit, step_limit };

inline const char* subgoal_status_name(SubGoalStatus s) {
    switch (s) {
        case SubGoalStatus::achieved: return "achieved";
        case SubGoalStatus::query_limit: return "query_limit";
        case SubGoalStatus::step_limit: return "step_limit";
    }
    return "query_limit";
}

struct SubGoalOptions {
    int max_queries = 30;
    bool no_feedback = false;
    MemoryStore* memory = nullptr;  // null disables retrieve and record
    std::string episode_id;
    uint64_t seed = 0;
    json* transcript = nullptr;  // appended with {role, content} records
};

struct SubGoalResult {
    SubGoalStatus status = SubGoalStatus::query_limit;
    int queries = 0;
    int parse_errors = 0;
    bool used_reference = false;
    std::vector<StructuredAction> executed;  // every successful action, in order
};

inline ActionResult::Snapshot current_state(const Executor& ex) {
    ActionResult::Snapshot s;
    s.inventory = ex.agent.inventory;
    s.biome = ex.world.biome_at(ex.agent.feet().x, ex.agent.feet().z);
    s.y_level = ex.agent.feet().y;
    s.ground = ex.agent.ground;
    return s;
}

// Drive one sub-goal to completion: query the provider, execute the action
// list in order, stop at the first failure, feed the outcome back, repeat.
inline SubGoalResult run_subgoal(Executor& ex, PlanProvider& provider, const Goal& goal,
                                 const SubGoalOptions& opt = {}) {
    SubGoalResult res;
    const std::string want = ex.kb.canonical(goal.object);
    auto satisfied = [&] { return ex.agent.count(want) >= goal.count; };
    if (satisfied()) {  // the goal is already in the inventory: zero queries
        res.status = SubGoalStatus::achieved;
        return res;
    }

    std::vector<ChatMessage> msgs;
    auto say = [&](std::string role, std::string content) {
        msgs.push_back({std::move(role), std::move(content)});
        if (opt.transcript) opt.transcript->push_back(msgs.back().to_json());
    };
    say("system", render_instruction());

    std::optional<std::vector<StructuredAction>> reference;
    if (opt.memory) {
        if (auto ref = opt.memory->retrieve(goal_key(goal))) {
            reference = ref->actions;
            res.used_reference = true;
        }
    }
    say("user", render_first_query(goal, current_state(ex), reference));

    while (true) {
        if (res.queries >= opt.max_queries) {
            res.status = SubGoalStatus::query_limit;
            return res;
        }
        if (ex.budget_exhausted()) {
            res.status = SubGoalStatus::step_limit;
            return res;
        }
        std::string text = provider.complete(msgs);
        ++res.queries;
        say("assistant", text);

        PlanResponse plan;
        try {
            plan = parse_response(text);
        } catch (const ParseError& e) {
            ++res.parse_errors;
            say("user", render_parse_feedback(e.what()));
            continue;
        }
        if (plan.actions.empty()) {
            say("user", render_empty_feedback());
            continue;
        }

        FeedbackMessage fb;
        ActionResult last;
        for (const auto& a : plan.actions) {
            last = ex.execute(a);
            fb = make_feedback(a, last);
            if (!last.success) break;
            res.executed.push_back(a);
            if (satisfied()) break;
        }
        if (satisfied()) {
            if (opt.memory) {
                ActionSequence seq;
                seq.actions = res.executed;
                seq.episode_id = opt.episode_id;
                seq.seed = opt.seed;
                opt.memory->record(goal_key(goal), seq);
            }
            res.status = SubGoalStatus::achieved;
            return res;
        }
        if (ex.budget_exhausted()) {
            res.status = SubGoalStatus::step_limit;
            return res;
        }
        say("user", render_followup(fb, opt.no_feedback ? "" : render_state_block(last.state),
                                    opt.no_feedback));
    }
}

}  // namespace voxagent
