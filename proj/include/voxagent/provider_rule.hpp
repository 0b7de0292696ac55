#pragma once

// Deterministic plan provider. It sees only the transcript text plus static
// knowledge (recipes and facts), reconstructs the goal and agent state from
// the rendered queries, and replies with the plan a careful player would
// write: craft from what is on hand, dive to the level named in the extra
// info for buried ores, hunt creatures on the surface, and repair failed
// crafts by acquiring the missing consumables.

#include <cctype>
#include <cstdlib>
#include <string>
#include <vector>

#include "planner.hpp"

namespace voxagent {

class RuleProvider : public PlanProvider {
  public:
    explicit RuleProvider(const KnowledgeBase& kb) : kb_(kb) {}

    std::string complete(const std::vector<ChatMessage>& transcript) override {
        Ctx c = parse_transcript(transcript);
        std::vector<StructuredAction> plan = decide(c);
        json arr = json::array();
        for (const auto& a : plan) arr.push_back(a.to_json());
        json doc = {{"explanation",
                     c.turn == Turn::begin ? json(nullptr) : json(turn_explanation(c))},
                    {"thoughts", c.thoughts},
                    {"action_list", std::move(arr)}};
        return "```\n" + doc.dump() + "\n```";
    }

  private:
    const KnowledgeBase& kb_;

    enum class Turn { begin, success, failure, replan };

    struct Ctx {
        std::map<std::string, int> inventory;
        std::string biome = "plains";
        int y = 60;
        bool underground = false;

        std::string object;
        int count = 1;
        std::string tool;  // empty = null
        std::string info;
        bool has_reference = false;

        Turn turn = Turn::begin;
        std::string turn_action;
        std::string fail_code;
        std::string fail_message;
        std::string thoughts;
    };

    // ---- text extraction ----

    static std::optional<std::string> after(const std::string& s, const std::string& key) {
        auto p = s.find(key);
        if (p == std::string::npos) return std::nullopt;
        return s.substr(p + key.size());
    }

    static std::string first_line(const std::string& s) {
        auto e = s.find('\n');
        return e == std::string::npos ? s : s.substr(0, e);
    }

    static void parse_state(const std::string& text, Ctx& c) {
        if (auto inv = after(text, "- inventory: ")) {
            json j = json::parse(first_line(*inv), nullptr, false);
            if (j.is_object()) {
                c.inventory.clear();
                for (auto it = j.begin(); it != j.end(); ++it)
                    if (it.value().is_number_integer()) c.inventory[it.key()] = it.value().get<int>();
            }
        }
        if (auto env = after(text, "- environment: ")) {
            std::string e = first_line(*env);
            auto b = e.find(" biome, y-level ");
            if (b != std::string::npos) {
                c.biome = e.substr(0, b);
                c.y = std::atoi(e.c_str() + b + 16);
                c.underground = e.find(", underground") != std::string::npos;
            }
        }
    }

    void parse_goal(const std::string& text, Ctx& c) const {
        auto g = after(text, "The goal is to obtain ");
        if (!g) return;
        const std::string& s = *g;
        size_t i = 0;
        int n = 0;
        while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i])))
            n = n * 10 + (s[i++] - '0');
        c.count = n > 0 ? n : 1;
        if (i < s.size() && s[i] == ' ') ++i;
        auto given = s.find(", given ", i);
        if (given == std::string::npos) return;
        c.object = s.substr(i, given - i);
        size_t m0 = given + 8;
        auto andp = s.find(" and ", m0);
        if (andp == std::string::npos) return;
        size_t t0 = andp + 5;
        auto dot = s.find('.', t0);
        if (dot == std::string::npos) dot = s.size();
        std::string tool = s.substr(t0, dot - t0);
        c.tool = tool == "null" ? "" : tool;
        if (auto inf = after(s, " Extra info: ")) c.info = first_line(*inf);
    }

    void parse_reference(const std::string& text, Ctx& c) const {
        auto r = after(text, "Here is one plan to achieve similar goal for reference: ");
        if (!r) return;
        std::string line = first_line(*r);
        auto rb = line.rfind(']');
        if (rb == std::string::npos) return;
        json arr = json::parse(line.substr(0, rb + 1), nullptr, false);
        if (!arr.is_array() || arr.empty()) return;
        // the reference steers planning; its actions are not replayed verbatim
        c.has_reference = true;
    }

    static void parse_turn(const std::string& text, Ctx& c) {
        if (text.rfind("Your last response", 0) == 0) {
            c.turn = Turn::replan;
            return;
        }
        if (text.rfind("Action ", 0) != 0) return;
        std::string s = text.substr(7);
        auto sp = s.find(' ');
        if (sp == std::string::npos) return;
        c.turn_action = s.substr(0, sp);
        c.turn = s.compare(sp + 1, 7, "succeed") == 0 ? Turn::success : Turn::failure;
        if (auto because = after(s, " failed, because ")) {
            std::string rest = *because;
            size_t stop = rest.find(". My current state");
            if (stop == std::string::npos) stop = rest.find(". Revise your plan");
            if (stop == std::string::npos) stop = rest.size();
            auto colon = rest.find(':');
            if (colon != std::string::npos && colon < stop) {
                c.fail_code = rest.substr(0, colon);
                c.fail_message = rest.substr(colon + 2, stop - colon - 2);
            }
        }
        parse_state(text, c);  // refreshes state when feedback carries it
    }

    Ctx parse_transcript(const std::vector<ChatMessage>& transcript) const {
        Ctx c;
        const std::string* first_user = nullptr;
        const std::string* last_user = nullptr;
        for (const auto& m : transcript) {
            if (m.role != "user") continue;
            if (!first_user) first_user = &m.content;
            last_user = &m.content;
        }
        if (first_user) {
            parse_state(*first_user, c);
            parse_goal(*first_user, c);
            parse_reference(*first_user, c);
        }
        if (last_user && last_user != first_user) parse_turn(*last_user, c);
        return c;
    }

    static std::string turn_explanation(const Ctx& c) {
        switch (c.turn) {
            case Turn::failure:
                return "action " + c.turn_action + " failed with " +
                       (c.fail_code.empty() ? std::string("no detail") : c.fail_code) +
                       "; revising from there";
            case Turn::success: return "the plan ran out of actions before the goal was met";
            case Turn::replan: return "the previous response was rejected; replanning";
            default: return "";
        }
    }

    // ---- plan assembly ----

    static json null_or(const std::string& s) { return s.empty() ? json(nullptr) : json(s); }

    static StructuredAction act(std::string name, json args, std::string expect) {
        StructuredAction a;
        a.name = std::move(name);
        a.args = std::move(args);
        a.expectation = std::move(expect);
        return a;
    }

    static StructuredAction craft_like(const std::string& item, int n, const Recipe& r) {
        const char* verb = r.station == Station::furnace ? "smelt" : "craft";
        return act(verb, {{"object", item}, {"count", n}}, "obtain " + std::to_string(n) + " " + item);
    }

    static int count_in(const std::map<std::string, int>& inv, const std::string& item) {
        auto it = inv.find(item);
        return it == inv.end() ? 0 : it->second;
    }

    // Level named by the extra info: the mean of the first two integers, or
    // the single integer when only one appears. Absent info means surface.
    static std::optional<int> depth_from_info(const std::string& info) {
        std::vector<int> nums;
        for (size_t i = 0; i < info.size() && nums.size() < 2;) {
            if (std::isdigit(static_cast<unsigned char>(info[i]))) {
                int v = 0;
                while (i < info.size() && std::isdigit(static_cast<unsigned char>(info[i])))
                    v = v * 10 + (info[i++] - '0');
                nums.push_back(v);
            } else {
                ++i;
            }
        }
        std::optional<int> d;
        if (nums.size() == 2) d = (nums[0] + nums[1]) / 2;
        else if (nums.size() == 1) d = nums[0];
        if (d && (*d < 1 || *d > 255)) d.reset();
        return d;
    }

    // Acquisition plan for one fact-backed item from the current situation.
    std::vector<StructuredAction> acquisition(const Ctx& c, const std::string& obj, int n,
                                              const std::string& tool, const std::string& info) const {
        std::vector<StructuredAction> out;
        const FactEntry* f = kb_.fact(obj);
        if (!f) return out;
        const FactHints& h = f->hints;

        if (h.source == "mob") {
            std::string mob = h.mob.value_or(obj);
            for (int i = 0; i < n; ++i) {
                out.push_back(act("explore", {{"object", mob}, {"strategy", "bfs_ground"}},
                                  "sight a " + mob));
                out.push_back(act("attack", {{"object", mob}, {"tool", null_or(tool)}},
                                  "collect " + obj + " from the " + mob));
            }
            return out;
        }
        if (h.source == "apply") {
            std::string target = h.target.value_or(obj);
            std::string use_tool = tool.empty() ? h.tool.value_or("") : tool;
            for (int i = 0; i < n; ++i) {
                out.push_back(act("explore", {{"object", target}, {"strategy", "bfs_ground"}},
                                  "sight " + target));
                out.push_back(act("approach", {{"object", target}}, "stand next to " + target));
                out.push_back(act("apply", {{"object", obj}, {"tool", null_or(use_tool)}},
                                  "obtain " + obj));
            }
            return out;
        }

        // mined: either on the surface or at the level the info names
        std::optional<int> depth = depth_from_info(info);
        if (c.underground) {
            if (depth && std::abs(c.y - *depth) <= 1) {
                out.push_back(act("explore", {{"object", obj}, {"strategy", "dfs_underground"}},
                                  "tunnel until " + obj + " is sighted"));
                out.push_back(act("approach", {{"object", obj}}, "reach the " + obj));
                out.push_back(act("mine", {{"object", obj}, {"tool", null_or(tool)}, {"count", n}},
                                  "collect " + std::to_string(n) + " " + obj));
                out.push_back(act("go_up", {{"tool", null_or(tool)}}, "return to the surface"));
            } else {
                // wrong level: surface first, the next query replans from there
                out.push_back(act("go_up", {{"tool", null_or(tool)}}, "return to the surface"));
            }
            return out;
        }
        if (depth && *depth < c.y) {
            int have_dirt = count_in(c.inventory, "dirt");
            int fill = (c.y - *depth) + 8 - have_dirt;
            // when the top-up itself keeps failing (soil exhausted around the
            // dig site), dive anyway as long as the stock covers the descent
            bool dirt_stall = c.turn == Turn::failure && c.turn_action == "mine" &&
                              c.fail_message.find("dirt") != std::string::npos;
            if (dirt_stall && have_dirt >= c.y - *depth) fill = 0;
            if (fill > 0)
                out.push_back(act("mine", {{"object", "dirt"}, {"tool", nullptr}, {"count", fill}},
                                  "stock dirt for the climb back up"));
            out.push_back(act("dig_down", {{"ylevel", *depth}, {"tool", null_or(tool)}},
                              "reach level " + std::to_string(*depth)));
            out.push_back(act("explore", {{"object", obj}, {"strategy", "dfs_underground"}},
                              "tunnel until " + obj + " is sighted"));
            out.push_back(act("approach", {{"object", obj}}, "reach the " + obj));
            out.push_back(act("mine", {{"object", obj}, {"tool", null_or(tool)}, {"count", n}},
                              "collect " + std::to_string(n) + " " + obj));
            out.push_back(act("go_up", {{"tool", null_or(tool)}}, "return to the surface"));
            return out;
        }
        out.push_back(act("explore", {{"object", obj}, {"strategy", "bfs_ground"}}, "sight " + obj));
        out.push_back(act("approach", {{"object", obj}}, "stand next to " + obj));
        out.push_back(act("mine", {{"object", obj}, {"tool", null_or(tool)}, {"count", n}},
                          "collect " + std::to_string(n) + " " + obj));
        return out;
    }

    // Inventory-aware completion: simulate consumption over a copy of the
    // inventory, acquiring or crafting whatever is short, missing amounts
    // only. Stations are ensured present but never consumed. Tools that are
    // plainly absent are left absent: acquiring them is the decomposer's job.
    std::vector<StructuredAction> completion(const Ctx& c, const std::string& obj, int n) const {
        std::vector<StructuredAction> out;
        std::map<std::string, int> inv = c.inventory;
        int guard = 0;

        std::function<void(const std::string&, int, bool)> obtain =
            [&](const std::string& item, int want, bool root) {
                if (++guard > 64) return;
                int& have = inv[item];
                if (have >= want) {
                    have -= want;
                    return;
                }
                int missing = want - have;
                have = 0;
                if (const Recipe* r = kb_.recipe(item)) {
                    if (r->tool) {
                        std::string station = kb_.canonical(*r->tool);
                        if (inv[station] < 1) {
                            obtain(station, 1, false);
                            inv[station] += 1;  // used in place, not consumed
                        }
                    }
                    int units = (missing + r->output_count - 1) / r->output_count;
                    for (const auto& [m, k] : r->materials) obtain(kb_.canonical(m), units * k, false);
                    out.push_back(craft_like(item, missing, *r));
                    inv[item] += units * r->output_count - missing;
                } else if (kb_.fact(item)) {
                    std::string tool = c.tool;
                    std::string info = c.info;
                    if (!root) {
                        Goal sub = make_goal(kb_, item, missing);
                        tool = sub.tool.value_or("");
                        info = sub.info;
                    }
                    auto steps = acquisition(c, item, missing, tool, info);
                    out.insert(out.end(), steps.begin(), steps.end());
                }
                // unknown items fall through: the craft will fail and say so
            };
        obtain(obj, n, true);
        return out;
    }

    std::vector<StructuredAction> decide(Ctx& c) const {
        std::string obj = kb_.canonical(c.object);
        int need = c.count - count_in(c.inventory, obj);
        if (need < 1) need = 1;
        const Recipe* r = kb_.recipe(obj);

        if (c.turn == Turn::failure && c.fail_code == "insufficient_materials") {
            if (c.turn_action == "go_up") {
                // short of pillar dirt underground: scrape tunnel walls
                std::vector<int> nums;
                for (size_t i = 0; i < c.fail_message.size() && nums.size() < 2;) {
                    if (std::isdigit(static_cast<unsigned char>(c.fail_message[i]))) {
                        int v = 0;
                        while (i < c.fail_message.size() &&
                               std::isdigit(static_cast<unsigned char>(c.fail_message[i])))
                            v = v * 10 + (c.fail_message[i++] - '0');
                        nums.push_back(v);
                    } else {
                        ++i;
                    }
                }
                int short_by = nums.size() == 2 ? nums[0] - nums[1] : 8;
                c.thoughts = "gather dirt from the tunnel walls, then pillar up";
                return {act("mine", {{"object", "dirt"}, {"tool", nullptr}, {"count", short_by + 2}},
                            "restock pillar dirt"),
                        act("go_up", {{"tool", null_or(c.tool)}}, "return to the surface")};
            }
            c.thoughts = "acquire the missing materials, then finish the goal";
            return completion(c, obj, c.count);  // consumes stock internally
        }
        if (c.has_reference) {
            c.thoughts = "follow the reference plan, adjusted to what is already on hand";
            return completion(c, obj, c.count);
        }
        if (r) {
            c.thoughts = "the materials should be on hand; craft directly";
            return {craft_like(obj, need, *r)};
        }
        c.thoughts = "acquire " + std::to_string(need) + " " + obj;
        return acquisition(c, obj, need, c.tool, c.info);
    }
};

}  // namespace voxagent
