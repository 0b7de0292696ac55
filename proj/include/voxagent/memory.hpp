#pragma once

// Text memory: per-goal lists of recorded action sequences with periodic
// summarization into a single reference plan.

#include <algorithm>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "actions.hpp"

namespace voxagent {

// Memory is keyed by the goal's object name; count/material/tool variants of
// the same object share one list.
inline std::string goal_key(const Goal& g) { return g.object; }

struct ActionSequence {
    std::vector<StructuredAction> actions;
    std::string episode_id;
    uint64_t seed = 0;
    bool is_summary = false;
    bool warning = false;  // heuristic summarizer found no common core

    json to_json() const {
        json acts = json::array();
        for (const auto& a : actions) acts.push_back(a.to_json());
        return json{{"actions", std::move(acts)},
                    {"episode", episode_id},
                    {"seed", seed},
                    {"warning", warning}};
    }

    static ActionSequence from_json(const json& j) {
        ActionSequence s;
        if (j.contains("actions") && j.at("actions").is_array())
            for (const auto& a : j.at("actions")) s.actions.push_back(parse_structured_action(a));
        s.episode_id = j.value("episode", std::string{});
        s.seed = j.value("seed", uint64_t{0});
        s.warning = j.value("warning", false);
        return s;
    }
};

// Plain (name, object) view of an action, the unit of sequence comparison.
inline std::pair<std::string, std::string> action_pair_key(const StructuredAction& a) {
    std::string object;
    if (a.args.contains("object")) {
        const json& o = a.args.at("object");
        if (o.is_string())
            object = o.get<std::string>();
        else if (!o.is_null())
            object = o.dump();
    }
    return {a.name, object};
}

namespace detail {

// Longest common subsequence of a and b under (name, object) equality,
// keeping a's elements (and therefore a's ordering and args).
inline std::vector<StructuredAction> lcs_keep_left(const std::vector<StructuredAction>& a,
                                                   const std::vector<StructuredAction>& b) {
    const size_t n = a.size(), m = b.size();
    std::vector<std::pair<std::string, std::string>> ka(n), kb(m);
    for (size_t i = 0; i < n; ++i) ka[i] = action_pair_key(a[i]);
    for (size_t j = 0; j < m; ++j) kb[j] = action_pair_key(b[j]);

    // dp[i][j] = LCS length of a[i:], b[j:]
    std::vector<std::vector<int>> dp(n + 1, std::vector<int>(m + 1, 0));
    for (size_t i = n; i-- > 0;)
        for (size_t j = m; j-- > 0;)
            dp[i][j] = (ka[i] == kb[j]) ? dp[i + 1][j + 1] + 1
                                        : std::max(dp[i + 1][j], dp[i][j + 1]);

    std::vector<StructuredAction> out;
    size_t i = 0, j = 0;
    while (i < n && j < m) {
        if (ka[i] == kb[j]) {
            out.push_back(a[i]);
            ++i, ++j;
        } else if (dp[i + 1][j] >= dp[i][j + 1]) {
            ++i;
        } else {
            ++j;
        }
    }
    return out;
}

}  // namespace detail

// Deterministic fallback summarizer: the common action core across all
// sequences, ordered as in seqs[0] and carrying seqs[0]'s arguments. When
// nothing is common, returns seqs[0] unchanged with the warning flag set.
inline ActionSequence heuristic_summarize(const std::vector<ActionSequence>& seqs) {
    ActionSequence out;
    out.is_summary = true;
    if (seqs.empty()) {
        out.warning = true;
        return out;
    }
    std::vector<StructuredAction> core = seqs[0].actions;
    for (size_t k = 1; k < seqs.size() && !core.empty(); ++k)
        core = detail::lcs_keep_left(core, seqs[k].actions);
    if (core.empty()) {
        out.actions = seqs[0].actions;
        out.warning = true;
    } else {
        out.actions = std::move(core);
    }
    out.episode_id = "summary";
    return out;
}

// Prompt pair for provider-backed summarization.
struct SummarizePrompt {
    std::string system;
    std::string user;
};

inline SummarizePrompt render_summarize_prompt(const std::string& key,
                                               const std::vector<ActionSequence>& seqs) {
    SummarizePrompt p;
    p.system =
        "You are an assistant for a voxel survival game. I will give you several action "
        "sequences that each achieved the same goal on different maps. Summarize them into "
        "one common action sequence that keeps only the actions shared by the runs, in their "
        "shared order, so it is most likely to succeed on a new map.\n\n"
        "The actions are drawn from this catalog:\n\n" +
        action_catalog_text() +
        "\n\nYou should respond in the following format:\n"
        "Thoughts: your thoughts on what the sequences have in common\n"
        "Summarized action sequence: [the common actions as a JSON list]\n\n"
        "Ensure the summarized action sequence is a JSON list of objects with keys "
        "\"name\" and \"args\", and that it can be parsed by Python `json.loads`.";
    std::string u = "The goal is to obtain " + key + ". Here are the recorded action sequences:\n";
    for (size_t i = 0; i < seqs.size(); ++i) {
        json acts = json::array();
        for (const auto& a : seqs[i].actions) acts.push_back(a.to_json());
        u += "\nSequence " + std::to_string(i + 1) + ": " + acts.dump();
    }
    u += "\n\nBegin your summary. Remember to follow the response format.";
    p.user = std::move(u);
    return p;
}

// Extract the summarized action list from a provider response.
inline std::vector<StructuredAction> parse_summary_response(const std::string& text) {
    std::string region = text;
    auto marker = region.find("Summarized action sequence");
    if (marker != std::string::npos) region = region.substr(marker);
    auto lo = region.find('[');
    auto hi = region.rfind(']');
    if (lo == std::string::npos || hi == std::string::npos || hi < lo)
        throw ParseError("summary response has no JSON action list");
    json arr = json::parse(region.substr(lo, hi - lo + 1), nullptr, false);
    if (arr.is_discarded() || !arr.is_array())
        throw ParseError("summary action list is not valid JSON");
    std::vector<StructuredAction> out;
    for (const auto& a : arr) out.push_back(parse_structured_action(a));
    if (out.empty()) throw ParseError("summary action list is empty");
    return out;
}

constexpr int kSummarizeBatch = 5;

class MemoryStore {
  public:
    // Replaces the batch summarizer (key, sequences) -> summary sequence.
    using Summarizer = std::function<ActionSequence(const std::string&, const std::vector<ActionSequence>&)>;

    MemoryStore() = default;

    void set_summarizer(Summarizer s) {
        std::lock_guard<std::mutex> lk(mu_);
        summarizer_ = std::move(s);
    }

    // Append a successful sequence; when the list reaches the batch size the
    // whole list (any previous summary included) collapses into one summary
    // at position 0.
    void record(const std::string& key, ActionSequence seq) {
        std::lock_guard<std::mutex> lk(mu_);
        seq.is_summary = false;
        auto& list = entries_[key];
        list.push_back(std::move(seq));
        if (static_cast<int>(list.size()) >= kSummarizeBatch) {
            std::vector<ActionSequence> batch;
            batch.swap(list);
            ActionSequence s = summarizer_ ? summarizer_(key, batch) : heuristic_summarize(batch);
            s.is_summary = true;
            list.push_back(std::move(s));
        }
    }

    // The reference plan for a goal: position 0 of its list (the summary when
    // one exists, else the earliest recording). Empty for unknown keys.
    std::optional<ActionSequence> retrieve(const std::string& key) const {
        std::lock_guard<std::mutex> lk(mu_);
        auto it = entries_.find(key);
        if (it == entries_.end() || it->second.empty()) return std::nullopt;
        return it->second.front();
    }

    bool has_summary(const std::string& key) const {
        std::lock_guard<std::mutex> lk(mu_);
        auto it = entries_.find(key);
        return it != entries_.end() && !it->second.empty() && it->second.front().is_summary;
    }

    size_t list_size(const std::string& key) const {
        std::lock_guard<std::mutex> lk(mu_);
        auto it = entries_.find(key);
        return it == entries_.end() ? 0 : it->second.size();
    }

    std::vector<std::string> keys() const {
        std::lock_guard<std::mutex> lk(mu_);
        std::vector<std::string> out;
        for (const auto& [k, v] : entries_) out.push_back(k);
        return out;
    }

    void clear() {
        std::lock_guard<std::mutex> lk(mu_);
        entries_.clear();
    }

    json to_json() const {
        std::lock_guard<std::mutex> lk(mu_);
        json out = json::object();
        for (const auto& [key, list] : entries_) {
            json e;
            size_t rest = 0;
            if (!list.empty() && list.front().is_summary) {
                e["summary"] = list.front().to_json();
                rest = 1;
            } else {
                e["summary"] = nullptr;
            }
            json recs = json::array();
            for (size_t i = rest; i < list.size(); ++i) recs.push_back(list[i].to_json());
            e["recordings"] = std::move(recs);
            out[key] = std::move(e);
        }
        return out;
    }

    void from_json(const json& j) {
        std::lock_guard<std::mutex> lk(mu_);
        entries_.clear();
        if (!j.is_object()) return;
        for (auto it = j.begin(); it != j.end(); ++it) {
            auto& list = entries_[it.key()];
            const json& e = it.value();
            if (e.contains("summary") && e.at("summary").is_object()) {
                ActionSequence s = ActionSequence::from_json(e.at("summary"));
                s.is_summary = true;
                list.push_back(std::move(s));
            }
            if (e.contains("recordings") && e.at("recordings").is_array())
                for (const auto& r : e.at("recordings")) list.push_back(ActionSequence::from_json(r));
        }
    }

    void save(const std::filesystem::path& path) const {
        std::ofstream f(path);
        if (!f) throw std::runtime_error("cannot write memory file: " + path.string());
        f << to_json().dump(2) << '\n';
    }

    void load(const std::filesystem::path& path) {
        from_json(detail::read_json_file(path));
    }

  private:
    mutable std::mutex mu_;
    std::map<std::string, std::vector<ActionSequence>> entries_;
    Summarizer summarizer_;
};

}  // namespace voxagent
