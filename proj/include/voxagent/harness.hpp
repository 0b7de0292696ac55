#pragma once

// Episode harness: seeds a world, decomposes the task, drives every sub-goal
// through the planner loop, and reports what happened. The suite runner adds
// the incremental testing schedule and shared memory across episodes.

#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include "decomposer.hpp"
#include "provider_rule.hpp"

namespace voxagent {

struct TaskSpec {
    std::string target = "diamond";
    int count = 1;
    uint64_t tick_limit = 12000;
    int query_limit = 30;  // per sub-goal
    bool no_decompose = false;
    bool no_feedback = false;
    bool no_info = false;
    bool no_memory = false;

    json flags_json() const {
        return {{"no_decompose", no_decompose},
                {"no_feedback", no_feedback},
                {"no_info", no_info},
                {"no_memory", no_memory}};
    }
};

struct SubGoalOutcome {
    std::string object;
    int count = 1;
    bool skipped = false;
    SubGoalStatus status = SubGoalStatus::achieved;
    int queries = 0;
    int parse_errors = 0;
    bool used_reference = false;

    json to_json() const {
        return {{"object", object},          {"count", count},
                {"skipped", skipped},        {"status", subgoal_status_name(status)},
                {"queries", queries},        {"parse_errors", parse_errors},
                {"used_reference", used_reference}};
    }
};

// Everything the run produced. Wall-clock time is deliberately absent: a
// rerun with the same seed and flags must serialize byte-identically.
struct EpisodeReport {
    std::string task;
    int count = 1;
    uint64_t seed = 0;
    json flags = json::object();
    bool success = false;
    std::string failure;  // "" | query_limit | step_limit | infrastructure
    uint64_t ticks_used = 0;
    int queries_used = 0;
    int parse_errors = 0;
    int subgoals_total = 0;
    int subgoals_run = 0;
    int subgoals_skipped = 0;
    std::vector<std::pair<std::string, uint64_t>> milestones;  // first acquisitions, tick order
    std::vector<SubGoalOutcome> outcomes;

    json to_json() const {
        json ms = json::array();
        for (const auto& [item, tick] : milestones) ms.push_back({{"item", item}, {"tick", tick}});
        json outs = json::array();
        for (const auto& o : outcomes) outs.push_back(o.to_json());
        return {{"task", task},
                {"count", count},
                {"seed", seed},
                {"flags", flags},
                {"success", success},
                {"failure", failure},
                {"ticks_used", ticks_used},
                {"queries_used", queries_used},
                {"parse_errors", parse_errors},
                {"subgoals_total", subgoals_total},
                {"subgoals_run", subgoals_run},
                {"subgoals_skipped", subgoals_skipped},
                {"milestones", std::move(ms)},
                {"subgoals", std::move(outs)}};
    }
};

namespace detail {

inline int tree_size(const SubGoalNode& n) {
    int total = 1;
    for (const auto& c : n.children) total += tree_size(c);
    return total;
}

inline void blank_info(SubGoalNode& n) {
    n.goal.info.clear();
    for (auto& c : n.children) blank_info(c);
}

}  // namespace detail

// One full episode: fresh world from `seed`, post-order walk of the sub-goal
// tree with run-time skipping of anything the inventory already covers.
inline EpisodeReport run_episode(const KnowledgeBase& kb, PlanProvider& provider,
                                 const TaskSpec& task, uint64_t seed,
                                 MemoryStore* memory = nullptr, json* transcript = nullptr) {
    WorldConfig cfg;
    cfg.seed = seed;
    World world = generate_world(cfg);
    AgentState agent = spawn_agent(world, seed);
    Executor ex(world, agent, kb);
    ex.deadline = task.tick_limit;

    EpisodeReport rep;
    rep.task = kb.canonical(task.target);
    rep.count = task.count;
    rep.seed = seed;
    rep.flags = task.flags_json();
    ex.on_first_acquire = [&rep](const std::string& item, uint64_t tick) {
        rep.milestones.emplace_back(item, tick);
    };

    Goal root = make_goal(kb, task.target, task.count);
    SubGoalTree tree =
        task.no_decompose ? SubGoalTree{SubGoalNode{root, {}}} : decompose(kb, root);
    if (task.no_info) detail::blank_info(tree.root);
    rep.subgoals_total = detail::tree_size(tree.root);

    const std::string episode_id = rep.task + "#" + std::to_string(seed);
    bool failed = false;

    std::function<void(const SubGoalNode&)> walk = [&](const SubGoalNode& n) {
        if (failed) return;
        if (ex.agent.count(kb.canonical(n.goal.object)) >= n.goal.count) {
            rep.subgoals_skipped++;
            SubGoalOutcome o;
            o.object = n.goal.object;
            o.count = n.goal.count;
            o.skipped = true;
            rep.outcomes.push_back(std::move(o));
            return;  // the whole subtree is already covered
        }
        for (const auto& c : n.children) {
            walk(c);
            if (failed) return;
        }
        SubGoalOptions opt;
        opt.max_queries = task.query_limit;
        opt.no_feedback = task.no_feedback;
        opt.memory = task.no_memory ? nullptr : memory;
        opt.episode_id = episode_id;
        opt.seed = seed;
        opt.transcript = transcript;
        SubGoalResult r = run_subgoal(ex, provider, n.goal, opt);
        rep.subgoals_run++;
        rep.queries_used += r.queries;
        rep.parse_errors += r.parse_errors;
        SubGoalOutcome o;
        o.object = n.goal.object;
        o.count = n.goal.count;
        o.status = r.status;
        o.queries = r.queries;
        o.parse_errors = r.parse_errors;
        o.used_reference = r.used_reference;
        rep.outcomes.push_back(std::move(o));
        if (r.status != SubGoalStatus::achieved) {
            failed = true;
            rep.failure = subgoal_status_name(r.status);
        }
    };

    try {
        walk(tree.root);
    } catch (const ProviderError&) {
        failed = true;
        rep.failure = "infrastructure";
    }
    rep.ticks_used = world.tick_count;
    rep.success = !failed && ex.agent.count(rep.task) >= task.count;
    return rep;
}

// ===================== suite running =====================

struct TaskStats {
    std::string target;
    int count = 1;
    int games = 0;
    int successes = 0;
    int infrastructure = 0;  // excluded from the rate denominator
    double rate = 0.0;
    std::vector<EpisodeReport> episodes;

    void finalize() {
        games = static_cast<int>(episodes.size());
        successes = 0;
        infrastructure = 0;
        for (const auto& e : episodes) {
            if (e.success) ++successes;
            if (e.failure == "infrastructure") ++infrastructure;
        }
        int counted = games - infrastructure;
        rate = counted > 0 ? static_cast<double>(successes) / counted : 0.0;
    }

    json to_json() const {
        json eps = json::array();
        for (const auto& e : episodes) eps.push_back(e.to_json());
        return {{"target", target},   {"count", count},
                {"games", games},     {"successes", successes},
                {"infrastructure", infrastructure}, {"rate", rate},
                {"episodes", std::move(eps)}};
    }
};

struct SuiteOptions {
    TaskSpec base;  // limits and ablation flags; target/count filled per task
    std::vector<std::pair<std::string, int>> tasks = {{"crafting_table", 1},
                                                      {"wooden_pickaxe", 1},
                                                      {"stone_pickaxe", 1},
                                                      {"iron_pickaxe", 1},
                                                      {"diamond", 1}};
    uint64_t seed_base = 1000;
    bool incremental = false;            // escalate games while successes <= 1
    std::vector<int> tiers = {20, 50, 100, 200};
    int fixed_games = 40;                // used when incremental is off
    bool use_memory = true;              // one store shared across the suite
    std::string out_dir;                 // empty: no files written
};

namespace detail {

inline void write_transcript(const std::filesystem::path& file, const json& transcript) {
    std::ofstream f(file);
    if (!f) return;
    for (const auto& m : transcript) f << m.dump() << '\n';
}

}  // namespace detail

// Run one task over consecutive seeds. With `incremental`, follow the
// escalation schedule: finish a tier, and if at most one episode succeeded,
// continue into the next tier; the rate comes from the final tier size.
inline TaskStats run_task(const KnowledgeBase& kb, PlanProvider& provider, TaskSpec task,
                          const SuiteOptions& opt, MemoryStore* memory) {
    TaskStats stats;
    stats.target = kb.canonical(task.target);
    stats.count = task.count;

    std::filesystem::path tdir;
    if (!opt.out_dir.empty()) {
        tdir = std::filesystem::path(opt.out_dir) / "transcripts";
        std::filesystem::create_directories(tdir);
    }

    std::vector<int> plan =
        opt.incremental ? opt.tiers : std::vector<int>{opt.fixed_games};
    size_t tier_idx = 0;
    int target_games = plan.empty() ? 0 : plan[0];
    while (true) {
        while (static_cast<int>(stats.episodes.size()) < target_games) {
            uint64_t seed = opt.seed_base + stats.episodes.size();
            json transcript = json::array();
            EpisodeReport rep = run_episode(kb, provider, task, seed, memory,
                                            opt.out_dir.empty() ? nullptr : &transcript);
            if (!opt.out_dir.empty())
                detail::write_transcript(
                    tdir / (stats.target + "_" + std::to_string(seed) + ".jsonl"), transcript);
            stats.episodes.push_back(std::move(rep));
        }
        stats.finalize();
        if (!opt.incremental || stats.successes > 1 || ++tier_idx >= plan.size()) break;
        target_games = plan[tier_idx];
    }
    return stats;
}

struct SuiteReport {
    std::vector<TaskStats> tasks;

    json to_json() const {
        json ts = json::array();
        for (const auto& t : tasks) ts.push_back(t.to_json());
        return {{"tasks", std::move(ts)}};
    }
};

inline SuiteReport run_suite(const KnowledgeBase& kb, PlanProvider& provider,
                             const SuiteOptions& opt, MemoryStore* memory = nullptr,
                             std::ostream* table = nullptr) {
    SuiteReport report;
    MemoryStore local;
    MemoryStore* store = memory ? memory : (opt.use_memory ? &local : nullptr);

    for (const auto& [target, count] : opt.tasks) {
        TaskSpec task = opt.base;
        task.target = target;
        task.count = count;
        report.tasks.push_back(run_task(kb, provider, task, opt, store));
        if (table) {
            const TaskStats& s = report.tasks.back();
            uint64_t ticks = 0;
            int queries = 0;
            for (const auto& e : s.episodes) {
                ticks += e.ticks_used;
                queries += e.queries_used;
            }
            char line[160];
            std::snprintf(line, sizeof(line), "%-16s %4d games %4d ok %6.1f%% %8.1f ticks %6.2f queries\n",
                          s.target.c_str(), s.games, s.successes, s.rate * 100.0,
                          s.games ? static_cast<double>(ticks) / s.games : 0.0,
                          s.games ? static_cast<double>(queries) / s.games : 0.0);
            (*table) << line;
        }
    }

    if (!opt.out_dir.empty()) {
        std::filesystem::create_directories(opt.out_dir);
        std::ofstream f(std::filesystem::path(opt.out_dir) / "report.json");
        if (f) f << report.to_json().dump(2) << '\n';
        if (store) store->save(std::filesystem::path(opt.out_dir) / "memory.json");
    }
    return report;
}

// ===================== warmup =====================

// Practice every distinct sub-goal of the target's chain until its memory
// list collapses into a summary: fresh world per run, prerequisites granted
// up front (materials, tool, pillar dirt), successes recorded.
inline int warmup(const KnowledgeBase& kb, PlanProvider& provider, MemoryStore& memory,
                  const std::string& target = "diamond", int per_goal = kSummarizeBatch,
                  uint64_t seed_base = 900000, uint64_t tick_limit = 12000) {
    SubGoalTree tree = decompose(kb, target);
    std::vector<Goal> goals;
    std::set<std::string> seen;
    for (const Goal& g : schedule(tree))
        if (seen.insert(g.object).second) goals.push_back(g);

    int recorded = 0;
    uint64_t seed = seed_base;
    for (const Goal& g : goals) {
        int ok = 0;
        for (int attempt = 0; ok < per_goal && attempt < per_goal * 3; ++attempt) {
            ++seed;
            WorldConfig cfg;
            cfg.seed = seed;
            World world = generate_world(cfg);
            AgentState agent = spawn_agent(world, seed);
            if (g.material)
                for (const auto& [m, n] : *g.material) agent.inventory[kb.canonical(m)] += n;
            if (g.tool) agent.inventory[kb.canonical(*g.tool)] += 1;
            agent.inventory["dirt"] += 16;
            Executor ex(world, agent, kb);
            ex.deadline = tick_limit;
            SubGoalOptions opt;
            opt.memory = &memory;
            opt.episode_id = "warmup:" + g.object + "#" + std::to_string(seed);
            opt.seed = seed;
            if (run_subgoal(ex, provider, g, opt).status == SubGoalStatus::achieved) {
                ++ok;
                ++recorded;
            }
        }
    }
    return recorded;
}

}  // namespace voxagent
