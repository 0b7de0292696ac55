// Command-line experiment runner: single episodes, suite protocols, warmup
// practice for the memory store, and sub-goal tree inspection.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <voxagent/harness.hpp>
#include <voxagent/provider_http.hpp>

using namespace voxagent;
namespace fs = std::filesystem;

namespace {

std::unique_ptr<PlanProvider> make_provider(const std::string& name, const KnowledgeBase& kb) {
    if (name == "rule") return std::make_unique<RuleProvider>(kb);
    if (name == "remote") return std::make_unique<RemoteProvider>(RemoteProvider::from_env());
    throw CLI::ValidationError("--provider", "expected 'rule' or 'remote'");
}

// task list file: one task per line, "<item> [count]", '#' comments
std::vector<std::pair<std::string, int>> read_tasks_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw CLI::ValidationError("--tasks", "cannot open " + path);
    std::vector<std::pair<std::string, int>> tasks;
    std::string line;
    while (std::getline(f, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream in(line);
        std::string item;
        int count = 1;
        if (!(in >> item)) continue;
        in >> count;
        tasks.emplace_back(item, std::max(1, count));
    }
    if (tasks.empty()) throw CLI::ValidationError("--tasks", "no tasks in " + path);
    return tasks;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"voxagent: goal-decomposing agent in a deterministic voxel world"};
    app.require_subcommand(1);

    std::string provider_name = "rule";
    app.add_option("--provider", provider_name, "plan provider: rule | remote")
        ->capture_default_str();

    // ---- run ----
    auto* run = app.add_subcommand("run", "run one episode");
    TaskSpec task;
    uint64_t seed = 1000;
    std::string run_out, memory_file;
    run->add_option("--task", task.target, "target item")->required();
    run->add_option("--count", task.count, "how many to obtain")->capture_default_str();
    run->add_option("--seed", seed, "world seed")->capture_default_str();
    run->add_option("--tick-limit", task.tick_limit)->capture_default_str();
    run->add_option("--query-limit", task.query_limit, "per sub-goal")->capture_default_str();
    run->add_flag("--no-decompose", task.no_decompose, "plan the root goal only");
    run->add_flag("--no-feedback", task.no_feedback, "omit result detail and state from follow-ups");
    run->add_flag("--no-info", task.no_info, "blank the knowledge text on every sub-goal");
    run->add_flag("--no-memory", task.no_memory, "never consult or record memory");
    run->add_option("--memory", memory_file, "memory store to load and update");
    run->add_option("--out", run_out, "directory for the episode transcript");

    // ---- suite ----
    auto* suite = app.add_subcommand("suite", "run the task suite over consecutive seeds");
    SuiteOptions sopt;
    std::string tasks_file, suite_out = "out";
    int trials = 40;
    suite->add_option("--tasks", tasks_file, "task list file: '<item> [count]' per line");
    suite->add_option("--trials", trials, "episodes per task (fixed mode)")->capture_default_str();
    suite->add_flag("--incremental", sopt.incremental,
                    "escalate 20/50/100/200 games while successes stay at most 1");
    suite->add_option("--seed-base", sopt.seed_base)->capture_default_str();
    suite->add_option("--tick-limit", sopt.base.tick_limit)->capture_default_str();
    suite->add_option("--query-limit", sopt.base.query_limit)->capture_default_str();
    suite->add_flag("--no-decompose", sopt.base.no_decompose);
    suite->add_flag("--no-feedback", sopt.base.no_feedback);
    suite->add_flag("--no-info", sopt.base.no_info);
    suite->add_flag("--no-memory", sopt.base.no_memory);
    suite->add_option("--out", suite_out, "report.json and transcripts directory")
        ->capture_default_str();

    // ---- warmup ----
    auto* warm = app.add_subcommand("warmup", "practice sub-goals until summaries form");
    std::string goals_file, warm_target = "diamond", warm_memory = "out/memory.json";
    warm->add_option("--goals", goals_file, "target list file, one item per line");
    warm->add_option("--target", warm_target, "single target when --goals is absent")
        ->capture_default_str();
    warm->add_option("--memory", warm_memory, "memory store to load and update")
        ->capture_default_str();

    // ---- dump-tree ----
    auto* dump = app.add_subcommand("dump-tree", "print a goal's sub-goal tree");
    std::string dump_item;
    bool dump_dot = false, dump_json = false;
    dump->add_option("item", dump_item, "target item")->required();
    dump->add_flag("--dot", dump_dot, "graphviz output");
    dump->add_flag("--json", dump_json, "JSON output");

    CLI11_PARSE(app, argc, argv);

    try {
        KnowledgeBase kb = load_default_kb();
        auto provider = make_provider(provider_name, kb);

        if (*run) {
            MemoryStore mem;
            if (!memory_file.empty() && fs::exists(memory_file)) mem.load(memory_file);
            json transcript = json::array();
            EpisodeReport rep =
                run_episode(kb, *provider, task, seed,
                            task.no_memory || memory_file.empty() ? nullptr : &mem,
                            run_out.empty() ? nullptr : &transcript);
            if (!run_out.empty()) {
                fs::create_directories(run_out);
                std::ofstream f(fs::path(run_out) / (kb.canonical(task.target) + "_" +
                                                     std::to_string(seed) + ".jsonl"));
                for (const auto& m : transcript) f << m.dump() << '\n';
            }
            if (!memory_file.empty()) mem.save(memory_file);
            std::cout << rep.to_json().dump(2) << '\n';
            return rep.success ? 0 : 1;
        }

        if (*suite) {
            if (!tasks_file.empty()) sopt.tasks = read_tasks_file(tasks_file);
            sopt.fixed_games = trials;
            sopt.use_memory = !sopt.base.no_memory;
            sopt.out_dir = suite_out;
            run_suite(kb, *provider, sopt, nullptr, &std::cout);
            std::cout << "report: " << (fs::path(suite_out) / "report.json").string() << '\n';
            return 0;
        }

        if (*warm) {
            MemoryStore mem;
            if (fs::exists(warm_memory)) mem.load(warm_memory);
            std::vector<std::string> targets;
            if (!goals_file.empty()) {
                for (auto& [item, count] : read_tasks_file(goals_file)) targets.push_back(item);
            } else {
                targets.push_back(warm_target);
            }
            int recorded = 0;
            for (const auto& t : targets) recorded += warmup(kb, *provider, mem, t);
            fs::create_directories(fs::path(warm_memory).parent_path().empty()
                                       ? fs::path(".")
                                       : fs::path(warm_memory).parent_path());
            mem.save(warm_memory);
            std::cout << "recorded " << recorded << " sequences across " << mem.keys().size()
                      << " goal keys -> " << warm_memory << '\n';
            return 0;
        }

        if (*dump) {
            SubGoalTree tree = decompose(kb, dump_item);
            if (dump_dot)
                std::cout << tree.to_dot();
            else if (dump_json)
                std::cout << tree.to_json().dump(2) << '\n';
            else
                std::cout << tree.to_text();
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
