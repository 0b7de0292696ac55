#pragma once
// Recipe/fact knowledge base and the goal five-tuple. The KB is pure data
// loaded from recipes.json + facts.json; lookups never mutate it, and the
// loader rejects unknown references and recipe cycles up front.

#include <filesystem>
#include <fstream>
#include <map>
#include <set>

#include "core.hpp"

namespace voxagent {

struct UnknownItemError : DataError {
    using DataError::DataError;
};

// ===================== records =====================

enum class Station : uint8_t { none, crafting_table, furnace };

inline const char* station_name(Station s) {
    switch (s) {
        case Station::none: return "none";
        case Station::crafting_table: return "crafting_table";
        case Station::furnace: return "furnace";
    }
    return "none";
}

struct Recipe {
    std::string output;
    int output_count = 1;
    std::vector<std::pair<std::string, int>> materials;  // file order preserved
    std::optional<std::string> tool;                     // station item, if any
    Station station = Station::none;

    int count_of(const std::string& item) const {
        for (auto& [m, n] : materials)
            if (m == item) return n;
        return 0;
    }
};

struct FactHints {
    std::string source;  // mine | mob | apply | craft
    std::optional<std::string> block;     // block to break for mine sources
    std::optional<std::pair<int, int>> y_band;
    std::optional<std::string> biome;
    std::optional<std::string> mob;
    std::optional<std::string> target;  // apply target (block or mob kind)
    std::optional<std::string> tool;    // apply tool
    ToolTier min_tool_tier = ToolTier::none;
};

struct FactEntry {
    std::string item;
    std::string info;
    std::vector<std::string> aliases;
    FactHints hints;
};

/// Goal five-tuple: what to obtain, how many, with which direct prerequisites.
struct Goal {
    std::string object;
    int count = 1;
    std::optional<std::vector<std::pair<std::string, int>>> material;
    std::optional<std::string> tool;
    std::string info;

    json to_json() const {
        json m(nullptr);
        if (material) {
            m = json::object();
            for (auto& [k, v] : *material) m[k] = v;
        }
        return {{"object", object},
                {"count", count},
                {"material", m},
                {"tool", tool ? json(*tool) : json(nullptr)},
                {"info", info}};
    }
};

// ===================== knowledge base =====================

class KnowledgeBase {
public:
    std::map<std::string, Recipe> recipes;
    std::map<std::string, FactEntry> facts;
    std::map<std::string, std::string> aliases;      // alias -> canonical item
    std::map<std::string, ToolTier> block_tiers;     // block kind -> min harvest tier

    // lowercase, separators to '_', aliases resolved; idempotent.
    std::string canonical(std::string name) const {
        for (auto& c : name) {
            if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
            if (c == ' ' || c == '-') c = '_';
        }
        auto it = aliases.find(name);
        return it == aliases.end() ? name : it->second;
    }

    bool known(const std::string& name) const {
        std::string c = canonical(name);
        return recipes.count(c) > 0 || facts.count(c) > 0;
    }
    const Recipe* recipe(const std::string& name) const {
        auto it = recipes.find(canonical(name));
        return it == recipes.end() ? nullptr : &it->second;
    }
    const FactEntry* fact(const std::string& name) const {
        auto it = facts.find(canonical(name));
        return it == facts.end() ? nullptr : &it->second;
    }
};

// ===================== loading =====================

namespace detail {

inline json read_json_file(const std::filesystem::path& p) {
    std::ifstream in(p);
    if (!in) throw DataError("cannot open " + p.string());
    try {
        return json::parse(in);
    } catch (const std::exception& e) {
        throw DataError(p.string() + ": " + e.what());
    }
}

inline void validate_kb(const KnowledgeBase& kb) {
    auto require_known = [&](const std::string& ref, const std::string& where) {
        if (!kb.known(ref))
            throw DataError(where + ": unknown item \"" + ref + "\"");
    };
    for (auto& [name, r] : kb.recipes) {
        std::string where = "recipe \"" + name + "\"";
        if (r.output_count < 1) throw DataError(where + ": output_count must be >= 1");
        if (r.materials.empty()) throw DataError(where + ": no materials");
        for (auto& [m, n] : r.materials) {
            if (n < 1) throw DataError(where + ": material \"" + m + "\" count must be >= 1");
            if (m == name) throw DataError(where + ": output listed as its own material");
            require_known(m, where);
        }
        if (r.tool) require_known(*r.tool, where);
    }
    for (auto& [alias, target] : kb.aliases)
        if (!kb.recipes.count(target) && !kb.facts.count(target))
            throw DataError("alias \"" + alias + "\": unknown target \"" + target + "\"");

    // Cycle check over material+tool dependencies (Kahn's algorithm).
    std::map<std::string, int> indeg;
    std::map<std::string, std::vector<std::string>> rev;
    for (auto& [name, r] : kb.recipes) {
        indeg.emplace(name, 0);
        auto dep = [&](const std::string& d) {
            std::string c = kb.canonical(d);
            if (kb.recipes.count(c)) {
                rev[c].push_back(name);
                indeg[name]++;
            }
        };
        for (auto& [m, n] : r.materials) dep(m);
        if (r.tool) dep(*r.tool);
    }
    std::vector<std::string> ready;
    for (auto& [n, d] : indeg)
        if (d == 0) ready.push_back(n);
    size_t done = 0;
    while (!ready.empty()) {
        std::string n = ready.back();
        ready.pop_back();
        ++done;
        for (auto& m : rev[n])
            if (--indeg[m] == 0) ready.push_back(m);
    }
    if (done != kb.recipes.size()) {
        std::string cyc;
        for (auto& [n, d] : indeg)
            if (d > 0) cyc += (cyc.empty() ? "" : ", ") + n;
        throw DataError("recipe cycle detected among: " + cyc);
    }
}

}  // namespace detail

inline KnowledgeBase load_kb_from_json(const json& recipes_doc, const json& facts_doc) {
    KnowledgeBase kb;
    if (!recipes_doc.is_array()) throw DataError("recipes.json: expected an array");
    for (auto& r : recipes_doc) {
        Recipe rec;
        rec.output = r.at("output").get<std::string>();
        rec.output_count = r.at("output_count").get<int>();
        for (auto& [m, n] : r.at("materials").items()) rec.materials.push_back({m, n.get<int>()});
        if (r.contains("tool") && !r.at("tool").is_null())
            rec.tool = r.at("tool").get<std::string>();
        std::string st = r.value("station", "none");
        if (st == "none") rec.station = Station::none;
        else if (st == "crafting_table") rec.station = Station::crafting_table;
        else if (st == "furnace") rec.station = Station::furnace;
        else throw DataError("recipe \"" + rec.output + "\": bad station \"" + st + "\"");
        if (kb.recipes.count(rec.output))
            throw DataError("recipe \"" + rec.output + "\": duplicate output");
        kb.recipes[rec.output] = std::move(rec);
    }
    if (!facts_doc.is_array()) throw DataError("facts.json: expected an array");
    for (auto& f : facts_doc) {
        FactEntry e;
        e.item = f.at("item").get<std::string>();
        e.info = f.value("info", "");
        if (f.contains("aliases"))
            for (auto& a : f.at("aliases")) e.aliases.push_back(a.get<std::string>());
        if (f.contains("hints")) {
            auto& h = f.at("hints");
            e.hints.source = h.value("source", "");
            if (h.contains("block")) e.hints.block = h.at("block").get<std::string>();
            if (h.contains("y_band"))
                e.hints.y_band = {h.at("y_band").at(0).get<int>(), h.at("y_band").at(1).get<int>()};
            if (h.contains("biome")) e.hints.biome = h.at("biome").get<std::string>();
            if (h.contains("mob")) e.hints.mob = h.at("mob").get<std::string>();
            if (h.contains("target")) e.hints.target = h.at("target").get<std::string>();
            if (h.contains("tool")) e.hints.tool = h.at("tool").get<std::string>();
            if (h.contains("min_tool_tier")) {
                auto t = tier_from_name(h.at("min_tool_tier").get<std::string>());
                if (!t) throw DataError("fact \"" + e.item + "\": bad min_tool_tier");
                e.hints.min_tool_tier = *t;
            }
        }
        if (kb.facts.count(e.item)) throw DataError("fact \"" + e.item + "\": duplicate item");
        if (e.hints.min_tool_tier != ToolTier::none && e.hints.block)
            kb.block_tiers[*e.hints.block] = e.hints.min_tool_tier;
        for (auto& a : e.aliases) kb.aliases[a] = e.item;
        kb.facts[e.item] = std::move(e);
    }
    detail::validate_kb(kb);
    return kb;
}

// `path` is the directory holding recipes.json and facts.json.
inline KnowledgeBase load_kb(const std::filesystem::path& path) {
    return load_kb_from_json(detail::read_json_file(path / "recipes.json"),
                             detail::read_json_file(path / "facts.json"));
}

inline std::filesystem::path default_data_dir() {
#ifdef VOXAGENT_DATA_DIR
    return VOXAGENT_DATA_DIR;
#else
    return "data";
#endif
}

inline KnowledgeBase load_default_kb() { return load_kb(default_data_dir()); }

// ===================== lookups =====================

// Know-how text for an object; empty when nothing is on file.
inline std::string lookup_info(const KnowledgeBase& kb, const std::string& object) {
    const FactEntry* f = kb.fact(object);
    return f ? f->info : "";
}

// Build the goal five-tuple for an object. Craftables carry their scaled
// recipe materials and station; mined items carry the minimum-tier pickaxe.
inline Goal make_goal(const KnowledgeBase& kb, const std::string& object, int count = 1) {
    std::string name = kb.canonical(object);
    if (count < 1) throw DataError("goal \"" + name + "\": count must be >= 1");
    Goal g;
    g.object = name;
    g.count = count;
    g.info = lookup_info(kb, name);
    if (const Recipe* r = kb.recipe(name)) {
        int units = (count + r->output_count - 1) / r->output_count;
        std::vector<std::pair<std::string, int>> mats;
        for (auto& [m, n] : r->materials) mats.push_back({kb.canonical(m), n * units});
        g.material = std::move(mats);
        g.tool = r->tool;
        return g;
    }
    if (const FactEntry* f = kb.fact(name)) {
        if (f->hints.min_tool_tier != ToolTier::none)
            g.tool = pickaxe_for_tier(f->hints.min_tool_tier);
        else if (f->hints.source == "apply" && f->hints.tool)
            g.tool = f->hints.tool;
        return g;
    }
    throw UnknownItemError("unknown item \"" + name + "\"");
}

}  // namespace voxagent
