#include <catch2/catch_amalgamated.hpp>

#include <map>
#include <set>
#include <string>
#include <vector>

#include <voxagent/world.hpp>

#include "util.hpp"

using namespace voxagent;

namespace {

WorldConfig small_config(uint64_t seed) {
    WorldConfig c;
    c.seed = seed;
    c.dims = {128, 64, 128};
    c.biome_layout = {{"forest", 0, 47, 0, 127}, {"plains", 48, 87, 0, 127},
                      {"desert", 88, 127, 0, 127}};
    return c;
}

}  // namespace

TEST_CASE("world generation is deterministic and seed-sensitive") {
    WorldConfig c = small_config(42);
    World a = generate_world(c);
    World b = generate_world(c);
    REQUIRE(a.to_json().dump() == b.to_json().dump());

    c.seed = 43;
    World d = generate_world(c);
    REQUIRE(a.to_json().dump() != d.to_json().dump());
}

TEST_CASE("world snapshot json round-trips byte-identically") {
    World w = generate_world(small_config(7));
    // Mutate a little so drops/ticks are exercised too.
    w.tick_count = 123;
    w.drops.push_back({{5, 60, 5}, "dirt", 3});
    json j = w.to_json();
    World back = World::from_json(j);
    REQUIRE(back.to_json().dump() == j.dump());
}

TEST_CASE("ore veins stay inside their configured depth bands") {
    std::map<std::string, std::pair<int, int>> bands;
    WorldConfig c;  // full-size default map
    c.seed = 11;
    for (auto& [item, band] : c.ore_bands) bands[item] = {band.y_min, band.y_max};

    World w = generate_world(c);
    std::map<std::string, int> counts;
    for (int x = 0; x < c.dims.x; ++x)
        for (int y = 0; y < c.dims.y; ++y)
            for (int z = 0; z < c.dims.z; ++z) {
                std::string name = block_name(w.at({x, y, z}));
                auto it = bands.find(name);
                if (it == bands.end()) continue;
                ++counts[name];
                REQUIRE(y >= it->second.first);
                REQUIRE(y <= it->second.second);
            }
    // All four ores exist on a default map.
    REQUIRE(counts["coal_ore"] > 0);
    REQUIRE(counts["iron_ore"] > 0);
    REQUIRE(counts["gold_ore"] > 0);
    REQUIRE(counts["diamond_ore"] > 0);
    // Diamond is the rarest of the four.
    REQUIRE(counts["diamond_ore"] < counts["coal_ore"]);
    REQUIRE(counts["diamond_ore"] < counts["iron_ore"]);
}

TEST_CASE("iron ore depth histogram peaks at level 53") {
    std::map<int, int> hist;
    for (uint64_t seed = 1; seed <= 4; ++seed) {
        WorldConfig c;
        c.seed = seed;
        World w = generate_world(c);
        for (int x = 0; x < c.dims.x; ++x)
            for (int y = 0; y < c.dims.y; ++y)
                for (int z = 0; z < c.dims.z; ++z)
                    if (w.at({x, y, z}) == BlockKind::iron_ore) ++hist[y];
    }
    REQUIRE_FALSE(hist.empty());
    int best_y = -1, best_n = -1;
    for (auto& [y, n] : hist)
        if (n > best_n) best_n = n, best_y = y;
    REQUIRE(best_y == 53);
}

TEST_CASE("biome layout maps x ranges to forest, plains, desert") {
    WorldConfig c;
    c.seed = 5;
    World w = generate_world(c);
    REQUIRE(w.biome_at(50, 100) == "forest");
    REQUIRE(w.biome_at(150, 100) == "plains");
    REQUIRE(w.biome_at(200, 100) == "desert");

    // Desert surfaces are sand; forests grow logs somewhere.
    int sand_cols = 0, total_cols = 0;
    for (int x = 180; x < 250; x += 7)
        for (int z = 10; z < 250; z += 11) {
            ++total_cols;
            if (w.at({x, w.surface_y(x, z), z}) == BlockKind::sand) ++sand_cols;
        }
    REQUIRE(sand_cols == total_cols);

    bool forest_log = false;
    for (int x = 0; x < 96 && !forest_log; ++x)
        for (int z = 0; z < 256 && !forest_log; ++z)
            for (int y = 0; y < 64; ++y)
                if (w.at({x, y, z}) == BlockKind::log) {
                    forest_log = true;
                    break;
                }
    REQUIRE(forest_log);
}

TEST_CASE("terrain strata: bedrock floor, stone core, soil cap in a narrow height range") {
    WorldConfig c;
    c.seed = 9;
    World w = generate_world(c);
    for (int x = 180; x < 250; x += 13)
        for (int z = 20; z < 250; z += 17) {  // desert: no trees or ponds
            int h = w.surface_y(x, z);
            REQUIRE(h >= 56);
            REQUIRE(h <= 59);
            REQUIRE(w.at({x, 0, z}) == BlockKind::bedrock);
            REQUIRE(w.at({x, h - 3, z}) == BlockKind::stone);
        }
}

TEST_CASE("lidar sweep covers 72x37 rays") {
    World w = vt::box_world({32, 32, 32}, 6);
    AgentState a = vt::agent_at({16, 7, 16});
    Observation o = observe(w, a);
    REQUIRE(o.lidar_hits.size() == 72u * 37u);
}

TEST_CASE("lidar respects occlusion: nothing opaque sits in front of a hit") {
    WorldConfig c = small_config(3);
    c.passive_entities = 0;
    World w = generate_world(c);
    AgentState a = spawn_agent(w, 3);
    Observation o = observe(w, a);

    int checked = 0;
    for (auto& h : o.lidar_hits) {
        if (h.distance < 0) continue;
        ++checked;
        // Fine sampling: every cell strictly before the hit must be see-through.
        Vec3d eye = a.eye();
        Vec3d dir = ray_direction(h.yaw, h.pitch);
        for (double t = 0.0; t < h.distance - 1e-9; t += 0.004) {
            Vec3i cell = cell_of({eye.x + dir.x * t, eye.y + dir.y * t, eye.z + dir.z * t});
            if (cell == h.cell) break;  // reached the face of the hit cell
            if (block_opaque(w.at(cell))) {
                CAPTURE(h.yaw, h.pitch, h.distance, cell.x, cell.y, cell.z);
                FAIL("opaque cell in front of reported lidar hit");
            }
        }
        // And the reported cell itself is what the ray says it is.
        Vec3d p{eye.x + dir.x * (h.distance + 1e-6), eye.y + dir.y * (h.distance + 1e-6),
                eye.z + dir.z * (h.distance + 1e-6)};
        if (!h.is_entity) REQUIRE(block_name(w.at(cell_of(p))) == h.kind);
    }
    REQUIRE(checked > 500);  // open-air spawn still sees plenty of ground
}

TEST_CASE("voxel patch is centred on the feet and walls off unknown space") {
    WorldConfig c = small_config(8);
    World w = generate_world(c);
    AgentState a = spawn_agent(w, 8);
    Observation o = observe(w, a);
    Vec3i f = a.feet();
    REQUIRE(o.patch_origin == f);
    REQUIRE(o.voxel_patch.size() == 21u * 21u * 21u);
    REQUIRE(o.patch_at(f) == w.at(f));
    REQUIRE(o.patch_at({f.x + 10, f.y, f.z}) == w.at({f.x + 10, f.y, f.z}));
    REQUIRE(o.patch_at({f.x + 11, f.y, f.z}) == BlockKind::bedrock);
    REQUIRE(o.patch_at({f.x, f.y - 11, f.z}) == BlockKind::bedrock);
}

TEST_CASE("breaking respects the tool tier lattice") {
    World w = vt::box_world({32, 32, 32}, 4);
    Vec3i target{18, 5, 16};
    AgentState a = vt::agent_at({16, 5, 16});

    auto strike = [&](BlockKind kind) {
        w.set(target, kind);
        vt::aim_at(a, target);
        return apply_primitive(w, a, Primitive::attack_click());
    };
    auto has = [](const EventList& ev, Event::Kind k) {
        for (auto& e : ev)
            if (e.kind == k) return true;
        return false;
    };

    SECTION("stone needs wood tier") {
        REQUIRE(has(strike(BlockKind::stone), Event::Kind::insufficient_tier));
        REQUIRE(w.at(target) == BlockKind::stone);

        a.add("wooden_pickaxe", 1);
        apply_primitive(w, a, Primitive::select("wooden_pickaxe"));
        REQUIRE(has(strike(BlockKind::stone), Event::Kind::block_broken));
        REQUIRE(w.at(target) == BlockKind::air);
        REQUIRE(w.drops.back().item == "cobblestone");
    }

    SECTION("iron ore refuses wood, yields to stone tier") {
        a.add("wooden_pickaxe", 1);
        apply_primitive(w, a, Primitive::select("wooden_pickaxe"));
        REQUIRE(has(strike(BlockKind::iron_ore), Event::Kind::insufficient_tier));

        a.add("stone_pickaxe", 1);
        apply_primitive(w, a, Primitive::select("stone_pickaxe"));
        REQUIRE(has(strike(BlockKind::iron_ore), Event::Kind::block_broken));
        REQUIRE(w.drops.back().item == "iron_ore");
    }

    SECTION("diamond ore needs iron tier") {
        a.add("stone_pickaxe", 1);
        apply_primitive(w, a, Primitive::select("stone_pickaxe"));
        REQUIRE(has(strike(BlockKind::diamond_ore), Event::Kind::insufficient_tier));

        a.add("iron_pickaxe", 1);
        apply_primitive(w, a, Primitive::select("iron_pickaxe"));
        REQUIRE(has(strike(BlockKind::diamond_ore), Event::Kind::block_broken));
        REQUIRE(w.drops.back().item == "diamond");
    }

    SECTION("bedrock never breaks") {
        a.add("iron_pickaxe", 1);
        apply_primitive(w, a, Primitive::select("iron_pickaxe"));
        REQUIRE(has(strike(BlockKind::bedrock), Event::Kind::noop));
        REQUIRE(w.at(target) == BlockKind::bedrock);
    }
}

TEST_CASE("matter is conserved through break, collect, place") {
    World w = vt::box_world({32, 32, 32}, 4);
    AgentState a = vt::agent_at({16, 5, 16});
    const int n = 6;
    for (int i = 0; i < n; ++i) w.set({18, 5, 14 + i}, BlockKind::dirt);

    auto count_world_dirt = [&] {
        int c = 0;
        for (int x = 0; x < 32; ++x)
            for (int y = 0; y < 32; ++y)
                for (int z = 0; z < 32; ++z)
                    if (w.at({x, y, z}) == BlockKind::dirt) ++c;
        return c;
    };
    auto count_drop_dirt = [&] {
        int c = 0;
        for (auto& d : w.drops)
            if (d.item == "dirt") c += d.count;
        return c;
    };
    auto total = [&] { return count_world_dirt() + count_drop_dirt() + a.count("dirt"); };

    const int start = total();
    REQUIRE(count_world_dirt() == n);

    // Break them all, ticking so drops within reach are collected.
    for (int i = 0; i < n; ++i) {
        vt::aim_at(a, {18, 5, 14 + i});
        apply_primitive(w, a, Primitive::attack_click());
        tick(w, &a);
        REQUIRE(total() == start);
    }
    REQUIRE(count_world_dirt() == 0);
    REQUIRE(a.count("dirt") + count_drop_dirt() == n);

    // Walk over any strays, then place everything back down.
    for (auto d : w.drops) {
        a.position = center_of({d.pos.x, d.pos.y, d.pos.z});
        tick(w, &a);
    }
    REQUIRE(a.count("dirt") == n);
    a.position = center_of({16, 5, 16});
    int placed = 0;
    for (int i = 0; i < n; ++i) {
        Vec3i spot{14, 5, 13 + i};
        EventList ev = apply_primitive(w, a, Primitive::place_block("dirt", spot));
        for (auto& e : ev)
            if (e.kind == Event::Kind::block_placed) ++placed;
        REQUIRE(total() == start);
    }
    REQUIRE(placed == n);
    REQUIRE(a.count("dirt") == 0);
    REQUIRE(count_world_dirt() == n);
}

TEST_CASE("place_block rejects out-of-reach, occupied and body cells") {
    World w = vt::box_world({32, 32, 32}, 4);
    AgentState a = vt::agent_at({16, 5, 16});
    a.add("dirt", 5);

    auto invalid = [&](Vec3i spot) {
        EventList ev = apply_primitive(w, a, Primitive::place_block("dirt", spot));
        for (auto& e : ev)
            if (e.kind == Event::Kind::placement_invalid) return true;
        return false;
    };
    REQUIRE(invalid({16, 5, 26}));        // beyond reach
    REQUIRE(invalid({16, 4, 16}));        // already solid (floor)
    REQUIRE(invalid({16, 5, 16}));        // own feet
    REQUIRE(invalid({16, 6, 16}));        // own head
    REQUIRE_FALSE(invalid({18, 5, 16}));  // clear spot in reach
    REQUIRE(a.count("dirt") == 4);

    // No stock: even a clear spot refuses.
    a.inventory.erase("dirt");
    REQUIRE(invalid({18, 5, 14}));
}

TEST_CASE("entity kills yield their drop table") {
    World w = vt::box_world({32, 32, 32}, 4);
    Entity sheep;
    sheep.id = 1;
    sheep.kind = "sheep";
    sheep.pos = {18, 5, 16};
    sheep.hp = 3;
    w.entities.push_back(sheep);

    AgentState a = vt::agent_at({16, 5, 16});
    vt::aim_at(a, {18, 5, 16});
    for (int i = 0; i < 3; ++i) apply_primitive(w, a, Primitive::attack_click());
    REQUIRE_FALSE(w.entities[0].alive);

    std::map<std::string, int> got;
    for (auto& d : w.drops) got[d.item] += d.count;
    std::map<std::string, int> want;
    for (auto& [item, n] : entity_drops("sheep")) want[item] += n;
    REQUIRE(got == want);
    REQUIRE(want.count("mutton") == 1);
    REQUIRE(want.count("wool") == 1);
}

TEST_CASE("config validation rejects malformed settings") {
    WorldConfig c;
    c.dims = {8, 64, 256};
    REQUIRE_THROWS_AS(c.validate(), ConfigError);

    c = WorldConfig{};
    c.ore_bands[0].second.y_min = 50;
    c.ore_bands[0].second.y_max = 20;
    REQUIRE_THROWS_AS(c.validate(), ConfigError);

    c = WorldConfig{};
    c.passive_entities = -1;
    REQUIRE_THROWS_AS(c.validate(), ConfigError);

    c = WorldConfig{};
    REQUIRE_NOTHROW(c.validate());
}

TEST_CASE("config json round-trips") {
    WorldConfig c = small_config(77);
    c.passive_entities = 13;
    WorldConfig back = WorldConfig::from_json(c.to_json());
    REQUIRE(back.to_json().dump() == c.to_json().dump());
}

TEST_CASE("spawn lands a standing agent on open ground") {
    for (uint64_t seed : {1ull, 2ull, 3ull, 10ull, 99ull}) {
        WorldConfig c;
        c.seed = seed;
        World w = generate_world(c);
        AgentState a = spawn_agent(w, seed);
        Vec3i f = a.feet();
        REQUIRE(w.body_fits(f));
        REQUIRE(w.supported(f));
        REQUIRE_FALSE(block_fluid(w.at(f.down())));
        REQUIRE(w.biome_at(f.x, f.z) != "desert");
    }
}
