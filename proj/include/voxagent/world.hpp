#pragma once
// Deterministic voxel world: seeded terrain/ore/tree/entity generation, a
// lidar + voxel-patch observation model, and low-level agent primitives with
// one-click breaking gated by tool tier. All dynamics consume the world's own
// RNG so identical seeds replay identically.

#include <algorithm>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <unordered_map>

#include "core.hpp"

namespace voxagent {

// ===================== config =====================

struct OreBand {
    int y_min = 0;
    int y_max = 0;
    double veins_per_chunk = 0.0;  // 16x16 column chunk
};

struct BiomeRegion {
    std::string name;
    int x_min = 0, x_max = 0;  // inclusive cell range
    int z_min = 0, z_max = 0;
};

struct WorldConfig {
    uint64_t seed = 0;
    Vec3i dims{256, 64, 256};
    // Ordered so generation order (and therefore the world) is reproducible.
    std::vector<std::pair<std::string, OreBand>> ore_bands = default_ore_bands();
    std::vector<BiomeRegion> biome_layout = default_biomes();
    bool hazard_lava = false;
    int passive_entities = 40;

    static std::vector<std::pair<std::string, OreBand>> default_ore_bands() {
        return {
            {"coal_ore", {20, 52, 8.0}},
            {"iron_ore", {46, 60, 6.0}},
            {"gold_ore", {5, 30, 0.8}},
            {"diamond_ore", {10, 12, 1.6}},
        };
    }
    static std::vector<BiomeRegion> default_biomes() {
        return {
            {"forest", 0, 95, 0, 255},
            {"plains", 96, 175, 0, 255},
            {"desert", 176, 255, 0, 255},
        };
    }

    void validate() const {
        if (dims.x < 16 || dims.y < 16 || dims.z < 16)
            throw ConfigError("config.dims: each dimension must be >= 16");
        for (auto& [item, band] : ore_bands) {
            if (band.y_min < 1 || band.y_max >= dims.y || band.y_min > band.y_max)
                throw ConfigError("config.ore_bands[" + item + "]: band outside world");
            if (band.veins_per_chunk < 0)
                throw ConfigError("config.ore_bands[" + item + "]: negative density");
            if (!block_from_name(item))
                throw ConfigError("config.ore_bands[" + item + "]: unknown block kind");
        }
        for (auto& r : biome_layout) {
            if (r.name.empty()) throw ConfigError("config.biome_layout: empty biome name");
            if (r.x_min > r.x_max || r.z_min > r.z_max)
                throw ConfigError("config.biome_layout[" + r.name + "]: empty region");
        }
        if (passive_entities < 0) throw ConfigError("config.passive_entities: negative");
    }

    json to_json() const {
        json bands = json::object();
        for (auto& [item, b] : ore_bands)
            bands[item] = {{"y_min", b.y_min}, {"y_max", b.y_max}, {"veins_per_chunk", b.veins_per_chunk}};
        json biomes = json::array();
        for (auto& r : biome_layout)
            biomes.push_back({{"name", r.name},
                              {"x_min", r.x_min},
                              {"x_max", r.x_max},
                              {"z_min", r.z_min},
                              {"z_max", r.z_max}});
        return {{"seed", seed},
                {"dims", {dims.x, dims.y, dims.z}},
                {"ore_bands", bands},
                {"biome_layout", biomes},
                {"hazard_lava", hazard_lava},
                {"passive_entities", passive_entities}};
    }

    static WorldConfig from_json(const json& j) {
        WorldConfig c;
        c.seed = j.value("seed", 0ull);
        if (j.contains("dims")) {
            auto& d = j.at("dims");
            c.dims = {d.at(0).get<int>(), d.at(1).get<int>(), d.at(2).get<int>()};
        }
        if (j.contains("ore_bands")) {
            c.ore_bands.clear();
            for (auto& [item, b] : j.at("ore_bands").items())
                c.ore_bands.push_back({item,
                                       {b.at("y_min").get<int>(), b.at("y_max").get<int>(),
                                        b.at("veins_per_chunk").get<double>()}});
        }
        if (j.contains("biome_layout")) {
            c.biome_layout.clear();
            for (auto& r : j.at("biome_layout"))
                c.biome_layout.push_back({r.at("name").get<std::string>(), r.at("x_min").get<int>(),
                                          r.at("x_max").get<int>(), r.at("z_min").get<int>(),
                                          r.at("z_max").get<int>()});
        }
        c.hazard_lava = j.value("hazard_lava", false);
        c.passive_entities = j.value("passive_entities", 40);
        c.validate();
        return c;
    }
};

// ===================== entities and drops =====================

struct Entity {
    int id = 0;
    std::string kind;  // sheep | cow | pig | chicken
    Vec3i pos;
    int hp = 1;
    bool alive = true;
};

inline std::vector<std::pair<std::string, int>> entity_drops(const std::string& kind) {
    if (kind == "sheep") return {{"wool", 1}, {"mutton", 1}};
    if (kind == "cow") return {{"leather", 1}, {"beef", 1}};
    if (kind == "pig") return {{"porkchop", 1}};
    if (kind == "chicken") return {{"chicken", 1}, {"feather", 1}};
    return {};
}

struct Drop {
    Vec3i pos;
    std::string item;
    int count = 1;
};

// ===================== agent =====================

enum class GroundStatus : uint8_t { on_ground, underground };

inline const char* ground_status_name(GroundStatus g) {
    return g == GroundStatus::on_ground ? "on_ground" : "underground";
}

// One vertical shaft carved by dig_down; go_up pillars back through these
// in reverse order, so chained digs still find their way to the surface.
struct DigShaft {
    Vec3i top, bottom;  // feet cells at the shaft's entry and floor
};

struct AgentState {
    Vec3d position;  // feet corner-anchored: cell center is (x+.5, y, z+.5)
    double yaw = 0;     // degrees, 0 = +x, grows toward +z
    double pitch = 0;   // degrees, +90 straight up
    int health = 20;
    std::map<std::string, int> inventory;  // ordered => deterministic dumps
    std::optional<std::string> equipped;
    GroundStatus ground = GroundStatus::on_ground;
    std::optional<Vec3i> dig_anchor;  // feet cell recorded by the first dig_down
    std::vector<DigShaft> shafts;     // open shafts, surface-most first
    std::set<Vec3i> placed;           // cells this agent placed (own infrastructure)
    int airborne = 0;                 // hang-time left after a jump

    Vec3i feet() const { return cell_of(position); }
    Vec3d eye() const { return position + Vec3d{0, 1.5, 0}; }

    int count(const std::string& item) const {
        auto it = inventory.find(item);
        return it == inventory.end() ? 0 : it->second;
    }
    void add(const std::string& item, int n) {
        if (n <= 0 || item.empty()) return;
        inventory[item] += n;
    }
    bool take(const std::string& item, int n) {
        auto it = inventory.find(item);
        if (it == inventory.end() || it->second < n) return false;
        it->second -= n;
        if (it->second == 0) {
            inventory.erase(it);
            if (equipped == item) equipped.reset();  // equipped must exist with count >= 1
        }
        return true;
    }

    json to_json() const {
        json inv = json::object();
        for (auto& [k, v] : inventory) inv[k] = v;
        json j{{"position", {position.x, position.y, position.z}},
               {"yaw", yaw},
               {"pitch", pitch},
               {"health", health},
               {"inventory", inv},
               {"equipped", equipped ? json(*equipped) : json(nullptr)},
               {"ground", ground_status_name(ground)},
               {"airborne", airborne}};
        if (dig_anchor) j["dig_anchor"] = {dig_anchor->x, dig_anchor->y, dig_anchor->z};
        if (!shafts.empty()) {
            json s = json::array();
            for (auto& sh : shafts)
                s.push_back({sh.top.x, sh.top.y, sh.top.z, sh.bottom.x, sh.bottom.y, sh.bottom.z});
            j["shafts"] = s;
        }
        return j;
    }
};

// ===================== world =====================

struct BreakRules {
    // Per-block minimum harvest tier; anything unlisted breaks with any tool.
    std::map<std::string, ToolTier> block_tiers;

    static BreakRules defaults() {
        BreakRules r;
        for (int i = 0; i < static_cast<int>(BlockKind::count_); ++i) {
            auto k = static_cast<BlockKind>(i);
            auto t = default_block_tier(k);
            if (t != ToolTier::none) r.block_tiers[block_name(k)] = t;
        }
        return r;
    }
    ToolTier required(BlockKind k) const {
        auto it = block_tiers.find(block_name(k));
        return it == block_tiers.end() ? ToolTier::none : it->second;
    }
};

class World {
public:
    WorldConfig config;
    std::vector<uint8_t> blocks;
    std::vector<Entity> entities;
    std::vector<Drop> drops;
    uint64_t tick_count = 0;
    Rng rng{0};  // dynamics stream (entity wander)
    BreakRules rules = BreakRules::defaults();

    bool in_bounds(Vec3i p) const {
        return p.x >= 0 && p.x < config.dims.x && p.y >= 0 && p.y < config.dims.y && p.z >= 0 &&
               p.z < config.dims.z;
    }

    // Outside the box: solid walls at the sides/bottom, open sky above.
    BlockKind at(Vec3i p) const {
        if (!in_bounds(p)) return p.y >= config.dims.y ? BlockKind::air : BlockKind::bedrock;
        return static_cast<BlockKind>(blocks[index(p)]);
    }
    void set(Vec3i p, BlockKind k) {
        if (in_bounds(p)) blocks[index(p)] = static_cast<uint8_t>(k);
    }

    bool solid(Vec3i p) const { return block_solid(at(p)); }
    bool passable(Vec3i p) const { return !solid(p); }
    // Two-cell-tall body fits with feet at p.
    bool body_fits(Vec3i feet) const { return passable(feet) && passable(feet.up()); }
    bool supported(Vec3i feet) const { return solid(feet.down()); }

    // Highest solid cell in the column, or -1 for a void column.
    int surface_y(int x, int z) const {
        for (int y = config.dims.y - 1; y >= 0; --y)
            if (solid({x, y, z})) return y;
        return -1;
    }

    std::string biome_at(int x, int z) const {
        for (auto& r : config.biome_layout)
            if (x >= r.x_min && x <= r.x_max && z >= r.z_min && z <= r.z_max) return r.name;
        return "plains";
    }

    Entity* entity_at(Vec3i cell) {
        for (auto& e : entities)
            if (e.alive && e.pos == cell) return &e;
        return nullptr;
    }
    const Entity* entity_at(Vec3i cell) const {
        return const_cast<World*>(this)->entity_at(cell);
    }

    // ---- serialization: RLE over the flat block array keeps dumps small ----
    json to_json() const {
        json runs = json::array();
        size_t i = 0;
        while (i < blocks.size()) {
            size_t j = i;
            while (j < blocks.size() && blocks[j] == blocks[i]) ++j;
            runs.push_back(json::array({blocks[i], j - i}));
            i = j;
        }
        json ents = json::array();
        for (auto& e : entities)
            ents.push_back({{"id", e.id},
                            {"kind", e.kind},
                            {"pos", {e.pos.x, e.pos.y, e.pos.z}},
                            {"hp", e.hp},
                            {"alive", e.alive}});
        json ds = json::array();
        for (auto& d : drops)
            ds.push_back({{"pos", {d.pos.x, d.pos.y, d.pos.z}}, {"item", d.item}, {"count", d.count}});
        return {{"version", 1},
                {"config", config.to_json()},
                {"blocks_rle", runs},
                {"entities", ents},
                {"drops", ds},
                {"tick_count", tick_count},
                {"rng_state", rng.state}};
    }

    static World from_json(const json& j) {
        if (j.value("version", 0) != 1) throw DataError("world snapshot: unsupported version");
        World w;
        w.config = WorldConfig::from_json(j.at("config"));
        size_t total = static_cast<size_t>(w.config.dims.x) * w.config.dims.y * w.config.dims.z;
        w.blocks.reserve(total);
        for (auto& run : j.at("blocks_rle")) {
            uint8_t kind = run.at(0).get<uint8_t>();
            size_t len = run.at(1).get<size_t>();
            w.blocks.insert(w.blocks.end(), len, kind);
        }
        if (w.blocks.size() != total) throw DataError("world snapshot: block count mismatch");
        for (auto& e : j.at("entities")) {
            Entity ent;
            ent.id = e.at("id").get<int>();
            ent.kind = e.at("kind").get<std::string>();
            ent.pos = {e.at("pos").at(0).get<int>(), e.at("pos").at(1).get<int>(),
                       e.at("pos").at(2).get<int>()};
            ent.hp = e.at("hp").get<int>();
            ent.alive = e.at("alive").get<bool>();
            w.entities.push_back(ent);
        }
        for (auto& d : j.at("drops"))
            w.drops.push_back({{d.at("pos").at(0).get<int>(), d.at("pos").at(1).get<int>(),
                                d.at("pos").at(2).get<int>()},
                               d.at("item").get<std::string>(),
                               d.at("count").get<int>()});
        w.tick_count = j.at("tick_count").get<uint64_t>();
        w.rng.state = j.at("rng_state").get<uint64_t>();
        return w;
    }

private:
    size_t index(Vec3i p) const {
        return (static_cast<size_t>(p.y) * config.dims.z + p.z) * config.dims.x + p.x;
    }
};

// ===================== generation =====================

namespace detail {

// Bilinear lattice noise: smooth integer heights in [base, base+amp].
class HeightField {
public:
    HeightField(uint64_t seed, int nx, int nz, int base, int amp)
        : step_(32), base_(base), amp_(amp) {
        gx_ = nx / step_ + 2;
        gz_ = nz / step_ + 2;
        Rng r(mix_seed(seed, 0xA11CE));
        lattice_.resize(static_cast<size_t>(gx_) * gz_);
        for (auto& v : lattice_) v = r.uniform();
    }
    int at(int x, int z) const {
        double fx = static_cast<double>(x) / step_, fz = static_cast<double>(z) / step_;
        int ix = static_cast<int>(fx), iz = static_cast<int>(fz);
        double tx = fx - ix, tz = fz - iz;
        auto g = [&](int a, int b) { return lattice_[static_cast<size_t>(a) * gz_ + b]; };
        double v = g(ix, iz) * (1 - tx) * (1 - tz) + g(ix + 1, iz) * tx * (1 - tz) +
                   g(ix, iz + 1) * (1 - tx) * tz + g(ix + 1, iz + 1) * tx * tz;
        return base_ + static_cast<int>(v * (amp_ + 0.999));
    }

private:
    int step_, base_, amp_, gx_ = 0, gz_ = 0;
    std::vector<double> lattice_;
};

// Triangular-ish discrete sample peaked at the band midpoint: weight
// (half+1-|d|)^2. Keeps ore histograms unimodal at the documented level.
inline int sample_band_y(Rng& r, const OreBand& band) {
    int mid = (band.y_min + band.y_max) / 2;
    int half = std::max(band.y_max - mid, mid - band.y_min);
    double total = 0;
    for (int y = band.y_min; y <= band.y_max; ++y) {
        double w = half + 1 - std::abs(y - mid);
        total += w * w;
    }
    double pick = r.uniform() * total;
    for (int y = band.y_min; y <= band.y_max; ++y) {
        double w = half + 1 - std::abs(y - mid);
        pick -= w * w;
        if (pick <= 0) return y;
    }
    return mid;
}

}  // namespace detail

inline World generate_world(const WorldConfig& config) {
    config.validate();
    World w;
    w.config = config;
    const Vec3i dims = config.dims;
    w.blocks.assign(static_cast<size_t>(dims.x) * dims.y * dims.z, 0);

    // Surface heights sit high enough that the documented ore levels are
    // always inside the stone column (grass at h, 2 dirt below, stone under).
    detail::HeightField hf(config.seed, dims.x, dims.z, std::min(56, dims.y - 6),
                           std::min(3, dims.y - 60 >= 0 ? 3 : 1));

    for (int z = 0; z < dims.z; ++z) {
        for (int x = 0; x < dims.x; ++x) {
            int h = std::min(hf.at(x, z), dims.y - 5);
            bool desert = w.biome_at(x, z) == "desert";
            w.set({x, 0, z}, BlockKind::bedrock);
            for (int y = 1; y <= h - 3; ++y) w.set({x, y, z}, BlockKind::stone);
            for (int y = std::max(1, h - 2); y < h; ++y)
                w.set({x, y, z}, desert ? BlockKind::sand : BlockKind::dirt);
            w.set({x, h, z}, desert ? BlockKind::sand : BlockKind::grass);
        }
    }

    Rng gen(mix_seed(config.seed, 0xB10C5));
    const int chunks_x = dims.x / 16, chunks_z = dims.z / 16;

    // Ore veins: per chunk, per band, a small random-walk blob clamped to the
    // band and placed only into stone (no floating or surface ore).
    for (int cz = 0; cz < chunks_z; ++cz) {
        for (int cx = 0; cx < chunks_x; ++cx) {
            for (auto& [item, band] : config.ore_bands) {
                BlockKind kind = *block_from_name(item);
                double d = band.veins_per_chunk;
                int veins = static_cast<int>(d) + (gen.chance(d - static_cast<int>(d)) ? 1 : 0);
                for (int v = 0; v < veins; ++v) {
                    Vec3i c{cx * 16 + gen.range(0, 15), detail::sample_band_y(gen, band),
                            cz * 16 + gen.range(0, 15)};
                    int size = gen.range(3, 6);
                    Vec3i p = c;
                    for (int s = 0; s < size; ++s) {
                        if (w.at(p) == BlockKind::stone) w.set(p, kind);
                        Vec3i q = p;
                        switch (gen.below(6)) {
                            case 0: q.x++; break;
                            case 1: q.x--; break;
                            case 2: q.z++; break;
                            case 3: q.z--; break;
                            case 4: q.y++; break;
                            default: q.y--; break;
                        }
                        q.y = std::clamp(q.y, band.y_min, band.y_max);
                        if (w.in_bounds(q)) p = q;
                    }
                }
            }
        }
    }

    // Trees: forest-heavy, sparse on plains, none in desert.
    for (int cz = 0; cz < chunks_z; ++cz) {
        for (int cx = 0; cx < chunks_x; ++cx) {
            std::string biome = w.biome_at(cx * 16 + 8, cz * 16 + 8);
            int trees = biome == "forest" ? gen.range(4, 7) : biome == "plains" ? (gen.chance(0.5) ? 1 : 0) : 0;
            for (int t = 0; t < trees; ++t) {
                int x = cx * 16 + gen.range(1, 14), z = cz * 16 + gen.range(1, 14);
                int h = w.surface_y(x, z);
                if (h < 0 || w.at({x, h, z}) != BlockKind::grass) continue;
                int trunk = gen.range(3, 4);
                if (h + trunk + 2 >= dims.y) continue;
                for (int i = 1; i <= trunk; ++i) w.set({x, h + i, z}, BlockKind::log);
                for (int dx = -1; dx <= 1; ++dx)
                    for (int dz = -1; dz <= 1; ++dz) {
                        Vec3i leaf{x + dx, h + trunk, z + dz};
                        if ((dx || dz) && w.at(leaf) == BlockKind::air) w.set(leaf, BlockKind::leaves);
                    }
                w.set({x, h + trunk + 1, z}, BlockKind::leaves);
            }
        }
    }

    // Shallow ponds on the plains give `apply` something to use a bucket on.
    for (int cz = 0; cz < chunks_z; ++cz) {
        for (int cx = 0; cx < chunks_x; ++cx) {
            if (w.biome_at(cx * 16 + 8, cz * 16 + 8) != "plains" || !gen.chance(0.3)) continue;
            int x = cx * 16 + gen.range(2, 13), z = cz * 16 + gen.range(2, 13);
            int h = w.surface_y(x, z);
            if (h <= 1) continue;
            for (int dx = 0; dx < 2; ++dx)
                for (int dz = 0; dz < 2; ++dz)
                    if (w.at({x + dx, h, z + dz}) == BlockKind::grass)
                        w.set({x + dx, h, z + dz}, BlockKind::water);
        }
    }

    if (config.hazard_lava) {
        for (int cz = 0; cz < chunks_z; ++cz)
            for (int cx = 0; cx < chunks_x; ++cx) {
                if (!gen.chance(0.15)) continue;
                Vec3i c{cx * 16 + gen.range(2, 13), gen.range(4, 9), cz * 16 + gen.range(2, 13)};
                for (int dx = 0; dx < 2; ++dx)
                    for (int dz = 0; dz < 2; ++dz)
                        if (w.at({c.x + dx, c.y, c.z + dz}) == BlockKind::stone)
                            w.set({c.x + dx, c.y, c.z + dz}, BlockKind::lava);
            }
    }

    // Passive animals scattered over walkable surface cells (never in trees).
    const char* kinds[4] = {"sheep", "cow", "pig", "chicken"};
    for (int i = 0; i < config.passive_entities; ++i) {
        for (int attempt = 0; attempt < 40; ++attempt) {
            int x = gen.range(2, dims.x - 3), z = gen.range(2, dims.z - 3);
            int h = w.surface_y(x, z);
            if (h < 0) continue;
            BlockKind ground = w.at({x, h, z});
            if (block_fluid(ground) || ground == BlockKind::leaves || ground == BlockKind::log)
                continue;
            Entity e;
            e.id = static_cast<int>(w.entities.size());
            e.kind = kinds[i % 4];
            e.pos = {x, h + 1, z};
            w.entities.push_back(e);
            break;
        }
    }

    w.rng = Rng(mix_seed(config.seed, 0xD1CE));
    return w;
}

// Deterministic spawn on open ground in the wooded half of the map, so raw
// wood is always within exploration range.
inline AgentState spawn_agent(const World& w, uint64_t seed) {
    Rng r(mix_seed(seed, 0x5BA87));
    AgentState a;
    for (int attempt = 0; attempt < 64; ++attempt) {
        int x = 32 + static_cast<int>(r.below(96));
        int z = 32 + static_cast<int>(r.below(std::max(1, w.config.dims.z - 64)));
        int h = w.surface_y(x, z);
        if (h < 0) continue;
        BlockKind ground = w.at({x, h, z});
        if (block_fluid(ground) || ground == BlockKind::leaves || ground == BlockKind::log) continue;
        if (!w.body_fits({x, h + 1, z})) continue;
        a.position = center_of({x, h + 1, z});
        return a;
    }
    a.position = center_of({w.config.dims.x / 2, w.surface_y(w.config.dims.x / 2, w.config.dims.z / 2) + 1,
                            w.config.dims.z / 2});
    return a;
}

// ===================== observation =====================

constexpr double kLidarRange = 30.0;  // max ray length in blocks
constexpr int kPatchRadius = 10;      // Chebyshev radius of the voxel patch
constexpr double kReach = 4.0;        // interaction distance

struct LidarHit {
    double yaw = 0, pitch = 0;
    double distance = -1;  // -1 = no hit within range
    std::string kind;      // block or entity kind, "" for a miss
    Vec3i cell;            // derived from (yaw,pitch,distance); convenience only
    bool is_entity = false;
    int entity_id = -1;
};

struct Observation {
    std::vector<LidarHit> lidar_hits;  // exactly 72*37 rays
    Vec3i patch_origin;                // feet cell the patch is centred on
    std::vector<uint8_t> voxel_patch;  // (2r+1)^3 kinds, navigation only
    std::map<std::string, int> inventory;
    std::string biome;
    int y_level = 0;
    GroundStatus ground = GroundStatus::on_ground;

    BlockKind patch_at(Vec3i cell) const {
        Vec3i d = cell - patch_origin;
        int n = 2 * kPatchRadius + 1;
        if (std::abs(d.x) > kPatchRadius || std::abs(d.y) > kPatchRadius || std::abs(d.z) > kPatchRadius)
            return BlockKind::bedrock;  // unknown space navigates as a wall
        size_t i = (static_cast<size_t>(d.y + kPatchRadius) * n + (d.z + kPatchRadius)) * n +
                   (d.x + kPatchRadius);
        return static_cast<BlockKind>(voxel_patch[i]);
    }

    const LidarHit* nearest(const std::function<bool(const LidarHit&)>& pred) const {
        const LidarHit* best = nullptr;
        for (auto& h : lidar_hits) {
            if (h.distance < 0 || !pred(h)) continue;
            if (!best || h.distance < best->distance) best = &h;
        }
        return best;
    }
};

inline Vec3d ray_direction(double yaw_deg, double pitch_deg) {
    constexpr double pi = 3.14159265358979323846;
    double yaw = yaw_deg * pi / 180.0, pitch = pitch_deg * pi / 180.0;
    return {std::cos(pitch) * std::cos(yaw), std::sin(pitch), std::cos(pitch) * std::sin(yaw)};
}

namespace detail {

// Amanatides & Woo voxel traversal from `origin` along `dir` (unit-ish).
// Visits cells after the starting one; returns entry distance via t.
template <typename F>
inline void march(Vec3d origin, Vec3d dir, double max_t, F&& visit) {
    Vec3i cell = cell_of(origin);
    Vec3i step{dir.x > 0 ? 1 : -1, dir.y > 0 ? 1 : -1, dir.z > 0 ? 1 : -1};
    auto bound = [](double o, double d, int s) {
        if (std::abs(d) < 1e-12) return std::numeric_limits<double>::infinity();
        double edge = s > 0 ? std::floor(o) + 1 : std::floor(o);
        return (edge - o) / d;
    };
    double tx = bound(origin.x, dir.x, step.x);
    double ty = bound(origin.y, dir.y, step.y);
    double tz = bound(origin.z, dir.z, step.z);
    double dx = std::abs(dir.x) < 1e-12 ? std::numeric_limits<double>::infinity() : std::abs(1.0 / dir.x);
    double dy = std::abs(dir.y) < 1e-12 ? std::numeric_limits<double>::infinity() : std::abs(1.0 / dir.y);
    double dz = std::abs(dir.z) < 1e-12 ? std::numeric_limits<double>::infinity() : std::abs(1.0 / dir.z);
    double t = 0;
    while (true) {
        if (tx <= ty && tx <= tz) {
            t = tx; tx += dx; cell.x += step.x;
        } else if (ty <= tz) {
            t = ty; ty += dy; cell.y += step.y;
        } else {
            t = tz; tz += dz; cell.z += step.z;
        }
        if (t > max_t) return;
        if (!visit(cell, t)) return;
    }
}

}  // namespace detail

// First opaque block or living entity along the exact (yaw,pitch) ray.
inline LidarHit cast_ray(const World& w, Vec3d eye, double yaw, double pitch, double max_range,
                         const std::unordered_map<int64_t, int>* entity_cells = nullptr) {
    LidarHit hit;
    hit.yaw = yaw;
    hit.pitch = pitch;
    Vec3d dir = ray_direction(yaw, pitch);
    auto key = [&](Vec3i c) {
        return (static_cast<int64_t>(c.y) << 40) ^ (static_cast<int64_t>(c.z + 512) << 20) ^
               static_cast<int64_t>(c.x + 512);
    };
    detail::march(eye, dir, max_range, [&](Vec3i cell, double t) {
        if (entity_cells) {
            auto it = entity_cells->find(key(cell));
            if (it != entity_cells->end()) {
                const Entity& e = w.entities[it->second];
                hit.distance = t;
                hit.kind = e.kind;
                hit.cell = cell;
                hit.is_entity = true;
                hit.entity_id = e.id;
                return false;
            }
        } else if (const Entity* e = w.entity_at(cell)) {
            hit.distance = t;
            hit.kind = e->kind;
            hit.cell = cell;
            hit.is_entity = true;
            hit.entity_id = e->id;
            return false;
        }
        BlockKind k = w.at(cell);
        if (block_opaque(k)) {
            hit.distance = t;
            hit.kind = block_name(k);
            hit.cell = cell;
            return false;
        }
        return true;
    });
    return hit;
}

inline Observation observe(const World& w, const AgentState& a) {
    Observation o;
    o.inventory = a.inventory;
    o.biome = w.biome_at(a.feet().x, a.feet().z);
    o.y_level = a.feet().y;
    o.ground = a.ground;
    o.patch_origin = a.feet();

    // Lidar sweep: yaw 0..355 x pitch -90..90, both at 5 degree intervals.
    std::unordered_map<int64_t, int> entity_cells;
    auto key = [](Vec3i c) {
        return (static_cast<int64_t>(c.y) << 40) ^ (static_cast<int64_t>(c.z + 512) << 20) ^
               static_cast<int64_t>(c.x + 512);
    };
    for (size_t i = 0; i < w.entities.size(); ++i)
        if (w.entities[i].alive) entity_cells[key(w.entities[i].pos)] = static_cast<int>(i);

    o.lidar_hits.reserve(72 * 37);
    Vec3d eye = a.eye();
    for (int yi = 0; yi < 72; ++yi)
        for (int pi = -18; pi <= 18; ++pi)
            o.lidar_hits.push_back(cast_ray(w, eye, yi * 5.0, pi * 5.0, kLidarRange, &entity_cells));

    // Voxel patch: Chebyshev radius 10 around the feet, nothing beyond.
    int n = 2 * kPatchRadius + 1;
    o.voxel_patch.resize(static_cast<size_t>(n) * n * n);
    size_t i = 0;
    for (int dy = -kPatchRadius; dy <= kPatchRadius; ++dy)
        for (int dz = -kPatchRadius; dz <= kPatchRadius; ++dz)
            for (int dx = -kPatchRadius; dx <= kPatchRadius; ++dx)
                o.voxel_patch[i++] =
                    static_cast<uint8_t>(w.at(o.patch_origin + Vec3i{dx, dy, dz}));
    return o;
}

// ===================== primitives =====================

struct Primitive {
    enum class Kind {
        move_forward,
        strafe_left,
        strafe_right,
        move_back,
        jump,
        turn,
        attack_click,
        use_click,
        place_block,
        select,
    };
    Kind kind = Kind::move_forward;
    double dyaw = 0, dpitch = 0;           // turn
    std::string item;                      // place_block / select
    std::optional<Vec3i> place_target;     // place_block; default = under feet

    static Primitive move_forward() { return {Kind::move_forward}; }
    static Primitive strafe_left() { return {Kind::strafe_left}; }
    static Primitive strafe_right() { return {Kind::strafe_right}; }
    static Primitive move_back() { return {Kind::move_back}; }
    static Primitive jump() { return {Kind::jump}; }
    static Primitive turn(double dyaw, double dpitch) {
        Primitive p{Kind::turn};
        p.dyaw = dyaw;
        p.dpitch = dpitch;
        return p;
    }
    static Primitive attack_click() { return {Kind::attack_click}; }
    static Primitive use_click() { return {Kind::use_click}; }
    static Primitive place_block(std::string item, std::optional<Vec3i> target = std::nullopt) {
        Primitive p{Kind::place_block};
        p.item = std::move(item);
        p.place_target = target;
        return p;
    }
    static Primitive select(std::string item) {
        Primitive p{Kind::select};
        p.item = std::move(item);
        return p;
    }
};

struct Event {
    enum class Kind {
        moved,
        blocked,
        jumped,
        turned,
        block_broken,
        insufficient_tier,
        block_placed,
        placement_invalid,
        item_selected,
        entity_killed,
        item_used,
        drop_collected,
        noop,
    };
    Kind kind;
    std::string detail;
    std::string item;
    int count = 0;
    Vec3i pos;
};

using EventList = std::vector<Event>;

namespace detail {

inline Vec3i yaw_cardinal(double yaw_deg, int quarter_turns = 0) {
    int q = static_cast<int>(std::llround(yaw_deg / 90.0)) + quarter_turns;
    q = ((q % 4) + 4) % 4;
    switch (q) {
        case 0: return {1, 0, 0};
        case 1: return {0, 0, 1};
        case 2: return {-1, 0, 0};
        default: return {0, 0, -1};
    }
}

// End-of-primitive physics: one primitive of hang-time after a jump,
// otherwise an instant fall onto the nearest support.
inline void settle(const World& w, AgentState& a, EventList& ev) {
    Vec3i feet = a.feet();
    if (w.supported(feet)) {
        a.airborne = 0;
        return;
    }
    if (a.airborne > 0) {
        a.airborne--;
        return;
    }
    int y = feet.y;
    while (y > 1 && !w.solid({feet.x, y - 1, feet.z})) --y;
    if (y != feet.y) {
        a.position = center_of({feet.x, y, feet.z});
        ev.push_back({Event::Kind::moved, "fell", "", feet.y - y, a.feet()});
    }
}

inline void try_move(World& w, AgentState& a, Vec3i dir, EventList& ev) {
    Vec3i target = a.feet() + dir;
    if (!w.body_fits(target)) {
        ev.push_back({Event::Kind::blocked, block_name(w.at(target)), "", 0, target});
        return;
    }
    a.position = center_of(target);
    ev.push_back({Event::Kind::moved, "", "", 0, target});
}

}  // namespace detail

inline EventList apply_primitive(World& w, AgentState& a, const Primitive& p) {
    EventList ev;
    using K = Primitive::Kind;
    switch (p.kind) {
        case K::move_forward: detail::try_move(w, a, detail::yaw_cardinal(a.yaw, 0), ev); break;
        case K::move_back: detail::try_move(w, a, detail::yaw_cardinal(a.yaw, 2), ev); break;
        case K::strafe_left: detail::try_move(w, a, detail::yaw_cardinal(a.yaw, 3), ev); break;
        case K::strafe_right: detail::try_move(w, a, detail::yaw_cardinal(a.yaw, 1), ev); break;
        case K::jump: {
            Vec3i feet = a.feet();
            if (a.airborne == 0 && w.supported(feet) && w.passable(feet.up(2))) {
                a.position = center_of(feet.up());
                a.airborne = 1;
                ev.push_back({Event::Kind::jumped, "", "", 0, a.feet()});
            } else {
                ev.push_back({Event::Kind::noop, "cannot jump", "", 0, feet});
            }
            break;
        }
        case K::turn: {
            a.yaw = std::fmod(std::fmod(a.yaw + p.dyaw, 360.0) + 360.0, 360.0);
            a.pitch = std::clamp(a.pitch + p.dpitch, -90.0, 90.0);
            ev.push_back({Event::Kind::turned, "", "", 0, a.feet()});
            break;
        }
        case K::attack_click: {
            LidarHit hit = cast_ray(w, a.eye(), a.yaw, a.pitch, kReach);
            if (hit.distance < 0) {
                ev.push_back({Event::Kind::noop, "nothing in reach", "", 0, a.feet()});
                break;
            }
            if (hit.is_entity) {
                for (auto& e : w.entities) {
                    if (e.id != hit.entity_id || !e.alive) continue;
                    e.hp -= 1;
                    if (e.hp <= 0) {
                        e.alive = false;
                        for (auto& [item, n] : entity_drops(e.kind))
                            w.drops.push_back({e.pos, item, n});
                        ev.push_back({Event::Kind::entity_killed, e.kind, "", 0, e.pos});
                    }
                }
                break;
            }
            BlockKind k = w.at(hit.cell);
            if (!block_breakable(k)) {
                ev.push_back({Event::Kind::noop, std::string("cannot break ") + block_name(k), "", 0,
                              hit.cell});
                break;
            }
            ToolTier need = w.rules.required(k);
            ToolTier have = a.equipped ? item_tool_tier(*a.equipped) : ToolTier::none;
            if (have < need) {
                ev.push_back({Event::Kind::insufficient_tier,
                              std::string(block_name(k)) + " needs " + tier_name(need) + " tier", "",
                              0, hit.cell});
                break;
            }
            w.set(hit.cell, BlockKind::air);
            a.placed.erase(hit.cell);
            std::string dropped = block_drop(k);
            if (!dropped.empty()) w.drops.push_back({hit.cell, dropped, 1});
            ev.push_back({Event::Kind::block_broken, block_name(k), dropped, 1, hit.cell});
            break;
        }
        case K::use_click: {
            LidarHit hit = cast_ray(w, a.eye(), a.yaw, a.pitch, kReach);
            std::string tool = a.equipped.value_or("");
            if (hit.distance < 0 || tool.empty()) {
                ev.push_back({Event::Kind::noop, "nothing to use", "", 0, a.feet()});
                break;
            }
            if (tool == "bucket" && !hit.is_entity && w.at(hit.cell) == BlockKind::water) {
                w.set(hit.cell, BlockKind::air);
                a.take("bucket", 1);
                a.add("water_bucket", 1);
                ev.push_back({Event::Kind::item_used, "water", "water_bucket", 1, hit.cell});
            } else if (tool == "bucket" && hit.is_entity && hit.kind == "cow") {
                a.take("bucket", 1);
                a.add("milk_bucket", 1);
                ev.push_back({Event::Kind::item_used, "cow", "milk_bucket", 1, hit.cell});
            } else if (tool == "shears" && hit.is_entity && hit.kind == "sheep") {
                a.add("wool", 2);
                ev.push_back({Event::Kind::item_used, "sheep", "wool", 2, hit.cell});
            } else {
                ev.push_back({Event::Kind::noop, tool + " has no use on " + hit.kind, "", 0, hit.cell});
            }
            break;
        }
        case K::place_block: {
            Vec3i target = p.place_target.value_or(a.feet().down());
            auto kind = placeable_block(p.item);
            Vec3i feet = a.feet();
            bool into_body = target == feet || target == feet.up();
            if (!kind || a.count(p.item) < 1 || !w.in_bounds(target) ||
                chebyshev(target, feet) > static_cast<int>(kReach) || w.solid(target) || into_body) {
                ev.push_back({Event::Kind::placement_invalid, p.item, "", 0, target});
                break;
            }
            a.take(p.item, 1);
            w.set(target, *kind);
            a.placed.insert(target);
            ev.push_back({Event::Kind::block_placed, "", p.item, 1, target});
            break;
        }
        case K::select: {
            if (a.count(p.item) > 0) {
                a.equipped = p.item;
                ev.push_back({Event::Kind::item_selected, "", p.item, 0, a.feet()});
            } else {
                ev.push_back({Event::Kind::noop, p.item + " not in inventory", "", 0, a.feet()});
            }
            break;
        }
    }
    detail::settle(w, a, ev);
    return ev;
}

// One world tick: entities wander, drops fall to support, and drops inside
// Chebyshev distance 1 of the agent are collected. The harness advances one
// tick per primitive.
inline EventList tick(World& w, AgentState* agent = nullptr) {
    EventList ev;
    w.tick_count++;
    for (auto& d : w.drops)
        while (d.pos.y > 1 && !w.solid(d.pos.down()) && !block_fluid(w.at(d.pos.down())))
            d.pos = d.pos.down();
    for (auto& e : w.entities) {
        if (!e.alive) continue;
        uint64_t r = w.rng.below(8);
        if (r >= 4) continue;  // idle
        Vec3i target = e.pos + cardinal_dirs()[r];
        if (!w.in_bounds(target)) continue;
        // step up/down single blocks, stay on solid ground, keep out of trees
        if (w.solid(target)) target = target.up();
        else if (!w.solid(target.down())) target = target.down();
        BlockKind support = w.at(target.down());
        if (w.in_bounds(target) && !w.solid(target) && block_solid(support) &&
            !block_fluid(support) && support != BlockKind::leaves && support != BlockKind::log)
            e.pos = target;
    }
    if (agent) {
        Vec3i feet = agent->feet();
        for (auto it = w.drops.begin(); it != w.drops.end();) {
            if (chebyshev(it->pos, feet) <= 1) {
                agent->add(it->item, it->count);
                ev.push_back({Event::Kind::drop_collected, "", it->item, it->count, it->pos});
                it = w.drops.erase(it);
            } else {
                ++it;
            }
        }
    }
    return ev;
}

}  // namespace voxagent
