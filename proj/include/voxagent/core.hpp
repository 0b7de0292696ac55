#pragma once
// Shared vocabulary for the voxel world and the agent stack: integer vectors,
// a deterministic RNG, block/tool tier tables, and the JSON alias used by
// every serializer. Everything here is allocation-light and header-only.

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace voxagent {

// Insertion-ordered JSON keeps every dump byte-stable across reruns.
using json = nlohmann::ordered_json;

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ===================== geometry =====================

struct Vec3i {
    int x = 0, y = 0, z = 0;

    friend Vec3i operator+(Vec3i a, Vec3i b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
    friend Vec3i operator-(Vec3i a, Vec3i b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
    friend bool operator==(Vec3i a, Vec3i b) { return a.x == b.x && a.y == b.y && a.z == b.z; }
    friend bool operator!=(Vec3i a, Vec3i b) { return !(a == b); }
    friend bool operator<(Vec3i a, Vec3i b) {
        if (a.y != b.y) return a.y < b.y;
        if (a.z != b.z) return a.z < b.z;
        return a.x < b.x;
    }

    Vec3i up(int n = 1) const { return {x, y + n, z}; }
    Vec3i down(int n = 1) const { return {x, y - n, z}; }
};

inline int chebyshev(Vec3i a, Vec3i b) {
    return std::max({std::abs(a.x - b.x), std::abs(a.y - b.y), std::abs(a.z - b.z)});
}
inline int manhattan(Vec3i a, Vec3i b) {
    return std::abs(a.x - b.x) + std::abs(a.y - b.y) + std::abs(a.z - b.z);
}

struct Vec3d {
    double x = 0, y = 0, z = 0;

    friend Vec3d operator+(Vec3d a, Vec3d b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
    friend Vec3d operator-(Vec3d a, Vec3d b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
    Vec3d scaled(double s) const { return {x * s, y * s, z * s}; }
    double norm() const { return std::sqrt(x * x + y * y + z * z); }
};

inline Vec3i cell_of(Vec3d p) {
    return {static_cast<int>(std::floor(p.x)), static_cast<int>(std::floor(p.y)),
            static_cast<int>(std::floor(p.z))};
}
inline Vec3d center_of(Vec3i c) {
    return {c.x + 0.5, static_cast<double>(c.y), c.z + 0.5};
}

// The four walkable directions, in a fixed deterministic order.
inline const std::array<Vec3i, 4>& cardinal_dirs() {
    static const std::array<Vec3i, 4> d{{{1, 0, 0}, {-1, 0, 0}, {0, 0, 1}, {0, 0, -1}}};
    return d;
}

// ===================== deterministic RNG =====================

// SplitMix64. Tiny, seedable, identical on every platform; std distributions
// are avoided on purpose because their streams are implementation-defined.
struct Rng {
    uint64_t state = 0x9E3779B97F4A7C15ull;

    explicit Rng(uint64_t seed = 0) : state(seed + 0x9E3779B97F4A7C15ull) {}

    uint64_t next() {
        state += 0x9E3779B97F4A7C15ull;
        uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }
    // [0, 1)
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    // [0, n)
    uint64_t below(uint64_t n) { return n ? next() % n : 0; }
    // [lo, hi] inclusive
    int range(int lo, int hi) { return lo + static_cast<int>(below(static_cast<uint64_t>(hi - lo + 1))); }
    bool chance(double p) { return uniform() < p; }
};

inline uint64_t mix_seed(uint64_t seed, uint64_t salt) {
    uint64_t z = seed ^ (salt * 0xFF51AFD7ED558CCDull);
    z = (z ^ (z >> 33)) * 0xC4CEB9FE1A85EC53ull;
    return z ^ (z >> 33);
}

// ===================== blocks =====================

enum class BlockKind : uint8_t {
    air = 0,
    grass,
    dirt,
    sand,
    stone,
    cobblestone,
    planks,
    log,
    leaves,
    water,
    lava,
    coal_ore,
    iron_ore,
    gold_ore,
    diamond_ore,
    obsidian,
    bedrock,
    count_,
};

inline const char* block_name(BlockKind k) {
    switch (k) {
        case BlockKind::air: return "air";
        case BlockKind::grass: return "grass";
        case BlockKind::dirt: return "dirt";
        case BlockKind::sand: return "sand";
        case BlockKind::stone: return "stone";
        case BlockKind::cobblestone: return "cobblestone";
        case BlockKind::planks: return "planks";
        case BlockKind::log: return "log";
        case BlockKind::leaves: return "leaves";
        case BlockKind::water: return "water";
        case BlockKind::lava: return "lava";
        case BlockKind::coal_ore: return "coal_ore";
        case BlockKind::iron_ore: return "iron_ore";
        case BlockKind::gold_ore: return "gold_ore";
        case BlockKind::diamond_ore: return "diamond_ore";
        case BlockKind::obsidian: return "obsidian";
        case BlockKind::bedrock: return "bedrock";
        default: return "air";
    }
}

inline std::optional<BlockKind> block_from_name(const std::string& name) {
    for (int i = 0; i < static_cast<int>(BlockKind::count_); ++i) {
        auto k = static_cast<BlockKind>(i);
        if (name == block_name(k)) return k;
    }
    return std::nullopt;
}

inline bool block_solid(BlockKind k) {
    return k != BlockKind::air && k != BlockKind::water && k != BlockKind::lava;
}
// Everything but air stops a lidar ray; fluids are visible hits.
inline bool block_opaque(BlockKind k) { return k != BlockKind::air; }
inline bool block_fluid(BlockKind k) { return k == BlockKind::water || k == BlockKind::lava; }
inline bool block_breakable(BlockKind k) {
    return block_solid(k) && k != BlockKind::air && k != BlockKind::bedrock;
}

// Item dropped when the block is broken ("" = nothing).
inline std::string block_drop(BlockKind k) {
    switch (k) {
        case BlockKind::grass: return "dirt";
        case BlockKind::stone: return "cobblestone";
        case BlockKind::coal_ore: return "coal";
        case BlockKind::diamond_ore: return "diamond";
        case BlockKind::leaves: return "";
        case BlockKind::air:
        case BlockKind::water:
        case BlockKind::lava:
        case BlockKind::bedrock: return "";
        default: return block_name(k);  // dirt, sand, ores kept as-is, planks, log, ...
    }
}

// Items that may be placed back into the world. Stations are deliberately
// not placeable: crafting uses them straight from the inventory.
inline std::optional<BlockKind> placeable_block(const std::string& item) {
    if (item == "dirt") return BlockKind::dirt;
    if (item == "cobblestone") return BlockKind::cobblestone;
    if (item == "planks") return BlockKind::planks;
    if (item == "sand") return BlockKind::sand;
    if (item == "log") return BlockKind::log;
    if (item == "stone") return BlockKind::stone;
    if (item == "obsidian") return BlockKind::obsidian;
    return std::nullopt;
}

// ===================== tool tiers =====================

enum class ToolTier : uint8_t { none = 0, wood, stone, iron, diamond };

inline const char* tier_name(ToolTier t) {
    switch (t) {
        case ToolTier::none: return "none";
        case ToolTier::wood: return "wood";
        case ToolTier::stone: return "stone";
        case ToolTier::iron: return "iron";
        case ToolTier::diamond: return "diamond";
    }
    return "none";
}

inline std::optional<ToolTier> tier_from_name(const std::string& s) {
    if (s == "none") return ToolTier::none;
    if (s == "wood") return ToolTier::wood;
    if (s == "stone") return ToolTier::stone;
    if (s == "iron") return ToolTier::iron;
    if (s == "diamond") return ToolTier::diamond;
    return std::nullopt;
}

// Tier granted by a held item. Only pickaxes unlock mining tiers; bare hands
// and everything else count as tier none.
inline ToolTier item_tool_tier(const std::string& item) {
    if (item == "wooden_pickaxe") return ToolTier::wood;
    if (item == "stone_pickaxe") return ToolTier::stone;
    if (item == "golden_pickaxe") return ToolTier::wood;
    if (item == "iron_pickaxe") return ToolTier::iron;
    if (item == "diamond_pickaxe") return ToolTier::diamond;
    return ToolTier::none;
}

// Minimum tier needed to harvest a block. One-click breaking otherwise.
inline ToolTier default_block_tier(BlockKind k) {
    switch (k) {
        case BlockKind::stone:
        case BlockKind::cobblestone:
        case BlockKind::coal_ore: return ToolTier::wood;
        case BlockKind::iron_ore: return ToolTier::stone;
        case BlockKind::gold_ore:
        case BlockKind::diamond_ore: return ToolTier::iron;
        case BlockKind::obsidian: return ToolTier::diamond;
        default: return ToolTier::none;
    }
}

inline std::string pickaxe_for_tier(ToolTier t) {
    switch (t) {
        case ToolTier::wood: return "wooden_pickaxe";
        case ToolTier::stone: return "stone_pickaxe";
        case ToolTier::iron: return "iron_pickaxe";
        case ToolTier::diamond: return "diamond_pickaxe";
        default: return "";
    }
}

}  // namespace voxagent
