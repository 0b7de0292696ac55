#pragma once

// Shared fabric for the test suite: hand-built worlds, aiming helpers, and a
// scripted provider that replays canned responses.

#include <cmath>
#include <string>
#include <vector>

#include <voxagent/planner.hpp>
#include <voxagent/world.hpp>

namespace vt {

using namespace voxagent;

// Air-filled box with a flat solid floor: bedrock at y=0, stone up to and
// including floor_y. Entities disabled so rays only see blocks.
inline World box_world(Vec3i dims, int floor_y, BlockKind floor = BlockKind::stone) {
    World w;
    w.config.dims = dims;
    w.config.passive_entities = 0;
    w.config.biome_layout = {{"plains", 0, dims.x - 1, 0, dims.z - 1}};
    w.blocks.assign(static_cast<size_t>(dims.x) * dims.y * dims.z,
                    static_cast<uint8_t>(BlockKind::air));
    for (int x = 0; x < dims.x; ++x)
        for (int z = 0; z < dims.z; ++z) {
            w.set({x, 0, z}, BlockKind::bedrock);
            for (int y = 1; y <= floor_y; ++y) w.set({x, y, z}, floor);
        }
    return w;
}

inline AgentState agent_at(Vec3i feet) {
    AgentState a;
    a.position = center_of(feet);
    return a;
}

// Point the agent's view ray at the centre of a cell.
inline void aim_at(AgentState& a, Vec3i cell) {
    Vec3d c{cell.x + 0.5, cell.y + 0.5, cell.z + 0.5};
    Vec3d e = a.eye();
    double dx = c.x - e.x, dy = c.y - e.y, dz = c.z - e.z;
    double horiz = std::sqrt(dx * dx + dz * dz);
    constexpr double pi = 3.14159265358979323846;
    a.yaw = std::atan2(dz, dx) * 180.0 / pi;
    a.pitch = std::atan2(dy, horiz) * 180.0 / pi;
}

// Replays canned completions in order; repeats the last one when exhausted.
class ScriptedProvider : public PlanProvider {
  public:
    std::vector<std::string> script;
    int calls = 0;

    explicit ScriptedProvider(std::vector<std::string> s = {}) : script(std::move(s)) {}

    std::string complete(const std::vector<ChatMessage>& messages) override {
        last_messages = messages;
        ++calls;
        if (script.empty()) return "";
        size_t i = std::min(static_cast<size_t>(calls - 1), script.size() - 1);
        return script[i];
    }

    std::vector<ChatMessage> last_messages;
};

// Wraps an action list in the fenced response envelope the planner expects.
inline std::string fenced_plan(const json& action_list) {
    json doc{{"explanation", "test"}, {"thoughts", "test"}, {"action_list", action_list}};
    return "```\n" + doc.dump() + "\n```";
}

}  // namespace vt
