#pragma once

#include <string>

#include "minsurf/scene.hpp"

namespace minsurf {

// Scene JSON schema (keys are bit-exact):
//   { "interior_ends": [[re,im],...], "exterior_punctures": [[re,im],...],
//     "discs": [{"center":[re,im],"radius":r,"ends":[idx,...]},...],
//     "arcs": [{"control":[[re,im],...]},...],
//     "marked": [{"X":[[x,y,z],...],"sigma":[[x,y,z],...]},...] }   (optional)
// Infinity is encoded as the string "inf".
SceneModel scene_from_json(const std::string& text);
std::string scene_to_json(const SceneModel& scene);

SceneModel load_scene(const std::string& path);
void save_scene(const SceneModel& scene, const std::string& path);

}  // namespace minsurf
