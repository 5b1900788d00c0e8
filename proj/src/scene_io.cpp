#include "minsurf/scene_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace minsurf {

namespace {

using nlohmann::ordered_json;

ExtendedPoint parse_point(const ordered_json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() == "inf") return ExtendedPoint::infinity();
    throw Error(Err::BadConfig, "unknown point literal: " + j.get<std::string>());
  }
  if (!j.is_array() || j.size() != 2) throw Error(Err::BadConfig, "point must be [re,im] or \"inf\"");
  return ExtendedPoint(Complex(j[0].get<double>(), j[1].get<double>()));
}

ordered_json dump_point(const ExtendedPoint& p) {
  if (p.infinite) return ordered_json("inf");
  return ordered_json::array({p.z.real(), p.z.imag()});
}

Complex parse_complex(const ordered_json& j) {
  if (!j.is_array() || j.size() != 2) throw Error(Err::BadConfig, "complex value must be [re,im]");
  return {j[0].get<double>(), j[1].get<double>()};
}

}  // namespace

SceneModel scene_from_json(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const std::exception& e) {
    throw Error(Err::BadConfig, std::string("scene JSON parse error: ") + e.what());
  }
  SceneModel scene;
  for (const auto& e : j.value("interior_ends", ordered_json::array()))
    scene.sphere.interior_ends.push_back(parse_point(e));
  for (const auto& e : j.value("exterior_punctures", ordered_json::array()))
    scene.sphere.exterior_punctures.push_back(parse_point(e));
  for (const auto& d : j.value("discs", ordered_json::array())) {
    DiscRegion disc;
    disc.center = parse_complex(d.at("center"));
    disc.radius = d.at("radius").get<double>();
    for (const auto& idx : d.value("ends", ordered_json::array()))
      disc.contained_ends.push_back(idx.get<int>());
    scene.sets.regions.push_back(std::move(disc));
  }
  for (const auto& a : j.value("arcs", ordered_json::array())) {
    AnalyticArc arc;
    const auto& ctl = a.at("control");
    Eigen::VectorXcd c(ctl.size());
    for (size_t i = 0; i < ctl.size(); ++i) c[static_cast<Eigen::Index>(i)] = parse_complex(ctl[i]);
    arc.control = Poly(std::move(c));
    if (a.contains("samples")) arc.n_samples = a["samples"].get<int>();
    scene.sets.arcs.push_back(std::move(arc));
  }
  if (j.contains("marked")) {
    MarkedCurveData marked;
    for (const auto& m : j["marked"]) {
      MarkedArc arc;
      const auto& X = m.at("X");
      const auto& S = m.at("sigma");
      if (X.size() != S.size()) throw Error(Err::BadConfig, "marked X/sigma length mismatch");
      arc.X.resize(3, static_cast<Eigen::Index>(X.size()));
      arc.sigma.resize(3, static_cast<Eigen::Index>(S.size()));
      for (size_t i = 0; i < X.size(); ++i)
        for (int k = 0; k < 3; ++k) {
          arc.X(k, static_cast<Eigen::Index>(i)) = X[i][static_cast<size_t>(k)].get<double>();
          arc.sigma(k, static_cast<Eigen::Index>(i)) = S[i][static_cast<size_t>(k)].get<double>();
        }
      marked.arcs.push_back(std::move(arc));
    }
    scene.marked = std::move(marked);
  }
  return scene;
}

std::string scene_to_json(const SceneModel& scene) {
  ordered_json j;
  j["interior_ends"] = ordered_json::array();
  for (const auto& e : scene.sphere.interior_ends) j["interior_ends"].push_back(dump_point(e));
  j["exterior_punctures"] = ordered_json::array();
  for (const auto& e : scene.sphere.exterior_punctures)
    j["exterior_punctures"].push_back(dump_point(e));
  j["discs"] = ordered_json::array();
  for (const auto& d : scene.sets.regions) {
    ordered_json disc;
    disc["center"] = ordered_json::array({d.center.real(), d.center.imag()});
    disc["radius"] = d.radius;
    disc["ends"] = d.contained_ends;
    j["discs"].push_back(std::move(disc));
  }
  j["arcs"] = ordered_json::array();
  for (const auto& a : scene.sets.arcs) {
    ordered_json arc;
    arc["control"] = ordered_json::array();
    for (Eigen::Index i = 0; i < a.control.c.size(); ++i)
      arc["control"].push_back(ordered_json::array({a.control.c[i].real(), a.control.c[i].imag()}));
    arc["samples"] = a.n_samples;
    j["arcs"].push_back(std::move(arc));
  }
  if (scene.marked) {
    j["marked"] = ordered_json::array();
    for (const auto& m : scene.marked->arcs) {
      ordered_json arc;
      arc["X"] = ordered_json::array();
      arc["sigma"] = ordered_json::array();
      for (Eigen::Index i = 0; i < m.X.cols(); ++i) {
        arc["X"].push_back(ordered_json::array({m.X(0, i), m.X(1, i), m.X(2, i)}));
        arc["sigma"].push_back(ordered_json::array({m.sigma(0, i), m.sigma(1, i), m.sigma(2, i)}));
      }
      j["marked"].push_back(std::move(arc));
    }
  }
  return j.dump(2);
}

SceneModel load_scene(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Err::BadConfig, "cannot open scene file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return scene_from_json(ss.str());
}

void save_scene(const SceneModel& scene, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(Err::BadConfig, "cannot write scene file: " + path);
  out << scene_to_json(scene);
}

}  // namespace minsurf
