#include "core/stack_config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "core/errors.hpp"

namespace snspd {

namespace {

using nlohmann::json;

double require_number(const json& j, const char* key, const std::string& origin) {
  if (!j.contains(key) || !j.at(key).is_number()) {
    throw ValidationError(origin + ": missing numeric field '" + key + "'");
  }
  return j.at(key).get<double>();
}

std::string optional_string(const json& j, const char* key, const std::string& fallback) {
  if (!j.contains(key)) return fallback;
  return j.at(key).get<std::string>();
}

MeanderGeometry parse_meander(const json& j, const std::string& origin) {
  MeanderGeometry geom;
  geom.linewidth_nm = require_number(j, "linewidth_nm", origin);
  geom.pitch_nm = require_number(j, "pitch_nm", origin);
  geom.film_thickness_nm = require_number(j, "film_thickness_nm", origin);
  geom.active_radius_um = require_number(j, "active_radius_um", origin);
  geom.validate();
  return geom;
}

LayerStack parse_builder(const MaterialLibrary& materials, const json& j,
                         const std::string& origin) {
  const std::string name = j.at("builder").get<std::string>();
  if (name != kMembraneCavityV1) {
    throw ValidationError(origin + ": unknown stack builder '" + name + "'");
  }
  if (!j.contains("params") || !j.at("params").is_object()) {
    throw ValidationError(origin + ": builder needs a 'params' object");
  }
  const json& p = j.at("params");
  json mats = p.contains("materials") ? p.at("materials") : json::object();

  MembraneCavityParams params;
  params.fiber = materials.get(optional_string(mats, "fiber", "SiO2"));
  params.gap = materials.get(optional_string(mats, "gap", "Air"));
  params.wire = materials.get(optional_string(mats, "wire", "NbTiN"));
  params.spacer = materials.get(optional_string(mats, "spacer", "SiO2"));
  params.mirror = materials.get(optional_string(mats, "mirror", "Au"));
  params.exit = materials.get(optional_string(mats, "exit", "Air"));
  if (!p.contains("meander")) throw ValidationError(origin + ": builder needs 'meander'");
  params.meander = parse_meander(p.at("meander"), origin);
  params.airgap_nm = require_number(p, "airgap_nm", origin);
  if (p.contains("spacer_thickness_nm")) {
    params.spacer_thickness_nm = p.at("spacer_thickness_nm").get<double>();
  }
  if (p.contains("mirror_thickness_nm")) {
    params.mirror_thickness_nm = p.at("mirror_thickness_nm").get<double>();
  }
  return membrane_cavity_v1(params);
}

LayerStack parse_explicit(const MaterialLibrary& materials, const json& j,
                          const std::string& origin) {
  if (!j.contains("entry_medium") || !j.contains("exit_medium") || !j.contains("layers")) {
    throw ValidationError(origin +
                          ": stack needs 'entry_medium', 'exit_medium' and 'layers'");
  }
  MaterialRef entry = materials.get(j.at("entry_medium").get<std::string>());
  MaterialRef exit = materials.get(j.at("exit_medium").get<std::string>());
  const json& layers_json = j.at("layers");
  if (!layers_json.is_array() || layers_json.empty()) {
    throw ValidationError(origin + ": 'layers' must be a non-empty array");
  }
  std::vector<Layer> layers;
  std::optional<std::size_t> airgap_index;
  for (std::size_t i = 0; i < layers_json.size(); ++i) {
    const json& lj = layers_json.at(i);
    if (lj.contains("meander")) {
      MeanderGeometry geom = parse_meander(lj.at("meander"), origin);
      MaterialRef wire = materials.get(optional_string(lj, "wire_material", "NbTiN"));
      MaterialRef gap = materials.get(optional_string(lj, "gap_material", "Air"));
      layers.push_back(Layer::meander(geom, std::move(wire), std::move(gap)));
    } else if (lj.contains("material")) {
      MaterialRef mat = materials.get(lj.at("material").get<std::string>());
      layers.push_back(Layer::homogeneous(std::move(mat),
                                          require_number(lj, "thickness_nm", origin)));
    } else {
      throw ValidationError(origin + ": layer " + std::to_string(i) +
                            " needs 'material' or 'meander'");
    }
    if (lj.value("airgap", false)) {
      if (airgap_index) {
        throw ValidationError(origin + ": only one layer may be flagged as airgap");
      }
      airgap_index = i;
    }
  }
  return LayerStack(std::move(entry), std::move(layers), std::move(exit), airgap_index);
}

}  // namespace

LayerStack stack_from_json_text(const MaterialLibrary& materials, const std::string& text,
                                const std::string& origin) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ValidationError(origin + ": invalid JSON: " + e.what());
  }
  try {
    if (j.contains("builder")) return parse_builder(materials, j, origin);
    return parse_explicit(materials, j, origin);
  } catch (const json::exception& e) {
    throw ValidationError(origin + ": malformed stack description: " + e.what());
  }
}

LayerStack stack_from_json_file(const MaterialLibrary& materials, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open stack file: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return stack_from_json_text(materials, buffer.str(), path);
}

}  // namespace snspd
