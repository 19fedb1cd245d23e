#pragma once

#include <json.hpp>

#include "dstomo/design.hpp"
#include "dstomo/labgeom.hpp"
#include "dstomo/tomo.hpp"

namespace dstomo {

void to_json(nlohmann::json& j, const TetraSolution& s);
void from_json(const nlohmann::json& j, TetraSolution& s);

void to_json(nlohmann::json& j, const SolutionRecord& r);
void from_json(const nlohmann::json& j, SolutionRecord& r);

void to_json(nlohmann::json& j, const Design& d);
void from_json(const nlohmann::json& j, Design& d);

void to_json(nlohmann::json& j, const CountRecord& c);
void from_json(const nlohmann::json& j, CountRecord& c);

void to_json(nlohmann::json& j, const ReconstructionReport& r);
void from_json(const nlohmann::json& j, ReconstructionReport& r);

void to_json(nlohmann::json& j, const PhysicalGeometry& g);
void from_json(const nlohmann::json& j, PhysicalGeometry& g);

void to_json(nlohmann::json& j, const DetectorLayout& l);
void from_json(const nlohmann::json& j, DetectorLayout& l);

}  // namespace dstomo
