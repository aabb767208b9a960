#pragma once

#include <json.hpp>
#include <string>

#include "rsgame/model.hpp"

namespace rsgame {

/// Builds a model from its JSON document. Keys: states, actions_p1,
/// actions_p2, transition [{i,u,v,j,p or log_p}], cost [{i,u,v,c}], theta, i0,
/// closed, lyapunov {W | log_W, gamma | ell, K, C}. Unknown keys and
/// malformed values throw IngestError.
GameModel model_from_json(const nlohmann::json& doc);
GameModel load_model(const std::string& path);

/// Inverse of model_from_json. W is written as log_W; masses below the
/// normal double range are written as log_p.
nlohmann::json model_to_json(const GameModel& model);

/// Writes JSON with 17 significant digits.
void write_json(const nlohmann::json& doc, const std::string& path);
std::string dump_json(const nlohmann::json& doc);

}  // namespace rsgame
