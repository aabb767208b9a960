#include "rsgame/model_io.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>

#include "rsgame/errors.hpp"
#include "rsgame/logmath.hpp"

namespace rsgame {
namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) throw IngestError(where + " must be an object");
  for (const auto& [key, _] : obj.items())
    if (!allowed.count(key)) throw IngestError("unknown key '" + key + "' in " + where);
}

const json& need(const json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key)) throw IngestError("missing key '" + std::string(key) + "' in " + where);
  return obj.at(key);
}

int as_int(const json& x, const std::string& what) {
  if (!x.is_number_integer()) throw IngestError(what + " must be an integer");
  return x.get<int>();
}

double as_number(const json& x, const std::string& what) {
  if (!x.is_number()) throw IngestError(what + " must be a number");
  return x.get<double>();
}

std::vector<std::string> labels(const json& x, const std::string& what) {
  if (!x.is_array()) throw IngestError(what + " must be an array of labels");
  std::vector<std::string> out;
  for (const auto& a : x) {
    if (a.is_string())
      out.push_back(a.get<std::string>());
    else if (a.is_number())
      out.push_back(a.dump());
    else
      throw IngestError(what + " labels must be strings or numbers");
  }
  return out;
}

std::vector<double> numbers(const json& x, const std::string& what) {
  if (!x.is_array()) throw IngestError(what + " must be an array");
  std::vector<double> out;
  for (const auto& a : x) out.push_back(as_number(a, what + " entry"));
  return out;
}

}  // namespace

GameModel model_from_json(const json& doc) {
  reject_unknown(doc, {"states", "actions_p1", "actions_p2", "transition", "cost", "theta", "i0", "closed", "lyapunov"},
                 "model");
  const int n = as_int(need(doc, "states", "model"), "states");
  GameModel::Builder b(n);
  const json& a1 = need(doc, "actions_p1", "model");
  const json& a2 = need(doc, "actions_p2", "model");
  if (!a1.is_array() || !a2.is_array() || static_cast<int>(a1.size()) != n ||
      static_cast<int>(a2.size()) != n)
    throw IngestError("actions_p1 and actions_p2 need one action list per state");
  for (int i = 0; i < n; ++i) b.set_actions(i, labels(a1[i], "actions_p1"), labels(a2[i], "actions_p2"));

  const json& tr = need(doc, "transition", "model");
  if (!tr.is_array()) throw IngestError("transition must be an array");
  for (const auto& r : tr) {
    reject_unknown(r, {"i", "u", "v", "j", "p", "log_p"}, "transition record");
    const int i = as_int(need(r, "i", "transition"), "i");
    const int u = as_int(need(r, "u", "transition"), "u");
    const int v = as_int(need(r, "v", "transition"), "v");
    const int j = as_int(need(r, "j", "transition"), "j");
    if (r.contains("p") == r.contains("log_p"))
      throw IngestError("transition record needs exactly one of p and log_p");
    if (r.contains("p"))
      b.add_transition(i, u, v, j, as_number(r.at("p"), "p"));
    else
      b.add_transition_log(i, u, v, j, as_number(r.at("log_p"), "log_p"));
  }
  if (doc.contains("cost")) {
    const json& co = doc.at("cost");
    if (!co.is_array()) throw IngestError("cost must be an array");
    for (const auto& r : co) {
      reject_unknown(r, {"i", "u", "v", "c"}, "cost record");
      b.set_cost(as_int(need(r, "i", "cost"), "i"), as_int(need(r, "u", "cost"), "u"),
                 as_int(need(r, "v", "cost"), "v"), as_number(need(r, "c", "cost"), "c"));
    }
  }
  if (doc.contains("theta")) b.set_theta(as_number(doc.at("theta"), "theta"));
  b.set_i0(as_int(need(doc, "i0", "model"), "i0"));
  if (doc.contains("closed")) {
    if (!doc.at("closed").is_boolean()) throw IngestError("closed must be a boolean");
    b.set_closed(doc.at("closed").get<bool>());
  }

  if (doc.contains("lyapunov")) {
    const json& ly = doc.at("lyapunov");
    reject_unknown(ly, {"W", "log_W", "gamma", "ell", "K", "C"}, "lyapunov");
    LyapunovData data;
    if (ly.contains("W") == ly.contains("log_W")) throw IngestError("lyapunov needs exactly one of W, log_W");
    if (ly.contains("W")) {
      for (double w : numbers(ly.at("W"), "W")) data.log_w.push_back(w > 0.0 ? std::log(w) : -INFINITY);
    } else {
      data.log_w = numbers(ly.at("log_W"), "log_W");
    }
    if (ly.contains("gamma") == ly.contains("ell"))
      throw IngestError("lyapunov needs exactly one of gamma, ell");
    if (ly.contains("gamma")) data.gamma = as_number(ly.at("gamma"), "gamma");
    if (ly.contains("ell")) data.ell = numbers(ly.at("ell"), "ell");
    if (ly.contains("K")) {
      if (!ly.at("K").is_array()) throw IngestError("K must be an array of states");
      for (const auto& k : ly.at("K")) data.small_set.push_back(as_int(k, "K entry"));
    }
    data.c_const = as_number(need(ly, "C", "lyapunov"), "C");
    b.set_lyapunov(std::move(data));
  }
  return std::move(b).build();
}

GameModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IngestError("cannot open model file " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw IngestError("model file " + path + " is not valid JSON: " + e.what());
  }
  return model_from_json(doc);
}

json model_to_json(const GameModel& model) {
  const int n = model.num_states();
  json doc;
  doc["states"] = n;
  json a1 = json::array(), a2 = json::array(), tr = json::array(), co = json::array();
  for (int i = 0; i < n; ++i) {
    a1.push_back(model.actions_p1(i));
    a2.push_back(model.actions_p2(i));
    for (int u = 0; u < model.num_p1(i); ++u) {
      for (int v = 0; v < model.num_p2(i); ++v) {
        for (const auto& t : model.row(i, u, v))
          // Masses below the normal range are written as log_p so they survive.
          if (t.prob >= std::numeric_limits<double>::min() || t.log_prob == kNegInf)
            tr.push_back({{"i", i}, {"u", u}, {"v", v}, {"j", t.next}, {"p", t.prob}});
          else
            tr.push_back({{"i", i}, {"u", u}, {"v", v}, {"j", t.next}, {"log_p", t.log_prob}});
        co.push_back({{"i", i}, {"u", u}, {"v", v}, {"c", model.raw_cost(i, u, v)}});
      }
    }
  }
  doc["actions_p1"] = std::move(a1);
  doc["actions_p2"] = std::move(a2);
  doc["transition"] = std::move(tr);
  doc["cost"] = std::move(co);
  doc["theta"] = model.theta();
  doc["i0"] = model.i0();
  doc["closed"] = model.declared_closed();
  if (const auto& ly = model.lyapunov()) {
    json l;
    l["log_W"] = ly->log_w;
    if (ly->gamma)
      l["gamma"] = *ly->gamma;
    else
      l["ell"] = ly->ell;
    l["K"] = ly->small_set;
    l["C"] = ly->c_const;
    doc["lyapunov"] = std::move(l);
  }
  return doc;
}

std::string dump_json(const json& doc) { return doc.dump(2); }

void write_json(const json& doc, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot write " + path);
  out << dump_json(doc) << '\n';
}

}  // namespace rsgame
