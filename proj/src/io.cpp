#include "qens/io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace qens {

namespace {

using nlohmann::json;

PureState parse_state(const json& j, std::size_t index) {
  if (!j.is_array() || j.size() != 2) {
    throw std::invalid_argument("states[" + std::to_string(index) +
                                "] must hold two amplitude pairs");
  }
  Vector v(2);
  for (std::size_t a = 0; a < 2; ++a) {
    const json& pair = j[a];
    if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() ||
        !pair[1].is_number()) {
      throw std::invalid_argument("states[" + std::to_string(index) +
                                  "] amplitudes must be [re, im] pairs");
    }
    v(static_cast<Eigen::Index>(a)) =
        cplx(pair[0].get<double>(), pair[1].get<double>());
  }
  try {
    return PureState(std::move(v));
  } catch (const numerical_error& err) {
    throw std::invalid_argument("states[" + std::to_string(index) +
                                "]: " + err.what());
  }
}

std::vector<PureState> parse_states(const json& j) {
  if (!j.contains("states") || !j["states"].is_array() || j["states"].empty()) {
    throw std::invalid_argument("ensemble definition needs a non-empty states array");
  }
  std::vector<PureState> states;
  for (std::size_t i = 0; i < j["states"].size(); ++i) {
    states.push_back(parse_state(j["states"][i], i));
  }
  return states;
}

}  // namespace

Ensemble parse_ensemble(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& err) {
    throw std::invalid_argument(std::string("ensemble definition is not valid JSON: ") +
                                err.what());
  }
  if (!j.is_object() || !j.contains("type") || !j["type"].is_string()) {
    throw std::invalid_argument("ensemble definition needs a type field");
  }
  const std::string type = j["type"].get<std::string>();
  const std::vector<PureState> states = parse_states(j);

  if (type == "iid") {
    if (!j.contains("probs") || !j["probs"].is_array() ||
        j["probs"].size() != states.size()) {
      throw std::invalid_argument("iid ensembles need a probs array parallel to states");
    }
    std::vector<std::pair<double, PureState>> members;
    for (std::size_t i = 0; i < states.size(); ++i) {
      if (!j["probs"][i].is_number()) {
        throw std::invalid_argument("probs entries must be numbers");
      }
      members.emplace_back(j["probs"][i].get<double>(), states[i]);
    }
    return IIDEnsemble(std::move(members));
  }

  if (type == "sequence") {
    std::vector<PureState> pattern;
    if (j.contains("pattern")) {
      if (!j["pattern"].is_array() || j["pattern"].empty()) {
        throw std::invalid_argument("pattern must be a non-empty index array");
      }
      for (const json& entry : j["pattern"]) {
        if (!entry.is_number_unsigned() || entry.get<std::size_t>() >= states.size()) {
          throw std::invalid_argument("pattern entries must index into states");
        }
        pattern.push_back(states[entry.get<std::size_t>()]);
      }
    } else {
      pattern = states;
    }
    return SequenceEnsemble(std::move(pattern));
  }

  if (type == "finite") {
    if (!j.contains("counts") || !j["counts"].is_array() ||
        j["counts"].size() != states.size()) {
      throw std::invalid_argument("finite ensembles need a counts array parallel to states");
    }
    if (!j.contains("n_total") || !j["n_total"].is_number_integer()) {
      throw std::invalid_argument("finite ensembles need an integer n_total");
    }
    std::vector<std::pair<PureState, int>> counts;
    for (std::size_t i = 0; i < states.size(); ++i) {
      if (!j["counts"][i].is_number_integer()) {
        throw std::invalid_argument("counts entries must be integers");
      }
      counts.emplace_back(states[i], j["counts"][i].get<int>());
    }
    return FiniteCompositionEnsemble(j["n_total"].get<int>(), std::move(counts));
  }

  throw std::invalid_argument("unknown ensemble type: " + type);
}

Ensemble load_ensemble_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open ensemble file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_ensemble(buffer.str());
}

std::string to_debug_json(const DensityOperator& rho) {
  json j;
  j["dims"] = rho.layout().dims();
  json re = json::array();
  json im = json::array();
  for (int r = 0; r < rho.dim(); ++r) {
    json re_row = json::array();
    json im_row = json::array();
    for (int c = 0; c < rho.dim(); ++c) {
      re_row.push_back(rho.matrix()(r, c).real());
      im_row.push_back(rho.matrix()(r, c).imag());
    }
    re.push_back(std::move(re_row));
    im.push_back(std::move(im_row));
  }
  j["re"] = std::move(re);
  j["im"] = std::move(im);
  return j.dump();
}

DensityOperator from_debug_json(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& err) {
    throw std::invalid_argument(std::string("debug operator is not valid JSON: ") +
                                err.what());
  }
  if (!j.contains("dims") || !j.contains("re") || !j.contains("im")) {
    throw std::invalid_argument("debug operator needs dims, re, and im fields");
  }
  try {
    std::vector<int> dims = j["dims"].get<std::vector<int>>();
    SubsystemLayout layout(std::move(dims));
    const int d = layout.total_dim();
    if (static_cast<int>(j["re"].size()) != d || static_cast<int>(j["im"].size()) != d) {
      throw std::invalid_argument("debug operator matrix does not match dims");
    }
    Matrix m(d, d);
    for (int r = 0; r < d; ++r) {
      if (static_cast<int>(j["re"][r].size()) != d ||
          static_cast<int>(j["im"][r].size()) != d) {
        throw std::invalid_argument("debug operator matrix rows are ragged");
      }
      for (int c = 0; c < d; ++c) {
        m(r, c) = cplx(j["re"][r][c].get<double>(), j["im"][r][c].get<double>());
      }
    }
    return DensityOperator(std::move(m), std::move(layout));
  } catch (const json::exception& err) {
    throw std::invalid_argument(std::string("debug operator is malformed: ") + err.what());
  }
}

}  // namespace qens
