#include "model_io.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace framecert::model_io {

using nlohmann::json;

namespace {

fem::CrossSectionLaw resolve_law(const json& doc, const std::string& name) {
  if (doc.contains("laws") && doc["laws"].contains(name)) {
    const json& l = doc["laws"][name];
    return {name, l.value("k1", 0.0), l.value("k2", 0.0), l.value("k3", 0.0)};
  }
  const auto& builtin = fem::builtin_laws();
  auto it = builtin.find(name);
  if (it == builtin.end()) {
    throw std::invalid_argument("unknown cross-section law '" + name + "'");
  }
  return it->second;
}

}  // namespace

fem::FrameModel load_model_string(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& err) {
    throw std::invalid_argument(std::string("model JSON parse error: ") + err.what());
  }

  std::vector<fem::Node> nodes;
  for (const json& n : doc.at("nodes")) {
    nodes.push_back({n.at("id").get<int>(), n.at("x").get<double>(),
                     n.at("y").get<double>()});
  }

  std::vector<fem::Element> elements;
  for (const json& e : doc.at("elements")) {
    fem::Element el;
    el.id = e.at("id").get<int>();
    el.n1 = e.at("n1").get<int>();
    el.n2 = e.at("n2").get<int>();
    el.youngs_modulus = e.value("E", 1.0);
    el.density = e.value("rho", 1.0);
    el.law = resolve_law(doc, e.at("law").get<std::string>());
    if (e.contains("group") == e.contains("area")) {
      throw std::invalid_argument(
          "element " + std::to_string(el.id) +
          " must carry exactly one of 'group' (optimized) or 'area' (fixed)");
    }
    if (e.contains("group")) {
      el.group = e.at("group").get<int>();
    } else {
      el.fixed_area = e.at("area").get<double>();
    }
    elements.push_back(std::move(el));
  }

  std::vector<fem::Support> supports;
  if (doc.contains("supports")) {
    for (const json& s : doc["supports"]) {
      supports.push_back({s.at("node").get<int>(), s.value("ux", false),
                          s.value("uy", false), s.value("rot", false)});
    }
  }

  std::vector<fem::LoadCase> load_cases;
  for (const json& lc : doc.at("loadcases")) {
    fem::LoadCase c;
    c.id = lc.at("id").get<int>();
    c.compliance_bound = lc.at("cbar").get<double>();
    for (const json& l : lc.at("loads")) {
      c.loads.push_back({l.at("node").get<int>(), l.value("fx", 0.0),
                         l.value("fy", 0.0), l.value("m", 0.0)});
    }
    load_cases.push_back(std::move(c));
  }

  std::map<int, std::vector<int>> groups;
  for (const auto& [key, members] : doc.at("groups").items()) {
    std::vector<int>& eids = groups[std::stoi(key)];
    for (const json& eid : members) eids.push_back(eid.get<int>());
  }

  return fem::FrameModel(std::move(nodes), std::move(elements),
                         std::move(supports), std::move(load_cases),
                         std::move(groups));
}

fem::FrameModel load_model_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open model file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_model_string(buf.str());
}

}  // namespace framecert::model_io
