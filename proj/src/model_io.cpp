#include "melodikit/model_io.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "melodikit/errors.hpp"

namespace melodikit {

namespace {

using nlohmann::json;

json node_to_json(const PstNode &node) {
  json j;
  j["counts"] = node.counts;
  j["cond"] = node.cond;
  if (!node.children.empty()) {
    json children = json::object();
    for (const auto &[sym, child] : node.children) {
      children[std::to_string(static_cast<int>(sym))] = node_to_json(*child);
    }
    j["children"] = std::move(children);
  }
  return j;
}

std::unique_ptr<PstNode> node_from_json(const json &j, std::vector<Symbol> context,
                                        int alphabet) {
  auto node = std::make_unique<PstNode>();
  node->context = context;
  node->counts = j.at("counts").get<std::vector<std::int64_t>>();
  node->cond = j.at("cond").get<std::vector<double>>();
  if (node->counts.size() != static_cast<std::size_t>(alphabet) ||
      node->cond.size() != static_cast<std::size_t>(alphabet)) {
    throw ParseError("model node has wrong alphabet size");
  }
  if (j.contains("children")) {
    for (const auto &[key, child_j] : j.at("children").items()) {
      const int sym = std::stoi(key);
      if (sym < 0 || sym >= alphabet) throw ParseError("model child symbol out of range");
      std::vector<Symbol> child_context;
      child_context.push_back(static_cast<Symbol>(sym));
      child_context.insert(child_context.end(), context.begin(), context.end());
      node->children[static_cast<Symbol>(sym)] =
          node_from_json(child_j, std::move(child_context), alphabet);
    }
  }
  return node;
}

json tree_to_json(const Pst &tree, const char *kind) {
  json j;
  j["schema"] = 1;
  j["kind"] = kind;
  j["alphabet"] = tree.alphabet;
  j["params"] = {{"max_depth", tree.params.max_depth},
                 {"min_count", tree.params.min_count},
                 {"ratio_threshold", tree.params.ratio_threshold},
                 {"gamma_min", tree.params.gamma_min}};
  j["root"] = node_to_json(*tree.root);
  return j;
}

Pst tree_from_json(const json &j) {
  Pst tree;
  tree.alphabet = j.at("alphabet").get<int>();
  const auto &params = j.at("params");
  tree.params.max_depth = params.at("max_depth").get<int>();
  tree.params.min_count = params.at("min_count").get<std::int64_t>();
  tree.params.ratio_threshold = params.at("ratio_threshold").get<double>();
  tree.params.gamma_min = params.value("gamma_min", 0.0);
  tree.root = node_from_json(j.at("root"), {}, tree.alphabet);
  return tree;
}

void write_json_file(const json &j, const std::string &path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write file: " + path);
  out << j.dump(2) << "\n";
}

json read_json_file(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception &e) {
    throw ParseError(path + ": invalid JSON: " + e.what());
  }
  return j;
}

} // namespace

void save_model(const AnyModel &model, const std::string &path) {
  json j;
  if (const auto *vmm = std::get_if<VmmModel>(&model)) {
    j = tree_to_json(vmm->tree, "vmm");
  } else if (const auto *dvmm = std::get_if<DirichletVmm>(&model)) {
    j = tree_to_json(dvmm->tree, "dvmm");
    j["alpha"] = dvmm->alpha;
  } else {
    const auto &rbm = std::get<TcrbmParams>(model);
    j["schema"] = 1;
    j["kind"] = "tcrbm";
    j["alphabet"] = rbm.alphabet;
    j["hidden"] = rbm.hidden;
    j["filter"] = rbm.filter;
    // Flat dump in storage order: alphabet-major, then filter offset, then
    // hidden unit.
    j["w"] = rbm.w;
    j["b"] = rbm.b;
    j["c"] = rbm.c;
  }
  write_json_file(j, path);
}

AnyModel load_model(const std::string &path) {
  json j = read_json_file(path);
  if (!j.is_object() || !j.contains("kind")) throw ParseError(path + ": not a model file");
  if (j.value("schema", 0) != 1) throw ParseError(path + ": unsupported model schema");
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "vmm") {
    return VmmModel{tree_from_json(j)};
  }
  if (kind == "dvmm") {
    DirichletVmm model;
    model.tree = tree_from_json(j);
    model.alpha = j.at("alpha").get<double>();
    return model;
  }
  if (kind == "tcrbm") {
    TcrbmParams p;
    p.alphabet = j.at("alphabet").get<int>();
    p.hidden = j.at("hidden").get<int>();
    p.filter = j.at("filter").get<int>();
    p.w = j.at("w").get<std::vector<double>>();
    p.b = j.at("b").get<std::vector<double>>();
    p.c = j.at("c").get<std::vector<double>>();
    const std::size_t expect =
        static_cast<std::size_t>(p.alphabet) * p.hidden * p.filter;
    if (p.w.size() != expect || p.b.size() != static_cast<std::size_t>(p.hidden) ||
        p.c.size() != static_cast<std::size_t>(p.alphabet)) {
      throw ParseError(path + ": tensor sizes do not match the header");
    }
    return p;
  }
  throw ParseError(path + ": unknown model kind '" + kind + "'");
}

const char *model_kind_name(const AnyModel &model) {
  if (std::holds_alternative<VmmModel>(model)) return "vmm";
  if (std::holds_alternative<DirichletVmm>(model)) return "dvmm";
  return "tcrbm";
}

void save_filters_csv(const TcrbmParams &params, const std::string &path,
                      const std::string &header_comment) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write file: " + path);
  if (!header_comment.empty()) out << header_comment;
  out << "unit,symbol,offset,weight\n";
  char buf[64];
  const auto filters = export_filters(params);
  for (int j = 0; j < params.hidden; ++j) {
    for (int i = 0; i < params.alphabet; ++i) {
      for (int k = 0; k < params.filter; ++k) {
        std::snprintf(buf, sizeof buf, "%.17g", filters[j].at(i, k));
        out << j << ',' << i << ',' << k << ',' << buf << '\n';
      }
    }
  }
}

std::vector<Filter> load_filters_csv(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open file: " + path);
  std::vector<Filter> filters;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#' || line.rfind("unit,", 0) == 0) continue;
    int unit, symbol, offset;
    double weight;
    if (std::sscanf(line.c_str(), "%d,%d,%d,%lg", &unit, &symbol, &offset, &weight) != 4) {
      throw ParseError(path + ": bad filter row: " + line);
    }
    if (unit < 0 || symbol < 0 || offset < 0) throw ParseError(path + ": negative filter index");
    if (static_cast<std::size_t>(unit) >= filters.size()) filters.resize(unit + 1);
    Filter &f = filters[unit];
    f.alphabet = std::max(f.alphabet, symbol + 1);
    f.filter = std::max(f.filter, offset + 1);
    // Collect triples first; repack below once dimensions are known.
    f.m.push_back(static_cast<double>(symbol));
    f.m.push_back(static_cast<double>(offset));
    f.m.push_back(weight);
  }
  for (auto &f : filters) {
    std::vector<double> triples = std::move(f.m);
    f.m.assign(static_cast<std::size_t>(f.alphabet) * f.filter, 0.0);
    for (std::size_t i = 0; i + 2 < triples.size(); i += 3) {
      const auto sym = static_cast<std::size_t>(triples[i]);
      const auto off = static_cast<std::size_t>(triples[i + 1]);
      f.m[sym * f.filter + off] = triples[i + 2];
    }
  }
  return filters;
}

} // namespace melodikit
