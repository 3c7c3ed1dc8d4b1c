#pragma once

#include <string>
#include <variant>

#include "melodikit/dirichlet_vmm.hpp"
#include "melodikit/pst.hpp"
#include "melodikit/tcrbm.hpp"

namespace melodikit {

// A gamma-smoothed VMM as persisted: the tree carries the conditionals and
// params.gamma_min records the smoothing.
struct VmmModel {
  Pst tree;
};

using AnyModel = std::variant<VmmModel, DirichletVmm, TcrbmParams>;

// Model files are JSON with a "kind" tag ("vmm" | "dvmm" | "tcrbm") and a
// schema version; tree models store counts and conditionals per node with
// the context implicit in the structure, the TC-RBM stores a flat tensor
// dump.
void save_model(const AnyModel &model, const std::string &path);
AnyModel load_model(const std::string &path);

const char *model_kind_name(const AnyModel &model);

// Long-format filter CSV: one row per (unit, symbol, offset) weight, at full
// precision so re-import reproduces the tensor exactly.
void save_filters_csv(const TcrbmParams &params, const std::string &path,
                      const std::string &header_comment = "");
std::vector<Filter> load_filters_csv(const std::string &path);

} // namespace melodikit
