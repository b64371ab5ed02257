#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "qam/compose.hpp"
#include "qam/kernel.hpp"
#include "qam/nonstationary.hpp"
#include "qam/qarf.hpp"
#include "qam/spacetime.hpp"

namespace qam {

using Json = nlohmann::json;

/// Parameters of a library kernel, kept so that specs can be written back.
struct KernelConfig {
  std::string kind;
  std::map<std::string, double> params;
  std::size_t dim = 1;
  std::vector<KernelConfig> children;  // product only

  [[nodiscard]] Kernel build() const;
};

struct CompositionConfig {
  Generator generator{GeneratorKind::exp_neg};
  std::vector<KernelConfig> children;
  std::vector<double> weights;
  std::vector<std::size_t> partition;
  std::optional<WeightRule> weight_rule;
  std::optional<AdmissibilityCase> admissibility_case;

  [[nodiscard]] CompositionSpec build() const;
};

struct SpaceTimeConfig {
  SpaceTimeFamily family = SpaceTimeFamily::clayton;
  std::size_t spatial_dim = 1;
  std::map<std::string, double> params;
  bool strict = true;
  std::optional<VariogramSpec> gs, gt;           // frank
  std::optional<KernelConfig> spatial, temporal;  // separable
  std::optional<CompositionConfig> composition;   // custom_composition

  [[nodiscard]] SpaceTimeKernel build() const;
};

struct MixtureConfig {
  MixtureSpec mix;
  AnisotropyField field = AnisotropyField::scalar(1, 1.0, 0.0);
};

using SpecBody = std::variant<KernelConfig, CompositionConfig, SpaceTimeConfig, MixtureConfig, QarfSpec>;

struct Spec {
  SpecBody body;
  [[nodiscard]] std::string_view type() const;
};

/// Parses and fully validates (every runtime object is built once).
/// Throws ConfigError naming the offending field; JSON syntax errors carry
/// line and column.
[[nodiscard]] Spec parse_spec(const Json& j);
[[nodiscard]] Spec parse_spec_text(const std::string& text, const std::string& origin = "<string>");
[[nodiscard]] Spec load_spec(const std::filesystem::path& path);

[[nodiscard]] Json to_json(const Spec& spec);
void write_spec(const Spec& spec, const std::filesystem::path& path);

/// Stationary kernel of a kernel, composition, space-time or QARF spec.
[[nodiscard]] Kernel stationary_kernel(const Spec& spec);

}  // namespace qam
