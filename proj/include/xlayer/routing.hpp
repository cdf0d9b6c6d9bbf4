#pragma once

#include <string>
#include <vector>

#include "xlayer/core_model.hpp"

namespace xlayer {

/// Simple path in the physical network. Stored with the lexicographically
/// smaller endpoint id first so unordered logical edges have one canonical
/// direction.
struct PhysicalPath {
  std::vector<int> nodes;   // physical node indices, consecutive ones adjacent
  std::vector<int> edges;   // physical edge indices along the path

  int endpoint_a() const { return nodes.front(); }
  int endpoint_b() const { return nodes.back(); }

  friend bool operator==(const PhysicalPath&, const PhysicalPath&) = default;
};

PhysicalPath make_path(const PhysicalNetwork& phys, std::vector<int> nodes);

/// Total path weight under costs c_e = -ln(1 - rho_e).
double path_weight(const PhysicalNetwork& phys, const PhysicalPath& p);

struct PoolPolicy {
  enum class Kind { AllSimple, HopBounded, KShortest };
  Kind kind = Kind::AllSimple;
  int hop_bound = 0;   // HopBounded
  int k = 0;           // KShortest

  static PoolPolicy all_simple();
  static PoolPolicy hop_bounded(int h);
  static PoolPolicy k_shortest(int k);

  /// Accepts "all", "k-shortest:K", "hops:H".
  static PoolPolicy parse(const std::string& text);
  std::string describe() const;

  /// All simple paths when the physical node count stays at or below 12,
  /// otherwise k-shortest with k = 16.
  static PoolPolicy default_for(const CrossLayerInstance& inst);

  /// True when this policy enumerates every simple path.
  bool exhaustive() const { return kind == Kind::AllSimple; }
};

/// Candidate physical routings for logical edge `mu` (index into the logical
/// edge list). Ordered by (cost, length, node sequence); deterministic.
/// Throws if the mapped endpoints are disconnected (empty pool).
std::vector<PhysicalPath> candidate_paths(const CrossLayerInstance& inst, int mu,
                                          const PoolPolicy& policy);

/// Same enumeration between two arbitrary physical nodes.
std::vector<PhysicalPath> candidate_paths_between(const PhysicalNetwork& phys, int s, int t,
                                                  const PoolPolicy& policy);

/// One physical routing per logical edge, indexed by logical edge id.
class LinkMapping {
 public:
  LinkMapping() = default;
  explicit LinkMapping(std::vector<PhysicalPath> routes) : routes_(std::move(routes)) {}

  int size() const { return static_cast<int>(routes_.size()); }
  const PhysicalPath& route(int logical_edge) const;
  const std::vector<PhysicalPath>& routes() const { return routes_; }

  bool total() const;   // every logical edge routed

  /// Union of all route edge sets, sorted physical edge indices.
  std::vector<int> used_edges() const;

  /// Deterministic text form used for lexicographic tie-breaking.
  std::string canonical_key(const CrossLayerInstance& inst) const;

  friend bool operator==(const LinkMapping&, const LinkMapping&) = default;

 private:
  std::vector<PhysicalPath> routes_;
};

/// Checks route endpoints against the node map and path simplicity.
std::vector<Violation> validate_mapping(const CrossLayerInstance& inst, const LinkMapping& m);

/// E_P minus every physical edge used by routed branches of tau_edges
/// (logical edge indices). Sorted physical edge indices.
std::vector<int> co_mapping(const std::vector<int>& tau_edges, const LinkMapping& m,
                            const PhysicalNetwork& phys);

/// JSON form: {"routes": [{"edge": ["s","t"], "path": ["i1","i2",...]}]}
LinkMapping parse_mapping(const CrossLayerInstance& inst, const std::string& json_text);
std::string serialize_mapping(const CrossLayerInstance& inst, const LinkMapping& m);

}  // namespace xlayer
