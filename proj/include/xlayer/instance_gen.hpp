#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "xlayer/core_model.hpp"

namespace xlayer {

/// Failure-probability family of a generation spec. All figures are in
/// percent, matching the sweep descriptions they come from.
struct ProbabilitySpec {
  enum class Kind { UnifiedSweep, NormalSweep };
  Kind kind = Kind::UnifiedSweep;
  // unified: start, start-step, ... down to stop (inclusive)
  double start = 15.0;
  double stop = 0.1;
  double step = 0.1;
  // normal: `count` means from `mean` down to mean/count, per-link draws
  double mean = 15.0;
  double variance = 2.0;
  int count = 30;
};

struct GenSpec {
  std::uint64_t seed = 1;
  std::string physical_source;   // bundled topology id or a JSON file path
  double node_fraction = 0.2;    // logical node count as a fraction of physical
  double avg_degree = 3.0;       // target average logical degree
  ProbabilitySpec prob;
};

GenSpec parse_genspec(const std::string& json_text);
GenSpec load_genspec_file(const std::string& path);

/// Topologies compiled into the library: "ring6", "nsf14", "coronet75".
std::vector<std::string> bundled_topology_ids();
PhysicalNetwork bundled_topology(const std::string& id, double default_rho = 0.1);

/// spec.physical_source as a network: bundled id first, then a file path
/// holding either a full instance (its physical part is taken) or a bare
/// {"nodes": [...], "edges": [{"u","v","rho"}]} object.
PhysicalNetwork resolve_physical(const GenSpec& spec);

struct GeneratedLogical {
  LogicalNetwork logical;
  NodeMapping node_map;
};

/// Random logical network over a node sample of the physical network: a
/// random spanning tree plus Erdos-Renyi extra edges tuned so the expected
/// average degree meets the target, with a random injective node mapping.
/// Fully determined by (spec, seed).
GeneratedLogical gen_logical(const GenSpec& spec, const PhysicalNetwork& phys,
                             std::uint64_t seed);
GeneratedLogical gen_logical(const GenSpec& spec, std::uint64_t seed);

/// resolve_physical + gen_logical glued into a validated instance.
CrossLayerInstance gen_instance(const GenSpec& spec, std::uint64_t seed);

/// The spec's failure-model sweep. Unified sweeps generate the arithmetic
/// sequence by integer index; normal sweeps draw per-link values for each
/// mean, resampling any draw outside [0, 100) percent.
std::vector<FailureModel> gen_probabilities(const GenSpec& spec);

}  // namespace xlayer
