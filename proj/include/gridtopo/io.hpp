#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "gridtopo/cost.hpp"
#include "gridtopo/network.hpp"

namespace gridtopo {

inline constexpr int kNetworkSchemaVersion = 1;

/// Provenance of a generated case.
struct GeneratorInfo {
  std::uint64_t seed = 0;
  int extra_edges = 0;

  bool operator==(const GeneratorInfo&) const = default;
};

/// In-memory form of the JSON network document:
///
///   {
///     "schema": 1,
///     "damping": 1.0,
///     "nodes": [{"id": 0, "inertia": 1.0}, ...],
///     "edges": [{"from": 0, "to": 1, "b": 2.0, "g": 0.1, "base": true}, ...],
///     "cost": {"kind": "ranked_consensus", "ranks": [...]},
///     "generator": {"seed": 7, "extra": 10}
///   }
///
/// "g", "base", "cost" and "generator" are optional. Cost blocks accept
/// "ranks" (ranked_consensus), "weights" + "s" (custom) and "loss_edges"
/// (loss). Unknown keys are rejected.
struct NetworkFile {
  Network network;
  std::optional<CostSpec> cost;
  std::optional<GeneratorInfo> generator;

  bool operator==(const NetworkFile&) const = default;
};

/// Parses and validates a document; errors carry the line/column (syntax)
/// or the JSON path of the offending field (schema and invariants).
NetworkFile parse_network_file(std::string_view text);
NetworkFile load_network_file(const std::filesystem::path& path);

std::string dump_network_file(const NetworkFile& file);
void save_network_file(const std::filesystem::path& path, const NetworkFile& file);

/// Adds `extra_edges` uniformly random node pairs not already present, with
/// susceptances uniform over the base edges' [min, max] range (conductances
/// likewise when the base has any). Base edges are tagged base=true, new
/// ones base=false. Deterministic for a given seed on every platform.
NetworkFile generate_case(const NetworkFile& base, int extra_edges, std::uint64_t seed);

/// "0,3,5" -> topology. Whitespace around entries is ignored.
Topology parse_edge_list(std::string_view text);

/// Reads either a bare JSON array of indices or an object with an "edges"
/// array (the design commands' output).
Topology load_edges_file(const std::filesystem::path& path);

/// Cost spec of the file, or plain consensus when the file has none.
CostSpec cost_or_default(const NetworkFile& file);

}  // namespace gridtopo
