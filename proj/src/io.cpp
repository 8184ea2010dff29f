#include "gridtopo/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <limits>
#include <random>
#include <set>
#include <sstream>
#include <utility>
#include <vector>

#include "gridtopo/error.hpp"
#include "gridtopo/graph.hpp"
#include "json.hpp"

namespace gridtopo {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

[[noreturn]] void field_error(const std::string& path, const std::string& what) {
  throw Error(ErrorKind::validation, path + ": " + what);
}

void reject_unknown(const json& obj, const std::string& path,
                    std::initializer_list<std::string_view> allowed) {
  if (!obj.is_object()) field_error(path, "expected an object");
  for (const auto& [key, value] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      field_error(path + "." + key, "unknown field");
  }
}

const json& require(const json& obj, const std::string& path, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) field_error(path + "." + key, "missing required field");
  return *it;
}

double as_number(const json& v, const std::string& path) {
  if (!v.is_number()) field_error(path, "expected a number");
  return v.get<double>();
}

int as_int(const json& v, const std::string& path) {
  if (!v.is_number_integer()) field_error(path, "expected an integer");
  const auto x = v.get<long long>();
  if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max())
    field_error(path, "integer out of range");
  return static_cast<int>(x);
}

std::vector<double> number_array(const json& v, const std::string& path) {
  if (!v.is_array()) field_error(path, "expected an array");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i)
    out.push_back(as_number(v[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

std::vector<int> int_array(const json& v, const std::string& path) {
  if (!v.is_array()) field_error(path, "expected an array");
  std::vector<int> out;
  for (std::size_t i = 0; i < v.size(); ++i)
    out.push_back(as_int(v[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

CostSpec parse_cost(const json& c, int node_count, int edge_count) {
  const std::string path = "$.cost";
  reject_unknown(c, path, {"kind", "ranks", "weights", "s", "loss_edges"});
  const json& kind_value = require(c, path, "kind");
  if (!kind_value.is_string()) field_error(path + ".kind", "expected a string");
  CostSpec spec;
  try {
    spec.kind = parse_cost_kind(kind_value.get<std::string>());
  } catch (const Error& e) {
    field_error(path + ".kind", e.what());
  }
  auto only_for = [&](const char* key, CostKind kind) {
    if (c.contains(key) && spec.kind != kind)
      field_error(path + "." + key, std::string("not valid for cost kind ") +
                                        std::string(to_string(spec.kind)));
  };
  only_for("ranks", CostKind::ranked_consensus);
  only_for("weights", CostKind::custom);
  only_for("s", CostKind::custom);
  only_for("loss_edges", CostKind::loss);

  if (spec.kind == CostKind::ranked_consensus) {
    spec.ranks = number_array(require(c, path, "ranks"), path + ".ranks");
    if (static_cast<int>(spec.ranks.size()) != node_count)
      field_error(path + ".ranks", "needs one rank per node");
    for (std::size_t i = 0; i < spec.ranks.size(); ++i)
      if (!(spec.ranks[i] > 0.0))
        field_error(path + ".ranks[" + std::to_string(i) + "]", "rank must be positive");
  }
  if (spec.kind == CostKind::custom) {
    const json& rows = require(c, path, "weights");
    if (!rows.is_array() || static_cast<int>(rows.size()) != node_count)
      field_error(path + ".weights", "expected an N x N array");
    Eigen::MatrixXd w(node_count, node_count);
    for (int i = 0; i < node_count; ++i) {
      const auto row = number_array(rows[i], path + ".weights[" + std::to_string(i) + "]");
      if (static_cast<int>(row.size()) != node_count)
        field_error(path + ".weights[" + std::to_string(i) + "]", "row length must be N");
      for (int j = 0; j < node_count; ++j) w(i, j) = row[j];
    }
    spec.weights = std::move(w);
    if (c.contains("s")) spec.frequency_weights = number_array(c["s"], path + ".s");
  }
  if (spec.kind == CostKind::loss && c.contains("loss_edges")) {
    spec.loss_edges = int_array(c["loss_edges"], path + ".loss_edges");
    for (std::size_t i = 0; i < spec.loss_edges.size(); ++i)
      if (spec.loss_edges[i] < 0 || spec.loss_edges[i] >= edge_count)
        field_error(path + ".loss_edges[" + std::to_string(i) + "]",
                    "edge index out of range");
  }
  return spec;
}

ordered_json cost_to_json(const CostSpec& spec) {
  ordered_json c;
  c["kind"] = std::string(to_string(spec.kind));
  if (spec.kind == CostKind::ranked_consensus) c["ranks"] = spec.ranks;
  if (spec.kind == CostKind::custom) {
    ordered_json rows = ordered_json::array();
    if (spec.weights) {
      for (Eigen::Index i = 0; i < spec.weights->rows(); ++i) {
        std::vector<double> row(spec.weights->cols());
        for (Eigen::Index j = 0; j < spec.weights->cols(); ++j) row[j] = (*spec.weights)(i, j);
        rows.push_back(row);
      }
    }
    c["weights"] = rows;
    if (!spec.frequency_weights.empty()) c["s"] = spec.frequency_weights;
  }
  if (spec.kind == CostKind::loss && !spec.loss_edges.empty()) c["loss_edges"] = spec.loss_edges;
  return c;
}

// Uniform draws built directly on the 64-bit engine output; the standard
// distributions are implementation-defined and would break byte-identical
// generation across standard libraries.
double uniform_unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::uint64_t uniform_index(std::mt19937_64& rng, std::uint64_t n) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % n;
}

}  // namespace

NetworkFile parse_network_file(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    const auto [line, col] = line_column(text, e.byte == 0 ? 0 : e.byte - 1);
    throw Error(ErrorKind::parse, "line " + std::to_string(line) + ", column " +
                                      std::to_string(col) + ": " + e.what());
  }

  reject_unknown(doc, "$", {"schema", "damping", "nodes", "edges", "cost", "generator"});
  const int schema = as_int(require(doc, "$", "schema"), "$.schema");
  if (schema != kNetworkSchemaVersion)
    field_error("$.schema", "unsupported schema version " + std::to_string(schema));
  const double damping = as_number(require(doc, "$", "damping"), "$.damping");

  const json& nodes = require(doc, "$", "nodes");
  if (!nodes.is_array() || nodes.empty()) field_error("$.nodes", "expected a non-empty array");
  const int n = static_cast<int>(nodes.size());
  std::vector<double> inertia(n, 0.0);
  std::vector<char> seen(n, 0);
  for (int i = 0; i < n; ++i) {
    const std::string path = "$.nodes[" + std::to_string(i) + "]";
    reject_unknown(nodes[i], path, {"id", "inertia"});
    const int id = as_int(require(nodes[i], path, "id"), path + ".id");
    if (id < 0 || id >= n) field_error(path + ".id", "ids must be dense 0..N-1");
    if (seen[id]) field_error(path + ".id", "duplicate node id " + std::to_string(id));
    seen[id] = 1;
    inertia[id] = as_number(require(nodes[i], path, "inertia"), path + ".inertia");
  }

  const json& edge_list = require(doc, "$", "edges");
  if (!edge_list.is_array()) field_error("$.edges", "expected an array");
  std::vector<Edge> edges;
  for (std::size_t e = 0; e < edge_list.size(); ++e) {
    const std::string path = "$.edges[" + std::to_string(e) + "]";
    const json& item = edge_list[e];
    reject_unknown(item, path, {"from", "to", "b", "g", "base"});
    Edge edge;
    edge.from = as_int(require(item, path, "from"), path + ".from");
    edge.to = as_int(require(item, path, "to"), path + ".to");
    edge.susceptance = as_number(require(item, path, "b"), path + ".b");
    if (item.contains("g")) edge.conductance = as_number(item["g"], path + ".g");
    if (item.contains("base")) {
      if (!item["base"].is_boolean()) field_error(path + ".base", "expected a boolean");
      edge.base = item["base"].get<bool>();
    }
    edges.push_back(edge);
  }

  std::optional<Network> network;
  try {
    network.emplace(std::move(inertia), damping, std::move(edges));
  } catch (const Error& e) {
    throw Error(ErrorKind::validation, std::string("$: ") + e.what());
  }
  if (!is_connected(*network, full_topology(*network).edges()))
    field_error("$.edges", "candidate graph is disconnected");

  NetworkFile file{std::move(*network), std::nullopt, std::nullopt};
  if (doc.contains("cost"))
    file.cost = parse_cost(doc["cost"], file.network.node_count(), file.network.edge_count());
  if (doc.contains("generator")) {
    const json& g = doc["generator"];
    reject_unknown(g, "$.generator", {"seed", "extra"});
    const json& seed = require(g, "$.generator", "seed");
    if (!seed.is_number_unsigned()) field_error("$.generator.seed", "expected an unsigned integer");
    file.generator = GeneratorInfo{seed.get<std::uint64_t>(),
                                   as_int(require(g, "$.generator", "extra"), "$.generator.extra")};
  }
  return file;
}

NetworkFile load_network_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::parse, "cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return parse_network_file(buffer.str());
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

std::string dump_network_file(const NetworkFile& file) {
  ordered_json doc;
  doc["schema"] = kNetworkSchemaVersion;
  doc["damping"] = file.network.damping();
  ordered_json nodes = ordered_json::array();
  for (int i = 0; i < file.network.node_count(); ++i) {
    ordered_json node;
    node["id"] = i;
    node["inertia"] = file.network.inertia()[i];
    nodes.push_back(node);
  }
  doc["nodes"] = nodes;
  ordered_json edges = ordered_json::array();
  for (const Edge& e : file.network.edges()) {
    ordered_json item;
    item["from"] = e.from;
    item["to"] = e.to;
    item["b"] = e.susceptance;
    if (e.conductance != 0.0) item["g"] = e.conductance;
    if (e.base) item["base"] = *e.base;
    edges.push_back(item);
  }
  doc["edges"] = edges;
  if (file.cost) doc["cost"] = cost_to_json(*file.cost);
  if (file.generator) {
    ordered_json g;
    g["seed"] = file.generator->seed;
    g["extra"] = file.generator->extra_edges;
    doc["generator"] = g;
  }
  return doc.dump(2) + "\n";
}

void save_network_file(const std::filesystem::path& path, const NetworkFile& file) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::invalid_argument, "cannot write " + path.string());
  out << dump_network_file(file);
}

NetworkFile generate_case(const NetworkFile& base, int extra_edges, std::uint64_t seed) {
  const Network& net = base.network;
  const int n = net.node_count();
  if (extra_edges < 0) throw Error(ErrorKind::invalid_argument, "extra edge count is negative");
  if (net.edge_count() == 0)
    throw Error(ErrorKind::invalid_argument, "base case needs at least one edge");

  std::vector<std::pair<int, int>> free_pairs;
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v)
      if (!net.find_edge(u, v)) free_pairs.push_back({u, v});
  if (static_cast<std::size_t>(extra_edges) > free_pairs.size())
    throw Error(ErrorKind::infeasible,
                "only " + std::to_string(free_pairs.size()) +
                    " node pairs remain for extra edges");

  double b_lo = std::numeric_limits<double>::infinity(), b_hi = 0.0;
  double g_lo = std::numeric_limits<double>::infinity(), g_hi = 0.0;
  std::vector<Edge> edges;
  for (Edge e : net.edges()) {
    b_lo = std::min(b_lo, e.susceptance);
    b_hi = std::max(b_hi, e.susceptance);
    g_lo = std::min(g_lo, e.conductance);
    g_hi = std::max(g_hi, e.conductance);
    e.base = true;
    edges.push_back(e);
  }

  std::mt19937_64 rng(seed);
  for (int k = 0; k < extra_edges; ++k) {
    // Partial Fisher-Yates over the remaining pairs.
    const std::size_t pick =
        k + uniform_index(rng, static_cast<std::uint64_t>(free_pairs.size() - k));
    std::swap(free_pairs[k], free_pairs[pick]);
    Edge e;
    e.from = free_pairs[k].first;
    e.to = free_pairs[k].second;
    e.susceptance = b_lo + (b_hi - b_lo) * uniform_unit(rng);
    e.conductance = g_hi > 0.0 ? g_lo + (g_hi - g_lo) * uniform_unit(rng) : 0.0;
    e.base = false;
    edges.push_back(e);
  }

  NetworkFile out{Network(std::vector<double>(net.inertia().begin(), net.inertia().end()),
                          net.damping(), std::move(edges)),
                  base.cost, GeneratorInfo{seed, extra_edges}};
  return out;
}

Topology parse_edge_list(std::string_view text) {
  std::vector<int> edges;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = std::min(text.find(',', pos), text.size());
    std::string_view item = text.substr(pos, comma - pos);
    while (!item.empty() && std::isspace(static_cast<unsigned char>(item.front())))
      item.remove_prefix(1);
    while (!item.empty() && std::isspace(static_cast<unsigned char>(item.back())))
      item.remove_suffix(1);
    if (item.empty()) {
      if (text.find_first_not_of(" \t\n") == std::string_view::npos) break;
      throw Error(ErrorKind::parse, "empty entry in edge list");
    }
    int value = 0;
    const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), value);
    if (ec != std::errc() || ptr != item.data() + item.size())
      throw Error(ErrorKind::parse, "bad edge index '" + std::string(item) + "'");
    edges.push_back(value);
    pos = comma + 1;
  }
  return Topology(std::move(edges));
}

Topology load_edges_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::parse, "cannot open " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::parse, path.string() + ": " + e.what());
  }
  const json* list = &doc;
  if (doc.is_object()) {
    if (!doc.contains("edges")) throw Error(ErrorKind::parse, path.string() + ": no \"edges\" field");
    list = &doc["edges"];
  }
  return Topology(int_array(*list, path.string() + ":edges"));
}

CostSpec cost_or_default(const NetworkFile& file) {
  return file.cost.value_or(CostSpec{});
}

}  // namespace gridtopo
