#include "fedhgn/dataset_io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string_view>
#include <utility>
#include <vector>

#include "fedhgn/error.hpp"

namespace fedhgn {

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

struct Cursor {
  const std::string& source;
  std::size_t line = 0;

  [[noreturn]] void fail(const std::string& what) const {
    throw Error(ErrorKind::ParseError, source + ":" + std::to_string(line) + ": " + what);
  }

  template <typename T>
  T number(std::string_view tok, const char* field) const {
    T v{};
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size()) {
      fail("bad " + std::string(field) + " '" + std::string(tok) + "'");
    }
    return v;
  }
};

struct RawDocument {
  std::string name;
  std::optional<std::size_t> num_nodes, num_classes, feature_dim;
  FeatureEncoding encoding = FeatureEncoding::Dense;
  std::vector<std::vector<double>> dense_rows;
  std::vector<std::vector<std::pair<std::size_t, double>>> sparse_rows;
  std::size_t feature_rows = 0;
  bool has_labels = false;
  std::vector<Label> labels;
  bool has_hyperedges = false;
  std::vector<std::vector<NodeId>> hyperedges;
  std::vector<double> weights;
  bool has_edges = false;
  std::vector<std::pair<NodeId, NodeId>> edges;
};

RawDocument parse_raw(std::istream& in, const std::string& source) {
  RawDocument doc;
  Cursor cur{source};
  std::string section;
  std::string line;
  while (std::getline(in, line)) {
    ++cur.line;
    const auto toks = split_ws(line);
    if (toks.empty() || toks.front().front() == '#') continue;
    if (toks.front().front() == '[') {
      if (toks.size() != 1 || toks.front().back() != ']') cur.fail("malformed section marker");
      section = std::string(toks.front().substr(1, toks.front().size() - 2));
      if (section == "labels") doc.has_labels = true;
      else if (section == "hyperedges") doc.has_hyperedges = true;
      else if (section == "edges") doc.has_edges = true;
      else if (section != "header" && section != "features") cur.fail("unknown section [" + section + "]");
      if (section != "header" && (!doc.num_nodes || !doc.feature_dim || !doc.num_classes)) {
        cur.fail("[" + section + "] before a complete [header]");
      }
      continue;
    }

    if (section == "header") {
      if (toks.size() != 2) cur.fail("header lines are 'key value'");
      const auto key = toks[0];
      if (key == "name") doc.name = std::string(toks[1]);
      else if (key == "num_nodes") doc.num_nodes = cur.number<std::size_t>(toks[1], "num_nodes");
      else if (key == "num_classes") doc.num_classes = cur.number<std::size_t>(toks[1], "num_classes");
      else if (key == "feature_dim") doc.feature_dim = cur.number<std::size_t>(toks[1], "feature_dim");
      else if (key == "feature_encoding") {
        if (toks[1] == "dense") doc.encoding = FeatureEncoding::Dense;
        else if (toks[1] == "sparse") doc.encoding = FeatureEncoding::Sparse;
        else cur.fail("feature_encoding must be dense or sparse");
      } else {
        cur.fail("unknown header key '" + std::string(key) + "'");
      }
    } else if (section == "features") {
      if (doc.feature_rows >= *doc.num_nodes) cur.fail("more feature rows than num_nodes");
      ++doc.feature_rows;
      if (doc.encoding == FeatureEncoding::Dense) {
        if (toks.size() != *doc.feature_dim) {
          cur.fail("dense row has " + std::to_string(toks.size()) + " values, expected " +
                   std::to_string(*doc.feature_dim));
        }
        std::vector<double> row;
        row.reserve(toks.size());
        for (auto t : toks) row.push_back(cur.number<double>(t, "feature value"));
        doc.dense_rows.push_back(std::move(row));
      } else {
        std::vector<std::pair<std::size_t, double>> row;
        if (!(toks.size() == 1 && toks[0] == "-")) {
          for (auto t : toks) {
            const auto colon = t.find(':');
            if (colon == std::string_view::npos) cur.fail("sparse entry '" + std::string(t) + "' lacks ':'");
            const auto idx = cur.number<std::size_t>(t.substr(0, colon), "feature index");
            if (idx >= *doc.feature_dim) cur.fail("feature index " + std::to_string(idx) + " >= feature_dim");
            row.emplace_back(idx, cur.number<double>(t.substr(colon + 1), "feature value"));
          }
        }
        doc.sparse_rows.push_back(std::move(row));
      }
    } else if (section == "labels") {
      if (toks.size() != 1) cur.fail("one label per line");
      doc.labels.push_back(toks[0] == "-" ? kNoLabel : cur.number<Label>(toks[0], "label"));
    } else if (section == "hyperedges") {
      std::size_t first = 0;
      double w = 1.0;
      if (toks[0].starts_with("w=")) {
        w = cur.number<double>(toks[0].substr(2), "weight");
        first = 1;
      }
      std::vector<NodeId> members;
      for (std::size_t i = first; i < toks.size(); ++i) members.push_back(cur.number<NodeId>(toks[i], "node id"));
      doc.hyperedges.push_back(std::move(members));
      doc.weights.push_back(w);
    } else if (section == "edges") {
      if (toks.size() != 2) cur.fail("edge lines are 'u v'");
      doc.edges.emplace_back(cur.number<NodeId>(toks[0], "node id"), cur.number<NodeId>(toks[1], "node id"));
    } else {
      cur.fail("content outside any section");
    }
  }
  if (!doc.num_nodes || !doc.num_classes || !doc.feature_dim) {
    throw Error(ErrorKind::ParseError, source + ": header must set num_nodes, num_classes and feature_dim");
  }
  if (doc.feature_rows != *doc.num_nodes) {
    throw Error(ErrorKind::ParseError, source + ": " + std::to_string(doc.feature_rows) +
                                           " feature rows for " + std::to_string(*doc.num_nodes) + " nodes");
  }
  if (doc.has_labels && doc.labels.size() != *doc.num_nodes) {
    throw Error(ErrorKind::ParseError, source + ": " + std::to_string(doc.labels.size()) + " labels for " +
                                           std::to_string(*doc.num_nodes) + " nodes");
  }
  return doc;
}

Matrix assemble_features(const RawDocument& doc) {
  Matrix x(*doc.num_nodes, *doc.feature_dim);
  if (doc.encoding == FeatureEncoding::Dense) {
    for (std::size_t v = 0; v < doc.dense_rows.size(); ++v) {
      std::copy(doc.dense_rows[v].begin(), doc.dense_rows[v].end(), x.row(v).begin());
    }
  } else {
    for (std::size_t v = 0; v < doc.sparse_rows.size(); ++v) {
      for (auto [idx, val] : doc.sparse_rows[v]) x(v, idx) = val;
    }
  }
  return x;
}

void require_valid(const Hypergraph& hg, const std::string& source) {
  const auto report = validate(hg);
  if (report.empty()) return;
  std::string msg = source + ":";
  for (const auto& r : report) msg += " " + r + ";";
  throw Error(ErrorKind::ValidationError, msg);
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path.string());
  return in;
}

void write_real(std::ostream& out, double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  out.write(buf, ptr - buf);
}

}  // namespace

Hypergraph parse_dataset(std::istream& in, const std::string& source) {
  RawDocument doc = parse_raw(in, source);
  if (doc.has_edges) throw Error(ErrorKind::ParseError, source + ": [edges] belongs in a simple-graph file");
  if (!doc.has_hyperedges) throw Error(ErrorKind::ParseError, source + ": missing [hyperedges] section");

  Hypergraph hg;
  hg.name = doc.name;
  hg.num_nodes = *doc.num_nodes;
  hg.num_classes = *doc.num_classes;
  hg.features = assemble_features(doc);
  hg.labels = std::move(doc.labels);
  // Empty member lists survive merging so validation can report them.
  hg.hyperedges = std::move(doc.hyperedges);
  hg.edge_weights = std::move(doc.weights);
  merge_duplicate_edges(hg.hyperedges, hg.edge_weights);
  require_valid(hg, source);
  return hg;
}

Hypergraph parse_simple_graph(std::istream& in, const std::string& source) {
  RawDocument doc = parse_raw(in, source);
  if (doc.has_hyperedges) throw Error(ErrorKind::ParseError, source + ": simple-graph file has [hyperedges]");
  if (!doc.has_edges) throw Error(ErrorKind::ParseError, source + ": missing [edges] section");
  Hypergraph hg = from_simple_graph(*doc.num_nodes, doc.edges, assemble_features(doc), std::move(doc.labels),
                                    *doc.num_classes);
  hg.name = doc.name;
  require_valid(hg, source);
  return hg;
}

Hypergraph load_dataset(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_dataset(in, path.string());
}

Hypergraph load_simple_graph(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_simple_graph(in, path.string());
}

void write_dataset(std::ostream& out, const Hypergraph& hg, FeatureEncoding encoding) {
  out << "[header]\n";
  if (!hg.name.empty()) out << "name " << hg.name << '\n';
  out << "num_nodes " << hg.num_nodes << '\n'
      << "num_classes " << hg.num_classes << '\n'
      << "feature_dim " << hg.feature_dim() << '\n'
      << "feature_encoding " << (encoding == FeatureEncoding::Dense ? "dense" : "sparse") << '\n';
  out << "[features]\n";
  for (std::size_t v = 0; v < hg.num_nodes; ++v) {
    bool first = true;
    for (std::size_t k = 0; k < hg.feature_dim(); ++k) {
      const double x = hg.features(v, k);
      if (encoding == FeatureEncoding::Sparse && x == 0.0) continue;
      if (!first) out << ' ';
      first = false;
      if (encoding == FeatureEncoding::Sparse) out << k << ':';
      write_real(out, x);
    }
    if (first && encoding == FeatureEncoding::Sparse) out << '-';
    out << '\n';
  }
  if (hg.has_labels()) {
    out << "[labels]\n";
    for (Label l : hg.labels) {
      if (l == kNoLabel) out << "-\n";
      else out << l << '\n';
    }
  }
  out << "[hyperedges]\n";
  for (std::size_t e = 0; e < hg.num_edges(); ++e) {
    if (hg.edge_weights[e] != 1.0) {
      out << "w=";
      write_real(out, hg.edge_weights[e]);
      out << ' ';
    }
    for (std::size_t i = 0; i < hg.hyperedges[e].size(); ++i) {
      if (i > 0) out << ' ';
      out << hg.hyperedges[e][i];
    }
    out << '\n';
  }
}

void save_dataset(const std::filesystem::path& path, const Hypergraph& hg, FeatureEncoding encoding) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + path.string());
  write_dataset(out, hg, encoding);
  if (!out) throw Error(ErrorKind::IoError, "write to " + path.string() + " failed");
}

}  // namespace fedhgn
