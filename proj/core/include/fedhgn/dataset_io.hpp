#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "fedhgn/hypergraph.hpp"

namespace fedhgn {

// Text dataset format. Blank lines and lines starting with '#' are ignored.
//
//   [header]
//   name <text>                       (optional)
//   num_nodes <N>
//   num_classes <C>
//   feature_dim <P>
//   feature_encoding dense|sparse
//   [features]                        N rows; dense: P reals,
//                                     sparse: idx:value pairs or a lone '-'
//   [labels]                          optional; N lines, class id or '-'
//   [hyperedges]                      one edge per line: [w=<weight>] ids...
//
// A simple graph uses an [edges] section of "u v" pairs instead of
// [hyperedges]; load_simple_graph turns it into 1-hop hyperedges.
enum class FeatureEncoding { Dense, Sparse };

Hypergraph parse_dataset(std::istream& in, const std::string& source = "<stream>");
Hypergraph parse_simple_graph(std::istream& in, const std::string& source = "<stream>");

Hypergraph load_dataset(const std::filesystem::path& path);
Hypergraph load_simple_graph(const std::filesystem::path& path);

void write_dataset(std::ostream& out, const Hypergraph& hg, FeatureEncoding encoding);
void save_dataset(const std::filesystem::path& path, const Hypergraph& hg, FeatureEncoding encoding);

}  // namespace fedhgn
