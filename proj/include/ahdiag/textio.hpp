// Copyright 2026 The ahdiag Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef AHDIAG_TEXTIO_HPP_
#define AHDIAG_TEXTIO_HPP_

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ahdiag/ahsys.hpp"
#include "ahdiag/error.hpp"
#include "ahdiag/intertwine.hpp"

namespace ahdiag {

// System files. Line based, '#' starts a comment, indentation is ignored.
//
//   ahdiag 1
//   param <key> <value>
//   graph <id>                      map <id> <domain> <codomain>
//     vertices <v>...                 piece <edge> <t0> <t1> <edge> <c0> <c1>
//     edge <id> <tail> <head> [len]  end
//   end                             tree <id> <base graph> <radius>
//   block <id>                      diagform <id> <source block> <target block>
//     summand <graph> <size>          target <i> <tree>
//   end                               entry <i> <source summand> <map>
//   element <id> <block>            end
//     value <summand> <edge> <t> <re[:im]>...   (row-major)
//   end
//   system <id>
//     level <n> <rank>
//     component <n> graph <g> | component <n> power <g> <k>
//     sample <n> <component> <edge:coord>...
//     step <n> <s>
//     y <n> <component> <lands_in> trivial:<slot>|line:<tag> <expr>
//   end
//   pair <id>
//     level <n> <block> | phi <n> <diagform> | psi <n> <diagform>
//     gens <n> <element>...
//   end
//
// Points are <edge id>:<coord>. An <expr> is atoms joined by "o", outermost
// first: id | const <point>... | pl <map> | proj <i,j,...>.

struct SchemaIssue {
  int line = 0;
  std::string message;
};

class SchemaError : public Error {
 public:
  explicit SchemaError(std::vector<SchemaIssue> issues);
  const std::vector<SchemaIssue>& issues() const { return issues_; }

 private:
  std::vector<SchemaIssue> issues_;
};

struct TreeDecl {
  std::string id;
  std::string base;
  int radius = 1;
  CoveringTree tree;
};

struct FormDecl {
  std::string id;
  std::string source;
  std::string target;
  std::vector<std::string> trees;                     // per target summand
  std::vector<std::vector<std::string>> entry_maps;   // per target summand
  DiagonalForm form;
};

struct ElementDecl {
  std::string id;
  std::string block;
  Element element;
};

struct PairDecl {
  std::string id;
  std::vector<std::string> levels;
  std::vector<std::string> phi;
  std::vector<std::string> psi;
  std::vector<std::vector<std::string>> gens;
};

struct Document {
  std::vector<std::pair<std::string, std::string>> params;
  std::vector<GraphPtr> graphs;
  std::vector<std::pair<std::string, PLMap>> maps;
  std::vector<TreeDecl> trees;
  std::vector<std::pair<std::string, Block>> blocks;
  std::vector<FormDecl> forms;
  std::vector<ElementDecl> elements;
  std::vector<std::pair<std::string, GenDiagSystem>> systems;
  std::vector<PairDecl> pairs;

  // Lookups throw DomainError naming the missing id.
  GraphPtr graph(const std::string& id) const;  // graphs and tree graphs
  const PLMap& map(const std::string& id) const;
  const TreeDecl& tree(const std::string& id) const;
  const Block& block(const std::string& id) const;
  const FormDecl& form(const std::string& id) const;
  const Element& element(const std::string& id) const;
  const GenDiagSystem& system(const std::string& id) const;
  FiniteSystemPair pair(const std::string& id) const;
  const std::string* param(const std::string& key) const;

  // Registration; graphs are keyed by name and added once.
  void add_graph(const GraphPtr& g);
  // Adds `form` with entry maps named <id>.<i>.<s>, reusing the trees and
  // blocks of `like`.
  void add_block(const std::string& id, const Block& b);
  // Registers the covering trees (named after their graphs), base graphs and
  // entry maps <id>.<i>.<s>.
  void add_form(const std::string& id, const std::string& source, const std::string& target,
                const DiagonalForm& form);
  void add_element(const std::string& id, const std::string& block, const Element& e);
  // Blocks <id>.A<n>, forms <id>.phi<n> and <id>.psi<n>, generators <id>.g<n>.<k>.
  void add_pair(const std::string& id, const FiniteSystemPair& p);
  void add_form_like(const FormDecl& like, const std::string& id, const DiagonalForm& form);
  // Adds the system and every graph and labelled map it uses; unlabelled
  // PL maps get ids <system>.<n>.<y>.
  void add_system(const std::string& id, GenDiagSystem sys);
};

// Throws SchemaError listing every problem with its line.
Document parse_document(std::string_view text);
// IoError if unreadable.
Document read_document(const std::string& path);

// Canonical text: fixed section order, exact rationals.
std::string serialize(const Document& doc);

GraphPoint parse_point(const Graph& g, std::string_view token);
std::string point_token(const Graph& g, const GraphPoint& p);

}  // namespace ahdiag

#endif  // AHDIAG_TEXTIO_HPP_
