#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "narwhal/narrowing.hpp"
#include "narwhal/rewriting.hpp"
#include "narwhal/theory.hpp"
#include "narwhal/transform.hpp"
#include "narwhal/variant.hpp"

namespace narwhal {

enum class Mode { Rewriting, FvNarrowing, EquationalUnification, ReNarrowing };

const char* modeName(Mode m);
Mode parseMode(const std::string& name);  // throws InvalidRequest

struct Bounds {
  int maxDepth = 10;         // folding variant narrowing depth
  std::size_t maxCount = 512;
  std::size_t budget = 10000;
  int assocBound = 4;

  VariantOptions variantOptions() const;
};

struct CreateRequest {
  std::string module;
  Mode mode = Mode::ReNarrowing;
  std::string input;
  std::optional<std::string> target;
  Bounds bounds;
};

enum class NodeStatus { Unexpanded, Expanded, Folded, Solution };
const char* statusName(NodeStatus s);

struct SessionNode {
  int id = 0;
  Term term;
  int parent = -1;
  int inEdge = -1;
  int depth = 0;
  Substitution path;  // computed substitution (narrowing) or variant substitution
  bool expanded = false;
  bool folded = false;
  bool solution = false;
  bool highlighted = false;
  std::optional<GoalCheck> goal;
  std::vector<int> outEdges;
};

enum class EdgeKind { Narrowing, Rewrite, Variant };
const char* edgeKindName(EdgeKind k);

struct SessionEdge {
  int id = 0;
  int from = 0;
  int to = 0;
  EdgeKind kind = EdgeKind::Narrowing;
  std::string label;
  Position position;
  Term raw;  // result before normalization
  std::optional<NarrowingStep> narrowing;
  std::optional<RewriteStep> rewrite;
  std::optional<FVStep> variant;
  bool highlighted = false;
};

struct Growth {
  std::vector<int> nodes;
  std::vector<int> edges;
  std::vector<int> frontier;  // expandSubtree only
};

/// An exploration tree over one theory. Not synchronized; the service
/// serializes access.
class Session {
 public:
  Session(std::string id, const CreateRequest& req);
  /// Unifier-inspection session built from the variant tree of a step,
  /// expanded along the witness branch.
  static std::unique_ptr<Session> forUnifier(std::string id, const Session& parent, const SessionEdge& edge);

  const std::string& id() const { return id_; }
  Mode mode() const { return mode_; }
  const Bounds& bounds() const { return bounds_; }
  const Theory& theory() const { return *theory_; }
  const Theory& original() const { return *original_; }
  const TransformReport& report() const { return report_; }
  const std::optional<Term>& target() const { return target_; }
  const std::vector<SessionNode>& nodes() const { return nodes_; }
  const std::vector<SessionEdge>& edges() const { return edges_; }
  const SessionNode& node(int id) const { return nodes_.at(id); }
  const SessionEdge& edge(int id) const { return edges_.at(id); }
  int gensym() const { return gen_.peek(); }

  static std::string nodeLabel(int id) { return "s" + std::to_string(id + 1); }
  static std::string edgeLabel(int id) { return "e" + std::to_string(id + 1); }
  /// Accepts `s3`; throws UnknownNode.
  int resolveNode(const std::string& ref) const;
  /// Accepts `e3` or `s1->s9`; throws UnknownEdge.
  int resolveEdge(const std::string& ref) const;

  NodeStatus status(int node) const;
  /// False when some proper ancestor is folded. A folded node stays in view
  /// and hides its subtree.
  bool visible(int node) const;

  Growth expandNode(int node);
  Growth expandSubtree(int node, int depth);
  void fold(int node);
  void unfold(int node);

  /// Trace from the edge's raw result to its target term.
  NormalForm instrumented(int edge) const;

  /// Composed unifier of the highlighted branch (unifier sessions only).
  const std::optional<Substitution>& highlightedUnifier() const { return highlightedUnifier_; }

 private:
  Session() = default;
  int addNode(Term term, int parent, int inEdge, Substitution path);
  void checkGoal(int node);

  std::string id_;
  Mode mode_ = Mode::ReNarrowing;
  Bounds bounds_;
  TheoryPtr original_;
  TheoryPtr theory_;
  TransformReport report_;
  Term input_;
  std::optional<Term> target_;
  VarSet rootVars_;
  VarSet goalVars_;
  VarGen gen_;
  std::vector<SessionNode> nodes_;
  std::vector<SessionEdge> edges_;
  std::optional<Substitution> highlightedUnifier_;
};

}  // namespace narwhal
