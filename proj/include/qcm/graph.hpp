#pragma once

#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace qcm {

/// DAG over named nodes; each node carries the Hilbert dimension of the
/// system its measurement acts on (so node X has dim(X)^2 outcomes).
class CausalGraph {
public:
    struct Node {
        std::string name;
        int dim = 2;
        bool operator==(const Node&) const = default;
    };

    CausalGraph() = default;
    /// Validates: unique names, known edge endpoints, dims >= 2, acyclicity.
    CausalGraph(std::vector<Node> nodes, std::set<std::pair<std::string, std::string>> edges);

    const std::vector<Node>& nodes() const { return nodes_; }
    const std::set<std::pair<std::string, std::string>>& edges() const { return edges_; }

    bool hasNode(const std::string& name) const;
    const Node& node(const std::string& name) const;
    bool hasEdge(const std::string& parent, const std::string& child) const;

    std::set<std::string> parents(const std::string& name) const;
    std::set<std::string> children(const std::string& name) const;

    /// Set-equality on nodes and edges (node order in the file is not
    /// semantically meaningful).
    bool sameAs(const CausalGraph& other) const;

private:
    std::vector<Node> nodes_;
    std::set<std::pair<std::string, std::string>> edges_;
};

enum class Direction { Ancestors, Descendants };

/// Simple undirected path; forward[i] says whether the step nodes[i] ->
/// nodes[i+1] follows the edge direction.
struct UndirectedPath {
    std::vector<std::string> nodes;
    std::vector<bool> forward;
};

enum class BlockRule { GSso, GBk, GBkStar };

struct BlockResult {
    bool blocked = false;
    BlockRule rule = BlockRule::GSso;
    std::string middle; // triple middle that fired the rule
};

/// Companion set S_x: together with x mutually causally incomparable, and
/// intercepting every directed ancestor-to-descendant path through x.
struct Slice {
    std::string center;
    std::set<std::string> companions;
};

const char* blockRuleName(BlockRule rule);

/// Transitive ancestors or descendants, excluding x itself.
std::set<std::string> relatives(const CausalGraph& g, const std::string& x, Direction dir);

/// All simple undirected paths between u and v, lexicographically ordered by
/// node-name sequence. Graphs above 12 nodes raise ResourceError.
std::vector<UndirectedPath> undirectedPaths(const CausalGraph& g, const std::string& u,
                                            const std::string& v);

/// Quantum Markov Condition blocking: a path is blocked iff some interior
/// triple satisfies g-SSO (chain middle in W), g-BK (collider middle outside
/// W with no descendant in W) or g-BK* (fork middle outside W with no
/// ancestor in W). Reports the leftmost rule fired.
BlockResult pathBlocked(const CausalGraph& g, const UndirectedPath& p,
                        const std::set<std::string>& w);

/// True iff every undirected path from u to v is blocked by w.
bool qSeparated(const CausalGraph& g, const std::set<std::string>& u,
                const std::set<std::string>& v, const std::set<std::string>& w);

/// Reverses every edge.
CausalGraph causalInvert(const CausalGraph& g);

/// Smallest companion set (ties broken lexicographically) making x's slice
/// valid, or nullopt when none exists.
std::optional<Slice> findSlice(const CausalGraph& g, const std::string& x);

/// True iff every node possesses a slice.
bool isQdag(const CausalGraph& g);

/// Removes z, connecting every former parent to every former child.
CausalGraph graphAfterUnmeasure(const CausalGraph& g, const std::string& z);

/// Deletes the edges into w and adds an exogenous node (named "Y" or the
/// first free "Y<k>") of the same dimension as w's sole parent.
CausalGraph graphAfterIntervention(const CausalGraph& g, const std::string& w);

} // namespace qcm
