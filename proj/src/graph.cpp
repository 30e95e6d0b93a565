#include "qcm/graph.hpp"

#include "qcm/errors.hpp"

#include <algorithm>
#include <functional>
#include <map>

namespace qcm {

namespace {

constexpr int kMaxPathEnumNodes = 12;

void requireNode(const CausalGraph& g, const std::string& name) {
    if (!g.hasNode(name)) throw ParseError("unknown node: " + name);
}

bool reaches(const CausalGraph& g, const std::string& from, const std::string& to,
             const std::set<std::string>& removed) {
    // BFS along edge direction, skipping removed intermediates.
    std::set<std::string> seen{from};
    std::vector<std::string> frontier{from};
    while (!frontier.empty()) {
        std::vector<std::string> next;
        for (const auto& n : frontier) {
            for (const auto& c : g.children(n)) {
                if (c == to) return true;
                if (removed.count(c) || seen.count(c)) continue;
                seen.insert(c);
                next.push_back(c);
            }
        }
        frontier = std::move(next);
    }
    return false;
}

// Every directed path from an ancestor of x to a descendant of x must pass
// through slice = companions + {x}. Equivalent reachability form: with the
// slice removed, no ancestor may reach a descendant.
bool sliceIntercepts(const CausalGraph& g, const std::string& x,
                     const std::set<std::string>& companions,
                     const std::set<std::string>& ancestors,
                     const std::set<std::string>& descendants) {
    std::set<std::string> removed = companions;
    removed.insert(x);
    for (const auto& a : ancestors)
        for (const auto& d : descendants)
            if (reaches(g, a, d, removed)) return false;
    return true;
}

bool mutuallyIncomparable(const CausalGraph& g, const std::vector<std::string>& members) {
    for (const auto& m : members) {
        const auto desc = relatives(g, m, Direction::Descendants);
        for (const auto& o : members)
            if (o != m && desc.count(o)) return false;
    }
    return true;
}

} // namespace

CausalGraph::CausalGraph(std::vector<Node> nodes,
                         std::set<std::pair<std::string, std::string>> edges)
    : nodes_(std::move(nodes)), edges_(std::move(edges)) {
    std::set<std::string> names;
    for (const auto& n : nodes_) {
        if (n.dim < 2) throw ParseError("node " + n.name + ": Hilbert dimension must be >= 2");
        if (!names.insert(n.name).second) throw ParseError("duplicate node name: " + n.name);
    }
    for (const auto& [p, c] : edges_) {
        if (!names.count(p)) throw ParseError("edge endpoint not a node: " + p);
        if (!names.count(c)) throw ParseError("edge endpoint not a node: " + c);
        if (p == c) throw ParseError("self-loop on node " + p);
    }
    // Kahn's algorithm; leftover nodes mean a cycle.
    std::map<std::string, int> indeg;
    for (const auto& n : nodes_) indeg[n.name] = 0;
    for (const auto& [p, c] : edges_) ++indeg[c];
    std::vector<std::string> queue;
    for (const auto& [n, d] : indeg)
        if (d == 0) queue.push_back(n);
    std::size_t processed = 0;
    while (!queue.empty()) {
        const std::string n = queue.back();
        queue.pop_back();
        ++processed;
        for (const auto& c : children(n))
            if (--indeg[c] == 0) queue.push_back(c);
    }
    if (processed != nodes_.size()) throw ParseError("graph contains a directed cycle");
}

bool CausalGraph::hasNode(const std::string& name) const {
    return std::any_of(nodes_.begin(), nodes_.end(),
                       [&](const Node& n) { return n.name == name; });
}

const CausalGraph::Node& CausalGraph::node(const std::string& name) const {
    for (const auto& n : nodes_)
        if (n.name == name) return n;
    throw ParseError("unknown node: " + name);
}

bool CausalGraph::hasEdge(const std::string& parent, const std::string& child) const {
    return edges_.count({parent, child}) > 0;
}

std::set<std::string> CausalGraph::parents(const std::string& name) const {
    std::set<std::string> out;
    for (const auto& [p, c] : edges_)
        if (c == name) out.insert(p);
    return out;
}

std::set<std::string> CausalGraph::children(const std::string& name) const {
    std::set<std::string> out;
    for (const auto& [p, c] : edges_)
        if (p == name) out.insert(c);
    return out;
}

bool CausalGraph::sameAs(const CausalGraph& other) const {
    if (edges_ != other.edges_) return false;
    auto key = [](const std::vector<Node>& ns) {
        std::set<std::pair<std::string, int>> s;
        for (const auto& n : ns) s.insert({n.name, n.dim});
        return s;
    };
    return key(nodes_) == key(other.nodes_);
}

const char* blockRuleName(BlockRule rule) {
    switch (rule) {
        case BlockRule::GSso: return "g-SSO";
        case BlockRule::GBk: return "g-BK";
        case BlockRule::GBkStar: return "g-BK*";
    }
    return "?";
}

std::set<std::string> relatives(const CausalGraph& g, const std::string& x, Direction dir) {
    requireNode(g, x);
    std::set<std::string> out;
    std::vector<std::string> frontier{x};
    while (!frontier.empty()) {
        std::vector<std::string> next;
        for (const auto& n : frontier) {
            const auto step =
                dir == Direction::Descendants ? g.children(n) : g.parents(n);
            for (const auto& m : step) {
                if (out.insert(m).second) next.push_back(m);
            }
        }
        frontier = std::move(next);
    }
    out.erase(x);
    return out;
}

std::vector<UndirectedPath> undirectedPaths(const CausalGraph& g, const std::string& u,
                                            const std::string& v) {
    requireNode(g, u);
    requireNode(g, v);
    if (u == v) throw ParseError("undirected_paths: endpoints must differ");
    if (g.nodes().size() > kMaxPathEnumNodes)
        throw ResourceError("path enumeration is capped at 12 nodes");

    std::vector<UndirectedPath> out;
    UndirectedPath cur;
    cur.nodes.push_back(u);
    std::set<std::string> onPath{u};

    // Neighbors in name order makes the enumeration lexicographic.
    auto neighbors = [&](const std::string& n) {
        std::set<std::pair<std::string, bool>> s; // (neighbor, forward?)
        for (const auto& c : g.children(n)) s.insert({c, true});
        for (const auto& p : g.parents(n)) s.insert({p, false});
        return s;
    };

    std::function<void(const std::string&)> dfs = [&](const std::string& n) {
        if (n == v) {
            out.push_back(cur);
            return;
        }
        for (const auto& [m, fwd] : neighbors(n)) {
            if (onPath.count(m)) continue;
            cur.nodes.push_back(m);
            cur.forward.push_back(fwd);
            onPath.insert(m);
            dfs(m);
            onPath.erase(m);
            cur.nodes.pop_back();
            cur.forward.pop_back();
        }
    };
    dfs(u);
    return out;
}

BlockResult pathBlocked(const CausalGraph& g, const UndirectedPath& p,
                        const std::set<std::string>& w) {
    const std::size_t len = p.nodes.size();
    if (len < 2 || p.forward.size() != len - 1)
        throw ParseError("malformed path");
    for (std::size_t i = 0; i + 1 < len; ++i) {
        const bool ok = p.forward[i] ? g.hasEdge(p.nodes[i], p.nodes[i + 1])
                                     : g.hasEdge(p.nodes[i + 1], p.nodes[i]);
        if (!ok) throw ParseError("malformed path: missing edge at step " + std::to_string(i));
    }
    if (w.count(p.nodes.front()) || w.count(p.nodes.back()))
        throw ParseError("conditioning set must not contain the path endpoints");

    for (std::size_t i = 1; i + 1 < len; ++i) {
        const bool in = p.forward[i - 1];  // edge arrives at nodes[i]
        const bool outEdge = p.forward[i]; // edge leaves nodes[i]
        const std::string& mid = p.nodes[i];
        if (in != outEdge) {
            if (in && !outEdge) {
                // collider -> mid <-
                if (!w.count(mid)) {
                    const auto desc = relatives(g, mid, Direction::Descendants);
                    bool descInW = false;
                    for (const auto& d : desc) descInW |= w.count(d) > 0;
                    if (!descInW) return {true, BlockRule::GBk, mid};
                }
            } else {
                // fork <- mid ->
                if (!w.count(mid)) {
                    const auto anc = relatives(g, mid, Direction::Ancestors);
                    bool ancInW = false;
                    for (const auto& a : anc) ancInW |= w.count(a) > 0;
                    if (!ancInW) return {true, BlockRule::GBkStar, mid};
                }
            }
        } else if (w.count(mid)) {
            // chain through mid, either orientation
            return {true, BlockRule::GSso, mid};
        }
    }
    return {false, BlockRule::GSso, ""};
}

bool qSeparated(const CausalGraph& g, const std::set<std::string>& u,
                const std::set<std::string>& v, const std::set<std::string>& w) {
    for (const auto& a : u)
        if (v.count(a) || w.count(a))
            throw ParseError("q_separated: sets must be pairwise disjoint");
    for (const auto& b : v)
        if (w.count(b)) throw ParseError("q_separated: sets must be pairwise disjoint");

    for (const auto& a : u) {
        for (const auto& b : v) {
            for (const auto& p : undirectedPaths(g, a, b))
                if (!pathBlocked(g, p, w).blocked) return false;
        }
    }
    return true;
}

CausalGraph causalInvert(const CausalGraph& g) {
    std::set<std::pair<std::string, std::string>> inv;
    for (const auto& [p, c] : g.edges()) inv.insert({c, p});
    return CausalGraph(g.nodes(), std::move(inv));
}

std::optional<Slice> findSlice(const CausalGraph& g, const std::string& x) {
    requireNode(g, x);
    const auto ancestors = relatives(g, x, Direction::Ancestors);
    const auto descendants = relatives(g, x, Direction::Descendants);

    std::vector<std::string> candidates;
    for (const auto& n : g.nodes()) {
        if (n.name == x || ancestors.count(n.name) || descendants.count(n.name)) continue;
        candidates.push_back(n.name);
    }
    std::sort(candidates.begin(), candidates.end());
    const int m = static_cast<int>(candidates.size());

    // Subsets by cardinality, then lexicographically by sorted member list.
    for (int size = 0; size <= m; ++size) {
        std::vector<std::vector<std::string>> subsets;
        std::vector<std::string> pick;
        std::function<void(int)> gen = [&](int start) {
            if (static_cast<int>(pick.size()) == size) {
                subsets.push_back(pick);
                return;
            }
            for (int i = start; i < m; ++i) {
                pick.push_back(candidates[i]);
                gen(i + 1);
                pick.pop_back();
            }
        };
        gen(0);
        std::sort(subsets.begin(), subsets.end());
        for (const auto& subset : subsets) {
            std::vector<std::string> members = subset;
            members.push_back(x);
            if (!mutuallyIncomparable(g, members)) continue;
            std::set<std::string> companions(subset.begin(), subset.end());
            if (sliceIntercepts(g, x, companions, ancestors, descendants))
                return Slice{x, std::move(companions)};
        }
    }
    return std::nullopt;
}

bool isQdag(const CausalGraph& g) {
    for (const auto& n : g.nodes())
        if (!findSlice(g, n.name)) return false;
    return true;
}

CausalGraph graphAfterUnmeasure(const CausalGraph& g, const std::string& z) {
    requireNode(g, z);
    const auto ps = g.parents(z);
    const auto cs = g.children(z);
    std::vector<CausalGraph::Node> nodes;
    for (const auto& n : g.nodes())
        if (n.name != z) nodes.push_back(n);
    std::set<std::pair<std::string, std::string>> edges;
    for (const auto& [p, c] : g.edges())
        if (p != z && c != z) edges.insert({p, c});
    for (const auto& p : ps)
        for (const auto& c : cs) edges.insert({p, c});
    return CausalGraph(std::move(nodes), std::move(edges));
}

CausalGraph graphAfterIntervention(const CausalGraph& g, const std::string& w) {
    requireNode(g, w);
    std::string y = "Y";
    for (int k = 2; g.hasNode(y); ++k) y = "Y" + std::to_string(k);
    std::vector<CausalGraph::Node> nodes = g.nodes();
    nodes.push_back({y, g.node(w).dim});
    std::set<std::pair<std::string, std::string>> edges;
    for (const auto& [p, c] : g.edges())
        if (c != w) edges.insert({p, c});
    edges.insert({y, w});
    return CausalGraph(std::move(nodes), std::move(edges));
}

} // namespace qcm
