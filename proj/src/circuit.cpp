#include "qcm/circuit.hpp"

#include "qcm/errors.hpp"
#include "qcm/rng.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>

namespace qcm {

namespace {

constexpr double kUnitaryTol = 1e-10;
constexpr double kTraceDriftTol = 1e-8;
constexpr double kBranchPrune = 1e-15;
constexpr std::size_t kMaxOutcomeTuples = 1000000;

struct LiveState {
    std::vector<std::string> wireIds;
    std::vector<int> dims;

    int position(const std::string& id) const {
        for (std::size_t i = 0; i < wireIds.size(); ++i)
            if (wireIds[i] == id) return static_cast<int>(i);
        throw ParseError("gate references wire '" + id + "' which is not live");
    }
};

void checkTrace(const Matrix& rho) {
    if (std::abs(rho.trace() - Complex(1.0, 0.0)) > kTraceDriftTol)
        throw std::runtime_error("simulate: state trace drifted beyond 1e-8");
}

} // namespace

std::vector<std::string> FunctionalModel::nodeOrder() const {
    std::vector<std::string> order;
    for (const auto& g : gates) {
        if (const auto* m = std::get_if<SicMeasure>(&g)) order.push_back(m->node);
        if (const auto* p = std::get_if<PrepareProjector>(&g))
            if (!p->node.empty()) order.push_back(p->node);
    }
    return order;
}

int FunctionalModel::nodeDim(const std::string& node) const {
    for (const auto& g : gates) {
        if (const auto* m = std::get_if<SicMeasure>(&g))
            if (m->node == node) return wire(m->wire).dim;
        if (const auto* p = std::get_if<PrepareProjector>(&g))
            if (p->node == node) return wire(p->wire).dim;
    }
    throw ParseError("unknown measurement node: " + node);
}

bool FunctionalModel::pristine() const {
    for (const auto& g : gates)
        if (std::holds_alternative<PrepareProjector>(g) ||
            std::holds_alternative<DiscardInput>(g))
            return false;
    return true;
}

const Wire& FunctionalModel::wire(const std::string& id) const {
    for (const auto& w : wires)
        if (w.id == id) return w;
    throw ParseError("unknown wire: " + id);
}

void FunctionalModel::validate() const {
    std::set<std::string> wireIds;
    for (const auto& w : wires) {
        if (w.dim < 2) throw ParseError("wire " + w.id + ": dimension must be >= 2");
        if (!wireIds.insert(w.id).second) throw ParseError("duplicate wire id: " + w.id);
    }
    std::set<std::string> nodes;
    for (const auto& g : gates) {
        if (const auto* u = std::get_if<Unitary>(&g)) {
            if (u->wires.empty()) throw ParseError("unitary gate with no wires");
            int dim = 1;
            std::set<std::string> seen;
            for (const auto& id : u->wires) {
                if (!seen.insert(id).second)
                    throw ParseError("unitary gate lists wire " + id + " twice");
                dim *= wire(id).dim;
            }
            if (u->matrix.rows() != dim || u->matrix.cols() != dim)
                throw ParseError("unitary matrix size does not match wire dims");
            if (!isUnitary(u->matrix, kUnitaryTol))
                throw ParseError("gate matrix is not unitary within 1e-10");
        } else if (const auto* m = std::get_if<SicMeasure>(&g)) {
            if (m->povm.dim != wire(m->wire).dim)
                throw ParseError("measurement POVM dimension does not match wire " + m->wire);
            if (!nodes.insert(m->node).second)
                throw ParseError("duplicate measurement node: " + m->node);
        } else if (const auto* p = std::get_if<PrepareProjector>(&g)) {
            if (p->povm.dim != wire(p->wire).dim)
                throw ParseError("prepared projector dimension does not match wire " + p->wire);
            if (p->index < 1 || p->index > p->povm.outcomeCount())
                throw ParseError("prepared projector index out of range");
            if (!p->node.empty() && !nodes.insert(p->node).second)
                throw ParseError("duplicate measurement node: " + p->node);
        } else if (const auto* d = std::get_if<DiscardInput>(&g)) {
            wire(d->wire); // existence check
        }
    }
}

bool sameModel(const FunctionalModel& a, const FunctionalModel& b) {
    if (a.wires != b.wires || a.gates.size() != b.gates.size()) return false;
    auto eqMat = [](const Matrix& x, const Matrix& y) {
        if (x.rows() != y.rows() || x.cols() != y.cols()) return false;
        for (int i = 0; i < x.rows(); ++i)
            for (int j = 0; j < x.cols(); ++j)
                if (x(i, j) != y(i, j)) return false;
        return true;
    };
    auto eqPovm = [&](const SicPovm& x, const SicPovm& y) {
        if (x.dim != y.dim || x.projectors.size() != y.projectors.size()) return false;
        for (std::size_t i = 0; i < x.projectors.size(); ++i)
            if (!eqMat(x.projectors[i], y.projectors[i])) return false;
        return true;
    };
    for (std::size_t i = 0; i < a.gates.size(); ++i) {
        const auto& ga = a.gates[i];
        const auto& gb = b.gates[i];
        if (ga.index() != gb.index()) return false;
        if (const auto* ua = std::get_if<Unitary>(&ga)) {
            const auto* ub = std::get_if<Unitary>(&gb);
            if (ua->wires != ub->wires || !eqMat(ua->matrix, ub->matrix) ||
                ua->fromHaar != ub->fromHaar || ua->haarSeed != ub->haarSeed ||
                ua->haarAdjoint != ub->haarAdjoint)
                return false;
        } else if (const auto* ma = std::get_if<SicMeasure>(&ga)) {
            const auto* mb = std::get_if<SicMeasure>(&gb);
            if (ma->node != mb->node || ma->wire != mb->wire ||
                ma->povmSource != mb->povmSource || !eqPovm(ma->povm, mb->povm))
                return false;
        } else if (const auto* pa = std::get_if<PrepareProjector>(&ga)) {
            const auto* pb = std::get_if<PrepareProjector>(&gb);
            if (pa->wire != pb->wire || pa->index != pb->index || pa->node != pb->node ||
                pa->povmSource != pb->povmSource || !eqPovm(pa->povm, pb->povm))
                return false;
        } else if (const auto* da = std::get_if<DiscardInput>(&ga)) {
            if (da->wire != std::get_if<DiscardInput>(&gb)->wire) return false;
        }
    }
    return true;
}

CausalGraph deriveDag(const FunctionalModel& m) {
    m.validate();
    std::map<std::string, std::set<std::string>> sources; // wire -> upstream nodes
    for (const auto& w : m.wires) sources[w.id] = {};

    std::vector<CausalGraph::Node> nodes;
    std::set<std::pair<std::string, std::string>> edges;
    for (const auto& g : m.gates) {
        if (const auto* u = std::get_if<Unitary>(&g)) {
            std::set<std::string> merged;
            for (const auto& id : u->wires) {
                const auto it = sources.find(id);
                if (it == sources.end())
                    throw ParseError("unitary acts on discarded wire " + id);
                merged.insert(it->second.begin(), it->second.end());
            }
            for (const auto& id : u->wires) sources[id] = merged;
        } else if (const auto* ms = std::get_if<SicMeasure>(&g)) {
            const auto it = sources.find(ms->wire);
            if (it == sources.end())
                throw ParseError("measurement on discarded wire " + ms->wire);
            for (const auto& src : it->second) edges.insert({src, ms->node});
            it->second = {ms->node};
            nodes.push_back({ms->node, m.wire(ms->wire).dim});
        } else if (const auto* p = std::get_if<PrepareProjector>(&g)) {
            std::set<std::string> src;
            if (!p->node.empty()) {
                src = {p->node};
                nodes.push_back({p->node, m.wire(p->wire).dim});
            }
            sources[p->wire] = std::move(src);
        } else if (const auto* d = std::get_if<DiscardInput>(&g)) {
            if (sources.erase(d->wire) == 0)
                throw ParseError("discard on already-discarded wire " + d->wire);
        }
    }
    return CausalGraph(std::move(nodes), std::move(edges));
}

JointDistribution simulate(const FunctionalModel& m) {
    m.validate();

    const auto order = m.nodeOrder();
    std::vector<JointDistribution::Variable> vars;
    std::size_t tupleCount = 1;
    for (const auto& node : order) {
        const int d = m.nodeDim(node);
        vars.push_back({node, d * d});
        tupleCount *= static_cast<std::size_t>(d * d);
        if (tupleCount > kMaxOutcomeTuples)
            throw ResourceError("outcome space exceeds 10^6 tuples");
    }
    std::vector<double> table(tupleCount, 0.0);

    LiveState live;
    int fullDim = 1;
    for (const auto& w : m.wires) {
        live.wireIds.push_back(w.id);
        live.dims.push_back(w.dim);
        fullDim *= w.dim;
    }

    auto flatten = [&](const std::vector<int>& outcomes) {
        std::size_t idx = 0;
        for (std::size_t i = 0; i < vars.size(); ++i)
            idx = idx * vars[i].outcomes + static_cast<std::size_t>(outcomes[i] - 1);
        return idx;
    };

    BranchState root;
    root.rho = Matrix::Identity(fullDim, fullDim) / static_cast<double>(fullDim);
    root.probability = 1.0;

    std::function<void(BranchState&, LiveState&, std::size_t)> run =
        [&](BranchState& branch, LiveState& state, std::size_t gateIdx) {
            if (gateIdx == m.gates.size()) {
                table[flatten(branch.outcomes)] += branch.probability;
                return;
            }
            const auto& g = m.gates[gateIdx];
            if (const auto* u = std::get_if<Unitary>(&g)) {
                std::vector<int> pos;
                for (const auto& id : u->wires) pos.push_back(state.position(id));
                const Matrix full = embedOperator(u->matrix, pos, state.dims);
                branch.rho = full * branch.rho * full.adjoint();
                checkTrace(branch.rho);
                run(branch, state, gateIdx + 1);
            } else if (const auto* ms = std::get_if<SicMeasure>(&g)) {
                const int pos = state.position(ms->wire);
                const int d = ms->povm.dim;
                const Matrix rho = std::move(branch.rho);
                for (int x = 1; x <= d * d; ++x) {
                    const Matrix& proj = ms->povm.projector(x);
                    const Matrix effect =
                        embedOperator(proj / static_cast<double>(d), {pos}, state.dims);
                    const double weight = (effect * rho).trace().real();
                    if (weight <= kBranchPrune) continue;
                    Matrix rest = partialTrace(effect * rho, pos, state.dims) / weight;
                    BranchState child;
                    child.rho = moveLastSubsystemTo(tensorAppend(rest, proj), pos, state.dims);
                    checkTrace(child.rho);
                    child.probability = branch.probability * weight;
                    child.outcomes = branch.outcomes;
                    child.outcomes.push_back(x);
                    run(child, state, gateIdx + 1);
                }
            } else if (const auto* p = std::get_if<PrepareProjector>(&g)) {
                branch.rho = tensorAppend(branch.rho, p->povm.projector(p->index));
                state.wireIds.push_back(p->wire);
                state.dims.push_back(p->povm.dim);
                if (!p->node.empty()) branch.outcomes.push_back(p->index);
                run(branch, state, gateIdx + 1);
                state.wireIds.pop_back();
                state.dims.pop_back();
            } else if (const auto* disc = std::get_if<DiscardInput>(&g)) {
                const int pos = state.position(disc->wire);
                branch.rho = partialTrace(branch.rho, pos, state.dims);
                LiveState reduced = state;
                reduced.wireIds.erase(reduced.wireIds.begin() + pos);
                reduced.dims.erase(reduced.dims.begin() + pos);
                checkTrace(branch.rho);
                run(branch, reduced, gateIdx + 1);
            }
        };
    run(root, live, 0);

    return JointDistribution(std::move(vars), std::move(table));
}

FunctionalModel applyInterventionSurgery(const FunctionalModel& m, const std::string& w,
                                         int value) {
    FunctionalModel out;
    out.wires = m.wires;
    bool found = false;
    for (const auto& g : m.gates) {
        if (const auto* ms = std::get_if<SicMeasure>(&g); ms && ms->node == w) {
            if (value < 1 || value > ms->povm.outcomeCount())
                throw ParseError("intervention value out of range for node " + w);
            out.gates.push_back(DiscardInput{ms->wire});
            out.gates.push_back(
                PrepareProjector{ms->wire, value, ms->povm, ms->povmSource, ms->node});
            found = true;
        } else {
            out.gates.push_back(g);
        }
    }
    if (!found) throw ParseError("unknown measurement node: " + w);
    return out;
}

FunctionalModel applyUnmeasurementSurgery(const FunctionalModel& m, const std::string& z) {
    FunctionalModel out;
    out.wires = m.wires;
    bool found = false;
    for (const auto& g : m.gates) {
        if (const auto* ms = std::get_if<SicMeasure>(&g); ms && ms->node == z) {
            found = true;
            continue;
        }
        out.gates.push_back(g);
    }
    if (!found) throw ParseError("unknown measurement node: " + z);
    return out;
}

FunctionalModel timeReverse(const FunctionalModel& m) {
    if (!m.pristine())
        throw ParseError("time reversal undefined after surgery");
    FunctionalModel out;
    out.wires = m.wires;
    for (auto it = m.gates.rbegin(); it != m.gates.rend(); ++it) {
        if (const auto* u = std::get_if<Unitary>(&*it)) {
            Unitary rev = *u;
            rev.matrix = u->matrix.adjoint();
            rev.haarAdjoint = !u->haarAdjoint;
            out.gates.push_back(std::move(rev));
        } else {
            out.gates.push_back(*it);
        }
    }
    return out;
}

FunctionalModel randomModel(const CausalGraph& templateGraph, std::uint64_t seed) {
    if (templateGraph.nodes().size() > 6)
        throw ParseError("random_model templates are capped at 6 nodes");
    for (const auto& n : templateGraph.nodes())
        if (n.dim != 2)
            throw ParseError("random_model requires all template dims to be 2");
    if (!isQdag(templateGraph))
        throw UnsupportedShapeError("random_model template must be a QDAG");

    // Longest-path layering; the generator only realizes graphs whose edges
    // all span consecutive layers with complete-bipartite components.
    std::map<std::string, int> layer;
    std::function<int(const std::string&)> layerOf = [&](const std::string& n) -> int {
        const auto it = layer.find(n);
        if (it != layer.end()) return it->second;
        int l = 0;
        for (const auto& p : templateGraph.parents(n)) l = std::max(l, layerOf(p) + 1);
        layer[n] = l;
        return l;
    };
    int maxLayer = 0;
    for (const auto& n : templateGraph.nodes()) maxLayer = std::max(maxLayer, layerOf(n.name));
    for (const auto& [p, c] : templateGraph.edges())
        if (layer[c] != layer[p] + 1)
            throw UnsupportedShapeError(
                "unsupported template shape: edge " + p + "->" + c + " skips a layer");

    std::vector<std::vector<std::string>> layers(maxLayer + 1);
    for (const auto& n : templateGraph.nodes()) layers[layer[n.name]].push_back(n.name);
    for (auto& l : layers) std::sort(l.begin(), l.end());

    const SicPovm sic = knownSic(2);
    FunctionalModel model;
    std::map<std::string, std::string> wireOf; // node -> wire carrying its output
    int nextWire = 0;
    std::uint64_t gateCounter = 0;

    auto freshWire = [&] {
        const std::string id = "q" + std::to_string(nextWire++);
        model.wires.push_back({id, 2});
        return id;
    };

    // Layer 0 measurements act directly on fresh maximally mixed wires.
    for (const auto& n : layers[0]) {
        wireOf[n] = freshWire();
        model.gates.push_back(SicMeasure{n, wireOf[n], sic, "sic2"});
    }

    for (int k = 0; k < maxLayer; ++k) {
        // Connected components of the bipartite edge set between layer k and
        // layer k+1, keyed by smallest member for determinism.
        std::map<std::string, std::string> comp; // node -> representative
        std::function<std::string(const std::string&)> find = [&](const std::string& n) {
            if (comp[n] == n) return n;
            return comp[n] = find(comp[n]);
        };
        auto unite = [&](const std::string& a, const std::string& b) {
            const std::string ra = find(a), rb = find(b);
            if (ra != rb) comp[std::max(ra, rb)] = std::min(ra, rb);
        };
        for (const auto& n : layers[k]) comp[n] = n;
        for (const auto& n : layers[k + 1]) comp[n] = n;
        for (const auto& [p, c] : templateGraph.edges())
            if (layer[p] == k) unite(p, c);

        std::map<std::string, std::pair<std::vector<std::string>, std::vector<std::string>>>
            groups; // representative -> (parents, children)
        for (const auto& n : layers[k])
            if (!templateGraph.children(n).empty()) groups[find(n)].first.push_back(n);
        for (const auto& n : layers[k + 1]) groups[find(n)].second.push_back(n);

        for (auto& [rep, pc] : groups) {
            auto& [parents, children] = pc;
            std::sort(parents.begin(), parents.end());
            std::sort(children.begin(), children.end());
            for (const auto& p : parents)
                for (const auto& c : children)
                    if (!templateGraph.hasEdge(p, c))
                        throw UnsupportedShapeError(
                            "unsupported template shape: layer transition into " + c +
                            " is not complete-bipartite");

            std::vector<std::string> gateWires;
            for (const auto& p : parents) gateWires.push_back(wireOf[p]);
            while (gateWires.size() < children.size()) gateWires.push_back(freshWire());

            int dim = 1;
            for (std::size_t i = 0; i < gateWires.size(); ++i) dim *= 2;
            Unitary u;
            u.wires = gateWires;
            u.fromHaar = true;
            u.haarSeed = subseed(seed, gateCounter++);
            u.matrix = haarUnitary(dim, u.haarSeed);
            model.gates.push_back(std::move(u));

            for (std::size_t i = 0; i < children.size(); ++i) {
                wireOf[children[i]] = gateWires[i];
                model.gates.push_back(SicMeasure{children[i], gateWires[i], sic, "sic2"});
            }
        }
    }

    if (!deriveDag(model).sameAs(templateGraph))
        throw UnsupportedShapeError("unsupported template shape for random_model");
    return model;
}

} // namespace qcm
