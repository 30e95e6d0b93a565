#include "qcm/calculus.hpp"

#include "qcm/errors.hpp"

#include <algorithm>
#include <cmath>

namespace qcm {

namespace {

constexpr double kCellEps = 1e-12;

void requireSignatureMatch(const JointDistribution& p, const CausalGraph& g) {
    if (p.variables().size() != g.nodes().size())
        throw ParseError("distribution variables do not match graph nodes");
    for (const auto& v : p.variables()) {
        if (!g.hasNode(v.name))
            throw ParseError("distribution variable " + v.name + " is not a graph node");
        const int d = g.node(v.name).dim;
        if (d * d != v.outcomes)
            throw ParseError("variable " + v.name + " outcome count does not equal dim^2");
    }
}

std::vector<std::string> sortedNames(const CausalGraph& g) {
    std::vector<std::string> names;
    for (const auto& n : g.nodes()) names.push_back(n.name);
    std::sort(names.begin(), names.end());
    return names;
}

// Marginal lookup helper: value of marginal `m` at the sub-tuple of `tuple`
// (indexed per `p`'s variable order).
double lookup(const JointDistribution& m, const JointDistribution& p,
              const std::vector<int>& tuple) {
    std::vector<int> sub;
    sub.reserve(m.variables().size());
    for (const auto& var : m.variables()) sub.push_back(tuple[p.variableIndex(var.name)]);
    return m.probability(sub);
}

} // namespace

const char* interventionVariantName(InterventionVariant v) {
    return v == InterventionVariant::AsPrinted ? "asPrinted" : "ancestorMarginal";
}

MarkovReport markovCheck(const JointDistribution& p, const CausalGraph& g, double tol) {
    requireSignatureMatch(p, g);
    const int n = static_cast<int>(g.nodes().size());
    if (n > 6) throw ResourceError("markov_check is capped at 6 nodes");

    const auto names = sortedNames(g);

    MarkovReport report;
    report.tolerance = tol;

    // Assign each node to one of {U, V, W, none}; U and V nonempty and
    // unordered (smallest U member precedes smallest V member).
    std::vector<int> assign(n, 0);
    long total = 1;
    for (int i = 0; i < n; ++i) total *= 4;
    for (long code = 0; code < total; ++code) {
        long c = code;
        std::set<std::string> u, v, w;
        for (int i = 0; i < n; ++i) {
            switch (c % 4) {
                case 1: u.insert(names[i]); break;
                case 2: v.insert(names[i]); break;
                case 3: w.insert(names[i]); break;
                default: break;
            }
            c /= 4;
        }
        if (u.empty() || v.empty()) continue;
        if (*u.begin() > *v.begin()) continue;

        MarkovTriple t;
        t.u = u;
        t.v = v;
        t.w = w;
        t.separated = true;
        for (const auto& a : u) {
            for (const auto& b : v) {
                for (const auto& path : undirectedPaths(g, a, b)) {
                    const auto blocked = pathBlocked(g, path, w);
                    if (!blocked.blocked) {
                        t.separated = false;
                    } else {
                        t.rulesFired.insert(blockRuleName(blocked.rule));
                    }
                }
            }
        }
        if (t.separated) {
            const auto rep = maxCiViolation(p, {u.begin(), u.end()}, {v.begin(), v.end()},
                                            {w.begin(), w.end()}, kCellEps);
            t.residual = rep.residual;
            t.skippedCells = rep.skippedCells;
            report.worstResidual = std::max(report.worstResidual, t.residual);
            ++report.separatedCount;
        } else {
            t.rulesFired.clear();
        }
        report.triples.push_back(std::move(t));
    }
    report.pass = report.worstResidual <= tol;
    return report;
}

InterventionResult interveneFormula(const JointDistribution& p, const CausalGraph& g,
                                    const std::string& w, int value,
                                    InterventionVariant variant) {
    requireSignatureMatch(p, g);
    if (!g.hasNode(w)) throw ParseError("unknown node: " + w);
    if (!isQdag(g)) throw UnsupportedShapeError("intervention formula requires a QDAG");

    const auto slice = findSlice(g, w);
    if (!slice) throw UnsupportedShapeError("node " + w + " has no slice");

    InterventionResult res;
    res.target = w;
    res.value = value;
    res.variant = variant;
    res.sliceCompanions = slice->companions;
    res.descendants = relatives(g, w, Direction::Descendants);
    res.ancestors = relatives(g, w, Direction::Ancestors);
    for (const auto& s : slice->companions) {
        for (const auto& d : relatives(g, s, Direction::Descendants))
            if (!res.descendants.count(d)) res.restDescendants.insert(d);
        for (const auto& a : relatives(g, s, Direction::Ancestors))
            if (!res.ancestors.count(a)) res.restAncestors.insert(a);
    }

    // The displayed rule covers exactly the partition
    // {W} + S_W + D + A + R_D + R_A; anything left over is unsupported.
    for (const auto& n : g.nodes()) {
        const auto& name = n.name;
        int hits = (name == w) + res.sliceCompanions.count(name) +
                   res.descendants.count(name) + res.ancestors.count(name) +
                   res.restDescendants.count(name) + res.restAncestors.count(name);
        if (hits != 1)
            throw UnsupportedShapeError("unsupported graph shape for intervention formula: node " +
                                        name + " is not uniquely partitioned");
    }

    const int wIdx = p.variableIndex(w);
    if (value < 1 || value > p.variables()[wIdx].outcomes)
        throw ParseError("intervention value out of range for node " + w);
    {
        const auto pw = marginalize(p, {w});
        if (pw.probability({value}) <= 0.0)
            throw UndefinedQueryError("formula undefined at this value: P(" + w + "=" +
                                      std::to_string(value) + ") = 0");
    }

    auto namesOf = [](const std::set<std::string>& s) {
        return std::vector<std::string>(s.begin(), s.end());
    };
    std::vector<std::string> drd = namesOf(res.descendants);
    for (const auto& x : res.restDescendants) drd.push_back(x);
    std::vector<std::string> sara = namesOf(res.sliceCompanions);
    for (const auto& x : res.ancestors) sara.push_back(x);
    for (const auto& x : res.restAncestors) sara.push_back(x);
    std::vector<std::string> ws = namesOf(res.sliceCompanions);
    ws.push_back(w);

    std::vector<std::string> f1Num = drd; // D, R_D, W, S_W
    f1Num.insert(f1Num.end(), ws.begin(), ws.end());
    const JointDistribution mF1Num = marginalize(p, f1Num);
    const JointDistribution mF1Den = marginalize(p, ws);
    std::vector<std::string> f2Num = sara; // S_W, A, R_A (+ W for asPrinted)
    f2Num.push_back(w);
    const JointDistribution mF2NumW = marginalize(p, f2Num);
    const JointDistribution mF2NumFree = marginalize(p, sara);
    const JointDistribution mW = marginalize(p, {w});

    double nDrd = 1.0;
    for (const auto& name : drd) nDrd *= p.variables()[p.variableIndex(name)].outcomes;
    double nSara = 1.0;
    for (const auto& name : sara) nSara *= p.variables()[p.variableIndex(name)].outcomes;

    std::vector<double> table(p.cellCount(), 0.0);
    for (std::size_t flat = 0; flat < p.cellCount(); ++flat) {
        const auto tuple = p.outcomesAt(flat);
        if (tuple[wIdx] != value) continue;

        const double den1 = lookup(mF1Den, p, tuple);
        double f1;
        if (den1 <= 0.0) {
            f1 = 1.0 / nDrd;
            ++res.degenerateCells;
        } else {
            f1 = lookup(mF1Num, p, tuple) / den1;
        }

        double f2;
        if (variant == InterventionVariant::AsPrinted) {
            const double den2 = lookup(mW, p, tuple);
            if (den2 <= 0.0) {
                f2 = 1.0 / nSara;
                ++res.degenerateCells;
            } else {
                f2 = lookup(mF2NumW, p, tuple) / den2;
            }
        } else {
            f2 = lookup(mF2NumFree, p, tuple);
        }
        table[flat] = f1 * f2;
    }

    res.distribution = JointDistribution(p.variables(), std::move(table));
    return res;
}

UnmeasurementResult unmeasureFormula(const JointDistribution& p, const CausalGraph& g,
                                     const std::string& z, int dimZ) {
    requireSignatureMatch(p, g);
    if (!g.hasNode(z)) throw ParseError("unknown node: " + z);
    if (g.node(z).dim != dimZ)
        throw ParseError("declared Hilbert dimension does not match graph node " + z);
    const int zIdx = p.variableIndex(z);
    if (p.variables()[zIdx].outcomes != dimZ * dimZ)
        throw ParseError("node " + z + " does not have d_Z^2 outcomes in the distribution");

    UnmeasurementResult res;
    res.target = z;
    res.hilbertDim = dimZ;

    const auto desc = relatives(g, z, Direction::Descendants);

    std::vector<std::string> keepOrder; // output variables, p's order minus z
    std::vector<std::string> dVars;     // descendants D
    std::vector<std::string> arVars;    // ancestors + rest
    for (const auto& v : p.variables()) {
        if (v.name == z) continue;
        keepOrder.push_back(v.name);
        if (desc.count(v.name))
            dVars.push_back(v.name);
        else
            arVars.push_back(v.name);
    }

    std::vector<std::string> arz = arVars;
    arz.push_back(z);
    const JointDistribution mArz = marginalize(p, arz);
    const JointDistribution mAr = marginalize(p, arVars);
    const JointDistribution out0 = marginalize(p, keepOrder); // signature template

    double nD = 1.0;
    for (const auto& name : dVars) nD *= p.variables()[p.variableIndex(name)].outcomes;

    const double tol = 1e-9;
    std::vector<double> table(out0.cellCount(), 0.0);
    double minPre = 0.0;
    double total = 0.0;
    for (std::size_t oflat = 0; oflat < out0.cellCount(); ++oflat) {
        const auto otuple = out0.outcomesAt(oflat);
        // Rebuild a full tuple with z free.
        std::vector<int> tuple(p.variables().size(), 1);
        for (std::size_t k = 0; k < keepOrder.size(); ++k)
            tuple[p.variableIndex(keepOrder[k])] = otuple[k];

        const double pAr = lookup(mAr, p, tuple);
        double cell = 0.0;
        for (int zv = 1; zv <= dimZ * dimZ; ++zv) {
            tuple[zIdx] = zv;
            const double pArz = lookup(mArz, p, tuple);
            double pDgiven;
            if (pArz <= 0.0) {
                pDgiven = 1.0 / nD;
                ++res.degenerateCells;
            } else {
                pDgiven = p.probability(tuple) / pArz;
            }
            double pZgiven;
            if (pAr <= 0.0) {
                pZgiven = 1.0 / (dimZ * dimZ);
                ++res.degenerateCells;
            } else {
                pZgiven = pArz / pAr;
            }
            cell += pDgiven * ((1.0 + dimZ) * pZgiven - 1.0 / dimZ) * pAr;
        }
        minPre = std::min(minPre, cell);
        if (cell < 0.0) {
            if (cell < -tol)
                throw UndefinedQueryError(
                    "input statistics not realizable by a quantum model: un-measured "
                    "probability " +
                    std::to_string(cell) + " below -1e-9");
            cell = 0.0;
            ++res.clampedCells;
        }
        table[oflat] = cell;
        total += cell;
    }
    if (std::abs(total - 1.0) > tol)
        throw UndefinedQueryError(
            "input statistics not realizable by a quantum model: un-measured total " +
            std::to_string(total));

    res.minPreClamp = minPre;
    res.distribution = JointDistribution(out0.variables(), std::move(table));
    return res;
}

std::vector<CausalGraph> compatibleQdags(const JointDistribution& p, double tol,
                                         int maxNodes) {
    const int n = static_cast<int>(p.variables().size());
    if (maxNodes > 5) throw ResourceError("compatible_qdags is capped at 5 nodes");
    if (n > maxNodes) throw ResourceError("too many variables for QDAG enumeration");

    std::vector<CausalGraph::Node> nodes;
    for (const auto& v : p.variables()) {
        const int d = static_cast<int>(std::lround(std::sqrt(double(v.outcomes))));
        if (d * d != v.outcomes || d < 2)
            throw ParseError("variable " + v.name + " outcome count is not a square >= 4");
        nodes.push_back({v.name, d});
    }
    std::sort(nodes.begin(), nodes.end(),
              [](const auto& a, const auto& b) { return a.name < b.name; });

    std::vector<std::pair<std::string, std::string>> pairs;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) pairs.push_back({nodes[i].name, nodes[j].name});

    // Each unordered pair is absent, forward, or reverse.
    long total = 1;
    for (std::size_t i = 0; i < pairs.size(); ++i) total *= 3;

    std::vector<CausalGraph> out;
    for (long code = 0; code < total; ++code) {
        long c = code;
        std::set<std::pair<std::string, std::string>> edges;
        for (const auto& [a, b] : pairs) {
            switch (c % 3) {
                case 1: edges.insert({a, b}); break;
                case 2: edges.insert({b, a}); break;
                default: break;
            }
            c /= 3;
        }
        CausalGraph g;
        try {
            g = CausalGraph(nodes, std::move(edges));
        } catch (const ParseError&) {
            continue; // cyclic orientation
        }
        if (!isQdag(g)) continue;
        if (!markovCheck(p, g, tol).pass) continue;
        out.push_back(std::move(g));
    }
    std::sort(out.begin(), out.end(), [](const CausalGraph& a, const CausalGraph& b) {
        if (a.edges().size() != b.edges().size()) return a.edges().size() < b.edges().size();
        return a.edges() < b.edges();
    });
    return out;
}

} // namespace qcm
