#pragma once

#include "qcm/dist.hpp"
#include "qcm/graph.hpp"

#include <set>
#include <string>
#include <vector>

namespace qcm {

/// One (U, V, W) triple examined by the Markov check.
struct MarkovTriple {
    std::set<std::string> u, v, w;
    bool separated = false;
    std::set<std::string> rulesFired; // blocking rule names over the u-v paths
    double residual = 0.0;            // only meaningful when separated
    long skippedCells = 0;
};

struct MarkovReport {
    double tolerance = 0.0;
    std::vector<MarkovTriple> triples;
    long separatedCount = 0;
    double worstResidual = 0.0; // among q-separated triples
    bool pass = false;          // worstResidual <= tolerance
};

enum class InterventionVariant { AsPrinted, AncestorMarginal };

const char* interventionVariantName(InterventionVariant v);

struct InterventionResult {
    std::string target;
    int value = 0;
    InterventionVariant variant = InterventionVariant::AncestorMarginal;
    std::set<std::string> sliceCompanions, descendants, ancestors, restDescendants,
        restAncestors;
    JointDistribution distribution; // over all nodes, target pinned to value
    long degenerateCells = 0;       // zero-probability conditionals encountered
};

struct UnmeasurementResult {
    std::string target;
    int hilbertDim = 0;
    JointDistribution distribution; // target dropped from the signature
    double minPreClamp = 0.0;       // most negative raw cell before clamping
    long clampedCells = 0;
    long degenerateCells = 0;
};

/// Enumerates every disjoint triple of nonempty U, V and (possibly empty) W
/// over the graph's nodes (capped at 6), computes the independence residual
/// for each q-separated triple, and passes iff all residuals are <= tol.
MarkovReport markovCheck(const JointDistribution& p, const CausalGraph& g, double tol);

/// Closed-form post-intervention statistics
///   P(D, R_D | W=value, S_W) * P(S_W, A, R_A | W=value)   [as printed]
/// with the AncestorMarginal variant dropping the W-conditioning in the
/// second factor. Requires the slice partition
/// {W} + S_W + D + A + R_D + R_A to cover the whole graph.
InterventionResult interveneFormula(const JointDistribution& p, const CausalGraph& g,
                                    const std::string& w, int value,
                                    InterventionVariant variant);

/// The un-measurement rule: for each assignment of X = (D, A, R),
///   P(X|Z-) = sum_z P(D|A,R,z) [(1+d_Z) P(z|A,R) - 1/d_Z] P(A,R).
/// Raw cells in [-tol, 0) are clamped; anything below -tol, or a total off 1
/// by more than tol (1e-9), raises UndefinedQueryError (statistics not
/// realizable by a quantum model).
UnmeasurementResult unmeasureFormula(const JointDistribution& p, const CausalGraph& g,
                                     const std::string& z, int dimZ);

/// All QDAGs over p's variables whose Markov check passes at tol, in
/// deterministic order (edge count, then lexicographic edge list). This is
/// the necessary-condition screen only.
std::vector<CausalGraph> compatibleQdags(const JointDistribution& p, double tol,
                                         int maxNodes);

} // namespace qcm
