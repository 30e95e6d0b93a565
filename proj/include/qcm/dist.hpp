#pragma once

#include <map>
#include <string>
#include <vector>

namespace qcm {

/// Exact dense probability table over tuples of node outcomes, row-major in
/// the variable order. Outcomes are labelled 1..d^2 at the API surface.
class JointDistribution {
public:
    struct Variable {
        std::string name;
        int outcomes = 0;
        bool operator==(const Variable&) const = default;
    };

    JointDistribution() = default;
    /// Clamps float-noise negatives in [-1e-12, 0) to zero; anything more
    /// negative, or a total off 1 by more than 1e-9, is rejected.
    JointDistribution(std::vector<Variable> variables, std::vector<double> table);

    const std::vector<Variable>& variables() const { return vars_; }
    const std::vector<double>& table() const { return table_; }
    std::size_t cellCount() const { return table_.size(); }

    bool degenerate() const { return degenerate_; }
    void markDegenerate() { degenerate_ = true; }

    bool hasVariable(const std::string& name) const;
    int variableIndex(const std::string& name) const;

    /// Row-major flat index of a full outcome tuple (1-based labels).
    std::size_t flatIndex(const std::vector<int>& outcomes) const;
    /// Inverse of flatIndex.
    std::vector<int> outcomesAt(std::size_t flat) const;

    double probability(const std::vector<int>& outcomes) const;

    bool sameSignature(const JointDistribution& other) const;

private:
    std::vector<Variable> vars_;
    std::vector<double> table_;
    bool degenerate_ = false;
};

struct IndependenceReport {
    std::vector<std::string> u, v, w;
    double residual = 0.0;
    double epsilon = 0.0;
    long skippedCells = 0;
};

/// Sums out every variable not in `keep`; kept variables stay in their
/// original relative order.
JointDistribution marginalize(const JointDistribution& p, const std::vector<std::string>& keep);

/// Restricts to the assignment (1-based outcome labels) and renormalizes,
/// dropping the assigned variables. A zero-probability assignment yields the
/// uniform distribution over the rest with the degeneracy flag set.
JointDistribution condition(const JointDistribution& p,
                            const std::map<std::string, int>& assignment);

/// Exact residual max_{cells with P(w) > eps} |P(uv|w) - P(u|w)P(v|w)|.
IndependenceReport maxCiViolation(const JointDistribution& p, const std::vector<std::string>& u,
                                  const std::vector<std::string>& v,
                                  const std::vector<std::string>& w, double eps = 1e-12);

/// Total variation distance; signatures must match exactly.
double tvDistance(const JointDistribution& p, const JointDistribution& q);

/// Same table with variables permuted into `order` (a permutation of the
/// existing names).
JointDistribution reorder(const JointDistribution& p, const std::vector<std::string>& order);

} // namespace qcm
