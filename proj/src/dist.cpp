#include "qcm/dist.hpp"

#include "qcm/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace qcm {

namespace {

std::size_t tableSize(const std::vector<JointDistribution::Variable>& vars) {
    std::size_t n = 1;
    for (const auto& v : vars) n *= static_cast<std::size_t>(v.outcomes);
    return n;
}

} // namespace

JointDistribution::JointDistribution(std::vector<Variable> variables, std::vector<double> table)
    : vars_(std::move(variables)), table_(std::move(table)) {
    for (const auto& v : vars_)
        if (v.outcomes < 1) throw ParseError("variable " + v.name + " has no outcomes");
    for (std::size_t i = 0; i < vars_.size(); ++i)
        for (std::size_t j = i + 1; j < vars_.size(); ++j)
            if (vars_[i].name == vars_[j].name)
                throw ParseError("duplicate variable name: " + vars_[i].name);
    if (table_.size() != tableSize(vars_))
        throw ParseError("table size does not match variable outcome counts");
    double sum = 0.0;
    for (double& p : table_) {
        if (p < -1e-12) throw ParseError("negative probability in table");
        if (p < 0.0) p = 0.0;
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw ParseError("probabilities do not sum to 1");
}

bool JointDistribution::hasVariable(const std::string& name) const {
    return std::any_of(vars_.begin(), vars_.end(),
                       [&](const Variable& v) { return v.name == name; });
}

int JointDistribution::variableIndex(const std::string& name) const {
    for (std::size_t i = 0; i < vars_.size(); ++i)
        if (vars_[i].name == name) return static_cast<int>(i);
    throw ParseError("unknown variable: " + name);
}

std::size_t JointDistribution::flatIndex(const std::vector<int>& outcomes) const {
    if (outcomes.size() != vars_.size())
        throw ParseError("outcome tuple arity mismatch");
    std::size_t idx = 0;
    for (std::size_t i = 0; i < vars_.size(); ++i) {
        const int x = outcomes[i];
        if (x < 1 || x > vars_[i].outcomes)
            throw ParseError("outcome out of range for variable " + vars_[i].name);
        idx = idx * vars_[i].outcomes + static_cast<std::size_t>(x - 1);
    }
    return idx;
}

std::vector<int> JointDistribution::outcomesAt(std::size_t flat) const {
    std::vector<int> out(vars_.size());
    for (int i = static_cast<int>(vars_.size()) - 1; i >= 0; --i) {
        out[i] = static_cast<int>(flat % vars_[i].outcomes) + 1;
        flat /= vars_[i].outcomes;
    }
    return out;
}

double JointDistribution::probability(const std::vector<int>& outcomes) const {
    return table_[flatIndex(outcomes)];
}

bool JointDistribution::sameSignature(const JointDistribution& other) const {
    return vars_ == other.vars_;
}

JointDistribution marginalize(const JointDistribution& p, const std::vector<std::string>& keep) {
    std::vector<int> keepIdx;
    for (const auto& name : keep) keepIdx.push_back(p.variableIndex(name));

    std::vector<JointDistribution::Variable> vars;
    std::vector<int> orderedKeep;
    for (int i = 0; i < static_cast<int>(p.variables().size()); ++i) {
        if (std::find(keepIdx.begin(), keepIdx.end(), i) != keepIdx.end()) {
            vars.push_back(p.variables()[i]);
            orderedKeep.push_back(i);
        }
    }
    std::vector<double> table(tableSize(vars), 0.0);
    for (std::size_t flat = 0; flat < p.cellCount(); ++flat) {
        const auto tuple = p.outcomesAt(flat);
        std::size_t idx = 0;
        for (std::size_t k = 0; k < orderedKeep.size(); ++k)
            idx = idx * vars[k].outcomes + static_cast<std::size_t>(tuple[orderedKeep[k]] - 1);
        table[idx] += p.table()[flat];
    }
    JointDistribution out(std::move(vars), std::move(table));
    if (p.degenerate()) out.markDegenerate();
    return out;
}

JointDistribution condition(const JointDistribution& p,
                            const std::map<std::string, int>& assignment) {
    std::vector<int> fixed(p.variables().size(), 0); // 0 = free
    for (const auto& [name, value] : assignment) {
        const int i = p.variableIndex(name);
        if (value < 1 || value > p.variables()[i].outcomes)
            throw ParseError("assignment out of range for variable " + name);
        fixed[i] = value;
    }
    std::vector<JointDistribution::Variable> vars;
    std::vector<int> freeIdx;
    for (int i = 0; i < static_cast<int>(p.variables().size()); ++i) {
        if (fixed[i] == 0) {
            vars.push_back(p.variables()[i]);
            freeIdx.push_back(i);
        }
    }
    std::vector<double> table(tableSize(vars), 0.0);
    double mass = 0.0;
    for (std::size_t flat = 0; flat < p.cellCount(); ++flat) {
        const auto tuple = p.outcomesAt(flat);
        bool match = true;
        for (std::size_t i = 0; i < fixed.size(); ++i)
            if (fixed[i] != 0 && tuple[i] != fixed[i]) { match = false; break; }
        if (!match) continue;
        std::size_t idx = 0;
        for (std::size_t k = 0; k < freeIdx.size(); ++k)
            idx = idx * vars[k].outcomes + static_cast<std::size_t>(tuple[freeIdx[k]] - 1);
        table[idx] += p.table()[flat];
        mass += p.table()[flat];
    }
    if (mass <= 0.0) {
        const double uniform = 1.0 / static_cast<double>(tableSize(vars));
        std::fill(table.begin(), table.end(), uniform);
        JointDistribution out(std::move(vars), std::move(table));
        out.markDegenerate();
        return out;
    }
    for (double& t : table) t /= mass;
    JointDistribution out(std::move(vars), std::move(table));
    if (p.degenerate()) out.markDegenerate();
    return out;
}

IndependenceReport maxCiViolation(const JointDistribution& p, const std::vector<std::string>& u,
                                  const std::vector<std::string>& v,
                                  const std::vector<std::string>& w, double eps) {
    auto checkDisjoint = [](const std::vector<std::string>& a, const std::vector<std::string>& b) {
        for (const auto& x : a)
            for (const auto& y : b)
                if (x == y) throw ParseError("independence sets overlap on " + x);
    };
    checkDisjoint(u, v);
    checkDisjoint(u, w);
    checkDisjoint(v, w);

    std::vector<std::string> uv(u);
    uv.insert(uv.end(), v.begin(), v.end());
    std::vector<std::string> uvw(uv);
    uvw.insert(uvw.end(), w.begin(), w.end());
    std::vector<std::string> uw(u);
    uw.insert(uw.end(), w.begin(), w.end());
    std::vector<std::string> vw(v);
    vw.insert(vw.end(), w.begin(), w.end());

    const JointDistribution pUVW = marginalize(p, uvw);
    const JointDistribution pUW = marginalize(p, uw);
    const JointDistribution pVW = marginalize(p, vw);
    const JointDistribution pW = marginalize(p, w);

    auto project = [&](const JointDistribution& sub, const std::vector<int>& tuple) {
        // tuple indexes pUVW's variables; pick out sub's variables by name.
        std::vector<int> out;
        out.reserve(sub.variables().size());
        for (const auto& var : sub.variables())
            out.push_back(tuple[pUVW.variableIndex(var.name)]);
        return out;
    };

    IndependenceReport rep;
    rep.u = u;
    rep.v = v;
    rep.w = w;
    rep.epsilon = eps;
    for (std::size_t flat = 0; flat < pUVW.cellCount(); ++flat) {
        const auto tuple = pUVW.outcomesAt(flat);
        const double pw = pW.probability(project(pW, tuple));
        if (pw <= eps) {
            ++rep.skippedCells;
            continue;
        }
        const double joint = pUVW.table()[flat] / pw;
        const double margU = pUW.probability(project(pUW, tuple)) / pw;
        const double margV = pVW.probability(project(pVW, tuple)) / pw;
        rep.residual = std::max(rep.residual, std::abs(joint - margU * margV));
    }
    return rep;
}

double tvDistance(const JointDistribution& p, const JointDistribution& q) {
    if (!p.sameSignature(q)) throw ParseError("tv_distance: signature mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < p.cellCount(); ++i)
        s += std::abs(p.table()[i] - q.table()[i]);
    return 0.5 * s;
}

JointDistribution reorder(const JointDistribution& p, const std::vector<std::string>& order) {
    if (order.size() != p.variables().size())
        throw ParseError("reorder: order must list every variable exactly once");
    std::vector<int> perm;
    for (const auto& name : order) perm.push_back(p.variableIndex(name));
    std::vector<bool> seen(perm.size(), false);
    for (int i : perm) {
        if (seen[i]) throw ParseError("reorder: duplicate variable in order");
        seen[i] = true;
    }
    std::vector<JointDistribution::Variable> vars;
    for (int i : perm) vars.push_back(p.variables()[i]);
    std::vector<double> newTable(p.cellCount());
    for (std::size_t flat = 0; flat < p.cellCount(); ++flat) {
        const auto tuple = p.outcomesAt(flat);
        std::size_t idx = 0;
        for (std::size_t k = 0; k < perm.size(); ++k)
            idx = idx * vars[k].outcomes + static_cast<std::size_t>(tuple[perm[k]] - 1);
        newTable[idx] = p.table()[flat];
    }
    JointDistribution res(std::move(vars), std::move(newTable));
    if (p.degenerate()) res.markDegenerate();
    return res;
}

} // namespace qcm
