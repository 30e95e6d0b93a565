#include "qcm/io.hpp"

#include "qcm/errors.hpp"
#include "qcm/version.hpp"

#include <json.hpp>

#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace qcm::io {

using ordered_json = nlohmann::ordered_json;

namespace {

bool validIdentifier(const std::string& s) {
    if (s.empty()) return false;
    if (!(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
    for (char c : s)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
    return true;
}

void requireIdentifier(const std::string& s, const std::string& what) {
    if (!validIdentifier(s))
        throw ParseError(what + " '" + s + "' must match [A-Za-z_][A-Za-z0-9_]*");
}

ordered_json parseJsonDocument(const std::string& text, const std::string& what) {
    ordered_json j = ordered_json::parse(text, nullptr, false);
    if (j.is_discarded()) throw ParseError(what + ": invalid JSON");
    if (!j.is_object()) throw ParseError(what + ": expected a JSON object");
    return j;
}

ordered_json graphToJson(const CausalGraph& g) {
    ordered_json jnodes = ordered_json::array();
    for (const auto& n : g.nodes()) jnodes.push_back({n.name, n.dim});
    ordered_json jedges = ordered_json::array();
    for (const auto& [p, c] : g.edges()) jedges.push_back({p, c});
    return ordered_json{{"nodes", jnodes}, {"edges", jedges}};
}

CausalGraph graphFromJson(const ordered_json& j) {
    if (!j.contains("nodes") || !j["nodes"].is_array())
        throw ParseError("graph file: missing 'nodes' list");
    std::vector<CausalGraph::Node> nodes;
    for (const auto& jn : j["nodes"]) {
        if (!jn.is_array() || jn.size() != 2 || !jn[0].is_string() ||
            !jn[1].is_number_integer())
            throw ParseError("graph file: each node must be [name, dim]");
        const std::string name = jn[0].get<std::string>();
        requireIdentifier(name, "node name");
        nodes.push_back({name, jn[1].get<int>()});
    }
    std::set<std::pair<std::string, std::string>> edges;
    if (j.contains("edges")) {
        if (!j["edges"].is_array()) throw ParseError("graph file: 'edges' must be a list");
        for (const auto& je : j["edges"]) {
            if (!je.is_array() || je.size() != 2 || !je[0].is_string() || !je[1].is_string())
                throw ParseError("graph file: each edge must be [parent, child]");
            edges.insert({je[0].get<std::string>(), je[1].get<std::string>()});
        }
    }
    return CausalGraph(std::move(nodes), std::move(edges));
}

SicPovm povmFromSource(const std::string& source, const std::string& baseDir) {
    if (source == "sic2") return knownSic(2);
    if (source == "sic3") return knownSic(3);
    std::filesystem::path p(source);
    if (p.is_relative()) p = std::filesystem::path(baseDir) / p;
    return whPovmFromFiducial(parseFiducial(readFile(p.string())));
}

ordered_json matrixToJson(const Matrix& m) {
    ordered_json rows = ordered_json::array();
    for (int i = 0; i < m.rows(); ++i) {
        ordered_json row = ordered_json::array();
        for (int j = 0; j < m.cols(); ++j)
            row.push_back({m(i, j).real(), m(i, j).imag()});
        rows.push_back(std::move(row));
    }
    return rows;
}

Matrix matrixFromJson(const ordered_json& j) {
    if (!j.is_array() || j.empty()) throw ParseError("model file: matrix must be a nested array");
    const int n = static_cast<int>(j.size());
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) {
        if (!j[i].is_array() || static_cast<int>(j[i].size()) != n)
            throw ParseError("model file: matrix must be square");
        for (int k = 0; k < n; ++k) {
            const auto& cell = j[i][k];
            if (!cell.is_array() || cell.size() != 2)
                throw ParseError("model file: matrix entries must be [re, im]");
            m(i, k) = Complex(cell[0].get<double>(), cell[1].get<double>());
        }
    }
    return m;
}

} // namespace

std::string readFile(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void writeFile(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot write file: " + path);
    out << content;
}

std::string inputsDigest(const std::vector<std::pair<std::string, std::string>>& labelledPaths) {
    std::string out;
    for (const auto& [label, path] : labelledPaths) {
        if (!out.empty()) out += ';';
        out += label + ":" + path + ":" + fnv1a64_hex(readFile(path));
    }
    return out.empty() ? "-" : out;
}

std::string headerLine(const std::string& provenance) {
    return "# " + std::string(kToolName) + " " + std::string(kToolVersion) +
           " inputs=" + provenance + "\n";
}

std::string formatDouble17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string formatDoubleShort(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

std::string formatSet(const std::set<std::string>& s) {
    std::string out = "{";
    for (auto it = s.begin(); it != s.end(); ++it) {
        if (it != s.begin()) out += ',';
        out += *it;
    }
    return out + "}";
}

std::string serializeFiducial(const Fiducial& f, const std::string& provenance) {
    std::string out = headerLine(provenance);
    out += std::to_string(f.dim) + "\n";
    for (int i = 0; i < f.dim; ++i) {
        out += formatDouble17(f.amplitudes[i].real()) + " " +
               formatDouble17(f.amplitudes[i].imag()) + "\n";
    }
    return out;
}

Fiducial parseFiducial(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    int dim = -1;
    std::vector<Complex> amps;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        if (dim < 0) {
            if (!(ls >> dim) || dim < 2) throw ParseError("fiducial file: bad dimension line");
            continue;
        }
        double re = 0.0, im = 0.0;
        if (!(ls >> re >> im)) throw ParseError("fiducial file: bad amplitude line: " + line);
        amps.emplace_back(re, im);
    }
    if (dim < 0) throw ParseError("fiducial file: missing dimension");
    if (static_cast<int>(amps.size()) != dim)
        throw ParseError("fiducial file: expected " + std::to_string(dim) + " amplitudes, got " +
                         std::to_string(amps.size()));
    Vector v(dim);
    for (int i = 0; i < dim; ++i) v[i] = amps[i];
    return Fiducial::make(dim, std::move(v));
}

std::string serializeGraph(const CausalGraph& g, const std::string& provenance) {
    ordered_json j{{"generator", std::string(kToolName) + " " + std::string(kToolVersion)},
                   {"inputs", provenance}};
    j.update(graphToJson(g));
    return j.dump(2) + "\n";
}

CausalGraph parseGraph(const std::string& text) {
    return graphFromJson(parseJsonDocument(text, "graph file"));
}

std::string serializeModel(const FunctionalModel& m, const std::string& provenance) {
    ordered_json j{{"generator", std::string(kToolName) + " " + std::string(kToolVersion)},
                   {"inputs", provenance}};
    ordered_json jwires = ordered_json::array();
    for (const auto& w : m.wires) jwires.push_back({w.id, w.dim});
    j["wires"] = std::move(jwires);
    ordered_json jgates = ordered_json::array();
    for (const auto& g : m.gates) {
        if (const auto* u = std::get_if<Unitary>(&g)) {
            ordered_json ju{{"wires", u->wires}};
            if (u->fromHaar) {
                ju["haar_random"] = u->haarSeed;
                if (u->haarAdjoint) ju["adjoint"] = true;
            } else {
                ju["matrix"] = matrixToJson(u->matrix);
            }
            jgates.push_back({{"unitary", std::move(ju)}});
        } else if (const auto* ms = std::get_if<SicMeasure>(&g)) {
            jgates.push_back(
                {{"measure", {{"node", ms->node}, {"wire", ms->wire}, {"sic", ms->povmSource}}}});
        } else if (const auto* p = std::get_if<PrepareProjector>(&g)) {
            ordered_json jp{{"wire", p->wire}, {"index", p->index}, {"sic", p->povmSource}};
            if (!p->node.empty()) jp["node"] = p->node;
            jgates.push_back({{"prepare", std::move(jp)}});
        } else if (const auto* d = std::get_if<DiscardInput>(&g)) {
            jgates.push_back({{"discard", {{"wire", d->wire}}}});
        }
    }
    j["gates"] = std::move(jgates);
    return j.dump(2) + "\n";
}

FunctionalModel parseModel(const std::string& text, const std::string& baseDir) {
    const ordered_json j = parseJsonDocument(text, "model file");
    if (!j.contains("wires") || !j["wires"].is_array())
        throw ParseError("model file: missing 'wires' list");
    FunctionalModel m;
    for (const auto& jw : j["wires"]) {
        if (!jw.is_array() || jw.size() != 2 || !jw[0].is_string() || !jw[1].is_number_integer())
            throw ParseError("model file: each wire must be [id, dim]");
        const std::string id = jw[0].get<std::string>();
        requireIdentifier(id, "wire id");
        m.wires.push_back({id, jw[1].get<int>()});
    }
    if (j.contains("gates")) {
        if (!j["gates"].is_array()) throw ParseError("model file: 'gates' must be a list");
        for (const auto& jg : j["gates"]) {
            if (!jg.is_object() || jg.size() != 1)
                throw ParseError("model file: each gate must be a single-key object");
            if (jg.contains("unitary")) {
                const auto& ju = jg["unitary"];
                Unitary u;
                if (!ju.contains("wires") || !ju["wires"].is_array())
                    throw ParseError("model file: unitary gate needs a 'wires' list");
                for (const auto& w : ju["wires"]) u.wires.push_back(w.get<std::string>());
                int dim = 1;
                for (const auto& id : u.wires) dim *= m.wire(id).dim;
                if (ju.contains("haar_random")) {
                    u.fromHaar = true;
                    u.haarSeed = ju["haar_random"].get<std::uint64_t>();
                    u.haarAdjoint = ju.value("adjoint", false);
                    u.matrix = haarUnitary(dim, u.haarSeed);
                    if (u.haarAdjoint) u.matrix = Matrix(u.matrix.adjoint());
                } else if (ju.contains("matrix")) {
                    u.matrix = matrixFromJson(ju["matrix"]);
                } else {
                    throw ParseError("model file: unitary gate needs 'matrix' or 'haar_random'");
                }
                m.gates.push_back(std::move(u));
            } else if (jg.contains("measure")) {
                const auto& jm = jg["measure"];
                SicMeasure ms;
                ms.node = jm.at("node").get<std::string>();
                requireIdentifier(ms.node, "node name");
                ms.wire = jm.at("wire").get<std::string>();
                ms.povmSource = jm.at("sic").get<std::string>();
                ms.povm = povmFromSource(ms.povmSource, baseDir);
                m.gates.push_back(std::move(ms));
            } else if (jg.contains("prepare")) {
                const auto& jp = jg["prepare"];
                PrepareProjector p;
                p.wire = jp.at("wire").get<std::string>();
                p.index = jp.at("index").get<int>();
                p.povmSource = jp.at("sic").get<std::string>();
                p.povm = povmFromSource(p.povmSource, baseDir);
                if (jp.contains("node")) {
                    p.node = jp["node"].get<std::string>();
                    requireIdentifier(p.node, "node name");
                }
                m.gates.push_back(std::move(p));
            } else if (jg.contains("discard")) {
                m.gates.push_back(DiscardInput{jg["discard"].at("wire").get<std::string>()});
            } else {
                throw ParseError("model file: unknown gate kind: " + jg.begin().key());
            }
        }
    }
    m.validate();
    return m;
}

std::string serializeDistribution(const JointDistribution& p, const std::string& provenance) {
    std::string out = headerLine(provenance);
    for (const auto& v : p.variables()) {
        requireIdentifier(v.name, "variable name");
        out += v.name + ",";
    }
    out += "probability\n";
    for (std::size_t flat = 0; flat < p.cellCount(); ++flat) {
        const auto tuple = p.outcomesAt(flat);
        for (int x : tuple) out += std::to_string(x) + ",";
        out += formatDouble17(p.table()[flat]) + "\n";
    }
    return out;
}

JointDistribution parseDistribution(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::vector<std::string> names;
    bool haveHeader = false;
    std::vector<std::pair<std::vector<int>, double>> rows;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ls(line);
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (!haveHeader) {
            if (cells.empty() || cells.back() != "probability")
                throw ParseError("distribution file: last column must be 'probability'");
            names.assign(cells.begin(), cells.end() - 1);
            for (const auto& n : names) requireIdentifier(n, "variable name");
            haveHeader = true;
            continue;
        }
        if (cells.size() != names.size() + 1)
            throw ParseError("distribution file: wrong column count in row: " + line);
        std::vector<int> outcomes;
        for (std::size_t i = 0; i < names.size(); ++i) {
            std::size_t pos = 0;
            const int x = std::stoi(cells[i], &pos);
            if (pos != cells[i].size() || x < 1)
                throw ParseError("distribution file: bad outcome '" + cells[i] + "'");
            outcomes.push_back(x);
        }
        std::size_t pos = 0;
        const double prob = std::stod(cells.back(), &pos);
        rows.push_back({std::move(outcomes), prob});
    }
    if (!haveHeader) throw ParseError("distribution file: missing header row");

    std::vector<JointDistribution::Variable> vars;
    for (std::size_t i = 0; i < names.size(); ++i) {
        int maxOutcome = 0;
        for (const auto& [outcomes, prob] : rows) maxOutcome = std::max(maxOutcome, outcomes[i]);
        vars.push_back({names[i], maxOutcome});
    }
    std::size_t expected = 1;
    for (const auto& v : vars) expected *= static_cast<std::size_t>(v.outcomes);
    if (rows.size() != expected)
        throw ParseError("distribution file: expected " + std::to_string(expected) +
                         " dense rows, got " + std::to_string(rows.size()));

    std::vector<double> table(expected, 0.0);
    std::vector<bool> seen(expected, false);
    for (const auto& [outcomes, prob] : rows) {
        std::size_t idx = 0;
        for (std::size_t i = 0; i < vars.size(); ++i)
            idx = idx * vars[i].outcomes + static_cast<std::size_t>(outcomes[i] - 1);
        if (seen[idx]) throw ParseError("distribution file: duplicate outcome row");
        seen[idx] = true;
        table[idx] = prob;
    }
    return JointDistribution(std::move(vars), std::move(table));
}

std::string serializeSicReport(const SicValidationReport& r, int dim,
                               const std::string& provenance) {
    std::string out = headerLine(provenance);
    out += "report: sic-validation\n";
    out += "dimension: " + std::to_string(dim) + "\n";
    out += "tolerance: " + formatDoubleShort(r.tolerance) + "\n";
    out += "max_gram_error: " + formatDouble17(r.maxGramError) + "\n";
    out += "max_identity_error: " + formatDouble17(r.maxIdentityError) + "\n";
    out += "max_projector_error: " + formatDouble17(r.maxProjectorError) + "\n";
    out += std::string("pass: ") + (r.pass ? "true" : "false") + "\n";
    return out;
}

std::string serializeMarkovReport(const MarkovReport& r, const std::string& provenance) {
    std::string out = headerLine(provenance);
    out += "report: markov\n";
    out += "tolerance: " + formatDoubleShort(r.tolerance) + "\n";
    out += "triples_checked: " + std::to_string(r.triples.size()) + "\n";
    out += "triples_separated: " + std::to_string(r.separatedCount) + "\n";
    out += "worst_residual: " + formatDouble17(r.worstResidual) + "\n";
    out += std::string("pass: ") + (r.pass ? "true" : "false") + "\n";
    for (const auto& t : r.triples) {
        out += "triple: u=" + formatSet(t.u) + " v=" + formatSet(t.v) + " w=" + formatSet(t.w);
        if (t.separated) {
            out += " separated rules=" + formatSet(t.rulesFired) +
                   " residual=" + formatDouble17(t.residual) +
                   " skipped=" + std::to_string(t.skippedCells);
        } else {
            out += " connected";
        }
        out += "\n";
    }
    return out;
}

std::string serializeInterventionReport(const InterventionResult& r, const std::string& method,
                                        std::optional<double> tvDistance,
                                        const std::string& provenance) {
    std::string out = headerLine(provenance);
    out += "report: intervention\n";
    out += "target: " + r.target + "\n";
    out += "value: " + std::to_string(r.value) + "\n";
    out += std::string("variant: ") + interventionVariantName(r.variant) + "\n";
    out += "slice_companions: " + formatSet(r.sliceCompanions) + "\n";
    out += "descendants: " + formatSet(r.descendants) + "\n";
    out += "ancestors: " + formatSet(r.ancestors) + "\n";
    out += "rest_descendants: " + formatSet(r.restDescendants) + "\n";
    out += "rest_ancestors: " + formatSet(r.restAncestors) + "\n";
    out += "degenerate_cells: " + std::to_string(r.degenerateCells) + "\n";
    out += "method: " + method + "\n";
    if (tvDistance)
        out += "tv_distance: " + formatDouble17(*tvDistance) + "\n";
    return out;
}

std::string serializeUnmeasurementReport(const UnmeasurementResult& r, const std::string& method,
                                         std::optional<double> tvDistance,
                                         const std::string& provenance) {
    std::string out = headerLine(provenance);
    out += "report: unmeasurement\n";
    out += "target: " + r.target + "\n";
    out += "hilbert_dim: " + std::to_string(r.hilbertDim) + "\n";
    out += "min_preclamp: " + formatDouble17(r.minPreClamp) + "\n";
    out += "clamped_cells: " + std::to_string(r.clampedCells) + "\n";
    out += "degenerate_cells: " + std::to_string(r.degenerateCells) + "\n";
    out += "method: " + method + "\n";
    if (tvDistance)
        out += "tv_distance: " + formatDouble17(*tvDistance) + "\n";
    return out;
}

std::string serializeGraphList(const std::vector<CausalGraph>& graphs,
                               const std::string& provenance) {
    ordered_json j{{"generator", std::string(kToolName) + " " + std::string(kToolVersion)},
                   {"inputs", provenance}};
    ordered_json arr = ordered_json::array();
    for (const auto& g : graphs) arr.push_back(graphToJson(g));
    j["graphs"] = std::move(arr);
    return j.dump(2) + "\n";
}

std::vector<CausalGraph> parseGraphList(const std::string& text) {
    const ordered_json j = parseJsonDocument(text, "graph list file");
    if (!j.contains("graphs") || !j["graphs"].is_array())
        throw ParseError("graph list file: missing 'graphs'");
    std::vector<CausalGraph> out;
    for (const auto& jg : j["graphs"]) out.push_back(graphFromJson(jg));
    return out;
}

} // namespace qcm::io
