#pragma once

#include "qcm/calculus.hpp"
#include "qcm/circuit.hpp"
#include "qcm/dist.hpp"
#include "qcm/graph.hpp"
#include "qcm/sic.hpp"

#include <optional>
#include <string>
#include <vector>

namespace qcm::io {

std::string readFile(const std::string& path);
void writeFile(const std::string& path, const std::string& content);

/// "<label>:<path>:<fnv64 of the file bytes>" joined by ';'. Extra tokens
/// (e.g. "seed=3") may be appended by the caller.
std::string inputsDigest(const std::vector<std::pair<std::string, std::string>>& labelledPaths);

/// First line of every text artifact: "# qcm <version> inputs=<provenance>".
std::string headerLine(const std::string& provenance);

// Fiducial files: header comments, then d, then d lines of "re im".
std::string serializeFiducial(const Fiducial& f, const std::string& provenance);
Fiducial parseFiducial(const std::string& text);

// Graph files: JSON {nodes: [[name, dim]...], edges: [[parent, child]...]}.
std::string serializeGraph(const CausalGraph& g, const std::string& provenance);
CausalGraph parseGraph(const std::string& text);

// Model files: JSON {wires: [[id, dim]...], gates: [...]} where a gate is
// {"unitary": {wires, matrix|haar_random[, adjoint]}},
// {"measure": {node, wire, sic}}, {"discard": {wire}} or
// {"prepare": {wire, index, sic[, node]}}. `sic` is "sic2", "sic3" or a
// fiducial file path resolved against `baseDir`.
std::string serializeModel(const FunctionalModel& m, const std::string& provenance);
FunctionalModel parseModel(const std::string& text, const std::string& baseDir = ".");

// Distribution files: CSV, one column per variable plus `probability`,
// row-major rows, probabilities with 17 significant digits.
std::string serializeDistribution(const JointDistribution& p, const std::string& provenance);
JointDistribution parseDistribution(const std::string& text);

std::string serializeSicReport(const SicValidationReport& r, int dim,
                               const std::string& provenance);

std::string serializeMarkovReport(const MarkovReport& r, const std::string& provenance);

std::string serializeInterventionReport(const InterventionResult& r, const std::string& method,
                                        std::optional<double> tvDistance,
                                        const std::string& provenance);

std::string serializeUnmeasurementReport(const UnmeasurementResult& r, const std::string& method,
                                         std::optional<double> tvDistance,
                                         const std::string& provenance);

// Compatible-QDAG listings: JSON {graphs: [{nodes, edges}...]}.
std::string serializeGraphList(const std::vector<CausalGraph>& graphs,
                               const std::string& provenance);
std::vector<CausalGraph> parseGraphList(const std::string& text);

/// Set formatting used across reports: "{A,B,C}" in sorted order.
std::string formatSet(const std::set<std::string>& s);

std::string formatDouble17(double v); // %.17g
std::string formatDoubleShort(double v); // %g

} // namespace qcm::io
