#pragma once

#include "qcm/dist.hpp"
#include "qcm/graph.hpp"
#include "qcm/linalg.hpp"
#include "qcm/sic.hpp"

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace qcm {

struct Wire {
    std::string id;
    int dim = 2;
    bool operator==(const Wire&) const = default;
};

/// Unitary gate over an ordered subset of wires. Haar-generated gates keep
/// their (seed, adjoint) provenance so model files round-trip bit-exactly.
struct Unitary {
    std::vector<std::string> wires;
    Matrix matrix;
    bool fromHaar = false;
    std::uint64_t haarSeed = 0;
    bool haarAdjoint = false;
};

struct SicMeasure {
    std::string node;
    std::string wire;
    SicPovm povm;
    std::string povmSource; // "sic2", "sic3", or a fiducial file path
};

/// Surgery element: re-introduces a wire in the pure state Pi_index. When
/// `node` is set the branch records that node's outcome as the constant
/// `index` (an intervened measurement).
struct PrepareProjector {
    std::string wire;
    int index = 1; // 1-based
    SicPovm povm;
    std::string povmSource;
    std::string node;
};

/// Surgery element: traces a wire out of the circuit.
struct DiscardInput {
    std::string wire;
};

using GateElement = std::variant<Unitary, SicMeasure, PrepareProjector, DiscardInput>;

/// Quantum circuit with maximally mixed inputs, unitaries and
/// SIC-measurements only (plus surgery elements), all outputs discarded.
struct FunctionalModel {
    std::vector<Wire> wires;
    std::vector<GateElement> gates;

    /// Outcome-producing node names in gate order.
    std::vector<std::string> nodeOrder() const;
    /// Hilbert dimension of the wire a node measures.
    int nodeDim(const std::string& node) const;
    bool pristine() const; // no surgery elements
    const Wire& wire(const std::string& id) const;
    /// Structural checks: unique node names, known wires, unitary sizes and
    /// unitarity (1e-10), POVM/wire dim agreement.
    void validate() const;
};

bool sameModel(const FunctionalModel& a, const FunctionalModel& b);

/// Simulation bookkeeping for one measurement branch.
struct BranchState {
    Matrix rho;                 // over live wires
    double probability = 1.0;   // accumulated branch weight
    std::vector<int> outcomes;  // per recorded node, 1-based
};

/// Causal structure of the circuit: X_i -> X_j iff a wire path runs from
/// X_i's output to X_j's input through unitaries only (a unitary connects
/// every input wire to every output wire).
CausalGraph deriveDag(const FunctionalModel& m);

/// Exact branch-enumeration density-matrix simulation. Measurement on a
/// subsystem is measure-and-reprepare: outcome x has weight
/// tr(rho (Pi_x/d (x) I)), the rest collapses to the conditional reduction,
/// and the measured wire restarts in the product state Pi_x.
JointDistribution simulate(const FunctionalModel& m);

/// I1/I2: discard the input of w's measurement and deterministically
/// prepare Pi_value at its output; w's outcome becomes the constant value.
FunctionalModel applyInterventionSurgery(const FunctionalModel& m, const std::string& w,
                                         int value);

/// Deletes z's measurement box; its wire passes through untouched.
FunctionalModel applyUnmeasurementSurgery(const FunctionalModel& m, const std::string& z);

/// Reverses the gate order and replaces each unitary by its adjoint;
/// defined for pristine models only.
FunctionalModel timeReverse(const FunctionalModel& m);

/// Builds a circuit realizing `templateGraph` (a QDAG, <= 6 nodes, all dims
/// 2): one wire per slice-layer subsystem, seeded Haar unitaries between
/// measurement layers, the built-in d=2 SIC everywhere. Raises
/// UnsupportedShapeError when the layering scheme cannot realize the shape.
FunctionalModel randomModel(const CausalGraph& templateGraph, std::uint64_t seed);

} // namespace qcm
