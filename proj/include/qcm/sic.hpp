#pragma once

#include "qcm/linalg.hpp"

#include <cstdint>
#include <vector>

namespace qcm {

/// Candidate generating vector for a Weyl-Heisenberg SIC orbit.
struct Fiducial {
    int dim = 0;
    Vector amplitudes;

    /// Validates dim >= 2 and unit norm (1e-12).
    static Fiducial make(int dim, Vector amplitudes);
};

/// d^2 rank-1 projectors Pi_x; the POVM elements are Pi_x / d.
struct SicPovm {
    int dim = 0;
    std::vector<Matrix> projectors; // flattened index x-1 = p*d + q

    const Matrix& projector(int outcome1Based) const { return projectors.at(outcome1Based - 1); }
    int outcomeCount() const { return dim * dim; }
};

struct SicValidationReport {
    double maxGramError = 0.0;
    double maxIdentityError = 0.0;
    double maxProjectorError = 0.0;
    bool pass = false;
    double tolerance = 0.0;
};

/// Exact fiducial vectors: d=2 tetrahedron, d=3 Hesse configuration.
Fiducial builtinFiducial(int dim);

/// Built-in SIC-POVMs for d in {2, 3}; validated to 1e-10.
/// Other dimensions raise ParseError pointing at searchFiducial.
SicPovm knownSic(int dim);

/// Weyl-Heisenberg orbit Pi_{p,q} = D_{p,q} |f><f| D_{p,q}^dagger of the
/// clock-and-shift displacements, flattened as x = p*d + q + 1. The result
/// is a SIC only when f is a SIC fiducial; no validity check here.
SicPovm whPovmFromFiducial(const Fiducial& f);

/// Frame potential sum_{(p,q) != (0,0)} |<f|D_{p,q}|f>|^4. Its global
/// minimum (d-1)/(d+1) is attained exactly at SIC fiducials.
double framePotential(const Fiducial& f);

/// Seeded random restarts + compass-search descent on the frame potential.
/// Returns the first fiducial whose orbit passes validateSic at `tol`.
/// Deterministic in (dim, seed, tol, maxIter); maxIter counts descent sweeps
/// plus restarts. Exhausted budget raises ResourceError carrying the best
/// frame-potential value reached.
Fiducial searchFiducial(int dim, std::uint64_t seed, double tol, long maxIter);

SicValidationReport validateSic(const SicPovm& povm, double tol);

} // namespace qcm
