#include "qcm/sic.hpp"

#include "qcm/errors.hpp"
#include "qcm/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace qcm {

namespace {

constexpr double kPi = std::numbers::pi;

// All d^2 displacement overlaps c[p*d+q] = <f| X^p Z^q |f>
//                                        = sum_j conj(f[(j+p) mod d]) w^{qj} f[j].
std::vector<Complex> displacementOverlaps(const Vector& f) {
    const int d = static_cast<int>(f.size());
    std::vector<Complex> omega(d);
    for (int k = 0; k < d; ++k) {
        const double a = 2.0 * kPi * k / d;
        omega[k] = Complex(std::cos(a), std::sin(a));
    }
    std::vector<Complex> out(d * d);
    for (int p = 0; p < d; ++p) {
        for (int q = 0; q < d; ++q) {
            Complex c(0.0, 0.0);
            for (int j = 0; j < d; ++j)
                c += std::conj(f[(j + p) % d]) * omega[(q * j) % d] * f[j];
            out[p * d + q] = c;
        }
    }
    return out;
}

double framePotentialOf(const Vector& f) {
    const auto c = displacementOverlaps(f);
    double fp = 0.0;
    for (std::size_t i = 1; i < c.size(); ++i) {
        const double t = std::norm(c[i]);
        fp += t * t;
    }
    return fp;
}

Vector randomUnitVector(int d, SplitMix64& rng) {
    Vector f(d);
    for (int i = 0; i < d; ++i) f[i] = rng.complexGaussian();
    f.normalize();
    return f;
}

// Compass search over the 2d real coordinates, renormalizing each trial
// point. Step halves whenever a full sweep fails; returns sweeps consumed.
long compassDescent(Vector& f, double& value, long sweepBudget) {
    const int d = static_cast<int>(f.size());
    double step = 0.5;
    long sweeps = 0;
    while (step > 1e-9 && sweeps < sweepBudget) {
        bool improved = false;
        for (int coord = 0; coord < 2 * d; ++coord) {
            for (double sign : {1.0, -1.0}) {
                Vector trial = f;
                if (coord < d)
                    trial[coord] += Complex(sign * step, 0.0);
                else
                    trial[coord - d] += Complex(0.0, sign * step);
                trial.normalize();
                const double v = framePotentialOf(trial);
                if (v < value - 1e-18) {
                    f = std::move(trial);
                    value = v;
                    improved = true;
                }
            }
        }
        ++sweeps;
        if (!improved) step *= 0.5;
    }
    return sweeps;
}

} // namespace

Fiducial Fiducial::make(int dim, Vector amplitudes) {
    if (dim < 2) throw ParseError("fiducial dimension must be >= 2");
    if (amplitudes.size() != dim)
        throw ParseError("fiducial amplitude count does not match dimension");
    if (std::abs(amplitudes.norm() - 1.0) > 1e-12)
        throw ParseError("fiducial is not normalized");
    return Fiducial{dim, std::move(amplitudes)};
}

Fiducial builtinFiducial(int dim) {
    if (dim == 2) {
        const double c = std::sqrt((1.0 + 1.0 / std::sqrt(3.0)) / 2.0);
        const double s = std::sqrt((1.0 - 1.0 / std::sqrt(3.0)) / 2.0);
        Vector f(2);
        f[0] = Complex(c, 0.0);
        f[1] = Complex(std::cos(kPi / 4.0), std::sin(kPi / 4.0)) * s;
        return Fiducial::make(2, std::move(f));
    }
    if (dim == 3) {
        const double r = 1.0 / std::sqrt(2.0);
        Vector f(3);
        f[0] = Complex(0.0, 0.0);
        f[1] = Complex(r, 0.0);
        f[2] = Complex(-r, 0.0);
        return Fiducial::make(3, std::move(f));
    }
    throw ParseError("no built-in fiducial for dimension " + std::to_string(dim) +
                     "; use search_fiducial");
}

SicPovm knownSic(int dim) {
    return whPovmFromFiducial(builtinFiducial(dim));
}

SicPovm whPovmFromFiducial(const Fiducial& f) {
    const int d = f.dim;
    std::vector<Complex> omega(d);
    for (int k = 0; k < d; ++k) {
        const double a = 2.0 * kPi * k / d;
        omega[k] = Complex(std::cos(a), std::sin(a));
    }
    SicPovm povm;
    povm.dim = d;
    povm.projectors.reserve(d * d);
    for (int p = 0; p < d; ++p) {
        for (int q = 0; q < d; ++q) {
            Vector g = Vector::Zero(d);
            for (int j = 0; j < d; ++j)
                g[(j + p) % d] += omega[(q * j) % d] * f.amplitudes[j];
            povm.projectors.push_back(g * g.adjoint());
        }
    }
    return povm;
}

double framePotential(const Fiducial& f) {
    return framePotentialOf(f.amplitudes);
}

Fiducial searchFiducial(int dim, std::uint64_t seed, double tol, long maxIter) {
    if (dim < 2) throw ParseError("search_fiducial: dimension must be >= 2");
    double bestPotential = std::numeric_limits<double>::infinity();
    long used = 0;
    std::uint64_t restart = 0;
    while (used < maxIter) {
        SplitMix64 rng(subseed(seed, restart++));
        Vector f = randomUnitVector(dim, rng);
        double value = framePotentialOf(f);
        used += 1; // the restart itself
        used += compassDescent(f, value, maxIter - used);
        bestPotential = std::min(bestPotential, value);
        const Fiducial candidate = Fiducial::make(dim, f);
        if (validateSic(whPovmFromFiducial(candidate), tol).pass) return candidate;
    }
    std::ostringstream msg;
    msg << "search failed: iteration budget " << maxIter
        << " exhausted for d=" << dim << "; best frame potential " << bestPotential
        << " (target " << (dim - 1.0) / (dim + 1.0) << ")";
    throw ResourceError(msg.str());
}

SicValidationReport validateSic(const SicPovm& povm, double tol) {
    SicValidationReport rep;
    rep.tolerance = tol;
    const int d = povm.dim;
    const int n = d * d;
    if (static_cast<int>(povm.projectors.size()) != n)
        throw ParseError("SIC-POVM must contain d^2 projectors");

    for (int x = 0; x < n; ++x) {
        const Matrix& pi = povm.projectors[x];
        const double herm = maxAbsDiff(pi, pi.adjoint());
        const double traceErr = std::abs(pi.trace() - Complex(1.0, 0.0));
        const double idem = maxAbsDiff(pi * pi, pi);
        rep.maxProjectorError = std::max({rep.maxProjectorError, herm, traceErr, idem});
        for (int y = 0; y < n; ++y) {
            const double target = (d * (x == y ? 1.0 : 0.0) + 1.0) / (d + 1.0);
            const Complex overlap = (pi * povm.projectors[y]).trace();
            rep.maxGramError = std::max(rep.maxGramError, std::abs(overlap - Complex(target, 0.0)));
        }
    }

    Matrix sum = Matrix::Zero(d, d);
    for (const Matrix& pi : povm.projectors) sum += pi / static_cast<double>(d);
    rep.maxIdentityError = maxAbsDiff(sum, Matrix::Identity(d, d));

    rep.pass = rep.maxGramError <= tol && rep.maxIdentityError <= tol &&
               rep.maxProjectorError <= tol;
    return rep;
}

} // namespace qcm
