#include "qcm/errors.hpp"
#include "qcm/sic.hpp"

#include <doctest.h>

#include <cmath>

using namespace qcm;

namespace {

// Independent Gram oracle: raw trace arithmetic on the projector list,
// written without validateSic.
double gramEntry(const SicPovm& povm, int x, int y) {
    Complex t(0.0, 0.0);
    const Matrix& a = povm.projectors[x];
    const Matrix& b = povm.projectors[y];
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) t += a(i, j) * b(j, i);
    return t.real();
}

double maxGramDeviation(const SicPovm& povm) {
    const int d = povm.dim;
    double worst = 0.0;
    for (int x = 0; x < d * d; ++x) {
        for (int y = 0; y < d * d; ++y) {
            const double target = (d * (x == y ? 1.0 : 0.0) + 1.0) / (d + 1.0);
            worst = std::max(worst, std::abs(gramEntry(povm, x, y) - target));
        }
    }
    return worst;
}

} // namespace

TEST_CASE("known_sic d=2: Gram matrix diagonal 1, off-diagonal 1/3") {
    const SicPovm povm = knownSic(2);
    for (int x = 0; x < 4; ++x) {
        for (int y = 0; y < 4; ++y) {
            const double expected = x == y ? 1.0 : 1.0 / 3.0;
            CHECK(gramEntry(povm, x, y) == doctest::Approx(expected).epsilon(1e-12));
        }
    }
}

TEST_CASE("known_sic d=2: resolution of the identity") {
    const SicPovm povm = knownSic(2);
    Matrix sum = Matrix::Zero(2, 2);
    for (const auto& p : povm.projectors) sum += p / 2.0;
    CHECK(maxAbsDiff(sum, Matrix::Identity(2, 2)) < 1e-12);
}

TEST_CASE("known_sic d=3: off-diagonal Gram entries 1/4") {
    const SicPovm povm = knownSic(3);
    for (int x = 0; x < 9; ++x)
        for (int y = 0; y < 9; ++y)
            if (x != y) CHECK(gramEntry(povm, x, y) == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(validateSic(povm, 1e-10).maxGramError < 1e-10);
}

TEST_CASE("known_sic: unsupported dimension names search_fiducial") {
    CHECK_THROWS_WITH_AS(knownSic(4),
                         doctest::Contains("no built-in fiducial"), ParseError);
    CHECK_THROWS_WITH_AS(knownSic(5), doctest::Contains("search_fiducial"), ParseError);
}

TEST_CASE("validate_sic passes the built-ins at 1e-10") {
    for (int d : {2, 3}) {
        const auto rep = validateSic(knownSic(d), 1e-10);
        CHECK(rep.pass);
        CHECK(rep.maxGramError <= 1e-10);
        CHECK(rep.maxIdentityError <= 1e-10);
        CHECK(rep.maxProjectorError <= 1e-10);
    }
}

TEST_CASE("validate_sic flags a non-projector element") {
    SicPovm povm = knownSic(2);
    povm.projectors[0] = Matrix::Identity(2, 2) / 2.0;
    const auto rep = validateSic(povm, 1e-10);
    CHECK_FALSE(rep.pass);
    CHECK(rep.maxProjectorError > 0.1);
}

TEST_CASE("wh_povm_from_fiducial: tetrahedron fiducial passes at 1e-10") {
    const SicPovm povm = whPovmFromFiducial(builtinFiducial(2));
    CHECK(maxGramDeviation(povm) < 1e-10);
    CHECK(validateSic(povm, 1e-10).pass);
}

TEST_CASE("wh_povm_from_fiducial: every orbit element has trace 1") {
    Vector v(3);
    v << Complex(0.6, 0.0), Complex(0.0, 0.48), Complex(0.64, 0.0);
    v.normalize();
    const auto povm = whPovmFromFiducial(Fiducial::make(3, v));
    for (const auto& p : povm.projectors)
        CHECK(std::abs(p.trace() - Complex(1.0, 0.0)) < 1e-12);
}

TEST_CASE("wh_povm_from_fiducial: basis state is not a fiducial") {
    Vector v(2);
    v << Complex(1.0, 0.0), Complex(0.0, 0.0);
    const auto povm = whPovmFromFiducial(Fiducial::make(2, v));
    // The orbit of |0> contains orthogonal projectors, so some off-diagonal
    // Gram entry is 0 instead of 1/3.
    bool sawZero = false;
    for (int x = 0; x < 4; ++x)
        for (int y = 0; y < 4; ++y)
            if (x != y && std::abs(gramEntry(povm, x, y)) < 1e-12) sawZero = true;
    CHECK(sawZero);
    CHECK_FALSE(validateSic(povm, 1e-10).pass);
}

TEST_CASE("wh_povm_from_fiducial is global-phase equivariant") {
    const Fiducial f = builtinFiducial(2);
    const Complex phase(std::cos(1.234), std::sin(1.234));
    const Fiducial g = Fiducial::make(2, Vector(phase * f.amplitudes));
    const auto a = whPovmFromFiducial(f);
    const auto b = whPovmFromFiducial(g);
    for (int x = 0; x < 4; ++x) CHECK(maxAbsDiff(a.projectors[x], b.projectors[x]) < 1e-12);
}

TEST_CASE("search_fiducial d=2 reaches 1e-9") {
    const Fiducial f = searchFiducial(2, 1, 1e-9, 100000);
    CHECK(maxGramDeviation(whPovmFromFiducial(f)) < 1e-9);
}

TEST_CASE("search_fiducial d=4 reaches 1e-7") {
    const Fiducial f = searchFiducial(4, 1, 1e-7, 100000);
    const auto rep = validateSic(whPovmFromFiducial(f), 1e-7);
    CHECK(rep.pass);
}

TEST_CASE("search_fiducial is deterministic in the seed") {
    const Fiducial a = searchFiducial(2, 42, 1e-9, 100000);
    const Fiducial b = searchFiducial(2, 42, 1e-9, 100000);
    for (int i = 0; i < 2; ++i) CHECK(a.amplitudes[i] == b.amplitudes[i]);
}

TEST_CASE("search_fiducial with zero budget fails") {
    CHECK_THROWS_WITH_AS(searchFiducial(2, 1, 1e-9, 0),
                         doctest::Contains("search failed"), ResourceError);
}

TEST_CASE("unbiasedness: maximally mixed input gives P(x)=1/d^2") {
    auto checkUnbiased = [](const SicPovm& povm) {
        const int d = povm.dim;
        const Matrix mixed = Matrix::Identity(d, d) / static_cast<double>(d);
        for (const auto& proj : povm.projectors) {
            const double p = (mixed * proj / static_cast<double>(d)).trace().real();
            CHECK(std::abs(p - 1.0 / (d * d)) < 1e-12);
        }
    };
    checkUnbiased(knownSic(2));
    checkUnbiased(knownSic(3));
    checkUnbiased(whPovmFromFiducial(searchFiducial(4, 7, 1e-7, 100000)));
}

TEST_CASE("fiducial constructor rejects unnormalized input") {
    Vector v(2);
    v << Complex(1.0, 0.0), Complex(0.5, 0.0);
    CHECK_THROWS_AS(Fiducial::make(2, v), ParseError);
}
