#include "qcm/linalg.hpp"

#include "qcm/rng.hpp"

#include <numeric>
#include <stdexcept>

namespace qcm {

namespace {

int productOf(const std::vector<int>& dims) {
    int n = 1;
    for (int d : dims) n *= d;
    return n;
}

// Mixed-radix digits of `index`, most significant first.
void toDigits(int index, const std::vector<int>& dims, std::vector<int>& out) {
    out.resize(dims.size());
    for (int i = static_cast<int>(dims.size()) - 1; i >= 0; --i) {
        out[i] = index % dims[i];
        index /= dims[i];
    }
}

int fromDigits(const std::vector<int>& digits, const std::vector<int>& dims) {
    int v = 0;
    for (std::size_t i = 0; i < dims.size(); ++i) v = v * dims[i] + digits[i];
    return v;
}

} // namespace

double maxAbsDiff(const Matrix& a, const Matrix& b) {
    return (a - b).cwiseAbs().maxCoeff();
}

double maxAbs(const Matrix& a) {
    return a.cwiseAbs().maxCoeff();
}

bool isUnitary(const Matrix& u, double tol) {
    if (u.rows() != u.cols()) return false;
    const Matrix id = Matrix::Identity(u.rows(), u.cols());
    return maxAbsDiff(u.adjoint() * u, id) <= tol;
}

Matrix haarUnitary(int dim, std::uint64_t seed) {
    SplitMix64 rng(seed);
    Matrix a(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) a(i, j) = rng.complexGaussian();
    Eigen::HouseholderQR<Matrix> qr(a);
    Matrix q = qr.householderQ();
    const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int j = 0; j < dim; ++j) {
        const Complex rjj = r(j, j);
        const double mag = std::abs(rjj);
        q.col(j) *= (mag > 0.0) ? rjj / mag : Complex(1.0, 0.0);
    }
    return q;
}

Matrix embedOperator(const Matrix& op, const std::vector<int>& positions,
                     const std::vector<int>& dims) {
    std::vector<int> subDims;
    subDims.reserve(positions.size());
    for (int p : positions) {
        if (p < 0 || p >= static_cast<int>(dims.size()))
            throw std::invalid_argument("embedOperator: position out of range");
        subDims.push_back(dims[p]);
    }
    const int subN = productOf(subDims);
    if (op.rows() != subN || op.cols() != subN)
        throw std::invalid_argument("embedOperator: operator size does not match target dims");

    std::vector<int> restPositions;
    for (int i = 0; i < static_cast<int>(dims.size()); ++i) {
        bool used = false;
        for (int p : positions) used |= (p == i);
        if (!used) restPositions.push_back(i);
    }
    std::vector<int> restDims;
    for (int p : restPositions) restDims.push_back(dims[p]);
    const int restN = productOf(restDims);
    const int fullN = productOf(dims);

    Matrix full = Matrix::Zero(fullN, fullN);
    std::vector<int> digitsA, digitsB, digitsR, fullDigits(dims.size());
    for (int a = 0; a < subN; ++a) {
        toDigits(a, subDims, digitsA);
        for (int b = 0; b < subN; ++b) {
            if (op(a, b) == Complex(0.0, 0.0)) continue;
            toDigits(b, subDims, digitsB);
            for (int r = 0; r < restN; ++r) {
                toDigits(r, restDims, digitsR);
                for (std::size_t k = 0; k < positions.size(); ++k)
                    fullDigits[positions[k]] = digitsA[k];
                for (std::size_t k = 0; k < restPositions.size(); ++k)
                    fullDigits[restPositions[k]] = digitsR[k];
                const int row = fromDigits(fullDigits, dims);
                for (std::size_t k = 0; k < positions.size(); ++k)
                    fullDigits[positions[k]] = digitsB[k];
                const int col = fromDigits(fullDigits, dims);
                full(row, col) = op(a, b);
            }
        }
    }
    return full;
}

Matrix partialTrace(const Matrix& rho, int position, const std::vector<int>& dims) {
    if (position < 0 || position >= static_cast<int>(dims.size()))
        throw std::invalid_argument("partialTrace: position out of range");
    std::vector<int> newDims = dims;
    newDims.erase(newDims.begin() + position);
    const int newN = productOf(newDims);
    Matrix out = Matrix::Zero(newN, newN);

    std::vector<int> di, dj, ri, rj;
    const int fullN = productOf(dims);
    for (int i = 0; i < fullN; ++i) {
        toDigits(i, dims, di);
        for (int j = 0; j < fullN; ++j) {
            if (rho(i, j) == Complex(0.0, 0.0)) continue;
            toDigits(j, dims, dj);
            if (di[position] != dj[position]) continue;
            ri = di; ri.erase(ri.begin() + position);
            rj = dj; rj.erase(rj.begin() + position);
            out(fromDigits(ri, newDims), fromDigits(rj, newDims)) += rho(i, j);
        }
    }
    return out;
}

Matrix tensorAppend(const Matrix& a, const Matrix& b) {
    if (a.size() == 0) return b;
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

Matrix moveLastSubsystemTo(const Matrix& rho, int position, const std::vector<int>& finalDims) {
    const int n = static_cast<int>(finalDims.size());
    if (position == n - 1) return rho;
    // Current order: final order with `position` moved to the back.
    std::vector<int> curDims;
    for (int i = 0; i < n; ++i)
        if (i != position) curDims.push_back(finalDims[i]);
    curDims.push_back(finalDims[position]);

    const int fullN = productOf(finalDims);
    Matrix out(fullN, fullN);
    std::vector<int> cur(n), fin(n);
    std::vector<int> rowMap(fullN);
    for (int i = 0; i < fullN; ++i) {
        toDigits(i, curDims, cur);
        int k = 0;
        for (int t = 0; t < n; ++t) {
            if (t == position) continue;
            fin[t] = cur[k++];
        }
        fin[position] = cur[n - 1];
        rowMap[i] = fromDigits(fin, finalDims);
    }
    for (int i = 0; i < fullN; ++i)
        for (int j = 0; j < fullN; ++j) out(rowMap[i], rowMap[j]) = rho(i, j);
    return out;
}

} // namespace qcm
