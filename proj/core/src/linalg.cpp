#include "tidp/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace tidp {

Dense2D matmul(const Dense2D& a, const Dense2D& b) {
    if (a.cols != b.rows) {
        throw DimensionError("matmul: " + std::to_string(a.cols) + " vs " + std::to_string(b.rows));
    }
    Dense2D out(a.rows, b.cols);
    for (int i = 0; i < a.rows; ++i) {
        const double* arow = a.row(i);
        double* orow = out.row(i);
        for (int k = 0; k < a.cols; ++k) {
            const double av = arow[k];
            if (av == 0.0) continue;
            const double* brow = b.row(k);
            for (int j = 0; j < b.cols; ++j) orow[j] += av * brow[j];
        }
    }
    return out;
}

Dense2D transpose(const Dense2D& a) {
    Dense2D out(a.cols, a.rows);
    for (int i = 0; i < a.rows; ++i) {
        for (int j = 0; j < a.cols; ++j) out.at(j, i) = a.at(i, j);
    }
    return out;
}

namespace linalg {

double dot(const double* a, const double* b, int n) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}

std::vector<double> solve_least_squares(const Dense2D& a, const std::vector<double>& b,
                                        const std::vector<std::string>* names) {
    const int n = a.rows;
    const int p = a.cols;
    if (static_cast<int>(b.size()) != n) throw DimensionError("solve_least_squares: rhs length");
    if (n < p) throw DimensionError("solve_least_squares: underdetermined system");

    Dense2D r = a;
    std::vector<double> rhs = b;

    // Householder reflections applied column by column.
    for (int j = 0; j < p; ++j) {
        double norm = 0.0;
        for (int i = j; i < n; ++i) norm += r.at(i, j) * r.at(i, j);
        norm = std::sqrt(norm);
        if (norm < 1e-12) {
            const std::string col = names && j < static_cast<int>(names->size())
                                        ? (*names)[j]
                                        : "#" + std::to_string(j);
            throw SingularityError(col, "rank-deficient design matrix at column " + col);
        }
        const double alpha = r.at(j, j) >= 0 ? -norm : norm;
        std::vector<double> v(n - j);
        v[0] = r.at(j, j) - alpha;
        for (int i = j + 1; i < n; ++i) v[i - j] = r.at(i, j);
        double vnorm2 = 0.0;
        for (double x : v) vnorm2 += x * x;
        if (vnorm2 > 0.0) {
            for (int col = j; col < p; ++col) {
                double proj = 0.0;
                for (int i = j; i < n; ++i) proj += v[i - j] * r.at(i, col);
                const double scale = 2.0 * proj / vnorm2;
                for (int i = j; i < n; ++i) r.at(i, col) -= scale * v[i - j];
            }
            double proj = 0.0;
            for (int i = j; i < n; ++i) proj += v[i - j] * rhs[i];
            const double scale = 2.0 * proj / vnorm2;
            for (int i = j; i < n; ++i) rhs[i] -= scale * v[i - j];
        }
        r.at(j, j) = alpha;
        for (int i = j + 1; i < n; ++i) r.at(i, j) = 0.0;
    }

    // Back substitution on the upper-triangular block.
    std::vector<double> x(p, 0.0);
    for (int j = p - 1; j >= 0; --j) {
        double s = rhs[j];
        for (int k = j + 1; k < p; ++k) s -= r.at(j, k) * x[k];
        const double diag = r.at(j, j);
        if (std::abs(diag) < 1e-12) {
            const std::string col = names && j < static_cast<int>(names->size())
                                        ? (*names)[j]
                                        : "#" + std::to_string(j);
            throw SingularityError(col, "rank-deficient design matrix at column " + col);
        }
        x[j] = s / diag;
    }
    return x;
}

int orthonormalize_columns(Dense2D& m) {
    const int n = m.rows;
    const int k = m.cols;
    int rank = 0;
    std::vector<double> col(n);
    for (int j = 0; j < k; ++j) {
        for (int i = 0; i < n; ++i) col[i] = m.at(i, j);
        // Two MGS passes keep the basis orthonormal to machine precision.
        for (int pass = 0; pass < 2; ++pass) {
            for (int prev = 0; prev < j; ++prev) {
                double proj = 0.0;
                for (int i = 0; i < n; ++i) proj += m.at(i, prev) * col[i];
                for (int i = 0; i < n; ++i) col[i] -= proj * m.at(i, prev);
            }
        }
        double norm = 0.0;
        for (int i = 0; i < n; ++i) norm += col[i] * col[i];
        norm = std::sqrt(norm);
        if (norm < 1e-12) {
            for (int i = 0; i < n; ++i) m.at(i, j) = 0.0;
            continue;
        }
        for (int i = 0; i < n; ++i) m.at(i, j) = col[i] / norm;
        ++rank;
    }
    return rank;
}

void symmetric_eigen(const Dense2D& sym, std::vector<double>& values, Dense2D& vectors) {
    const int n = sym.rows;
    if (sym.cols != n) throw DimensionError("symmetric_eigen: square matrix required");
    Dense2D a = sym;
    vectors = Dense2D(n, n);
    for (int i = 0; i < n; ++i) vectors.at(i, i) = 1.0;

    const int max_sweeps = 100;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (int i = 0; i < n; ++i) {
            for (int j = i + 1; j < n; ++j) off += a.at(i, j) * a.at(i, j);
        }
        if (off < 1e-28) break;
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = a.at(p, q);
                if (std::abs(apq) < 1e-300) continue;
                const double theta = (a.at(q, q) - a.at(p, p)) / (2.0 * apq);
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int i = 0; i < n; ++i) {
                    const double aip = a.at(i, p);
                    const double aiq = a.at(i, q);
                    a.at(i, p) = c * aip - s * aiq;
                    a.at(i, q) = s * aip + c * aiq;
                }
                for (int i = 0; i < n; ++i) {
                    const double api = a.at(p, i);
                    const double aqi = a.at(q, i);
                    a.at(p, i) = c * api - s * aqi;
                    a.at(q, i) = s * api + c * aqi;
                }
                for (int i = 0; i < n; ++i) {
                    const double vip = vectors.at(i, p);
                    const double viq = vectors.at(i, q);
                    vectors.at(i, p) = c * vip - s * viq;
                    vectors.at(i, q) = s * vip + c * viq;
                }
            }
        }
    }

    values.resize(n);
    for (int i = 0; i < n; ++i) values[i] = a.at(i, i);

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int x, int y) { return values[x] > values[y]; });
    std::vector<double> sorted_values(n);
    Dense2D sorted_vectors(n, n);
    for (int j = 0; j < n; ++j) {
        sorted_values[j] = values[order[j]];
        for (int i = 0; i < n; ++i) sorted_vectors.at(i, j) = vectors.at(i, order[j]);
    }
    values = std::move(sorted_values);
    vectors = std::move(sorted_vectors);
}

}  // namespace linalg
}  // namespace tidp
