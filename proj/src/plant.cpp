#include "svo/plant.hpp"

#include <cmath>
#include <cstdio>

namespace svo {

Mat toeplitz_lower_window(const Vec& coeffs, int m) {
    Mat T = Mat::Zero(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j <= i; ++j)
            T(i, j) = coeffs(i - j);
    return T;
}

Mat toeplitz_upper_window(const Vec& coeffs, int m) {
    // First row (c_{m+1}, c_m, ..., c_2), constant along diagonals.
    Mat T = Mat::Zero(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = i; j < m; ++j)
            T(i, j) = coeffs(m + i - j);
    return T;
}

Mat toeplitz_banded(const Vec& coeffs, int k) {
    const int m = static_cast<int>(coeffs.size()) - 1;
    Mat T = Mat::Zero(k, k);
    for (int i = 0; i < k; ++i)
        for (int j = std::max(0, i - m); j <= i; ++j)
            T(i, j) = coeffs(i - j);
    return T;
}

double resultant(const Vec& n, const Vec& d) {
    const int m = static_cast<int>(n.size()) - 1;
    Mat S = Mat::Zero(2 * m, 2 * m);
    for (int r = 0; r < m; ++r) {
        for (int c = 0; c <= m; ++c) {
            S(r, r + c) = n(m - c);
            S(m + r, r + c) = d(m - c);
        }
    }
    return S.fullPivLu().determinant();
}

PlantSpec validate_plant(const Vec& n, const Vec& d, double coprime_rel_tol) {
    if (n.size() != d.size() || n.size() < 2)
        throw PlantError("plant: n and d must have equal length >= 2");
    const int m = static_cast<int>(n.size()) - 1;

    if (d(0) == 0.0)
        throw NonCausal("plant: d_1 = 0");
    Vec nn = n / d(0);
    Vec dd = d / d(0);
    dd(0) = 1.0;  // remove division round-off
    if (dd(m) == 0.0)
        throw NonCausal("plant: d_{m+1} = 0");

    const double scale = std::max(nn.cwiseAbs().maxCoeff(), dd.cwiseAbs().maxCoeff());
    const double res = resultant(nn, dd);
    if (std::abs(res) <= coprime_rel_tol * std::pow(scale, 2 * m))
        throw NotCoprime("plant: resultant " + std::to_string(res) +
                         " below coprimeness threshold");

    return PlantSpec{std::move(nn), std::move(dd), m};
}

// Coefficient extraction from the generating polynomial: the numerator
// rev_n(s) d(t) - rev_d(s) n(t) divided by (1 - s t) gives
// beta_{ab} = p_{ab} + beta_{a-1,b-1}, with b_{ij} = beta_{j-1,i-1}.
Mat bezoutian_from_generating(const PlantSpec& p) {
    const int m = p.m;
    Mat coef = Mat::Zero(m + 1, m + 1);  // coef(a,b): s^a t^b
    for (int a = 0; a <= m; ++a)
        for (int b = 0; b <= m; ++b)
            coef(a, b) = p.n(m - a) * p.d(b) - p.d(m - a) * p.n(b);

    Mat beta = Mat::Zero(m + 1, m + 1);
    for (int a = 0; a <= m; ++a)
        for (int b = 0; b <= m; ++b)
            beta(a, b) = coef(a, b) + ((a > 0 && b > 0) ? beta(a - 1, b - 1) : 0.0);

    Mat B(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            B(i, j) = beta(j, i);
    return B;
}

Bezoutian build_bezoutian(const PlantSpec& p) {
    const int m = p.m;
    const Mat DL = toeplitz_lower_window(p.d, m);
    const Mat DU = toeplitz_upper_window(p.d, m);
    const Mat NL = toeplitz_lower_window(p.n, m);
    const Mat NU = toeplitz_upper_window(p.n, m);

    const Mat B1 = DL * NU - NL * DU;
    const Mat B2 = NU * DL - DU * NL;
    const double scale = std::max(1.0, B1.cwiseAbs().maxCoeff());
    if ((B1 - B2).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw SingularBezoutian("bezoutian: Gohberg-Semencul products disagree");

    const Mat B3 = bezoutian_from_generating(p);
    if ((B1 - B3).cwiseAbs().maxCoeff() > 1e-10 * scale)
        throw SingularBezoutian("bezoutian: generating-polynomial extraction disagrees");

    Eigen::FullPivLU<Mat> lu(B1);
    if (!lu.isInvertible())
        throw SingularBezoutian("bezoutian: singular despite coprime validation");
    Mat B_inv = lu.inverse();

    Eigen::JacobiSVD<Mat> svd(B1);
    const double cond =
        svd.singularValues()(0) / svd.singularValues()(svd.singularValues().size() - 1);
    if (cond > 1e8)
        std::fprintf(stderr, "svo: warning: Bezoutian condition number %.3e\n", cond);

    return Bezoutian{B1, std::move(B_inv), B1.row(0).transpose(), cond};
}

EstimatorRealization realize_estimator(const PlantSpec& p) {
    const int m = p.m;
    Mat A = Mat::Zero(m, m);
    for (int i = 0; i + 1 < m; ++i)
        A(i, i + 1) = 1.0;
    for (int j = 0; j < m; ++j)
        A(m - 1, j) = -p.d(m - j);  // last row (-d_{m+1}, ..., -d_2)

    Vec B = Vec::Zero(m);
    B(m - 1) = 1.0;

    Vec C(m);
    for (int j = 0; j < m; ++j)
        C(j) = p.n(m - j) - p.d(m - j) * p.n(0);

    return EstimatorRealization{std::move(A), std::move(B), std::move(C), p.n(0)};
}

RegulatorRealization realize_regulator(const PlantSpec& p) {
    const int m = p.m;
    const double dm1 = p.dm1();

    Mat A = Mat::Zero(m, m);
    for (int i = 0; i < m; ++i)
        A(i, 0) = -p.d(m - 1 - i) / dm1;  // first column -(d_m, ..., d_1)/d_{m+1}
    for (int i = 0; i + 1 < m; ++i)
        A(i, i + 1) = 1.0;

    Vec B(m);
    for (int i = 0; i < m; ++i)
        B(i) = p.n(m - 1 - i) - p.d(m - 1 - i) * p.n(m) / dm1;

    Vec C = Vec::Zero(m);
    C(0) = -1.0 / dm1;

    return RegulatorRealization{std::move(A), std::move(B), std::move(C), -p.n(m) / dm1};
}

Vec state_from_window(const PlantSpec& p, const Bezoutian& bez, const Vec& y_window,
                      const Vec& v_window, WindowSide side) {
    const int m = p.m;
    if (side == WindowSide::Forward) {
        return bez.B_inv * (toeplitz_lower_window(p.d, m) * y_window -
                            toeplitz_lower_window(p.n, m) * v_window);
    }
    return bez.B_inv * (-toeplitz_upper_window(p.d, m) * y_window +
                        toeplitz_upper_window(p.n, m) * v_window);
}

Vec regulator_state_from_window(const PlantSpec& p, const Vec& ys_window,
                                const Vec& vs_window, WindowSide side) {
    const int m = p.m;
    if (side == WindowSide::Forward) {
        return -toeplitz_upper_window(p.n, m).transpose() * ys_window -
               toeplitz_upper_window(p.d, m).transpose() * vs_window;
    }
    return toeplitz_lower_window(p.n, m).transpose() * ys_window +
           toeplitz_lower_window(p.d, m).transpose() * vs_window;
}

PlantModel make_plant_model(const Vec& n, const Vec& d, double coprime_rel_tol) {
    PlantSpec spec = validate_plant(n, d, coprime_rel_tol);
    Bezoutian bez = build_bezoutian(spec);
    EstimatorRealization est = realize_estimator(spec);
    RegulatorRealization reg = realize_regulator(spec);

    // C is defined twice in the source material, as the Bezoutian first row
    // and as the output row of the realization; the arithmetic must agree.
    if ((bez.C_row - est.C_row).cwiseAbs().maxCoeff() >
        1e-14 * std::max(1.0, bez.C_row.cwiseAbs().maxCoeff()))
        throw PlantError("plant: Bezoutian first row deviates from realization C");

    return PlantModel{std::move(spec), std::move(bez), std::move(est), std::move(reg)};
}

}  // namespace svo
