#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace svo {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Coefficient vectors use 1-based naming: element 0 of n stores n_1 (the
// constant coefficient of the transfer-function numerator), element m stores
// n_{m+1}. Every Toeplitz window below slices these full (m+1)-vectors
// itself; an off-by-one here corrupts everything downstream, so helpers
// never take pre-sliced coefficient arrays.

struct PlantError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NotCoprime : PlantError {
    using PlantError::PlantError;
};
struct NonCausal : PlantError {
    using PlantError::PlantError;
};
struct SingularBezoutian : PlantError {
    using PlantError::PlantError;
};

struct PlantSpec {
    Vec n;     // n_1..n_{m+1}
    Vec d;     // d_1..d_{m+1}, d_1 == 1 after validation
    int m{0};  // plant order

    double n1() const { return n(0); }
    double nm1() const { return n(m); }
    double dm1() const { return d(m); }
};

struct Bezoutian {
    Mat B;        // Toeplitz Bezoutian B_T
    Mat B_inv;    // dense inverse
    Vec C_row;    // first row of B
    double cond;  // 2-norm condition number of B
};

// Second controllability canonical form, x_k = A x_{k-1} + B v_k,
// y_k = C x_{k-1} + D1 v_k.
struct EstimatorRealization {
    Mat A;
    Vec B_col;
    Vec C_row;
    double D1;
};

// Minimal realization of the time-reversed regulator system,
// x*_k = A* x*_{k-1} + B* y*_k, v*_k = C* x*_{k-1} + D1* y*_k.
struct RegulatorRealization {
    Mat A_star;
    Vec B_star;
    Vec C_star;
    double D1_star;
};

enum class WindowSide { Forward, Backward };

// Rejects plants that are non-causal (d_1 = 0 or d_{m+1} = 0) or whose
// numerator/denominator fail the scale-aware resultant test
// |res| > coprime_rel_tol * max|coef|^(2m). Both n and d are divided by d_1
// so the transfer function is preserved while d_1 = 1 exactly.
PlantSpec validate_plant(const Vec& n, const Vec& d, double coprime_rel_tol = 1e-8);

Bezoutian build_bezoutian(const PlantSpec& p);

// Independent construction of B_T: coefficient extraction from the
// generating polynomial, used to cross-check the matrix products.
Mat bezoutian_from_generating(const PlantSpec& p);
EstimatorRealization realize_estimator(const PlantSpec& p);
RegulatorRealization realize_regulator(const PlantSpec& p);

// Sliding-window state formulas. Forward uses samples k+1..k+m, backward
// uses k-m+1..k; both windows are passed oldest-sample-first.
Vec state_from_window(const PlantSpec& p, const Bezoutian& bez, const Vec& y_window,
                      const Vec& v_window, WindowSide side);
Vec regulator_state_from_window(const PlantSpec& p, const Vec& ys_window,
                                const Vec& vs_window, WindowSide side);

// m x m corner windows of the infinite banded Toeplitz convolution operators.
Mat toeplitz_lower_window(const Vec& coeffs, int m);  // D_L / N_L
Mat toeplitz_upper_window(const Vec& coeffs, int m);  // D_U / N_U

// k x k upper-left corner of the infinite lower-banded Toeplitz matrix whose
// first column is coeffs (D_k / N_k).
Mat toeplitz_banded(const Vec& coeffs, int k);

// Sylvester resultant of the two coefficient vectors, both padded to degree m.
double resultant(const Vec& n, const Vec& d);

// Everything above is immutable-value based and safe for concurrent use.

struct PlantModel {
    PlantSpec spec;
    Bezoutian bez;
    EstimatorRealization est;
    RegulatorRealization reg;

    int m() const { return spec.m; }
};

PlantModel make_plant_model(const Vec& n, const Vec& d, double coprime_rel_tol = 1e-8);

}  // namespace svo
