#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "featrec/matrix.hpp"

namespace featrec::models {

struct SvmParams {
    double cbox = 1.0;
    // RBF width; default_gamma() of the training matrix when unset.
    std::optional<double> gamma;
    double tol = 1e-3;
    // Cap on SMO pair updates per binary machine; 0 selects
    // min(max(10 N^2, 10000), 10^7).
    std::size_t max_iterations = 0;

    void validate() const;  // throws ConfigError
};

// exp(-gamma * |a - b|^2)
double rbf_kernel(std::span<const double> a, std::span<const double> b, double gamma);

// 1 / (width * mean column variance); 1 / width when every column is constant.
double default_gamma(const Matrix& x);

Matrix rbf_gram(const Matrix& x, double gamma);

// Solution of the C-SVC dual for one binary problem.
struct SmoResult {
    std::vector<double> alpha;
    double rho = 0.0;  // decision f(x) = sum alpha_i y_i K(x_i, x) - rho
    std::size_t iterations = 0;
    double gap = 0.0;  // final maximal-violating-pair gap
    bool converged = false;
    // Dual objective sum(alpha) - 1/2 alpha' Q alpha after every update, when requested.
    std::vector<double> dual_trace;
};

// SMO with maximal-violating-pair working-set selection. `signs` holds +1/-1.
SmoResult smo_solve(const Matrix& gram, std::span<const int> signs, double cbox, double tol,
                    std::size_t max_iterations, bool record_trace = false);

struct BinaryMachine {
    std::vector<std::size_t> support_indices;  // rows of the training matrix
    Matrix support_vectors;
    std::vector<double> coef;  // alpha_i * y_i
    double rho = 0.0;
    std::size_t iterations = 0;
    double gap = 0.0;
    bool converged = false;
};

// One-vs-all RBF support vector machine.
struct SvmModel {
    double gamma = 1.0;
    double cbox = 1.0;
    int class_count = 0;
    std::vector<BinaryMachine> machines;

    std::size_t input_width() const;
    // One column per class.
    Matrix decision_values(const Matrix& rows) const;
};

// Trains class k = +1 against the rest for every class. Throws
// DegenerateLabelError when fewer than two classes are present.
SvmModel svm_train(const Matrix& x, std::span<const int> labels, int class_count,
                   const SvmParams& params, std::vector<SmoResult>* solver_results = nullptr);

// Argmax decision value; ties go to the lowest class.
std::vector<int> svm_predict(const SvmModel& model, const Matrix& rows);

}  // namespace featrec::models
