#include "featrec/models/svm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "featrec/error.hpp"

namespace featrec::models {
namespace {

constexpr double kTau = 1e-12;
constexpr double kInf = std::numeric_limits<double>::infinity();

bool in_up(int y, double a, double c) { return (y > 0 && a < c) || (y < 0 && a > 0.0); }
bool in_low(int y, double a, double c) { return (y > 0 && a > 0.0) || (y < 0 && a < c); }

double dual_objective(std::span<const double> alpha, std::span<const double> grad) {
    // f(a) = 1/2 a'Qa - e'a = 1/2 sum a_i (G_i - 1); the dual objective is -f.
    double f = 0.0;
    for (std::size_t i = 0; i < alpha.size(); ++i) f += alpha[i] * (grad[i] - 1.0);
    return -0.5 * f;
}

}  // namespace

void SvmParams::validate() const {
    if (!(cbox > 0.0)) throw ConfigError("SVM box constraint must be positive");
    if (gamma && !(*gamma > 0.0)) throw ConfigError("RBF gamma must be positive");
    if (!(tol > 0.0)) throw ConfigError("SMO tolerance must be positive");
}

double rbf_kernel(std::span<const double> a, std::span<const double> b, double gamma) {
    double d2 = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        d2 += d * d;
    }
    return std::exp(-gamma * d2);
}

double default_gamma(const Matrix& x) {
    if (x.cols() == 0) throw ContractError("cannot pick gamma for zero features");
    const double n = static_cast<double>(x.rows());
    double total_var = 0.0;
    for (std::size_t j = 0; j < x.cols(); ++j) {
        double mean = 0.0;
        for (std::size_t r = 0; r < x.rows(); ++r) mean += x(r, j);
        mean /= n;
        double ss = 0.0;
        for (std::size_t r = 0; r < x.rows(); ++r) ss += (x(r, j) - mean) * (x(r, j) - mean);
        total_var += ss / n;
    }
    const double mean_var = total_var / static_cast<double>(x.cols());
    const double width = static_cast<double>(x.cols());
    return mean_var > 0.0 ? 1.0 / (width * mean_var) : 1.0 / width;
}

Matrix rbf_gram(const Matrix& x, double gamma) {
    Matrix k(x.rows(), x.rows());
    for (std::size_t i = 0; i < x.rows(); ++i) {
        k(i, i) = 1.0;
        for (std::size_t j = i + 1; j < x.rows(); ++j) {
            const double v = rbf_kernel(x.row(i), x.row(j), gamma);
            k(i, j) = v;
            k(j, i) = v;
        }
    }
    return k;
}

SmoResult smo_solve(const Matrix& gram, std::span<const int> signs, double cbox, double tol,
                    std::size_t max_iterations, bool record_trace) {
    const std::size_t n = signs.size();
    if (gram.rows() != n || gram.cols() != n) throw ContractError("Gram matrix shape mismatch");
    for (int y : signs) {
        if (y != 1 && y != -1) throw ContractError("binary SVM labels must be +1 or -1");
    }

    SmoResult result;
    result.alpha.assign(n, 0.0);
    std::vector<double> grad(n, -1.0);
    auto& alpha = result.alpha;
    auto q = [&](std::size_t i, std::size_t j) {
        return static_cast<double>(signs[i] * signs[j]) * gram(i, j);
    };

    while (true) {
        double gmax = -kInf;
        double gmin = kInf;
        std::size_t i = n;
        std::size_t j = n;
        for (std::size_t t = 0; t < n; ++t) {
            const double v = -signs[t] * grad[t];
            if (in_up(signs[t], alpha[t], cbox) && v > gmax) {
                gmax = v;
                i = t;
            }
            if (in_low(signs[t], alpha[t], cbox) && v < gmin) {
                gmin = v;
                j = t;
            }
        }
        result.gap = (i == n || j == n) ? 0.0 : gmax - gmin;
        if (i == n || j == n || result.gap <= tol) {
            result.converged = true;
            break;
        }
        if (result.iterations >= max_iterations) break;
        ++result.iterations;

        const double old_i = alpha[i];
        const double old_j = alpha[j];
        const double qii = q(i, i);
        const double qjj = q(j, j);
        const double qij = q(i, j);
        if (signs[i] != signs[j]) {
            double quad = qii + qjj + 2.0 * qij;
            if (quad <= 0.0) quad = kTau;
            const double delta = (-grad[i] - grad[j]) / quad;
            const double diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if (diff > 0.0) {
                if (alpha[j] < 0.0) {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else if (alpha[i] < 0.0) {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if (diff > 0.0) {
                if (alpha[i] > cbox) {
                    alpha[i] = cbox;
                    alpha[j] = cbox - diff;
                }
            } else if (alpha[j] > cbox) {
                alpha[j] = cbox;
                alpha[i] = cbox + diff;
            }
        } else {
            double quad = qii + qjj - 2.0 * qij;
            if (quad <= 0.0) quad = kTau;
            const double delta = (grad[i] - grad[j]) / quad;
            const double sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if (sum > cbox) {
                if (alpha[i] > cbox) {
                    alpha[i] = cbox;
                    alpha[j] = sum - cbox;
                }
            } else if (alpha[j] < 0.0) {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if (sum > cbox) {
                if (alpha[j] > cbox) {
                    alpha[j] = cbox;
                    alpha[i] = sum - cbox;
                }
            } else if (alpha[i] < 0.0) {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }

        const double di = alpha[i] - old_i;
        const double dj = alpha[j] - old_j;
        for (std::size_t t = 0; t < n; ++t) grad[t] += q(t, i) * di + q(t, j) * dj;
        if (record_trace) result.dual_trace.push_back(dual_objective(alpha, grad));
    }

    // Bias: mean over free variables, else the midpoint of the feasible interval.
    double ub = kInf;
    double lb = -kInf;
    double free_sum = 0.0;
    std::size_t free_count = 0;
    for (std::size_t t = 0; t < n; ++t) {
        const double yg = signs[t] * grad[t];
        if (alpha[t] >= cbox) {
            if (signs[t] < 0) ub = std::min(ub, yg);
            else lb = std::max(lb, yg);
        } else if (alpha[t] <= 0.0) {
            if (signs[t] > 0) ub = std::min(ub, yg);
            else lb = std::max(lb, yg);
        } else {
            free_sum += yg;
            ++free_count;
        }
    }
    if (free_count > 0) {
        result.rho = free_sum / static_cast<double>(free_count);
    } else if (std::isinf(ub)) {
        result.rho = lb;
    } else if (std::isinf(lb)) {
        result.rho = ub;
    } else {
        result.rho = 0.5 * (ub + lb);
    }
    return result;
}

std::size_t SvmModel::input_width() const {
    for (const auto& m : machines) {
        if (m.support_vectors.rows() > 0) return m.support_vectors.cols();
    }
    return 0;
}

Matrix SvmModel::decision_values(const Matrix& rows) const {
    Matrix out(rows.rows(), machines.size());
    const std::size_t width = input_width();
    if (rows.rows() > 0 && width != 0 && rows.cols() != width) {
        throw ContractError("input width does not match the SVM");
    }
    for (std::size_t r = 0; r < rows.rows(); ++r) {
        const auto x = rows.row(r);
        for (std::size_t k = 0; k < machines.size(); ++k) {
            const auto& m = machines[k];
            double f = -m.rho;
            for (std::size_t s = 0; s < m.coef.size(); ++s) {
                f += m.coef[s] * rbf_kernel(m.support_vectors.row(s), x, gamma);
            }
            out(r, k) = f;
        }
    }
    return out;
}

SvmModel svm_train(const Matrix& x, std::span<const int> labels, int class_count,
                   const SvmParams& params, std::vector<SmoResult>* solver_results) {
    params.validate();
    if (labels.size() != x.rows()) throw ContractError("label count does not match row count");
    if (x.rows() == 0) throw ContractError("training data is empty");
    std::set<int> present;
    for (int y : labels) {
        if (y < 0 || y >= class_count) throw ContractError("label out of range");
        present.insert(y);
    }
    if (present.size() < 2) throw DegenerateLabelError("SVM training needs at least two classes");

    const std::size_t n = x.rows();
    SvmModel model;
    model.cbox = params.cbox;
    model.class_count = class_count;
    model.gamma = params.gamma.value_or(default_gamma(x));
    const std::size_t cap =
        params.max_iterations > 0
            ? params.max_iterations
            : std::min<std::size_t>(std::max<std::size_t>(10 * n * n, 10000), 10'000'000);

    const Matrix gram = rbf_gram(x, model.gamma);
    std::vector<int> signs(n);
    if (solver_results) solver_results->clear();
    for (int k = 0; k < class_count; ++k) {
        for (std::size_t i = 0; i < n; ++i) signs[i] = labels[i] == k ? 1 : -1;
        SmoResult res = smo_solve(gram, signs, params.cbox, params.tol, cap, solver_results != nullptr);

        BinaryMachine m;
        m.rho = res.rho;
        m.iterations = res.iterations;
        m.gap = res.gap;
        m.converged = res.converged;
        for (std::size_t i = 0; i < n; ++i) {
            if (res.alpha[i] > 0.0) {
                m.support_indices.push_back(i);
                m.coef.push_back(res.alpha[i] * signs[i]);
            }
        }
        m.support_vectors = x.select_rows(m.support_indices);
        model.machines.push_back(std::move(m));
        if (solver_results) solver_results->push_back(std::move(res));
    }
    return model;
}

std::vector<int> svm_predict(const SvmModel& model, const Matrix& rows) {
    const Matrix scores = model.decision_values(rows);
    std::vector<int> out(rows.rows());
    for (std::size_t r = 0; r < scores.rows(); ++r) {
        const auto s = scores.row(r);
        out[r] = static_cast<int>(std::max_element(s.begin(), s.end()) - s.begin());
    }
    return out;
}

}  // namespace featrec::models
