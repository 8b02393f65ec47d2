#include "lagrot/phase_op.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "lagrot/eigen_sym.hpp"

namespace lagrot {

double phase_of(const SymMat& H) {
    const SymEigen e = sym_eigen(H);
    double p = 0;
    for (int i = 0; i < H.dim; ++i) p += std::atan(e.lambda[i]);
    return p;
}

double sigma_form_residual(const SymMat& H, double c) {
    const SymEigen e = sym_eigen(H);
    const double* l = e.lambda.data();
    double odd = 0, even = 1;  // sigma_0 = 1
    switch (H.dim) {
        case 1:
            odd = l[0];
            break;
        case 2:
            odd = l[0] + l[1];
            even = 1 - l[0] * l[1];
            break;
        case 3:
            odd = (l[0] + l[1] + l[2]) - l[0] * l[1] * l[2];
            even = 1 - (l[0] * l[1] + l[0] * l[2] + l[1] * l[2]);
            break;
        default:
            throw std::invalid_argument("sigma_form_residual: dim must be <= 3");
    }
    return std::cos(c) * odd - std::sin(c) * even;
}

double ma_dual_residual(const SymMat& H, double c) {
    const SymEigen e = sym_eigen(H);
    double s = 0;
    for (int i = 0; i < H.dim; ++i) {
        if (!(e.lambda[i] > 0.0))
            throw std::domain_error("ma_dual_residual: non-positive eigenvalue " +
                                    std::to_string(e.lambda[i]));
        s += std::log(e.lambda[i]);
    }
    return s - c;
}

SymMat linearize(const SymMat& H) {
    return eigen_map(H, [](double l) { return 1.0 / (1.0 + l * l); });
}

double modified_concave_value(const SymMat& H) {
    const SymEigen e = sym_eigen(H);
    double p = 0;
    for (int i = 0; i < H.dim; ++i)
        p += e.lambda[i] >= 0.0 ? std::atan(e.lambda[i]) : e.lambda[i];
    return p;
}

SymMat modified_concave_linearize(const SymMat& H) {
    return eigen_map(H, [](double l) { return l >= 0.0 ? 1.0 / (1.0 + l * l) : 1.0; });
}

AdmissibilityReport admissibility(const PhaseField& psi) {
    const int n = psi.dim();
    const double upper = n * std::numbers::pi / 2.0;
    const double critical = (n - 2) * std::numbers::pi / 2.0;
    const double tol = 1e-9;

    AdmissibilityReport rep;
    rep.admissible = true;
    rep.labels.resize(psi.field.values.size());
    for (std::int64_t k = 0; k < static_cast<std::int64_t>(psi.field.values.size()); ++k) {
        const double v = psi.field.values[k];
        if (v < 0.0 || v >= upper) {
            rep.admissible = false;
            if (rep.bad_node < 0) rep.bad_node = k;
        }
        const double gap = std::abs(v) - std::abs(critical);
        if (std::abs(gap) <= tol) {
            rep.labels[k] = Criticality::critical;
            ++rep.n_critical;
        } else if (gap > 0) {
            rep.labels[k] = Criticality::supercritical;
            ++rep.n_supercritical;
        } else {
            rep.labels[k] = Criticality::subcritical;
            ++rep.n_subcritical;
        }
    }
    return rep;
}

}  // namespace lagrot
