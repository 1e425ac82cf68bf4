#pragma once

#include <optional>
#include <string>
#include <vector>

#include "canht/cone.hpp"
#include "canht/errors.hpp"
#include "canht/matrix.hpp"

namespace canht::nsab {

/*
 * The symmetric-matrix model of divisor classes on a power of an elliptic
 * curve: classes are symmetric n x n matrices, an automorphism given by an
 * integer matrix A with |det A| = 1 pulls classes back by M -> A^T M A, nef
 * means positive semidefinite, and the intersection product is realized by
 * the mixed discriminant.  Normalization: intersection_number = n! * D, so
 * the identity class has top self-intersection n!.
 */

// D(M_1, ..., M_n) = (1/n!) * coefficient of t_1...t_n in det(sum t_i M_i),
// computed by the permutation expansion over columns. Exact for exact input.
Rat mixed_discriminant(const std::vector<QMat>& ms);
double mixed_discriminant(const std::vector<DMat>& ms);

Rat intersection_number(const std::vector<QMat>& ms);
double intersection_number(const std::vector<DMat>& ms);

// True iff the multilinear functional with the partial tuple plugged in
// vanishes against every (n - codim)-tuple from the standard symmetric basis.
bool is_weakly_numerically_trivial(const std::vector<QMat>& partial, int codim, int n);
bool is_weakly_numerically_trivial(const std::vector<DMat>& partial, int codim, int n,
                                   double tol = 1e-9);

struct AutoAction {
    QMat a;  // integer entries, |det| = 1
    std::string label;

    AutoAction(QMat m, std::string lbl);
    int dim() const { return a.rows; }
    QMat pullback(const QMat& m) const { return a.transposed() * m * a; }
    DMat pullback(const DMat& m) const;
};

// Product of generator powers for an exponent vector (negative powers exact).
QMat word_matrix(const std::vector<AutoAction>& family, const std::vector<int>& exponents);

struct CharacterSystem {
    std::vector<std::string> labels;        // generator labels
    std::vector<DVec> eigenvectors;         // w_i with A^T w_i = mu_i w_i, unit norm
    std::vector<std::vector<double>> chi;   // chi[i][j] = chi_i(A_j) = mu_i(A_j)^2
    std::vector<DMat> eigendivisors;        // D_i = w_i w_i^T, unit trace

    int size() const { return static_cast<int>(eigenvectors.size()); }
};

struct EigendivisorCertificates {
    bool distinct = false;
    bool noncollinear = false;
    bool independent = false;
    bool entropy_ok = false;
    double min_eigenvalue_of_sum = 0.0;  // > 0 certifies D ample (empty excluded set)
    double intersection = 0.0;           // D_1 ... D_n, must be > 0
    double regulator = 0.0;              // nonzero r x r minor of the log-character matrix
};

struct EigendivisorSystem {
    CharacterSystem chars;
    DMat d_sum;
    EigendivisorCertificates certs;
};

// Common nef eigendivisors of a commuting positive-entropy family, via the
// cone engine on psd(n). Throws NotCommuting / EntropyCheckFailed.
EigendivisorSystem eigendivisor_system(const std::vector<AutoAction>& family, int word_box = 3);

struct DynamicalDegreeProfile {
    std::vector<double> spectral;  // lambda_k from sorted eigenvalue moduli
    std::vector<double> limit;     // lambda_k from the intersection-number sequence
    std::vector<double> lambda;    // the agreed profile lambda_0..lambda_n
};

// Both routes must agree within 1e-6 relative; the limit route recovers the
// minimal linear recurrence of the exact sequence (g^m)*H^k . H^{n-k}.
DynamicalDegreeProfile dynamical_degree_profile(const AutoAction& a, int m_base = 20);

}  // namespace canht::nsab
