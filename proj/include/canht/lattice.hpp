#pragma once

#include <string>
#include <vector>

#include "canht/errors.hpp"
#include "canht/matrix.hpp"

namespace canht::lattice {

/*
 * The logarithmic character embedding g -> (log chi_1(g), ..., log chi_m(g))
 * of a free abelian automorphism group, its rank/discreteness certificates,
 * and the search for distinguished elements whose off-index characters all
 * contract.
 *
 * Words are exponent vectors over the generator list; the box searches are
 * exhaustive up to an L-infinity bound (tiny at the scales used here), with
 * an l1-then-lexicographic tie-break so results are deterministic.  The
 * parallel kernels reduce over a total order and are schedule-independent;
 * serial references are kept alongside for testing.
 */

struct LogCharacterMatrix {
    DMat l;                            // l(i, j) = log chi_i(generator_j)
    std::vector<std::string> labels;   // generator labels, size l.cols

    int num_characters() const { return l.rows; }
    int num_generators() const { return l.cols; }

    // When m = n the column sums must vanish (the image lies in the zero-sum
    // hyperplane); checked to 1e-6 absolute.
    bool column_sums_vanish(double tol = 1e-6) const;
};

struct GroupWord {
    std::vector<int> exponents;

    bool is_identity() const {
        for (int e : exponents)
            if (e) return false;
        return true;
    }
    int l1() const {
        int s = 0;
        for (int e : exponents) s += e < 0 ? -e : e;
        return s;
    }
};

struct LatticeCertificate {
    int rank = 0;
    bool full_rank = false;
    // Square data only (m = r): per deleted index i, whether the remaining
    // matrix is strictly diagonally dominant after sign normalization.
    std::vector<bool> dominance;
    bool dominance_all = false;
    double discreteness_gap = 0.0;  // min nonzero ||L w||_2 over the searched box
    GroupWord gap_witness;
};

// Throws RankDeficient when rank(L) < number of generators.
LatticeCertificate lattice_certificate(const LogCharacterMatrix& l, int search_bound = 3,
                                       bool parallel = true);

// Word w with (L w)_j < 0 for all j != i (margin 1e-9 * max|L|), minimizing
// l1 norm then lexicographic order. Throws NotFoundWithinBound.
GroupWord find_distinguished(const LogCharacterMatrix& l, int index, int bound,
                             bool parallel = true);

GroupWord find_distinguished_serial(const LogCharacterMatrix& l, int index, int bound);

// All attained maximal root moduli >= 1 of monic integer polynomials of the
// given degree whose roots all lie in |z| <= bound; sorted ascending.
std::vector<double> bounded_spectral_radii(int degree, double bound,
                                           long enumeration_cap = 2000000,
                                           bool parallel = true);

std::vector<double> bounded_spectral_radii_serial(int degree, double bound,
                                                  long enumeration_cap = 2000000);

}  // namespace canht::lattice
