#pragma once

#include <optional>
#include <string>
#include <vector>

#include "canht/errors.hpp"
#include "canht/matrix.hpp"
#include "canht/poly.hpp"

namespace canht::cone {

/*
 * Spectral machinery for linear maps preserving a salient closed convex cone
 * of full dimension, and for commuting families of such maps.
 *
 * Supported cone kinds:
 *   orthant(d)     nonnegative orthant in R^d
 *   psd(k)         positive semidefinite matrices in Sym(k), coordinates over
 *                  the pair basis (see sym_index below), ambient dim k(k+1)/2
 *   polyhedral     either by generators {sum nu_i g_i : nu >= 0} or by
 *                  half-spaces {v : H v >= 0}
 *
 * A cone-preserving map has its spectral radius as an eigenvalue with an
 * eigenvector inside the cone; for a commuting family the eigencones can be
 * refined map by map, which is what common_eigenvectors implements.  Only real
 * common eigenvectors are produced; complex-conjugate-pair directions (which
 * can meet the psd cone as rank-2 matrices) are out of scope here.
 */

enum class ConeKind { Orthant, Psd, PolyhedralGenerators, PolyhedralHalfspaces };

struct ConeSpec {
    ConeKind kind;
    int ambient_dim = 0;
    int matrix_size = 0;          // psd only: ambient_dim = k(k+1)/2
    std::vector<QVec> generators; // polyhedral-by-generators
    std::vector<QVec> halfspaces; // polyhedral-by-halfspaces (inner normals)

    static ConeSpec orthant(int d);
    static ConeSpec psd(int k);
    static ConeSpec polyhedral_generators(std::vector<QVec> gens);
    static ConeSpec polyhedral_halfspaces(std::vector<QVec> normals);

    // Salience + full dimension. Polyhedral salience is an exact LP
    // certificate; orthant/psd are salient by construction.
    void validate() const;

    bool contains(const DVec& v, double tol) const;
};

// Flattened symmetric-matrix coordinates: unordered pairs (i <= j) in
// lexicographic order, diagonal entries first within their row.
int sym_dim(int k);
std::vector<std::pair<int, int>> sym_index(int k);
DVec sym_flatten(const DMat& m);
DMat sym_unflatten(const DVec& v, int k);
QVec sym_flatten(const QMat& m);
QMat sym_unflatten(const QVec& v, int k);

struct ConeMap {
    // Operator on ambient coordinates; exact copy kept when entries rational.
    DMat matrix;
    std::optional<QMat> exact;
    // psd kind: the map must be a congruence M -> A^T M A; A is recorded and
    // `matrix` is the induced operator on sym coordinates.
    std::optional<QMat> congruence;
    std::string label;

    static ConeMap from_rational(QMat m, std::string label = "");
    static ConeMap from_double(DMat m, std::string label = "");
    static ConeMap congruence_map(QMat a, std::string label = "");

    int dim() const { return matrix.rows; }
    bool preserves(const ConeSpec& cone, double tol) const;
};

struct CommutingFamily {
    std::vector<ConeMap> maps;
    ConeSpec cone;

    // ||phi psi - psi phi||_inf <= tol * ||phi|| ||psi||; exact when both rational.
    void check_commuting(double tol = 1e-9) const;
    void check_preserves(double tol = 1e-9) const;
};

struct Character {
    std::vector<double> values;  // one per family map, positive
    DVec eigenvector;            // in the cone; unit max-norm, first nonzero
                                 // coordinate positive; psd: unit trace
};

struct SpectralRadiusResult {
    double rho;
    Poly char_poly;  // exact when the map is rational (doubles are lifted exactly)
};

SpectralRadiusResult spectral_radius(const ConeMap& map);

// Eigenvector of rho inside the cone (Birkhoff). Throws NoConeEigenvector if
// the rho-eigenspace meets the cone only at 0 within tolerance.
DVec pf_eigenvector(const ConeMap& map, const ConeSpec& cone, double tol = 1e-9);

// Inductive eigencone refinement over the family: branch over every real
// eigenvalue whose eigenspace meets the cone, restrict, recurse.  Returns a
// maximal set of mutually noncollinear common eigenvectors with characters,
// sorted by descending character values.
std::vector<Character> common_eigenvectors(const CommutingFamily& family, double tol = 1e-9);

struct CharacterStructureReport {
    bool pairwise_distinct = false;
    bool pairwise_noncollinear = false;
    bool linearly_independent = false;
    bool equivalences_agree = false;
    // Per generator: index of the character achieving the spectral radius
    // within 1e-6 relative, or -1 (MISSING).
    std::vector<int> rho_achiever;
};

// `generator_rhos` are the spectral radii of the family maps, computed by the
// caller; passing max-of-characters here would make the achiever check vacuous.
CharacterStructureReport character_structure_report(const std::vector<Character>& chars,
                                                    const std::vector<double>& generator_rhos,
                                                    double tol = 1e-9);

}  // namespace canht::cone
