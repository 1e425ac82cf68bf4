#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "canht/elliptic.hpp"
#include "canht/errors.hpp"
#include "canht/lattice.hpp"
#include "canht/nsab.hpp"
#include "canht/wehler.hpp"

namespace canht::canon {

/*
 * Canonical heights for the two testbeds.
 *
 * Abelian kind (powers of an elliptic curve with integer-matrix actions):
 * heights are exact quadratic forms in the Neron-Tate pairing Gram matrix,
 * hhat_{D_i}(x) = tr(D_i G), and every telescoping limit collapses to a Gram
 * evaluation with the Gram's tail propagated.
 *
 * Wehler kind: heights are computed along exact orbits; the telescoping
 * estimate at depth m carries the empirical tail
 * 2 * (max one-step defect) * sum_{k>m} lambda1^{-k}.
 */

struct AbelianSystem {
    ell::CurveQ curve;
    std::vector<nsab::AutoAction> generators;
    nsab::EigendivisorSystem eig;
    lattice::LogCharacterMatrix log_chars;
    std::vector<lattice::GroupWord> distinguished;  // one per character index
    std::vector<QMat> distinguished_mats;
    int iters = 8;
    size_t digit_budget = 1000000;

    int dim() const { return generators.empty() ? 0 : generators[0].dim(); }
};

// Builds characters, the log-character matrix, and the distinguished words.
AbelianSystem make_abelian_system(ell::CurveQ curve, std::vector<nsab::AutoAction> generators,
                                  int search_bound = 3, int iters = 8);

struct WehlerSystem {
    wehler::WehlerSurface surface;
    wehler::K3Characters chars;
    int m_max = 5;
    size_t digit_budget = 1000000;
};

using DynamicalSystem = std::variant<AbelianSystem, WehlerSystem>;

struct AbelianPoint {
    std::vector<ell::PointQ> tuple;
};

using SystemPoint = std::variant<AbelianPoint, wehler::SurfacePoint>;

struct IndexHeight {
    double value = 0.0;
    double tail = 0.0;
    int m_used = 0;
    bool budget_exceeded = false;
};

IndexHeight telescoping_height(const AbelianSystem& sys, int index, const AbelianPoint& x);
IndexHeight telescoping_height(const WehlerSystem& sys, int index, const wehler::SurfacePoint& x,
                               int m_max = -1);

struct CanonicalHeightEstimate {
    double value = 0.0;
    double tail = 0.0;
    int m_used = 0;
    std::vector<IndexHeight> per_index;
    double h_d = 0.0;    // a Weil height representative for D = sum D_i
    double defect = 0.0; // value - h_d, for the boundedness ledger
};

CanonicalHeightEstimate canonical_height_G(const DynamicalSystem& sys, const SystemPoint& x);

// Product over the indices, values within tail of zero clamped to zero.
double product_height(const DynamicalSystem& sys, const SystemPoint& x);

enum class ZeroLocusClass { PeriodicAll, NonPeriodic, Inconclusive };

struct ZeroLocusReport {
    ZeroLocusClass verdict = ZeroLocusClass::Inconclusive;
    // the five equivalent conditions, evaluated independently where computable
    bool sum_is_zero = false;        // hhat_G = 0 within tail
    bool all_indices_zero = false;   // every per-index value = 0 within tail
    bool some_index_zero = false;    // some per-index value = 0 within tail
    bool periodic_all = false;       // recurrence under every distinguished element
    bool periodic_some = false;      // recurrence under some distinguished element
    bool consistent = false;         // all five agreed
};

ZeroLocusReport classify_zero_locus(const DynamicalSystem& sys, const SystemPoint& x,
                                    int period_bound);

// Growth rate of the ample height along the g-orbit; 1 on periodic points.
double arithmetic_degree(const DynamicalSystem& sys, const std::vector<int>& word,
                         const SystemPoint& x, int m_budget);

struct CountingRow {
    double t = 0.0;
    long n = 0;
    double ratio = 0.0;  // n / log t
};

struct CountingTable {
    std::vector<CountingRow> rows;
    bool divergent = false;     // periodic orbit: N(T) is eventually infinite
    double limit_value = 0.0;   // 1 / log lambda1(g)
};

CountingTable counting_function(const DynamicalSystem& sys, const std::vector<int>& word,
                                const SystemPoint& x, int m_budget, int grid_size = 16);

// chi_i evaluated on a word (product over generators).
double character_on_word(const AbelianSystem& sys, int index, const std::vector<int>& word);

}  // namespace canht::canon
