#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "ucantor/continued_fraction.hpp"
#include "ucantor/quadratic.hpp"
#include "ucantor/tree.hpp"

namespace ucantor {

// Sturmian parameters, their rotation words, and the weighted tree of
// centered cylinder words. Weight of a radius-n cell is 1/(n+1).

struct AlphaSpec {
  enum class Kind { golden, sqrt2, e, quadratic, floating };
  Kind kind = Kind::golden;
  Quad value;         // quadratic kinds (golden, sqrt2, user quadratic)
  double fvalue = 0;  // floating kind
  std::string text;   // as given on input, echoed in reports
};

/// Accepts "golden", "sqrt2", "e", a quadratic "(p+q√d)/r" (sqrt(d) also
/// recognized), or a plain float in (0,1).
AlphaSpec parse_alpha(const std::string& text);

double alpha_value(const AlphaSpec& alpha);

/// Partial quotients of alpha: exact PQa for quadratic kinds, the known
/// pattern for e, horizon-limited Gauss map for floats.
ContinuedFraction alpha_cf(const AlphaSpec& alpha, std::size_t depth);

/// u_n = floor(x - n a) - floor(x - (n+1) a) for n = 0..count-1, evaluated in
/// integer arithmetic. Pre: 0 < x <= 1, alpha in (0,1) irrational.
std::string mechanical_word_exact(const Quad& alpha, const Quad& x,
                                  std::size_t count);

/// Same formula in doubles with a proximity guard: a floor evaluated too
/// close to an integer raises Error::domain (precision exhausted) rather
/// than emitting unreliable letters.
std::string mechanical_word_float(double alpha, double x, std::size_t count);

/// Prefix of the characteristic word built from the standard-word recurrence
/// s_1 = 0^(a1-1) 1, s_k = s_{k-1}^{a_k} s_{k-2}. Exact for every cf source.
/// Stops at the first s_k with |s_k| >= min_len; raises Error::domain when
/// the quotient supply runs out first.
std::string characteristic_window(const ContinuedFraction& cf,
                                  std::size_t min_len);

/// p(1..n_max): distinct factor counts. Pre: word length >= 4 * n_max.
std::vector<std::size_t> complexity(const std::string& word, std::size_t n_max);

struct RecodeResult {
  std::string word;  // de-substituted interior
  int type = 0;      // 0: 11 absent (tiles 0, 10); 1: 00 absent (tiles 1, 01)
  int shift = 0;     // alignment flag; 0 for the left-aligned tiling
};

/// One de-substitution step. A window containing both 00 and 11 raises
/// Error::domain("not Sturmian at this window").
RecodeResult recode(const std::string& word);

/// Quotients of (1-alpha)/alpha, by index surgery: [a1 - 1; a2, a3, ...].
ContinuedFraction multiplicative_coding(const ContinuedFraction& cf);

struct WordTree {
  WeightedTree tree;                // reduced; root is the whole subshift
  std::size_t radius = 0;           // construction depth (cell radius cutoff)
  std::size_t window_len = 0;       // letters materialized for the language
  std::vector<std::size_t> level;   // per vertex: cell radius n (root: 0)
  std::vector<std::string> word;    // per vertex: centered word y_-n..y_n
};

/// Tree of bilateral cylinder words down to cell radius `depth`, reduced.
/// The window grows until the |L_{2n+1}| = 2n+2 completeness certificate
/// holds for every n <= depth; Error::domain("window too short") if it
/// cannot.
WordTree tree_of_words(const ContinuedFraction& cf, std::size_t depth);

struct TypeVerdict {
  enum class Bounded { yes, no, unknown } bounded = Bounded::unknown;
  long long max_quotient = 0;
  bool embeddable_known = false;
  bool embeddable = false;
  std::string note;
};

/// Bounded-type decision: definitive for exact periodic and pattern sources,
/// observational up to the horizon otherwise.
TypeVerdict bounded_type_verdict(const ContinuedFraction& cf,
                                 std::size_t bound_window);

struct WitnessPair {
  VertexId ancestor = kNoVertex;
  VertexId descendant = kNoVertex;
  std::size_t distance = 0;  // reduced-tree edges
  double ratio = 1.0;        // weight(ancestor) / weight(descendant)
};

struct WitnessChain {
  std::vector<VertexId> vertices;
  std::vector<std::size_t> levels;
  double increment = 0;  // common level step
};

struct WitnessReport {
  std::vector<WitnessChain> chains;
  std::vector<WitnessPair> pairs;  // all intra-chain ancestor pairs
  WitnessPair best;
  double correlation = 0;     // Pearson of ratio vs distance over pairs
  std::size_t b_index = 0;    // multiplicative quotient the witness targets
  long long b_value = 0;
  double predicted_ratio = 0;  // b/2 - 1
};

/// Scans the reduced tree of words for chains of branching vertices whose
/// cell radii advance by a constant step: on such a chain weight ratios grow
/// linearly with tree distance, which no geometric (c, theta) bound allows.
/// target_b = 0 picks the largest reachable quotient. Error::domain("no
/// witness at this depth") when no large quotient is reachable or no chain
/// is found.
WitnessReport nonembed_witness(const WordTree& wt,
                               const ContinuedFraction& alpha_cf,
                               std::size_t target_b = 0);

}  // namespace ucantor
