#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ucantor/tree.hpp"

namespace ucantor {

// S-adic systems: schedules of substitutions sigma_n: A_{n+1} -> A_n*, their
// Bratteli diagram with 0-based occurrence labels, and the path <-> word
// correspondence. Letters are single bytes.

struct Substitution {
  std::string name;
  std::map<char, std::string> images;  // letter -> image word

  std::string domain() const;                 // keys, sorted
  std::string letters() const;                // distinct image letters, sorted
  const std::string& image(char c) const;     // Error::domain on unknown letter
  std::string apply(const std::string& word) const;
};

struct SAdicSystem {
  std::vector<Substitution> set;       // the finite set S
  std::vector<std::size_t> schedule;   // indices into set; entry k-1 is sigma_k
  bool periodic = false;               // schedule repeats forever
  std::size_t s0 = 0;                  // primitivity window, 0 = unclaimed

  /// Largest n with sigma_n defined; SIZE_MAX for periodic schedules.
  std::size_t levels() const;
  /// sigma_n, 1-based. Error::invalid past the schedule.
  const Substitution& sigma(std::size_t n) const;
  /// A_n: the domain of sigma_{n-1} for n >= 2, image letters of sigma_1 for
  /// n = 1 (the standing assumption makes every A_n letter appear there).
  std::string alphabet(std::size_t n) const;
};

SAdicSystem sadic_from_json_text(const std::string& text);
SAdicSystem load_sadic(const std::string& path);

/// sigma_{n,m} = sigma_n o ... o sigma_{m-1}. Pre: 1 <= n < m <= levels+1.
Substitution compose(const SAdicSystem& sys, std::size_t n, std::size_t m);

struct ProperCheck {
  bool proper = false;
  char l = 0;  // common first letter of every image of every sigma in S
  char r = 0;  // common last letter
};
ProperCheck check_proper(const SAdicSystem& sys);

/// True iff every letter of A_r occurs in sigma_{r,r+s0}(a) for every a and
/// every window start r available in the truncation.
bool check_primitive(const SAdicSystem& sys, std::size_t s0);

struct BratteliEdge {
  char from = 0;            // letter of A_n
  char to = 0;              // letter of A_{n+1}
  std::uint32_t label = 0;  // 0-based occurrence position in sigma_n(to)
};

struct BratteliDiagram {
  std::vector<std::string> alphabets;            // A_1 .. A_{depth+1}
  std::vector<std::vector<BratteliEdge>> edges;  // E_1 .. E_depth
  std::vector<double> weights;                   // w_1 .. w_{depth+1}
};

BratteliDiagram build_bratteli(const SAdicSystem& sys, std::size_t depth);

/// Michon tree of finite diagram paths: the empty path is the root, children
/// are one-edge extensions in diagram edge order, a length-n path weighs
/// w_{n+1}. Unary chains are contracted before returning.
WeightedTree diagram_to_tree(const BratteliDiagram& diagram);

struct CenteredWord {
  std::string word;
  std::size_t origin = 0;  // index of the letter at position 0
};

/// phi_n: window sigma_{1,n}(r) sigma_{1,n+1}(a_{n+1}) sigma_{1,n}(l) over
/// A_1 with the origin fixed by the edge labels; n is the number of path
/// edges consumed. Pre: proper system, path length >= n.
CenteredWord path_to_word(const SAdicSystem& sys,
                          const std::vector<BratteliEdge>& path,
                          std::size_t n);

/// psi: recovers e_1..e_n by de-substitution. The block containing the
/// origin must be unique at every step ("unique decomposition violated"
/// otherwise) and fully inside the window ("word too short").
std::vector<BratteliEdge> word_to_path(const SAdicSystem& sys,
                                       const CenteredWord& cw, std::size_t n);

/// Lemma-style length balance: max_{b,c} |sigma_{r,s+1}(b)|/|sigma_{r,s+1}(c)|.
double durand_ratio(const SAdicSystem& sys, std::size_t r, std::size_t s);

}  // namespace ucantor
