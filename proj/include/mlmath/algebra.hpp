#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "mlmath/dataset.hpp"
#include "mlmath/rng.hpp"

namespace mlmath {

/// A finite group on elements 0..n-1 with 0 the identity; `table[a * n + b]`
/// is the index of a*b.
struct FiniteGroup {
  std::size_t order = 0;
  std::vector<int> table;
  std::string name;
  bool is_simple = false;

  int op(int a, int b) const { return table[static_cast<std::size_t>(a) * order + static_cast<std::size_t>(b)]; }
};

FiniteGroup cyclic_group(std::size_t n);
/// Symmetries of the regular m-gon, order 2m, named "D<2m>".
FiniteGroup dihedral_group(std::size_t m);
/// <a, x | a^{2m} = 1, x^2 = a^m, x a x^-1 = a^-1>, order 4m, named "Dic<m>"
/// ("Q8" for m = 2).
FiniteGroup dicyclic_group(std::size_t m);
FiniteGroup quaternion8();
FiniteGroup symmetric_group(std::size_t n);
FiniteGroup alternating_group(std::size_t n);
FiniteGroup direct_product(const FiniteGroup& g, const FiniteGroup& h);

/// Builds a group from a name such as "C12", "D12", "Q8", "Dic3", "S4", "A5"
/// or a product "C6xC2". Throws InvalidArgument for anything else.
FiniteGroup build_group(const std::string& name);

/// Throws InvalidArgument naming the first failing axiom: Latin property,
/// identity 0, inverses, associativity over all n^3 triples.
void check_group_axioms(const FiniteGroup& g);

/// Exact simplicity test: a nontrivial group is simple iff the normal closure
/// of every non-identity element (the subgroup generated by its conjugacy
/// class) is the whole group.
bool brute_force_is_simple(const FiniteGroup& g);

/// Isomorphism-invariant fingerprint (order, per-element order and
/// centralizer sizes, center and derived subgroup sizes).
std::string group_fingerprint(const FiniteGroup& g);

/// Simple groups of order <= max_order: C_p and A5 (for max_order >= 60).
/// Non-simple groups: cyclic, dihedral, dicyclic, A4, S4 and direct products
/// of catalog members, with one representative per fingerprint. Sorted by
/// (order, name).
std::vector<FiniteGroup> group_catalog(std::size_t max_order = 70);

/// Writes every group as a block: "# group=NAME order=N simple=0|1" followed
/// by N comma-separated rows of 1-based entries.
void write_catalog_csv(const std::vector<FiniteGroup>& groups, const std::filesystem::path& path);

/// n x n Latin square over symbols 1..n, row-major.
struct LatinSquare {
  std::size_t order = 0;
  std::vector<int> table;
  bool is_group = false;  // provenance: isotopic to a group table

  int at(std::size_t r, std::size_t c) const { return table[r * order + c]; }
};

/// 1-based Cayley table of a group.
LatinSquare cayley_square(const FiniteGroup& g);

bool is_latin(const LatinSquare& sq);

/// True iff the square is isotopic to a group table: builds the principal
/// loop isotope on the first row and column and tests associativity.
/// Throws InvalidArgument when the input is not a Latin square.
bool is_group_table(const LatinSquare& sq);

/// Random Latin square by 10 n^3 Jacobson-Matthews moves from the cyclic
/// square; `is_group` is set by is_group_table.
LatinSquare gen_latin_square(std::size_t n, RngSeed seed);

/// Label 1: row/column permuted tables of C12, C6xC2, D12, A4, Dic3.
/// Label 0: random Latin squares certified non-group, permuted the same way.
LabeledDataset gen_group_vs_latin_task(std::size_t per_class, RngSeed seed);

/// Independently row/column permuted tables of the given groups padded to
/// pad x pad, label 1 for simple groups. Each class gets per_class examples,
/// cycling through its groups, so the smaller class is permuted more.
LabeledDataset gen_simple_group_task(const std::vector<FiniteGroup>& groups, std::size_t per_class,
                                     std::size_t pad, RngSeed seed);

/// Catalog of order <= max_order, padded to max_order.
LabeledDataset gen_simple_group_task(std::size_t max_order, std::size_t per_class, RngSeed seed);

/// `copies` permuted tables of each group, unbalanced (for held-out checks).
LabeledDataset group_table_examples(const std::vector<FiniteGroup>& groups, std::size_t copies,
                                    std::size_t pad, RngSeed seed);

/// SU(3) irrep by Dynkin labels; [1, 0] is the fundamental 3, [0, 1] its
/// conjugate.
struct Su3Irrep {
  int a = 0;
  int b = 0;
  friend bool operator==(Su3Irrep, Su3Irrep) = default;
  friend auto operator<=>(Su3Irrep, Su3Irrep) = default;
};

inline constexpr int kSu3MaxWeight = 8;

/// (a+1)(b+1)(a+b+2)/2.
long su3_dimension(Su3Irrep r);

/// Summands (with multiplicity) of r1 x r2 by the Littlewood-Richardson rule,
/// sorted. Throws InvalidArgument when a label is negative or above 8.
std::vector<Su3Irrep> su3_decompose(Su3Irrep r1, Su3Irrep r2);

/// The same decomposition by subtracting characters built from
/// Gelfand-Tsetlin patterns.
std::vector<Su3Irrep> su3_decompose_bruteforce(Su3Irrep r1, Su3Irrep r2);

/// Number of summands in r1 x r2.
int su3_tensor_terms(Su3Irrep r1, Su3Irrep r2);

/// All pairs with labels in [0, max_weight]; features (a1, b1, a2, b2),
/// label min(terms, max_label) - 1. Shuffled by seed.
LabeledDataset gen_su3_task(int max_label, RngSeed seed, int max_weight = kSu3MaxWeight);

}  // namespace mlmath
