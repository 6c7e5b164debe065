// Diagonal quadratic forms, Witt machinery over number fields (via local
// invariants) and over Q(t) (via second residues + specialization), Pfister
// forms, the Scharlau transfer and the 12-dimensional Pfister decomposition.
#pragma once

#include <vector>

#include "wittlab/fields.hpp"

namespace wittlab {

struct QuadraticForm {
  FieldDescriptor field;
  std::vector<Element> diag;

  int dim() const { return static_cast<int>(diag.size()); }
  Element det() const;
  std::string str() const;
};

QuadraticForm make_form(const FieldDescriptor& F, std::vector<Element> diag);
QuadraticForm parse_form(const FieldDescriptor& F, const std::vector<std::string>& diag);
QuadraticForm hyperbolic_form(const FieldDescriptor& F, int planes);
QuadraticForm direct_sum(const QuadraticForm& a, const QuadraticForm& b);
QuadraticForm scale_form(const Element& c, const QuadraticForm& q);
QuadraticForm tensor_form(const QuadraticForm& a, const QuadraticForm& b);
QuadraticForm neg_form(const QuadraticForm& q);

struct PfisterForm {
  std::vector<Element> slots;
  QuadraticForm expansion;  // <1,-a1> ⊗ ... ⊗ <1,-an>
};

PfisterForm pfister(const std::vector<Element>& slots);  // errors: ZeroSlot

struct WittClass {
  QuadraticForm kernel;  // anisotropic
  int original_dim = 0;
  int witt_index() const { return (original_dim - kernel.dim()) / 2; }
};

// ---------------------------------------------------------------------------
// Local invariants (number fields)
// ---------------------------------------------------------------------------

int signature(const QuadraticForm& q, const Place& v);    // real v
int hasse_symbol(const QuadraticForm& q, const Place& v); // prod_{i<j} (a_i,a_j)_v
Element signed_disc(const QuadraticForm& q);              // (-1)^{n(n-1)/2} det
bool locally_isotropic(const QuadraticForm& q, const Place& v);
int local_aniso_dim(const QuadraticForm& q, const Place& v);
// real places plus every finite place where some entry or d ramifies
std::vector<Place> form_places(const QuadraticForm& q);

// ---------------------------------------------------------------------------
// Global decision procedures
// ---------------------------------------------------------------------------

int aniso_dim(const QuadraticForm& q);       // number fields
bool isotropic(const QuadraticForm& q);      // number fields; UnsupportedField
WittClass witt_decompose(const QuadraticForm& q);  // number fields
bool witt_is_zero(const QuadraticForm& q);   // all supported fields
bool isometric(const QuadraticForm& a, const QuadraticForm& b);  // number fields
// membership in the n-th power of the fundamental ideal, n <= 4
bool in_fundamental_power(const QuadraticForm& q, int n);

Element e1(const QuadraticForm& q);  // signed discriminant as a square class

// ---------------------------------------------------------------------------
// Q(t): residue machinery
// ---------------------------------------------------------------------------

std::vector<Poly> residue_support(const QuadraticForm& q);
FieldDescriptor residue_field(const Poly& pi);
// unit part of f at pi, evaluated at the canonical root of pi (an element of
// residue_field(pi))
Element residue_eval(const Element& f, const Poly& pi);
QuadraticForm second_residue(const QuadraticForm& q, const Poly& pi);
// residues of the even-valuation entries (the "unit part" q0 of q = q0 + pi*q1)
QuadraticForm first_residue(const QuadraticForm& q, const Poly& pi);
Rat good_point(const QuadraticForm& q);  // integer t0 avoiding all factor roots
QuadraticForm specialize(const QuadraticForm& q, const Rat& t0);

// ---------------------------------------------------------------------------
// Transfers and the 12-dimensional decomposition
// ---------------------------------------------------------------------------

QuadraticForm scharlau_transfer(const QuadExtension& K, const QuadraticForm& qK);

struct PfisterBlock {
  Element alpha;
  PfisterForm n;  // 2-fold
};

std::vector<PfisterBlock> pfister_decompose_12(const QuadraticForm& phi);

// Deterministic pool of candidate scalars: square classes of products of a
// few atoms drawn from -1, small primes, the seeds and their factors.
std::vector<Element> scalar_pool(const FieldDescriptor& F,
                                 const std::vector<Element>& seeds,
                                 std::size_t cap = 0);

}  // namespace wittlab
