#pragma once

// Sign and normalization conventions. Every property test that depends on a
// sign reads it from here.
//
// (a) Koszul order. Monomials store generators in ascending code order
//     (copy, kind, component, site). Moving an odd generator past another odd
//     one costs a factor -1; even generators commute with everything.
//
// (b) Derivatives. dl/dg strips g from the left, dr/dg from the right:
//       dl(c0 c1)/dc1 = -c0,   dr(c0 c1)/dc1 = c0.
//     On a homogeneous X: dl X/dg = (-1)^{|g|(|X|+1)} dr X/dg.
//
// (c) Antibracket {X,Y} = sum_g dr X/dg dl Y/dg' - dr X/dg' dl Y/dg, where g'
//     is the antifield of g. Hence {phi_i, phi'_j} = delta_ij.
//
// (d) BV Laplacian lap X = -sum_g (-1)^{|g|} dr(dr X/dg')/dg, so
//     lap(phi' phi) = -1 for an even field phi. Like s0 = {., S0} it acts
//     from the right, and together with (c):
//       lap(XY) = X lap Y + (-1)^{|Y|} lap X Y + (-1)^{|Y|} {X,Y}.
//     This is the form for which T^{-1} s0 T = s0 - i hbar lap holds.
//
// (e) Star product F * G = sum_n hbar^n/n! <W^n, dr^n F (x) dl^n G>, so that
//     [phi_i, phi_j]_* = i hbar Delta_ij with W = (i/2) Delta + H.
//
// (f) Time ordering T = exp((hbar/2) D_F), D_F X = sum F^{ab} dr_a dr_b X, so
//     T(phi_i phi_j) = phi_i phi_j + hbar DeltaF_ij. Using a left derivative
//     for one slot would flip the sign of ghost contractions standing to the
//     right of an odd spectator.
//
// (g) Propagators. Flat index a = site * m + component; P Delta^R = Id on
//     rows that are not within the stencil radius of the final boundary,
//     Delta = Delta^R - Delta^A, W = (i/2) Delta + H,
//     DeltaF = (i/2)(Delta^A + Delta^R) + H.

namespace bvcheck::conventions {

/// lap(phi' phi) for an even field.
inline constexpr int kLaplacianPairSign = -1;

/// Coefficient c in lap(XY) = X lap Y + (-1)^{|Y|} lap X Y + c (-1)^{|Y|} {X,Y}.
inline constexpr int kGeneratorBracketSign = 1;

inline constexpr int parity_sign(bool odd) { return odd ? -1 : 1; }

/// (-1)^{(|X|+1)(|Y|+1)}, the shifted-degree sign of the antibracket.
inline constexpr int shifted_sign(bool x_odd, bool y_odd) { return (!x_odd && !y_odd) ? -1 : 1; }

}  // namespace bvcheck::conventions
