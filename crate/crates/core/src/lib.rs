//! Exact-arithmetic tools for blocks of category O: Weyl group
//! combinatorics, Kazhdan-Lusztig polynomials, moment graphs, sheaves on
//! them, the Braden-MacPherson construction, and graded module lattices
//! over the structure algebra.

pub mod bmp;
pub mod coxeter;
pub mod hecke;
pub mod momentgraph;
pub mod sheaf;
pub mod polyalg;
pub mod verify;
pub mod zlattice;
