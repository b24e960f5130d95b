//! Contraction-method solver, anisotropy certifier and audit tools for
//! additive forms `a_1 x_1^d + ... + a_s x_s^d` of degree `d = 2m` (`m` odd,
//! `m >= 3`) over the six ramified quadratic extensions of Q2.

pub mod field_ring;
pub mod forms;
pub mod contraction;
pub mod solver;
pub mod certifier;
pub mod cli;
