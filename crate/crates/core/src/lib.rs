//! Arithmetic of Shanks' simplest cubic fields
//! `L_m = Q(α)`, `f_m(α) = α³ − mα² − (m+3)α − 1 = 0`.
//!
//! The crate computes discriminants, conductors and monogenicity indices,
//! class numbers through the analytic class number formula, and solves the
//! associated family of cubic Thue equations `F_m(x, y) = λ`, `λ | m² + 3m + 9`.

pub mod arith;
pub mod dd;
pub mod field;
pub mod character;
pub mod analytic;
pub mod units;
pub mod classno;
pub mod thue;
pub mod refdata;
pub mod scan;
pub mod cli;
