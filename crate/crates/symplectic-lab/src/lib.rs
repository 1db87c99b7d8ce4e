//! A numerical laboratory for symplectic map dynamics.
//!
//! The crate computes, on explicit symplectic map models, the quantities that
//! tie topological entropy to periodic-orbit Lyapunov exponents:
//!
//! - [`sympl`]: symplectic linear algebra — standard form, validated
//!   matrices, spectra, Lyapunov vectors of periodic cocycles, and the
//!   exponent functionals `S` and `χ⁺_min`.
//! - [`cocycle`]: periodic linear systems as words of matrices — powers,
//!   closeness, domination tests, complex ranks, transposition transitions,
//!   and the exponent-mixing construction with its convergence verifier.
//! - [`models`]: concrete map families (standard map, coupled standard maps,
//!   torus automorphisms, snake-composed local models) with exact Jacobians,
//!   Newton periodic-orbit detection, and the `S` estimator.
//! - [`entropy`]: `(n, ε)`-separated-set counting, growth-rate fits, subshift
//!   entropy via spectral radius, and horseshoe lower-bound formulas.
//! - [`snake`]: an explicit local model around a full homoclinic tangency,
//!   the sinusoidal multi-directional shear, and certified horseshoes.
//! - [`harness`]: reproducible experiment driver behind the `symplab` binary.
//!
//! Run `cargo run --release --example cat_map_entropy` for a first tour; the
//! acceptance suite lives in `tests/acceptance.rs`.

pub mod cocycle;
pub mod dynamics;
pub mod entropy;
pub mod error;
pub mod harness;
pub mod models;
pub mod par;
pub mod rng;
pub mod snake;
pub mod sympl;

pub use error::{Error, Result};
