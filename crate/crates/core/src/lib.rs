//! Exact counting and exponential-sum laboratory for primes of the form
//! [n^c] with square-free index n.
//!
//! The crate is organized around the objects it computes:
//!
//! * [`exactmath`] — rational exponents c = a/b and boundary-certified
//!   floor powers [n^(a/b)], the ground truth every count stands on.
//! * [`sieve`] — segmented primality + Möbius tables feeding everything.
//! * [`counting`] — the counting functions π_c, S_c, S̃_c by two
//!   independent methods, plus the d ≤ z / d > z decomposition.
//! * [`asymptotics`] — main terms, the Euler-product constant
//!   σ = ∏(1 − 2/p²) as a certified enclosure, and error diagnostics.
//! * [`exppair`] — exact-rational exponent-pair calculus (A/B processes).
//! * [`vaaler`] — trigonometric approximation of the sawtooth ψ(t) with a
//!   nonnegative majorant, the tool behind the floor-counting estimates.
//! * [`expsum`] — direct evaluators for the bounded exponential sums with
//!   side-by-side bound predictions.
//! * [`hbdecomp`] — the Heath-Brown identity for Λ(n) and Type I/II block
//!   evaluators.

pub mod asymptotics;
pub mod counting;
pub mod exactmath;
pub mod exppair;
pub mod expsum;
pub mod hbdecomp;
pub mod sieve;
pub mod vaaler;
