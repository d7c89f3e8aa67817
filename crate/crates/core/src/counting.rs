//! Exact evaluation of the counting functions by two independent routes.
//!
//! The direct method walks n = 1..x and tests the floor image [n^c] for
//! primality. The interval method walks primes p ≤ [x^c] and counts the
//! n in [p^γ, (p+1)^γ) ∩ [1, x]; the last interval is clipped at x
//! exactly so the two methods must agree to the integer, not merely up
//! to an O(z) edge. Their equality is the module's central test.
//!
//! `decompose_by_z` splits S_c(x) over the square-free divisor condition
//! d² | n at d = z = log²x; s1 + s2 = S_c(x) is an exact identity.

use crate::exactmath::{self, ExactC};
use crate::sieve::Sieve;
use rayon::prelude::*;
use serde::Serialize;
use std::time::Instant;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CountingError {
    #[error("x must be at least {min}, got {x}")]
    XTooSmall { x: u64, min: u64 },
    #[error("sieve covers only [1, {have}] but [1, {need}] is required")]
    SieveTooSmall { have: u64, need: u64 },
}

/// Which counting function is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CountVariant {
    /// π_c(x): all n ≤ x with [n^c] prime.
    All,
    /// S_c(x): additionally μ²(n) = 1.
    Squarefree,
    /// S̃_c(x): additionally μ²(n)μ²(n+1) = 1.
    Consecutive,
}

impl CountVariant {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "all" => Some(Self::All),
            "sqfree" => Some(Self::Squarefree),
            "consec" => Some(Self::Consecutive),
            _ => None,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::All => "all",
            Self::Squarefree => "sqfree",
            Self::Consecutive => "consec",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CountMethod {
    Direct,
    Interval,
    Both,
}

impl CountMethod {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "direct" => Some(Self::Direct),
            "interval" => Some(Self::Interval),
            "both" => Some(Self::Both),
            _ => None,
        }
    }
}

/// One counting run: exact count plus enough context to reproduce it.
#[derive(Debug, Clone, Serialize)]
pub struct CountReport {
    pub c: String,
    pub x: u64,
    pub variant: CountVariant,
    pub count: u64,
    pub method: CountMethod,
    pub z: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s1: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s2: Option<i64>,
    pub in_theorem_range: bool,
    pub wall_time_s: f64,
}

/// Sieve limit the counting routines need for (c, x): primality of
/// [n^c] up to [x^c], μ² up to x + 1.
pub fn required_sieve_limit(c: &ExactC, x: u64) -> u64 {
    let xc = exactmath::floor_pow(x, c);
    std::cmp::max(xc + 1, x + 1)
}

fn check_inputs(c: &ExactC, x: u64, sieve: &Sieve) -> Result<(), CountingError> {
    if x < 2 {
        return Err(CountingError::XTooSmall { x, min: 2 });
    }
    let need = required_sieve_limit(c, x);
    if sieve.limit() < need {
        return Err(CountingError::SieveTooSmall { have: sieve.limit(), need });
    }
    Ok(())
}

fn passes_variant(n: u64, variant: CountVariant, sieve: &Sieve) -> bool {
    match variant {
        CountVariant::All => true,
        CountVariant::Squarefree => sieve.mu_squared(n) == 1,
        CountVariant::Consecutive => sieve.mu_squared(n) == 1 && sieve.mu_squared(n + 1) == 1,
    }
}

/// Direct count: walk n ≤ x, evaluate [n^c], test primality and the
/// variant's μ² condition.
pub fn count_direct(
    c: &ExactC,
    x: u64,
    variant: CountVariant,
    sieve: &Sieve,
) -> Result<u64, CountingError> {
    check_inputs(c, x, sieve)?;
    const CHUNK: u64 = 1 << 14;
    let chunks: Vec<(u64, u64)> = (0..)
        .map(|i| (1 + i * CHUNK, std::cmp::min(x, (i + 1) * CHUNK)))
        .take_while(|(lo, _)| *lo <= x)
        .collect();
    let count = chunks
        .par_iter()
        .map(|&(lo, hi)| {
            (lo..=hi)
                .filter(|&n| {
                    sieve.is_prime(exactmath::floor_pow(n, c)) && passes_variant(n, variant, sieve)
                })
                .count() as u64
        })
        .sum();
    Ok(count)
}

/// Interval count: walk primes p ≤ [x^c]; the n with [n^c] = p fill
/// [p^γ, (p+1)^γ), clipped at x for the final prime.
pub fn count_interval(
    c: &ExactC,
    x: u64,
    variant: CountVariant,
    sieve: &Sieve,
) -> Result<u64, CountingError> {
    check_inputs(c, x, sieve)?;
    let xc = exactmath::floor_pow(x, c);
    const CHUNK: u64 = 1 << 15;
    let chunks: Vec<(u64, u64)> = (0..)
        .map(|i| (2 + i * CHUNK, std::cmp::min(xc, 1 + (i + 1) * CHUNK)))
        .take_while(|(lo, _)| *lo <= xc)
        .collect();
    let count = chunks
        .par_iter()
        .map(|&(plo, phi)| {
            let mut sub = 0u64;
            for p in plo..=phi {
                if !sieve.is_prime(p) {
                    continue;
                }
                let (n0, n1) = exactmath::gamma_interval(p, c);
                let n0 = n0.max(1);
                let n1 = n1.min(x + 1); // exact clip at n <= x
                if n0 >= n1 {
                    continue;
                }
                match variant {
                    CountVariant::All => sub += n1 - n0,
                    _ => {
                        for n in n0..n1 {
                            if passes_variant(n, variant, sieve) {
                                sub += 1;
                            }
                        }
                    }
                }
            }
            sub
        })
        .sum();
    Ok(count)
}

/// Run the requested method(s) and package a report. `Both` asserts the
/// two counts agree exactly.
pub fn count_with_report(
    c: &ExactC,
    x: u64,
    variant: CountVariant,
    method: CountMethod,
    sieve: &Sieve,
) -> Result<CountReport, CountingError> {
    let start = Instant::now();
    let count = match method {
        CountMethod::Direct => count_direct(c, x, variant, sieve)?,
        CountMethod::Interval => count_interval(c, x, variant, sieve)?,
        CountMethod::Both => {
            let d = count_direct(c, x, variant, sieve)?;
            let i = count_interval(c, x, variant, sieve)?;
            assert_eq!(
                d, i,
                "direct and interval counts disagree for c={}, x={}, variant={:?}",
                c, x, variant
            );
            d
        }
    };
    Ok(CountReport {
        c: c.to_string(),
        x,
        variant,
        count,
        method,
        z: (x as f64).ln().powi(2),
        s1: None,
        s2: None,
        in_theorem_range: c.in_theorem_range(),
        wall_time_s: start.elapsed().as_secs_f64(),
    })
}

/// The z-split of S_c(x) over the square-free divisor condition.
#[derive(Debug, Clone, Serialize)]
pub struct ZDecomposition {
    pub s1: i64,
    pub s2: i64,
    pub z: f64,
    pub total: u64,
}

/// s1 = Σ_{d ≤ z} μ(d)·#{n ≤ x : [n^c] prime, d² | n}, s2 the same over
/// z < d ≤ √x; asserts s1 + s2 = S_c(x) exactly.
pub fn decompose_by_z(
    c: &ExactC,
    x: u64,
    sieve: &Sieve,
) -> Result<ZDecomposition, CountingError> {
    if x < 16 {
        return Err(CountingError::XTooSmall { x, min: 16 });
    }
    check_inputs(c, x, sieve)?;
    let z = (x as f64).ln().powi(2);

    // hit[n] = [n^c] prime, shared by both halves and the total
    const CHUNK: u64 = 1 << 14;
    let chunks: Vec<(u64, u64)> = (0..)
        .map(|i| (1 + i * CHUNK, std::cmp::min(x, (i + 1) * CHUNK)))
        .take_while(|(lo, _)| *lo <= x)
        .collect();
    let hit_chunks: Vec<Vec<bool>> = chunks
        .par_iter()
        .map(|&(lo, hi)| {
            (lo..=hi)
                .map(|n| sieve.is_prime(exactmath::floor_pow(n, c)))
                .collect()
        })
        .collect();
    let mut hit = vec![false; (x + 1) as usize];
    for (&(lo, _), part) in chunks.iter().zip(&hit_chunks) {
        hit[lo as usize..lo as usize + part.len()].copy_from_slice(part);
    }

    let sqrt_x = x.isqrt();
    let (mut s1, mut s2) = (0i64, 0i64);
    for d in 1..=sqrt_x {
        let mu = sieve.mobius(d);
        if mu == 0 {
            continue;
        }
        let dd = d * d;
        let mut cnt = 0i64;
        let mut m = dd;
        while m <= x {
            cnt += hit[m as usize] as i64;
            m += dd;
        }
        if (d as f64) <= z {
            s1 += mu as i64 * cnt;
        } else {
            s2 += mu as i64 * cnt;
        }
    }

    let total: u64 = (1..=x)
        .filter(|&n| hit[n as usize] && sieve.mu_squared(n) == 1)
        .count() as u64;
    assert_eq!(
        s1 + s2,
        total as i64,
        "z-decomposition identity failed for c={}, x={}",
        c,
        x
    );
    Ok(ZDecomposition { s1, s2, z, total })
}
