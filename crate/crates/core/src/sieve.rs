//! Segmented sieving of primality and μ(n).
//!
//! A [`SieveTable`] covers one segment [lo, hi] with a primality bitmap
//! and a signed byte per n holding μ(n). Segments are independent once
//! the shared base primes (p ≤ √hi) are built, so a full [`Sieve`] over
//! [1, limit] is assembled from segments sieved in parallel; the output
//! is identical for any worker count because each segment lands at a
//! fixed offset.
//!
//! μ is computed per segment by one pass over the base primes: each pass
//! toggles the sign for multiples of p, divides one factor p out of a
//! residue array, and zeroes multiples of p². A residue left > 1 at the
//! end is a single prime factor above √hi and toggles the sign once more.
//!
//! Binary dump layout (little-endian), for reuse across runs:
//!
//! ```text
//! magic  b"PSLSIEVE"            8 bytes
//! version u32                   currently 1
//! lo, hi  u64, u64              inclusive segment bounds
//! bitmap  ceil(len/64) x u64    bit i set  <=>  lo + i is prime
//! mobius  len x i8              mu(lo + i) in {-1, 0, +1}
//! ```

use rayon::prelude::*;
use std::io::{self, Read, Write};
use thiserror::Error;

/// Default entries per segment; fits the per-worker scratch in cache-friendly
/// chunks and keeps splice offsets word-aligned.
pub const DEFAULT_SEGMENT_SIZE: u64 = 1 << 22;

const DUMP_MAGIC: &[u8; 8] = b"PSLSIEVE";
const DUMP_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum SieveError {
    #[error("segment [{lo}, {hi}] exceeds the configured segment size {max}")]
    SegmentTooLarge { lo: u64, hi: u64, max: u64 },
    #[error("sieve of size {needed} bytes exceeds the memory budget of {budget} bytes")]
    BudgetExceeded { needed: u64, budget: u64 },
    #[error("n = {n} outside the sieved range [{lo}, {hi}]")]
    OutOfRange { n: u64, lo: u64, hi: u64 },
    #[error("invalid sieve bounds: need 1 <= lo <= hi, got [{lo}, {hi}]")]
    InvalidBounds { lo: u64, hi: u64 },
    #[error("bad dump: {0}")]
    BadDump(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Primality bits plus Möbius values over one segment [lo, hi].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SieveTable {
    lo: u64,
    hi: u64,
    prime_bits: Vec<u64>,
    mobius: Vec<i8>,
}

impl SieveTable {
    pub fn lo(&self) -> u64 {
        self.lo
    }

    pub fn hi(&self) -> u64 {
        self.hi
    }

    pub fn is_prime(&self, n: u64) -> bool {
        let i = self.index(n);
        self.prime_bits[i >> 6] & (1 << (i & 63)) != 0
    }

    pub fn mobius(&self, n: u64) -> i8 {
        self.mobius[self.index(n)]
    }

    fn index(&self, n: u64) -> usize {
        assert!(
            n >= self.lo && n <= self.hi,
            "n = {} outside sieved range [{}, {}]",
            n,
            self.lo,
            self.hi
        );
        (n - self.lo) as usize
    }
}

/// Simple sieve of the base primes up to `limit` inclusive.
pub fn base_primes(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut comp = vec![false; n + 1];
    let mut primes = Vec::new();
    for p in 2..=n {
        if !comp[p] {
            primes.push(p as u64);
            let mut q = p * p;
            while q <= n {
                comp[q] = true;
                q += p;
            }
        }
    }
    primes
}

/// Sieve one segment [lo, hi] given base primes covering √hi.
pub fn sieve_segment(lo: u64, hi: u64, base: &[u64]) -> Result<SieveTable, SieveError> {
    sieve_segment_with_max(lo, hi, base, DEFAULT_SEGMENT_SIZE)
}

pub fn sieve_segment_with_max(
    lo: u64,
    hi: u64,
    base: &[u64],
    max_len: u64,
) -> Result<SieveTable, SieveError> {
    if lo < 1 || lo > hi {
        return Err(SieveError::InvalidBounds { lo, hi });
    }
    let len_u64 = hi - lo + 1;
    if len_u64 > max_len {
        return Err(SieveError::SegmentTooLarge { lo, hi, max: max_len });
    }
    let len = len_u64 as usize;

    let mut prime_bits = vec![u64::MAX; len.div_ceil(64)];
    let mut mobius = vec![1i8; len];
    let mut residue: Vec<u64> = (lo..=hi).collect();

    let clear = |bits: &mut [u64], i: usize| bits[i >> 6] &= !(1 << (i & 63));

    // 0 and 1 are neither prime nor carry the default mu sign path
    if lo == 1 {
        clear(&mut prime_bits, 0);
    }

    for &p in base {
        if p.saturating_mul(p) > hi {
            break;
        }
        // composites: every multiple of p from max(p^2, first in segment)
        let start = std::cmp::max(p * p, lo.div_ceil(p) * p);
        let mut q = start;
        while q <= hi {
            clear(&mut prime_bits, (q - lo) as usize);
            q += p;
        }
        // mu: toggle sign once per prime factor p, divide one p out
        let mut q = lo.div_ceil(p) * p;
        while q <= hi {
            let i = (q - lo) as usize;
            mobius[i] = -mobius[i];
            residue[i] /= p;
            q += p;
        }
        // p^2 | n  =>  mu(n) = 0
        let pp = p * p;
        let mut q = lo.div_ceil(pp) * pp;
        while q <= hi {
            mobius[(q - lo) as usize] = 0;
            q += pp;
        }
    }
    // a residue > 1 is one prime factor above sqrt(hi), occurring once
    // in any square-free n; non-square-free entries are already zeroed
    for i in 0..len {
        if residue[i] > 1 {
            mobius[i] = -mobius[i];
        }
    }
    if lo == 1 {
        mobius[0] = 1;
    }
    // a prime p <= sqrt(hi) inside the segment was never marked composite
    // (marking starts at p^2), so the bitmap is already correct for it
    Ok(SieveTable { lo, hi, prime_bits, mobius })
}

/// Primality and μ over [1, limit], assembled from parallel segments.
pub struct Sieve {
    limit: u64,
    prime_bits: Vec<u64>,
    mobius: Vec<i8>,
}

impl Sieve {
    pub fn up_to(limit: u64) -> Self {
        Self::try_up_to(limit, u64::MAX).expect("unbounded budget cannot fail")
    }

    /// Budgeted build: fails up front if the tables would not fit.
    pub fn try_up_to(limit: u64, mem_budget: u64) -> Result<Self, SieveError> {
        assert!(limit >= 1);
        let needed = limit.div_ceil(64) * 8 + limit + 1;
        if needed > mem_budget {
            return Err(SieveError::BudgetExceeded { needed, budget: mem_budget });
        }
        let base = base_primes(limit.isqrt() + 1);

        // segment bounds aligned to 64 so bitmap splices stay word-aligned
        let seg = DEFAULT_SEGMENT_SIZE;
        let ranges: Vec<(u64, u64)> = (0..)
            .map(|i| (1 + i * seg, std::cmp::min(limit, (i + 1) * seg)))
            .take_while(|(lo, _)| *lo <= limit)
            .collect();
        let tables: Vec<SieveTable> = ranges
            .par_iter()
            .map(|&(lo, hi)| sieve_segment(lo, hi, &base).expect("segment within size"))
            .collect();

        let mut prime_bits = vec![0u64; ((limit + 1) as usize).div_ceil(64)];
        let mut mobius = vec![0i8; (limit + 1) as usize];
        for t in &tables {
            // lo = 1 + i*seg, so (lo - 1) is a multiple of 64 for seg % 64 == 0
            debug_assert_eq!((t.lo - 1) % 64, 0);
            for (j, n) in (t.lo..=t.hi).enumerate() {
                if t.is_prime(n) {
                    prime_bits[(n as usize) >> 6] |= 1 << (n & 63);
                }
                mobius[n as usize] = t.mobius[j];
            }
        }
        Ok(Sieve { limit, prime_bits, mobius })
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn is_prime(&self, n: u64) -> bool {
        assert!(n <= self.limit, "n = {} beyond sieve limit {}", n, self.limit);
        if n < 2 {
            return false;
        }
        self.prime_bits[(n as usize) >> 6] & (1 << (n & 63)) != 0
    }

    pub fn mobius(&self, n: u64) -> i8 {
        assert!(n >= 1 && n <= self.limit, "n = {} beyond sieve limit {}", n, self.limit);
        self.mobius[n as usize]
    }

    /// μ²(n) as 0/1.
    pub fn mu_squared(&self, n: u64) -> u8 {
        (self.mobius(n) != 0) as u8
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        (2..=self.limit).filter(move |&n| self.is_prime(n))
    }

    /// Q(x) = #{n ≤ x : μ²(n) = 1}.
    pub fn squarefree_count(&self, x: u64) -> u64 {
        assert!(x <= self.limit);
        (1..=x).filter(|&n| self.mobius(n) != 0).count() as u64
    }

    /// Q(x) through the identity Σ_{d ≤ √x} μ(d)·⌊x/d²⌋.
    pub fn squarefree_count_identity(&self, x: u64) -> i64 {
        let mut total = 0i64;
        let mut d = 1u64;
        while d * d <= x {
            assert!(d <= self.limit);
            total += self.mobius(d) as i64 * (x / (d * d)) as i64;
            d += 1;
        }
        total
    }
}

/// μ²(n) from the table.
pub fn squarefree_indicator(n: u64, sieve: &Sieve) -> Result<u8, SieveError> {
    if n < 1 || n > sieve.limit() {
        return Err(SieveError::OutOfRange { n, lo: 1, hi: sieve.limit() });
    }
    Ok(sieve.mu_squared(n))
}

/// Slow oracle: μ²(n) as Σ_{d²|n} μ(d) by divisor enumeration, asserted
/// equal to the table value.
pub fn squarefree_indicator_checked(n: u64, sieve: &Sieve) -> Result<u8, SieveError> {
    let fast = squarefree_indicator(n, sieve)?;
    let mut sum = 0i64;
    let mut d = 1u64;
    while d * d <= n {
        if n % (d * d) == 0 {
            sum += sieve.mobius(d) as i64;
        }
        d += 1;
    }
    assert!(
        sum == fast as i64,
        "identity mu^2(n) = sum_{{d^2|n}} mu(d) violated at n = {}: {} vs {}",
        n,
        sum,
        fast
    );
    Ok(fast)
}

/// Von Mangoldt Λ(n): log p when n = p^k, else 0.
pub fn lambda(n: u64, sieve: &Sieve) -> f64 {
    if n < 2 {
        return 0.0;
    }
    if sieve.is_prime(n) {
        return (n as f64).ln();
    }
    // prime powers: test n = r^k for k = 2.. via integer k-th roots
    for k in 2..=n.ilog2() {
        if let Some(r) = int_kth_root(n, k) {
            if sieve.is_prime(r) {
                return (r as f64).ln();
            }
        }
    }
    0.0
}

/// Exact integer k-th root: Some(r) iff r^k == n.
fn int_kth_root(n: u64, k: u32) -> Option<u64> {
    let guess = (n as f64).powf(1.0 / k as f64).round() as u64;
    for r in guess.saturating_sub(1)..=guess + 1 {
        if let Some(p) = r.checked_pow(k) {
            if p == n {
                return Some(r);
            }
        }
    }
    None
}

/// τ_k(n): ordered k-tuple factorizations m₁·…·m_k = n, via the
/// multiplicative formula ∏ C(e_i + k − 1, k − 1).
pub fn tau_k(n: u64, k: u32) -> u64 {
    assert!(n >= 1 && k >= 1);
    let mut out: u128 = 1;
    for (_, e) in factorize(n) {
        out *= binomial(e as u64 + k as u64 - 1, k as u64 - 1);
        assert!(out <= u64::MAX as u128, "tau_k overflow for n = {}, k = {}", n, k);
    }
    out as u64
}

/// Trial-division factorization (p, multiplicity), ascending p.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut push = |p: u64, n: &mut u64| {
        let mut e = 0;
        while *n % p == 0 {
            *n /= p;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
    };
    push(2, &mut n);
    let mut p = 3u64;
    while p * p <= n {
        push(p, &mut n);
        p += 2;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

fn binomial(n: u64, k: u64) -> u128 {
    let k = k.min(n - k.min(n));
    let mut num: u128 = 1;
    for i in 0..k {
        num = num * (n - i) as u128 / (i + 1) as u128;
    }
    num
}

/// Write one table in the documented little-endian dump format.
pub fn dump_table(table: &SieveTable, w: &mut impl Write) -> io::Result<()> {
    w.write_all(DUMP_MAGIC)?;
    w.write_all(&DUMP_VERSION.to_le_bytes())?;
    w.write_all(&table.lo.to_le_bytes())?;
    w.write_all(&table.hi.to_le_bytes())?;
    for word in &table.prime_bits {
        w.write_all(&word.to_le_bytes())?;
    }
    let bytes: Vec<u8> = table.mobius.iter().map(|&b| b as u8).collect();
    w.write_all(&bytes)?;
    Ok(())
}

/// Read a table back; validates magic, version and length.
pub fn load_table(r: &mut impl Read) -> Result<SieveTable, SieveError> {
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != DUMP_MAGIC {
        return Err(SieveError::BadDump("bad magic".into()));
    }
    let mut b4 = [0u8; 4];
    r.read_exact(&mut b4)?;
    if u32::from_le_bytes(b4) != DUMP_VERSION {
        return Err(SieveError::BadDump("unsupported version".into()));
    }
    let mut b8 = [0u8; 8];
    r.read_exact(&mut b8)?;
    let lo = u64::from_le_bytes(b8);
    r.read_exact(&mut b8)?;
    let hi = u64::from_le_bytes(b8);
    if lo < 1 || lo > hi {
        return Err(SieveError::BadDump(format!("bad bounds [{}, {}]", lo, hi)));
    }
    let len = (hi - lo + 1) as usize;
    let mut prime_bits = vec![0u64; len.div_ceil(64)];
    for word in prime_bits.iter_mut() {
        r.read_exact(&mut b8)?;
        *word = u64::from_le_bytes(b8);
    }
    let mut bytes = vec![0u8; len];
    r.read_exact(&mut bytes)?;
    let mobius: Vec<i8> = bytes.iter().map(|&b| b as i8).collect();
    if mobius.iter().any(|&m| !(-1..=1).contains(&m)) {
        return Err(SieveError::BadDump("mobius byte out of {-1,0,1}".into()));
    }
    Ok(SieveTable { lo, hi, prime_bits, mobius })
}
