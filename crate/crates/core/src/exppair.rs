//! Exact-rational exponent-pair calculus.
//!
//! Pairs (κ, λ) live in the classical region 0 ≤ κ ≤ 1/2 ≤ λ ≤ 1 and are
//! generated from the trivial pair (0, 1) by the van der Corput processes
//!
//! ```text
//! A(κ, λ) = (κ/(2κ+2), (κ+λ+1)/(2κ+2))
//! B(κ, λ) = (λ − 1/2, κ + 1/2)
//! ```
//!
//! Words like "BA5BA2BA2B" (digits abbreviate repetition) are applied to
//! the seed right-to-left, innermost first; that convention reproduces
//! BA⁵BA²BA²B(0, 1) = (480/1043, 528/1043).
//!
//! All arithmetic is exact rational; nothing here rounds.

use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ExpPairError {
    #[error("pair ({0}, {1}) outside the region 0 <= kappa <= 1/2 <= lambda <= 1")]
    OutsideRegion(String, String),
    #[error("cannot parse pair word `{0}`: {1}")]
    BadWord(String, String),
}

/// An exponent pair (κ, λ), exact rationals in the classical region.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExponentPair {
    kappa: BigRational,
    lambda: BigRational,
}

fn half() -> BigRational {
    BigRational::new(1.into(), 2.into())
}

impl ExponentPair {
    pub fn new(kappa: BigRational, lambda: BigRational) -> Result<Self, ExpPairError> {
        let p = ExponentPair { kappa, lambda };
        if !p.in_region() {
            return Err(ExpPairError::OutsideRegion(
                p.kappa.to_string(),
                p.lambda.to_string(),
            ));
        }
        Ok(p)
    }

    /// The trivial pair (0, 1), seed of every word.
    pub fn trivial() -> Self {
        ExponentPair { kappa: BigRational::zero(), lambda: BigRational::one() }
    }

    pub fn from_u64(kn: u64, kd: u64, ln: u64, ld: u64) -> Result<Self, ExpPairError> {
        Self::new(
            BigRational::new(kn.into(), kd.into()),
            BigRational::new(ln.into(), ld.into()),
        )
    }

    pub fn kappa(&self) -> &BigRational {
        &self.kappa
    }

    pub fn lambda(&self) -> &BigRational {
        &self.lambda
    }

    pub fn in_region(&self) -> bool {
        self.kappa >= BigRational::zero()
            && self.kappa <= half()
            && self.lambda >= half()
            && self.lambda <= BigRational::one()
    }

    /// A-process: (κ, λ) ↦ (κ/(2κ+2), (κ+λ+1)/(2κ+2)).
    pub fn a_transform(&self) -> Self {
        let den = BigRational::from_integer(2.into()) * &self.kappa
            + BigRational::from_integer(2.into());
        ExponentPair {
            kappa: &self.kappa / &den,
            lambda: (&self.kappa + &self.lambda + BigRational::one()) / &den,
        }
    }

    /// B-process: (κ, λ) ↦ (λ − 1/2, κ + 1/2). An involution.
    pub fn b_transform(&self) -> Self {
        ExponentPair {
            kappa: &self.lambda - half(),
            lambda: &self.kappa + half(),
        }
    }

    pub fn kappa_f64(&self) -> f64 {
        self.kappa.to_f64().unwrap()
    }

    pub fn lambda_f64(&self) -> f64 {
        self.lambda.to_f64().unwrap()
    }
}

impl fmt::Display for ExponentPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.kappa, self.lambda)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Process {
    A,
    B,
}

/// A word over {A, B} with digit-run repetition syntax, e.g. "BA5BA2B".
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairWord {
    symbols: Vec<Process>,
    text: String,
}

impl PairWord {
    pub fn parse(s: &str) -> Result<Self, ExpPairError> {
        let err = |msg: &str| ExpPairError::BadWord(s.to_string(), msg.to_string());
        if s.is_empty() {
            return Err(err("empty word"));
        }
        let mut symbols = Vec::new();
        let mut chars = s.chars().peekable();
        while let Some(ch) = chars.next() {
            let sym = match ch {
                'A' | 'a' => Process::A,
                'B' | 'b' => Process::B,
                _ => return Err(err(&format!("unexpected character `{}`", ch))),
            };
            let mut digits = String::new();
            while let Some(d) = chars.peek().filter(|d| d.is_ascii_digit()) {
                digits.push(*d);
                chars.next();
            }
            let reps: usize = if digits.is_empty() {
                1
            } else {
                let n = digits.parse().map_err(|_| err("repetition count overflow"))?;
                if n == 0 {
                    return Err(err("repetition count must be positive"));
                }
                if n > 10_000 {
                    return Err(err("repetition count too large"));
                }
                n
            };
            symbols.extend(std::iter::repeat(sym).take(reps));
        }
        Ok(PairWord { symbols, text: s.to_string() })
    }

    pub fn from_symbols(symbols: Vec<Process>) -> Self {
        let text = symbols
            .iter()
            .map(|p| match p {
                Process::A => 'A',
                Process::B => 'B',
            })
            .collect();
        PairWord { symbols, text }
    }

    pub fn symbols(&self) -> &[Process] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }
}

impl fmt::Display for PairWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

/// Apply a word to the seed (0, 1), rightmost symbol first.
pub fn eval_word(word: &PairWord) -> ExponentPair {
    let mut p = ExponentPair::trivial();
    for sym in word.symbols.iter().rev() {
        p = match sym {
            Process::A => p.a_transform(),
            Process::B => p.b_transform(),
        };
    }
    p
}

/// The single-sum bound Y^κ X^λ + Y⁻¹ predicted by a pair.
///
/// Y is the derivative-scale parameter (the size of f′ on the range);
/// no derivative hypotheses are validated here, the caller owns those.
pub fn pair_bound(pair: &ExponentPair, y: f64, x: f64) -> f64 {
    assert!(x >= 1.0 && y > 0.0);
    y.powf(pair.kappa_f64()) * x.powf(pair.lambda_f64()) + 1.0 / y
}

/// Objective for the word search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Objective {
    KappaPlusLambda,
    Kappa,
    Lambda,
}

impl Objective {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "kappa+lambda" => Some(Self::KappaPlusLambda),
            "kappa" => Some(Self::Kappa),
            "lambda" => Some(Self::Lambda),
            _ => None,
        }
    }

    pub fn value(&self, p: &ExponentPair) -> BigRational {
        match self {
            Self::KappaPlusLambda => p.kappa() + p.lambda(),
            Self::Kappa => p.kappa().clone(),
            Self::Lambda => p.lambda().clone(),
        }
    }
}

/// Enumerate words up to `max_len` and return the objective minimizer.
///
/// B is an involution, so words containing "BB" are skipped; that prunes
/// the search without losing any reachable pair. Ties go to the shorter,
/// then lexicographically earlier word.
pub fn search_words(max_len: usize, objective: Objective) -> (PairWord, ExponentPair) {
    let mut best_word = PairWord::from_symbols(vec![Process::B]);
    let mut best_pair = eval_word(&best_word);
    let mut best_val = objective.value(&best_pair);
    let mut stack: Vec<(Vec<Process>, ExponentPair)> = vec![(Vec::new(), ExponentPair::trivial())];
    while let Some((word, pair)) = stack.pop() {
        if word.len() >= max_len {
            continue;
        }
        for sym in [Process::A, Process::B] {
            if sym == Process::B && word.last() == Some(&Process::B) {
                continue;
            }
            // word symbols are stored leftmost-first in application order:
            // extending means applying another process to the current pair,
            // i.e. prepending a symbol to the written word
            let next_pair = match sym {
                Process::A => pair.a_transform(),
                Process::B => pair.b_transform(),
            };
            let mut next_word = word.clone();
            next_word.push(sym);
            let val = objective.value(&next_pair);
            let written: Vec<Process> = next_word.iter().rev().copied().collect();
            let candidate = PairWord::from_symbols(written);
            if val < best_val
                || (val == best_val
                    && (candidate.len() < best_word.len()
                        || (candidate.len() == best_word.len()
                            && candidate.text < best_word.text)))
            {
                best_val = val;
                best_pair = next_pair.clone();
                best_word = candidate;
            }
            stack.push((next_word, next_pair));
        }
    }
    (best_word, best_pair)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn a_fixes_trivial_pair() {
        let t = ExponentPair::trivial();
        assert_eq!(t.a_transform(), t);
    }

    #[test]
    fn a_of_half_half() {
        let p = ExponentPair::new(rat(1, 2), rat(1, 2)).unwrap();
        let q = p.a_transform();
        assert_eq!((q.kappa(), q.lambda()), (&rat(1, 6), &rat(2, 3)));
    }

    #[test]
    fn b_examples_and_involution() {
        let t = ExponentPair::trivial();
        let b = t.b_transform();
        assert_eq!((b.kappa(), b.lambda()), (&rat(1, 2), &rat(1, 2)));
        assert_eq!(b.b_transform(), t);
    }

    #[test]
    fn b_involution_on_random_pairs() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1_000 {
            let kd = rng.gen_range(1i64..50);
            let kn = rng.gen_range(0i64..=kd / 2);
            let ld = rng.gen_range(2i64..50);
            let ln = rng.gen_range(ld / 2..=ld);
            let (k, l) = (rat(kn, kd), rat(ln, ld));
            if let Ok(p) = ExponentPair::new(k, l) {
                assert_eq!(p.b_transform().b_transform(), p);
            }
        }
    }

    #[test]
    fn region_preserved_by_random_words() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1_000 {
            let len = rng.gen_range(1usize..=20);
            let mut p = ExponentPair::trivial();
            for _ in 0..len {
                p = if rng.gen_bool(0.5) { p.a_transform() } else { p.b_transform() };
                assert!(p.in_region(), "left region at {}", p);
            }
        }
    }

    #[test]
    fn word_parsing() {
        assert_eq!(PairWord::parse("B").unwrap().symbols(), &[Process::B]);
        assert_eq!(
            PairWord::parse("A2B").unwrap().symbols(),
            &[Process::A, Process::A, Process::B]
        );
        assert_eq!(PairWord::parse("BA5BA2BA2B").unwrap().len(), 13);
        assert!(PairWord::parse("").is_err());
        assert!(PairWord::parse("C").is_err());
        assert!(PairWord::parse("2A").is_err());
        assert!(PairWord::parse("A0").is_err());
    }

    #[test]
    fn eval_word_examples() {
        let b = eval_word(&PairWord::parse("B").unwrap());
        assert_eq!((b.kappa(), b.lambda()), (&rat(1, 2), &rat(1, 2)));
        let a2b = eval_word(&PairWord::parse("A2B").unwrap());
        assert_eq!((a2b.kappa(), a2b.lambda()), (&rat(1, 14), &rat(11, 14)));
    }

    #[test]
    fn golden_word() {
        let p = eval_word(&PairWord::parse("BA5BA2BA2B").unwrap());
        assert_eq!((p.kappa(), p.lambda()), (&rat(480, 1043), &rat(528, 1043)));
    }

    #[test]
    fn golden_word_derived_exponents() {
        let p = eval_word(&PairWord::parse("BA5BA2BA2B").unwrap());
        let two = BigRational::from_integer(2.into());
        let one = BigRational::one();
        let e1 = p.kappa() / (&two * (&one + p.kappa()));
        let e2 = (&one + p.kappa() - p.lambda()) / (&two * (&one + p.kappa()));
        assert_eq!(e1, rat(240, 1523));
        assert_eq!(e2, rat(995, 3046));
    }

    #[test]
    fn eval_word_equals_manual_composition() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(23);
        for _ in 0..200 {
            let len = rng.gen_range(1usize..=12);
            let syms: Vec<Process> = (0..len)
                .map(|_| if rng.gen_bool(0.5) { Process::A } else { Process::B })
                .collect();
            let word = PairWord::from_symbols(syms.clone());
            let via_eval = eval_word(&word);
            let mut manual = ExponentPair::trivial();
            for s in syms.iter().rev() {
                manual = match s {
                    Process::A => manual.a_transform(),
                    Process::B => manual.b_transform(),
                };
            }
            assert_eq!(via_eval, manual);
        }
    }

    #[test]
    fn pair_bound_examples() {
        let trivial = ExponentPair::trivial();
        assert_eq!(pair_bound(&trivial, 2.0, 100.0), 100.0 + 0.5);
        let half = ExponentPair::new(rat(1, 2), rat(1, 2)).unwrap();
        let x = 64.0;
        assert!((pair_bound(&half, x, x) - (x + 1.0 / x)).abs() < 1e-12);
    }

    #[test]
    fn search_matches_exhaustive_enumeration() {
        // the canonicalized search must find the same optimum as plain
        // enumeration of all 2^len words
        let max_len = 8;
        let (_, best) = search_words(max_len, Objective::KappaPlusLambda);
        let best_val = best.kappa() + best.lambda();
        let mut brute = ExponentPair::trivial().kappa() + ExponentPair::trivial().lambda();
        for len in 1..=max_len {
            for mask in 0u32..(1 << len) {
                let mut p = ExponentPair::trivial();
                for i in (0..len).rev() {
                    p = if mask & (1 << i) != 0 { p.a_transform() } else { p.b_transform() };
                }
                let v = p.kappa() + p.lambda();
                if v < brute {
                    brute = v;
                }
            }
        }
        assert_eq!(best_val, brute);
    }
}
