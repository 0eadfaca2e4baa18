//! Number-theoretic analysis of group orders.
//!
//! Two orders are tracked for every `(n, r)`: the closed form `n^r` that the
//! structure theory is usually phrased in, and `(r!)^n`, the size of the group
//! the engine actually builds. Both are exact big integers.

use std::f64::consts::{E, PI};

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::GroupParams;

/// Inputs above this bound are rejected by [`exact_factorial_log2`].
pub const EXACT_FACTORIAL_BOUND: u64 = 1_000_000;

/// The closed-form order `n^r`.
pub fn paper_order(params: GroupParams) -> BigUint {
    num_traits::pow(BigUint::from(params.node_count()), params.pool_count())
}

/// `(r!)^n`, the number of distinct pool-update maps.
pub fn concrete_order(params: GroupParams) -> BigUint {
    num_traits::pow(factorial(params.pool_count() as u64), params.node_count())
}

pub fn factorial(t: u64) -> BigUint {
    (2..=t).map(BigUint::from).product::<BigUint>().max(BigUint::one())
}

/// Deterministic trial-division primality test.
pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    if p < 4 {
        return true;
    }
    if p % 2 == 0 {
        return false;
    }
    let mut d = 3u64;
    while d.checked_mul(d).is_some_and(|sq| sq <= p) {
        if p % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// A positive integer together with its canonical prime factorization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderFactorization {
    order: BigUint,
    factors: Vec<(u64, u64)>,
}

impl OrderFactorization {
    /// Builds a factorization from `(prime, exponent)` pairs, checking that
    /// primes are prime and strictly increasing and that exponents are
    /// positive.
    pub fn from_factors(factors: Vec<(u64, u64)>) -> Result<Self> {
        let mut order = BigUint::one();
        let mut last = 1u64;
        for &(p, e) in &factors {
            if !is_prime(p) {
                return Err(Error::NotPrime(p));
            }
            if p <= last {
                return Err(Error::InvalidParams(format!("prime {p} out of order")));
            }
            if e == 0 {
                return Err(Error::InvalidParams(format!("zero exponent for {p}")));
            }
            order *= big_pow(p, e);
            last = p;
        }
        Ok(Self { order, factors })
    }

    pub fn order(&self) -> &BigUint {
        &self.order
    }

    pub fn factors(&self) -> &[(u64, u64)] {
        &self.factors
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }

    pub fn exponent_of(&self, prime: u64) -> u64 {
        self.factors
            .iter()
            .find(|&&(p, _)| p == prime)
            .map_or(0, |&(_, e)| e)
    }

    pub fn smallest_prime(&self) -> Option<u64> {
        self.factors.first().map(|&(p, _)| p)
    }

    /// Human-readable product such as `2^2 · 5^2`; `1` for the empty product.
    pub fn to_display_string(&self) -> String {
        if self.factors.is_empty() {
            return "1".to_string();
        }
        self.factors
            .iter()
            .map(|&(p, e)| if e == 1 { p.to_string() } else { format!("{p}^{e}") })
            .collect::<Vec<_>>()
            .join(" · ")
    }
}

fn big_pow(p: u64, e: u64) -> BigUint {
    let exp = usize::try_from(e).expect("exponent fits in usize");
    num_traits::pow(BigUint::from(p), exp)
}

/// Canonical prime factorization by trial division.
pub fn factorize(order: &BigUint) -> Result<OrderFactorization> {
    if order.is_zero() {
        return Err(Error::NonPositive);
    }
    if let Some(small) = order.to_u64() {
        return Ok(factorize_u64(small));
    }
    let mut rest = order.clone();
    let mut factors = Vec::new();
    let mut d = 2u64;
    loop {
        let divisor = BigUint::from(d);
        if &divisor * &divisor > rest {
            break;
        }
        let mut e = 0;
        loop {
            let (q, r) = rest.div_rem(&divisor);
            if !r.is_zero() {
                break;
            }
            rest = q;
            e += 1;
        }
        if e > 0 {
            factors.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if !rest.is_one() {
        let p = rest
            .to_u64()
            .expect("remaining prime cofactor exceeds u64; order is beyond desk scale");
        factors.push((p, 1));
    }
    Ok(OrderFactorization {
        order: order.clone(),
        factors,
    })
}

fn factorize_u64(order: u64) -> OrderFactorization {
    let mut rest = order;
    let mut factors = Vec::new();
    let mut d = 2u64;
    while d.checked_mul(d).is_some_and(|sq| sq <= rest) {
        let mut e = 0;
        while rest % d == 0 {
            rest /= d;
            e += 1;
        }
        if e > 0 {
            factors.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if rest > 1 {
        factors.push((rest, 1));
    }
    OrderFactorization {
        order: BigUint::from(order),
        factors,
    }
}

/// Factorization of `n^r`: the factorization of `n` with every exponent
/// scaled by `r`.
pub fn paper_order_factorization(params: GroupParams) -> OrderFactorization {
    let r = params.pool_count() as u64;
    let base = factorize_u64(params.node_count() as u64);
    let factors = base.factors.iter().map(|&(p, e)| (p, e * r)).collect();
    OrderFactorization {
        order: paper_order(params),
        factors,
    }
}

/// Factorization of `(r!)^n` via Legendre's formula.
pub fn concrete_order_factorization(params: GroupParams) -> OrderFactorization {
    let r = params.pool_count() as u64;
    let n = params.node_count() as u64;
    let factors = (2..=r)
        .filter(|&p| is_prime(p))
        .map(|p| (p, legendre_exponent(r, p) * n))
        .collect();
    OrderFactorization {
        order: concrete_order(params),
        factors,
    }
}

/// Exponent of the prime `p` in `t!`.
pub fn legendre_exponent(t: u64, p: u64) -> u64 {
    let mut e = 0;
    let mut q = t / p;
    while q > 0 {
        e += q;
        q /= p;
    }
    e
}

/// `order = p_part · cofactor` with `p_part` the full power of `prime`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SylowForm {
    pub prime: u64,
    pub p_part: BigUint,
    pub cofactor: BigUint,
}

pub fn sylow_form(f: &OrderFactorization, prime: u64) -> Result<SylowForm> {
    let e = f.exponent_of(prime);
    if e == 0 {
        return Err(Error::PrimeNotPresent {
            prime,
            order: f.order.to_string(),
        });
    }
    let p_part = big_pow(prime, e);
    let cofactor = &f.order / &p_part;
    Ok(SylowForm {
        prime,
        p_part,
        cofactor,
    })
}

/// Number of distinct primes, each of which guarantees a nontrivial Sylow
/// subgroup.
pub fn min_subgroup_count(f: &OrderFactorization) -> usize {
    f.factors.len()
}

/// Number of cosets of a subgroup of the given order.
pub fn coset_count(group_order: &BigUint, subgroup_order: &BigUint) -> Result<BigUint> {
    if subgroup_order.is_zero() || !(group_order % subgroup_order).is_zero() {
        return Err(Error::NotADivisor {
            group: group_order.to_string(),
            subgroup: subgroup_order.to_string(),
        });
    }
    Ok(group_order / subgroup_order)
}

/// Outcome of the smallest-prime-index normality test.
///
/// The test is one-directional: failing it says nothing about normality.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NormalityVerdict {
    NormalByCriterion,
    CriterionInapplicable,
}

/// A subgroup whose index is the smallest prime dividing the group order is
/// normal.
pub fn normal_by_index(group_order: &BigUint, subgroup_order: &BigUint) -> Result<NormalityVerdict> {
    let index = coset_count(group_order, subgroup_order)?;
    let smallest = factorize(group_order)?.smallest_prime();
    Ok(match smallest {
        Some(p) if index == BigUint::from(p) => NormalityVerdict::NormalByCriterion,
        _ => NormalityVerdict::CriterionInapplicable,
    })
}

/// Primes for which an element of exactly that order must exist.
pub fn cauchy_primes(f: &OrderFactorization) -> Vec<u64> {
    f.primes().collect()
}

/// `log2` of a big integer, accurate to double precision at any size.
pub fn log2_big(t: &BigUint) -> f64 {
    let bits = t.bits();
    if bits <= 1000 {
        return t.to_f64().unwrap_or(f64::INFINITY).log2();
    }
    let shift = bits - 64;
    let top = (t >> shift).to_f64().unwrap();
    top.log2() + shift as f64
}

/// `log2` of the Stirling estimate `√(2πt)·(t/e)^t`, evaluated in the log
/// domain.
///
/// Returns `+∞` only when `t` itself exceeds the `f64` range.
pub fn stirling_log2(t: &BigUint) -> Result<f64> {
    if t.is_zero() {
        return Err(Error::NonPositive);
    }
    let lt = log2_big(t);
    let tf = t.to_f64().unwrap_or(f64::INFINITY);
    Ok(0.5 * (2.0 * PI).log2() + 0.5 * lt + tf * (lt - E.log2()))
}

/// `log2(t!)` by summing `log2 k` for `k ≤ t`.
pub fn exact_factorial_log2(t: u64) -> Result<f64> {
    if t > EXACT_FACTORIAL_BOUND {
        return Err(Error::TooLarge {
            value: t,
            bound: EXACT_FACTORIAL_BOUND,
        });
    }
    // Neumaier summation keeps the error far below 1e-6 relative.
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for k in 2..=t {
        let x = (k as f64).log2();
        let s = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - s) + x;
        } else {
            comp += (x - s) + sum;
        }
        sum = s;
    }
    Ok(sum + comp)
}

/// Everything the `analyze` report carries for one `(n, r)`.
#[derive(Debug, Clone, Serialize)]
pub struct AnalysisReport {
    pub n: usize,
    pub r: usize,
    #[serde(serialize_with = "ser_big")]
    pub paper_order: BigUint,
    #[serde(serialize_with = "ser_big")]
    pub concrete_order: BigUint,
    pub factors: Vec<(u64, u64)>,
    pub sylow: Vec<SylowEntry>,
    pub cauchy_primes: Vec<u64>,
    pub stirling_log2_of_paper_order_factorial: f64,
    pub exact_log2_of_paper_order_factorial: Option<f64>,
    pub exceeds_2_512: bool,
    pub min_subgroup_count: usize,
    pub concrete_factors: Vec<(u64, u64)>,
    pub concrete_sylow: Vec<SylowEntry>,
    pub concrete_cauchy_primes: Vec<u64>,
    pub stirling_log2_of_concrete_order_factorial: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SylowEntry {
    pub p: u64,
    #[serde(serialize_with = "ser_big")]
    pub p_part: BigUint,
    #[serde(serialize_with = "ser_big")]
    pub cofactor: BigUint,
}

impl From<SylowForm> for SylowEntry {
    fn from(s: SylowForm) -> Self {
        SylowEntry {
            p: s.prime,
            p_part: s.p_part,
            cofactor: s.cofactor,
        }
    }
}

fn ser_big<S: serde::Serializer>(v: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

fn sylow_entries(f: &OrderFactorization) -> Vec<SylowEntry> {
    f.primes()
        .map(|p| sylow_form(f, p).expect("prime taken from factorization").into())
        .collect()
}

/// Runs every order-level analysis for `params`.
pub fn analyze(params: GroupParams) -> AnalysisReport {
    let paper = paper_order_factorization(params);
    let concrete = concrete_order_factorization(params);
    let stirling_paper = stirling_log2(paper.order()).expect("orders are positive");
    let exact_paper = paper
        .order()
        .to_u64()
        .and_then(|t| exact_factorial_log2(t).ok());
    AnalysisReport {
        n: params.node_count(),
        r: params.pool_count(),
        paper_order: paper.order().clone(),
        concrete_order: concrete.order().clone(),
        factors: paper.factors().to_vec(),
        sylow: sylow_entries(&paper),
        cauchy_primes: cauchy_primes(&paper),
        stirling_log2_of_paper_order_factorial: stirling_paper,
        exact_log2_of_paper_order_factorial: exact_paper,
        exceeds_2_512: stirling_paper > 512.0,
        min_subgroup_count: min_subgroup_count(&paper),
        concrete_factors: concrete.factors().to_vec(),
        concrete_sylow: sylow_entries(&concrete),
        concrete_cauchy_primes: cauchy_primes(&concrete),
        stirling_log2_of_concrete_order_factorial: stirling_log2(concrete.order()).expect("orders are positive"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: u64) -> BigUint {
        BigUint::from(v)
    }

    fn params(n: usize, r: usize) -> GroupParams {
        GroupParams::new(n, r).unwrap()
    }

    #[test]
    fn orders() {
        assert_eq!(paper_order(params(10, 2)), big(100));
        assert_eq!(paper_order(params(1, 5)), big(1));
        assert_eq!(paper_order(params(12, 2)), big(144));
        assert_eq!(concrete_order(params(2, 2)), big(4));
        assert_eq!(concrete_order(params(2, 3)), big(36));
        assert_eq!(concrete_order(params(7, 1)), big(1));
    }

    #[test]
    fn factorize_examples() {
        assert_eq!(factorize(&big(100)).unwrap().factors(), &[(2, 2), (5, 2)]);
        assert!(factorize(&big(1)).unwrap().factors().is_empty());
        assert_eq!(factorize(&big(144)).unwrap().factors(), &[(2, 4), (3, 2)]);
        assert_eq!(factorize(&big(0)), Err(Error::NonPositive));
        let large = big(u64::MAX) * big(6);
        let f = factorize(&large).unwrap();
        assert_eq!(f.factors()[0], (2, 1));
        assert_eq!(f.factors()[1], (3, 2));
    }

    #[test]
    fn structural_factorizations_match_trial_division() {
        for n in 1..=12 {
            for r in 1..=6 {
                let p = params(n, r);
                assert_eq!(paper_order_factorization(p), factorize(&paper_order(p)).unwrap());
                assert_eq!(concrete_order_factorization(p), factorize(&concrete_order(p)).unwrap());
            }
        }
    }

    #[test]
    fn sylow_form_examples() {
        let f = factorize(&big(100)).unwrap();
        let s2 = sylow_form(&f, 2).unwrap();
        assert_eq!((s2.p_part, s2.cofactor), (big(4), big(25)));
        let s5 = sylow_form(&f, 5).unwrap();
        assert_eq!((s5.p_part, s5.cofactor), (big(25), big(4)));
        let s = sylow_form(&factorize(&big(8)).unwrap(), 2).unwrap();
        assert_eq!((s.p_part, s.cofactor), (big(8), big(1)));
        assert!(matches!(sylow_form(&f, 3), Err(Error::PrimeNotPresent { .. })));
    }

    #[test]
    fn counting_helpers() {
        assert_eq!(min_subgroup_count(&factorize(&big(100)).unwrap()), 2);
        assert_eq!(min_subgroup_count(&factorize(&big(1)).unwrap()), 0);
        assert_eq!(min_subgroup_count(&factorize(&big(144)).unwrap()), 2);
        assert_eq!(cauchy_primes(&factorize(&big(100)).unwrap()), vec![2, 5]);
        assert!(cauchy_primes(&factorize(&big(1)).unwrap()).is_empty());
        assert_eq!(cauchy_primes(&factorize(&big(36)).unwrap()), vec![2, 3]);
    }

    #[test]
    fn coset_and_normality() {
        assert_eq!(coset_count(&big(100), &big(25)).unwrap(), big(4));
        assert_eq!(coset_count(&big(36), &big(36)).unwrap(), big(1));
        assert!(matches!(coset_count(&big(8), &big(3)), Err(Error::NotADivisor { .. })));
        assert_eq!(normal_by_index(&big(100), &big(50)).unwrap(), NormalityVerdict::NormalByCriterion);
        assert_eq!(normal_by_index(&big(6), &big(3)).unwrap(), NormalityVerdict::NormalByCriterion);
        assert_eq!(normal_by_index(&big(36), &big(4)).unwrap(), NormalityVerdict::CriterionInapplicable);
        assert_eq!(normal_by_index(&big(1), &big(1)).unwrap(), NormalityVerdict::CriterionInapplicable);
        assert!(normal_by_index(&big(8), &big(3)).is_err());
    }

    #[test]
    fn from_factors_validates() {
        assert_eq!(OrderFactorization::from_factors(vec![(2, 2), (5, 2)]).unwrap().order(), &big(100));
        assert!(OrderFactorization::from_factors(vec![(4, 1)]).is_err());
        assert!(OrderFactorization::from_factors(vec![(5, 1), (2, 1)]).is_err());
        assert!(OrderFactorization::from_factors(vec![(2, 0)]).is_err());
    }

    #[test]
    fn stirling_values() {
        let s100 = stirling_log2(&big(100)).unwrap();
        assert!((524.75..=524.78).contains(&s100), "{s100}");
        assert!(s100 > 512.0);
        let s1 = stirling_log2(&big(1)).unwrap();
        assert!((s1 - (-0.117)).abs() < 1e-3, "{s1}");
        assert!(stirling_log2(&big(0)).is_err());
        // log2 of 10^400 without overflow
        let huge = num_traits::pow(big(10), 400);
        assert!(stirling_log2(&huge).unwrap().is_infinite());
        assert!((log2_big(&huge) - 400.0 * 10f64.log2()).abs() < 1e-9);
    }

    #[test]
    fn exact_factorial_values() {
        assert_eq!(exact_factorial_log2(1).unwrap(), 0.0);
        assert!((exact_factorial_log2(10).unwrap() - 3628800f64.log2()).abs() < 1e-12);
        assert!(matches!(exact_factorial_log2(EXACT_FACTORIAL_BOUND + 1), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn analysis_walkthrough() {
        let report = analyze(params(10, 2));
        assert_eq!(report.paper_order, big(100));
        assert_eq!(report.factors, vec![(2, 2), (5, 2)]);
        assert_eq!(report.cauchy_primes, vec![2, 5]);
        assert!(report.exceeds_2_512);
        let json = serde_json::to_string(&report).unwrap();
        assert!(json.starts_with(r#"{"n":10,"r":2,"paper_order":"100","concrete_order":"1024","factors":[[2,2],[5,2]]"#), "{json}");
    }
}
