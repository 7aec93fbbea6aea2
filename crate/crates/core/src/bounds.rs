//! Right-hand sides of the monogamy inequalities and their preconditions.
//!
//! Concurrence and CREN bounds live in the `β ≥ 4` regime with
//! `h = 2^{β/2} − 1`; EoF bounds live in `β ≥ 2√2` with `t = β/√2` and
//! `h = 2^t − 1`. Powers follow the `0^0 = 1` convention (see [`pow`]).

use std::f64::consts::SQRT_2;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::g_func;

/// Slack for ordering and regime comparisons.
pub const ORDER_SLACK: f64 = 1e-12;
pub const CONCURRENCE_BETA_MIN: f64 = 4.0;
pub const EOF_BETA_MIN: f64 = 2.0 * SQRT_2;

/// `x^e` with `x^0 = 1` for every `x`, including `0`.
pub fn pow(x: f64, e: f64) -> f64 {
    if e.abs() < 1e-12 {
        1.0
    } else {
        x.powf(e)
    }
}

pub fn h_factor(beta: f64) -> f64 {
    2f64.powf(beta / 2.0) - 1.0
}

pub fn t_param(beta: f64) -> f64 {
    beta / SQRT_2
}

/// `2^t − 1` with `t = β/√2`.
pub fn h_factor_eof(beta: f64) -> f64 {
    2f64.powf(t_param(beta)) - 1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BoundId {
    #[serde(rename = "zhu")]
    Zhu,
    #[serde(rename = "zhu-eof")]
    ZhuEof,
    #[serde(rename = "jin")]
    Jin,
    #[serde(rename = "jzsz")]
    Jzsz,
    #[serde(rename = "jzsz-eof")]
    JzszEof,
    #[serde(rename = "thm1")]
    Thm1,
    #[serde(rename = "thm2")]
    Thm2,
    #[serde(rename = "thm3")]
    Thm3,
    #[serde(rename = "thm4")]
    Thm4,
    #[serde(rename = "thm5")]
    Thm5,
}

impl BoundId {
    pub const ALL: [BoundId; 10] = [
        BoundId::Zhu,
        BoundId::ZhuEof,
        BoundId::Jin,
        BoundId::Jzsz,
        BoundId::JzszEof,
        BoundId::Thm1,
        BoundId::Thm2,
        BoundId::Thm3,
        BoundId::Thm4,
        BoundId::Thm5,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            BoundId::Zhu => "zhu",
            BoundId::ZhuEof => "zhu-eof",
            BoundId::Jin => "jin",
            BoundId::Jzsz => "jzsz",
            BoundId::JzszEof => "jzsz-eof",
            BoundId::Thm1 => "thm1",
            BoundId::Thm2 => "thm2",
            BoundId::Thm3 => "thm3",
            BoundId::Thm4 => "thm4",
            BoundId::Thm5 => "thm5",
        }
    }

    /// Smallest β for which the bound is stated.
    pub fn beta_min(self) -> f64 {
        match self {
            BoundId::Zhu | BoundId::Jin => 2.0,
            BoundId::ZhuEof => SQRT_2,
            BoundId::JzszEof | BoundId::Thm3 => EOF_BETA_MIN,
            _ => CONCURRENCE_BETA_MIN,
        }
    }
}

impl fmt::Display for BoundId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BoundId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase();
        if key == "lemma2" {
            return Ok(BoundId::Thm1);
        }
        BoundId::ALL
            .into_iter()
            .find(|b| b.as_str() == key)
            .ok_or_else(|| Error::UnknownBound(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailValue {
    pub value: f64,
    /// False when the value is a numerical roof estimate.
    pub exact: bool,
}

impl TailValue {
    pub fn exact(value: f64) -> Self {
        TailValue { value, exact: true }
    }

    pub fn estimated(value: f64) -> Self {
        TailValue { value, exact: false }
    }
}

/// Pairwise values `X_{AB_i}` (i = 1..N−1) and tails `X_{A|B_{i+1}⋯B_{N−1}}`
/// (i = 1..N−2), stored zero-based.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundInputs {
    pub beta: f64,
    pub pairs: Vec<f64>,
    pub tails: Vec<TailValue>,
    pub m_split: Option<usize>,
}

impl BoundInputs {
    pub fn new(beta: f64, pairs: Vec<f64>, tails: Vec<TailValue>) -> Self {
        BoundInputs { beta, pairs, tails, m_split: None }
    }

    /// Party count `N`.
    pub fn n_parties(&self) -> usize {
        self.pairs.len() + 1
    }

    pub fn tail_values(&self) -> Vec<f64> {
        self.tails.iter().map(|t| t.value).collect()
    }

    pub fn all_tails_exact(&self) -> bool {
        self.tails.iter().all(|t| t.exact)
    }

    fn validate(&self, bound: BoundId, n_min: usize) -> Result<()> {
        check_beta(bound, self.beta)?;
        if self.pairs.len() < 2 || self.tails.len() + 1 != self.pairs.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} pair values need {} tails, got {}",
                self.pairs.len(),
                self.pairs.len().saturating_sub(1),
                self.tails.len()
            )));
        }
        for &v in self.pairs.iter().chain(self.tails.iter().map(|t| &t.value)) {
            check_nonneg(v)?;
        }
        if self.n_parties() < n_min {
            return Err(Error::InvalidSplit { m: self.m_split.unwrap_or(0), n: self.n_parties() });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TermRecord {
    /// One-based pair index.
    pub index: usize,
    pub base: f64,
    pub correction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundBreakdown {
    pub bound: BoundId,
    pub rhs_total: f64,
    pub terms: Vec<TermRecord>,
}

impl BoundBreakdown {
    fn from_terms(bound: BoundId, terms: Vec<TermRecord>) -> Self {
        let rhs_total = terms.iter().map(|t| t.base + t.correction).sum();
        BoundBreakdown { bound, rhs_total, terms }
    }
}

fn check_beta(bound: BoundId, beta: f64) -> Result<()> {
    let min = bound.beta_min();
    if !beta.is_finite() || beta < min - ORDER_SLACK {
        return Err(Error::BetaOutOfRegime { bound: bound.as_str(), beta, min });
    }
    Ok(())
}

fn check_nonneg(v: f64) -> Result<()> {
    if !v.is_finite() || v < 0.0 {
        return Err(Error::InvalidParameter(format!("measure value {v}")));
    }
    Ok(())
}

fn check_ge(bound: &'static str, hi: f64, lo: f64, index: usize) -> Result<()> {
    if hi < lo - ORDER_SLACK {
        return Err(Error::PreconditionViolated { bound, indices: vec![index] });
    }
    Ok(())
}

/// `(1+x)^t` and the three successively weaker lower bounds.
pub fn lemma1_chain(x: f64, t: f64) -> Result<(f64, f64, f64, f64)> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::Domain { value: x, domain: "x in [0, 1]" });
    }
    if !(t >= 2.0 && t.is_finite()) {
        return Err(Error::Domain { value: t, domain: "t >= 2" });
    }
    let two_t = 2f64.powf(t);
    let xt = pow(x, t);
    let lin = t / 2.0;
    let quad = t * (t - 1.0) / 2.0;
    let lhs = (1.0 + x).powf(t);
    let rhs1 = 1.0 + lin * x + quad * x * x + (two_t - lin - quad - 1.0) * xt;
    let rhs2 = 1.0 + lin * x + (two_t - lin - 1.0) * xt;
    let rhs3 = 1.0 + (two_t - 1.0) * xt;
    Ok((lhs, rhs1, rhs2, rhs3))
}

/// `(β/4)b²(a^{β−2} − b^{β−2}) + (β(β−2)/8)b⁴(a^{β−4} − b^{β−4})`
fn correction(a: f64, b: f64, beta: f64) -> f64 {
    beta / 4.0 * b * b * (pow(a, beta - 2.0) - pow(b, beta - 2.0))
        + beta * (beta - 2.0) / 8.0 * b.powi(4) * (pow(a, beta - 4.0) - pow(b, beta - 4.0))
}

/// Correction for a pair that dominates its tail.
pub fn p_term(c_pair: f64, c_tail: f64, beta: f64) -> Result<f64> {
    check_beta(BoundId::Thm1, beta)?;
    check_nonneg(c_pair)?;
    check_nonneg(c_tail)?;
    check_ge("P", c_pair, c_tail, 0)?;
    Ok(correction(c_pair, c_tail, beta))
}

/// Correction for a tail that dominates its pair.
pub fn p1_term(c_pair: f64, c_tail: f64, beta: f64) -> Result<f64> {
    check_beta(BoundId::Thm2, beta)?;
    check_nonneg(c_pair)?;
    check_nonneg(c_tail)?;
    check_ge("P1", c_tail, c_pair, 0)?;
    Ok(correction(c_tail, c_pair, beta))
}

/// `C_AB^β + h·C_AC^β + P(C_AB, C_AC)`, the three-party case of the
/// fully ordered concurrence bound.
pub fn rhs_lemma2_concurrence(c_ab: f64, c_ac: f64, beta: f64) -> Result<BoundBreakdown> {
    rhs_concurrence_thm1(&BoundInputs::new(beta, vec![c_ab, c_ac], vec![TailValue::exact(c_ac)]))
}

fn fully_ordered_rhs(inputs: &BoundInputs, bound: BoundId, h: f64, corr: impl Fn(usize) -> f64) -> BoundBreakdown {
    let n = inputs.n_parties();
    let beta = inputs.beta;
    let mut terms = Vec::with_capacity(n - 1);
    let mut w = 1.0;
    for i in 0..n - 2 {
        terms.push(TermRecord {
            index: i + 1,
            base: w * pow(inputs.pairs[i], beta),
            correction: w * corr(i),
        });
        w *= h;
    }
    terms.push(TermRecord { index: n - 1, base: w * pow(inputs.pairs[n - 2], beta), correction: 0.0 });
    BoundBreakdown::from_terms(bound, terms)
}

fn ordering_failures(pairs: &[f64], tails: &[f64], range: std::ops::Range<usize>, pair_dominates: bool) -> Vec<usize> {
    range
        .filter(|&i| {
            if pair_dominates {
                pairs[i] < tails[i] - ORDER_SLACK
            } else {
                pairs[i] > tails[i] + ORDER_SLACK
            }
        })
        .map(|i| i + 1)
        .collect()
}

fn fully_ordered_pc(inputs: &BoundInputs, bound: BoundId) -> Result<BoundBreakdown> {
    inputs.validate(bound, 3)?;
    let tails = inputs.tail_values();
    let bad = ordering_failures(&inputs.pairs, &tails, 0..tails.len(), true);
    if !bad.is_empty() {
        return Err(Error::PreconditionViolated { bound: bound.as_str(), indices: bad });
    }
    let beta = inputs.beta;
    Ok(fully_ordered_rhs(inputs, bound, h_factor(beta), |i| {
        correction(inputs.pairs[i], tails[i], beta)
    }))
}

/// Fully ordered concurrence bound: `X_{AB_i} ≥ X_{A|B_{i+1}⋯}` for every `i ≤ N−2`.
pub fn rhs_concurrence_thm1(inputs: &BoundInputs) -> Result<BoundBreakdown> {
    fully_ordered_pc(inputs, BoundId::Thm1)
}

fn split_pc(inputs: &BoundInputs, bound: BoundId) -> Result<BoundBreakdown> {
    inputs.validate(bound, 4)?;
    let n = inputs.n_parties();
    let m = inputs
        .m_split
        .ok_or(Error::InvalidSplit { m: 0, n })?;
    if m < 1 || m > n - 3 {
        return Err(Error::InvalidSplit { m, n });
    }
    let tails = inputs.tail_values();
    let mut bad = ordering_failures(&inputs.pairs, &tails, 0..m, true);
    bad.extend(ordering_failures(&inputs.pairs, &tails, m..n - 2, false));
    if !bad.is_empty() {
        return Err(Error::PreconditionViolated { bound: bound.as_str(), indices: bad });
    }
    let beta = inputs.beta;
    let h = h_factor(beta);
    let mut terms = Vec::with_capacity(n - 1);
    let mut w = 1.0;
    for i in 0..m {
        terms.push(TermRecord {
            index: i + 1,
            base: w * pow(inputs.pairs[i], beta),
            correction: w * correction(inputs.pairs[i], tails[i], beta),
        });
        w *= h;
    }
    let hm = h.powi(m as i32);
    for j in m..n - 2 {
        terms.push(TermRecord {
            index: j + 1,
            base: hm * h * pow(inputs.pairs[j], beta),
            correction: hm * correction(tails[j], inputs.pairs[j], beta),
        });
    }
    terms.push(TermRecord { index: n - 1, base: hm * pow(inputs.pairs[n - 2], beta), correction: 0.0 });
    Ok(BoundBreakdown::from_terms(bound, terms))
}

/// Split-ordered concurrence bound: pairs dominate tails for `i ≤ m`, tails
/// dominate pairs for `m < j ≤ N−2`.
pub fn rhs_concurrence_thm2(inputs: &BoundInputs) -> Result<BoundBreakdown> {
    split_pc(inputs, BoundId::Thm2)
}

/// EoF correction: `(t/2)(Σ E_k^{√2})(E_i^{β−√2} − T^{β−√2}) + ((t²−t)/2)(Σ E_k^{2√2})(E_i^{β−2√2} − T^{β−2√2})`.
pub fn q_term(e_pairs_after_i: &[f64], e_pair_i: f64, e_tail_i: f64, beta: f64) -> Result<f64> {
    check_beta(BoundId::Thm3, beta)?;
    for &v in e_pairs_after_i.iter().chain([&e_pair_i, &e_tail_i]) {
        check_nonneg(v)?;
    }
    let t = t_param(beta);
    let s1: f64 = e_pairs_after_i.iter().map(|&e| e.powf(SQRT_2)).sum();
    let s2: f64 = e_pairs_after_i.iter().map(|&e| e.powf(2.0 * SQRT_2)).sum();
    let d1 = pow(e_pair_i, beta - SQRT_2) - pow(e_tail_i, beta - SQRT_2);
    let d2 = pow(e_pair_i, beta - 2.0 * SQRT_2) - pow(e_tail_i, beta - 2.0 * SQRT_2);
    Ok(t / 2.0 * s1 * d1 + (t * t - t) / 2.0 * s2 * d2)
}

/// Fully ordered EoF bound. The ordering hypothesis is on the concurrences,
/// which the caller supplies as `concurrence_ordered`.
pub fn rhs_eof_thm3(inputs: &BoundInputs, concurrence_ordered: bool) -> Result<BoundBreakdown> {
    inputs.validate(BoundId::Thm3, 3)?;
    if !concurrence_ordered {
        return Err(Error::PreconditionViolated { bound: "thm3", indices: Vec::new() });
    }
    let beta = inputs.beta;
    let tails = inputs.tail_values();
    let mut q = Vec::with_capacity(tails.len());
    for i in 0..tails.len() {
        q.push(q_term(&inputs.pairs[i + 1..], inputs.pairs[i], tails[i], beta)?);
    }
    Ok(fully_ordered_rhs(inputs, BoundId::Thm3, h_factor_eof(beta), |i| q[i]))
}

/// Split-ordered CREN bound; same form as [`rhs_concurrence_thm2`].
pub fn rhs_cren_thm4(inputs: &BoundInputs) -> Result<BoundBreakdown> {
    split_pc(inputs, BoundId::Thm4)
}

/// Fully ordered CREN bound; same form as [`rhs_concurrence_thm1`].
pub fn rhs_cren_thm5(inputs: &BoundInputs) -> Result<BoundBreakdown> {
    fully_ordered_pc(inputs, BoundId::Thm5)
}

fn power_sum(values: &[f64], beta: f64) -> Result<f64> {
    let mut s = 0.0;
    for &v in values {
        check_nonneg(v)?;
        s += pow(v, beta);
    }
    Ok(s)
}

/// `Σ X_{AB_i}^β`, for concurrence with `β ≥ 2`.
pub fn rhs_zhu(pair_values: &[f64], beta: f64) -> Result<f64> {
    check_beta(BoundId::Zhu, beta)?;
    power_sum(pair_values, beta)
}

/// `Σ E_{AB_i}^β`, for EoF with `β ≥ √2`.
pub fn rhs_zhu_eof(pair_values: &[f64], beta: f64) -> Result<f64> {
    check_beta(BoundId::ZhuEof, beta)?;
    power_sum(pair_values, beta)
}

/// `Σ_{i≤m} h^{i−1}c_i^β + h^{m+1} Σ_{m<j≤N−2} c_j^β + h^m c_{N−1}^β`.
pub fn rhs_jin(pair_values: &[f64], beta: f64, m: usize) -> Result<f64> {
    check_beta(BoundId::Jin, beta)?;
    let n = pair_values.len() + 1;
    if n < 4 || m < 1 || m > n - 3 {
        return Err(Error::InvalidSplit { m, n });
    }
    for &v in pair_values {
        check_nonneg(v)?;
    }
    let h = h_factor(beta);
    let mut s = 0.0;
    for (i, &c) in pair_values.iter().enumerate() {
        let e = if i < m {
            i
        } else if i < n - 2 {
            m + 1
        } else {
            m
        };
        s += h.powi(e as i32) * pow(c, beta);
    }
    Ok(s)
}

/// `c_ab^β + h·c_ac^β + (β/4)c_ac²(c_ab^{β−2} − c_ac^{β−2})`
pub fn rhs_jzsz_concurrence(c_ab: f64, c_ac: f64, beta: f64) -> Result<f64> {
    check_beta(BoundId::Jzsz, beta)?;
    check_nonneg(c_ab)?;
    check_nonneg(c_ac)?;
    check_ge("jzsz", c_ab, c_ac, 1)?;
    Ok(pow(c_ab, beta)
        + h_factor(beta) * pow(c_ac, beta)
        + beta / 4.0 * c_ac * c_ac * (pow(c_ab, beta - 2.0) - pow(c_ac, beta - 2.0)))
}

/// `e_ab^β + h·e_ac^β + (β/(2√2))e_ac^{√2}(e_ab^{β−√2} − e_ac^{β−√2})` with `h = 2^t − 1`.
pub fn rhs_jzsz_eof(e_ab: f64, e_ac: f64, beta: f64) -> Result<f64> {
    check_beta(BoundId::JzszEof, beta)?;
    check_nonneg(e_ab)?;
    check_nonneg(e_ac)?;
    Ok(pow(e_ab, beta)
        + h_factor_eof(beta) * pow(e_ac, beta)
        + beta / (2.0 * SQRT_2) * e_ac.powf(SQRT_2) * (pow(e_ab, beta - SQRT_2) - pow(e_ac, beta - SQRT_2)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderingClass {
    /// Length of the leading run with pair ≥ tail.
    pub ordered_prefix: usize,
    /// Pair ≥ tail at every level.
    pub fully_ordered: bool,
    /// Largest split `m` in `1..=N−3` satisfying the mixed condition, or
    /// `N−2` when fully ordered.
    pub split_m: Option<usize>,
}

impl OrderingClass {
    /// Split usable by the mixed-ordering bounds, which need `m ≤ N−3`.
    pub fn theorem2_split(&self, n_parties: usize) -> Option<usize> {
        self.split_m.filter(|&m| m >= 1 && m + 3 <= n_parties)
    }
}

/// Scans the ordering conditions; comparisons within [`ORDER_SLACK`] count
/// as satisfied in either direction.
pub fn classify_ordering(pair_values: &[f64], tail_values: &[f64]) -> OrderingClass {
    let levels = tail_values.len().min(pair_values.len());
    let ge: Vec<bool> = (0..levels).map(|i| pair_values[i] >= tail_values[i] - ORDER_SLACK).collect();
    let le: Vec<bool> = (0..levels).map(|i| pair_values[i] <= tail_values[i] + ORDER_SLACK).collect();
    let ordered_prefix = ge.iter().take_while(|&&b| b).count();
    let fully_ordered = ordered_prefix == levels;
    let split_m = if fully_ordered {
        Some(levels)
    } else {
        (1..levels)
            .rev()
            .find(|&m| ordered_prefix >= m && le[m..].iter().all(|&b| b))
    };
    OrderingClass { ordered_prefix, fully_ordered, split_m }
}

/// `g^β(x²+y²)` minus the four-term lower bound built from `g(x²)` and `g(y²)`.
pub fn g_power_chain_gap(x: f64, y: f64, beta: f64) -> Result<f64> {
    check_beta(BoundId::Thm3, beta)?;
    if !(x >= 0.0 && y >= 0.0 && x >= y) {
        return Err(Error::Domain { value: y, domain: "0 <= y <= x" });
    }
    let s = x * x + y * y;
    if s > 1.0 + ORDER_SLACK {
        return Err(Error::Domain { value: s, domain: "x^2 + y^2 <= 1" });
    }
    let t = t_param(beta);
    let gs = g_func(s.min(1.0))?;
    let gx = g_func(x * x)?;
    let gy = g_func(y * y)?;
    let rhs = pow(gx, beta)
        + h_factor_eof(beta) * pow(gy, beta)
        + t / 2.0 * gy.powf(SQRT_2) * (pow(gx, beta - SQRT_2) - pow(gy, beta - SQRT_2))
        + (t * t - t) / 2.0 * gy.powf(2.0 * SQRT_2) * (pow(gx, beta - 2.0 * SQRT_2) - pow(gy, beta - 2.0 * SQRT_2));
    Ok(pow(gs, beta) - rhs)
}

#[cfg(test)]
mod tests {
    use super::*;

    const C_AC1: f64 = 4.0 / 9.0;

    fn c_ab1() -> f64 {
        2.0 * 10f64.sqrt() / 9.0
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn h_and_t() {
        assert_eq!(h_factor(4.0), 3.0);
        assert_eq!(h_factor(2.0), 1.0);
        assert!(close(h_factor(EOF_BETA_MIN), 2f64.powf(SQRT_2) - 1.0, 1e-15));
        assert!(close(t_param(EOF_BETA_MIN), 2.0, 1e-15));
        assert!(close(h_factor_eof(EOF_BETA_MIN), 3.0, 1e-14));
    }

    #[test]
    fn pow_zero_convention() {
        assert_eq!(pow(0.0, 0.0), 1.0);
        assert_eq!(pow(0.0, 1e-13), 1.0);
        assert_eq!(pow(0.0, 2.0), 0.0);
    }

    #[test]
    fn lemma1_values() {
        assert_eq!(lemma1_chain(0.0, 5.0).unwrap(), (1.0, 1.0, 1.0, 1.0));
        assert_eq!(lemma1_chain(1.0, 2.0).unwrap(), (4.0, 4.0, 4.0, 4.0));
        let (a, b, c, d) = lemma1_chain(0.5, 3.0).unwrap();
        assert!(close(a, 3.375, 1e-14) && close(b, 2.8125, 1e-14));
        assert!(close(c, 2.4375, 1e-14) && close(d, 1.875, 1e-14));
        assert!(lemma1_chain(1.5, 3.0).is_err());
        assert!(lemma1_chain(0.5, 1.5).is_err());
    }

    #[test]
    fn p_terms() {
        assert_eq!(p_term(0.6, 0.6, 5.0).unwrap(), 0.0);
        assert_eq!(p_term(0.6, 0.0, 5.0).unwrap(), 0.0);
        assert!(close(p_term(c_ab1(), C_AC1, 4.0).unwrap(), 384.0 / 6561.0, 1e-15));
        assert!(matches!(p_term(0.3, 0.5, 4.0), Err(Error::PreconditionViolated { .. })));
        assert_eq!(p1_term(0.6, 0.6, 5.0).unwrap(), 0.0);
        assert_eq!(p1_term(0.0, 0.6, 5.0).unwrap(), 0.0);
        // 1.25·0.09·(0.125 − 0.027) + 1.875·0.0081·(0.5 − 0.3)
        assert!(close(p1_term(0.3, 0.5, 5.0).unwrap(), 0.0140625, 1e-15));
        assert!(matches!(p1_term(0.5, 0.3, 4.0), Err(Error::PreconditionViolated { .. })));
        assert!(matches!(p_term(0.6, 0.5, 3.9), Err(Error::BetaOutOfRegime { .. })));
    }

    #[test]
    fn lemma2_and_jzsz() {
        let at4 = rhs_lemma2_concurrence(c_ab1(), C_AC1, 4.0).unwrap().rhs_total;
        assert!(close(at4, rhs_jzsz_concurrence(c_ab1(), C_AC1, 4.0).unwrap(), 1e-15));
        let at6 = rhs_lemma2_concurrence(c_ab1(), C_AC1, 6.0).unwrap().rhs_total;
        assert!(at6 - rhs_jzsz_concurrence(c_ab1(), C_AC1, 6.0).unwrap() > 1e-6);
        assert!(close(rhs_lemma2_concurrence(0.7, 0.0, 5.0).unwrap().rhs_total, 0.7f64.powf(5.0), 1e-15));
        let eq = rhs_jzsz_concurrence(0.5, 0.5, 6.0).unwrap();
        assert!(close(eq, 8.0 * 0.5f64.powi(6), 1e-15));
        assert!(close(rhs_lemma2_concurrence(0.5, 0.5, 6.0).unwrap().rhs_total, eq, 1e-15));
    }

    #[test]
    fn thm1_reductions() {
        let inputs = BoundInputs::new(4.5, vec![c_ab1(), C_AC1], vec![TailValue::exact(C_AC1)]);
        let b = rhs_concurrence_thm1(&inputs).unwrap();
        let lhs = (2.0 * 14f64.sqrt() / 9.0).powf(4.5);
        assert!(b.rhs_total <= lhs);
        let zero_tails = BoundInputs::new(4.0, vec![0.5, 0.4, 0.3], vec![TailValue::exact(0.0); 2]);
        let b = rhs_concurrence_thm1(&zero_tails).unwrap();
        let want = 0.5f64.powi(4) + 3.0 * 0.4f64.powi(4) + 9.0 * 0.3f64.powi(4);
        assert!(close(b.rhs_total, want, 1e-15));
        let parts: f64 = b.terms.iter().map(|t| t.base + t.correction).sum();
        assert_eq!(parts, b.rhs_total);
        let bad = BoundInputs::new(4.0, vec![0.5, 0.1, 0.3], vec![TailValue::exact(0.2), TailValue::exact(0.3)]);
        assert_eq!(
            rhs_concurrence_thm1(&bad),
            Err(Error::PreconditionViolated { bound: "thm1", indices: vec![2] })
        );
    }

    #[test]
    fn thm2_fixed_input() {
        let mut inputs = BoundInputs::new(
            4.0,
            vec![0.6, 0.3, 0.2],
            vec![TailValue::exact(0.5), TailValue::exact(0.4)],
        );
        inputs.m_split = Some(1);
        // (0.1296 + 0.0275) + 3(3·0.0081 + 0.0063) + 3·0.0016
        let b = rhs_concurrence_thm2(&inputs).unwrap();
        assert!(close(b.rhs_total, 0.2537, 1e-14), "{}", b.rhs_total);
        assert_eq!(rhs_cren_thm4(&inputs).unwrap().rhs_total, b.rhs_total);
        inputs.m_split = Some(2);
        assert!(matches!(rhs_concurrence_thm2(&inputs), Err(Error::InvalidSplit { m: 2, n: 4 })));
        inputs.m_split = None;
        assert!(matches!(rhs_concurrence_thm2(&inputs), Err(Error::InvalidSplit { .. })));
    }

    #[test]
    fn thm2_equal_values() {
        let mut inputs = BoundInputs::new(5.0, vec![0.4; 4], vec![TailValue::exact(0.4); 3]);
        inputs.m_split = Some(2);
        let h = h_factor(5.0);
        let c = 0.4f64.powf(5.0);
        let want = c + h * c + h * h * (h * c) + h * h * c;
        assert!(close(rhs_concurrence_thm2(&inputs).unwrap().rhs_total, want, 1e-15));
    }

    #[test]
    fn q_term_cases() {
        assert_eq!(q_term(&[], 0.6, 0.3, 3.0).unwrap(), 0.0);
        assert_eq!(q_term(&[0.3], 0.6, 0.6, 3.0).unwrap(), 0.0);
        let (eab, eac, beta) = (0.68193, 0.40416, 3.0);
        let q = q_term(&[eac], eab, eac, beta).unwrap();
        let first = beta / (2.0 * SQRT_2) * eac.powf(SQRT_2) * (eab.powf(beta - SQRT_2) - eac.powf(beta - SQRT_2));
        let second = beta * (beta - SQRT_2) / 4.0
            * eac.powf(2.0 * SQRT_2)
            * (eab.powf(beta - 2.0 * SQRT_2) - eac.powf(beta - 2.0 * SQRT_2));
        assert!(close(q, first + second, 1e-15));
    }

    #[test]
    fn thm3_cases() {
        let (eab, eac) = (0.68193, 0.40416);
        let at = |beta: f64| {
            rhs_eof_thm3(&BoundInputs::new(beta, vec![eab, eac], vec![TailValue::exact(eac)]), true)
                .unwrap()
                .rhs_total
        };
        assert!(close(at(EOF_BETA_MIN), rhs_jzsz_eof(eab, eac, EOF_BETA_MIN).unwrap(), 1e-12));
        assert!(at(3.0) > rhs_jzsz_eof(eab, eac, 3.0).unwrap());
        for k in 0..=20 {
            let beta = EOF_BETA_MIN + (10.0 - EOF_BETA_MIN) * k as f64 / 20.0;
            assert!(at(beta) <= 0.91829f64.powf(beta));
        }
        let zero = BoundInputs::new(3.0, vec![0.0, 0.0], vec![TailValue::exact(0.0)]);
        assert_eq!(rhs_eof_thm3(&zero, true).unwrap().rhs_total, 0.0);
        assert!(matches!(rhs_eof_thm3(&zero, false), Err(Error::PreconditionViolated { .. })));
    }

    #[test]
    fn thm5_cases() {
        let inputs = BoundInputs::new(4.0, vec![c_ab1(), C_AC1], vec![TailValue::exact(C_AC1)]);
        let b = rhs_cren_thm5(&inputs).unwrap();
        assert!(close(b.rhs_total, rhs_jzsz_concurrence(c_ab1(), C_AC1, 4.0).unwrap(), 1e-15));
        let tail_zero = BoundInputs::new(6.0, vec![0.7, 0.0], vec![TailValue::exact(0.0)]);
        assert!(close(rhs_cren_thm5(&tail_zero).unwrap().rhs_total, 0.7f64.powi(6), 1e-15));
    }

    #[test]
    fn baselines() {
        assert!(close(rhs_zhu(&[c_ab1(), C_AC1], 2.0).unwrap(), 56.0 / 81.0, 1e-15));
        assert_eq!(rhs_zhu(&[0.5], 3.0).unwrap(), 0.125);
        assert_eq!(rhs_zhu(&[0.0, 0.0], 3.0).unwrap(), 0.0);
        assert!(close(rhs_jin(&[0.5, 0.4, 0.3], 2.0, 1).unwrap(), rhs_zhu(&[0.5, 0.4, 0.3], 2.0).unwrap(), 1e-15));
        let (a, b, c, beta): (f64, f64, f64, f64) = (0.5, 0.4, 0.3, 4.0);
        let want = a.powf(beta) + 9.0 * b.powf(beta) + 3.0 * c.powf(beta);
        assert!(close(rhs_jin(&[a, b, c], beta, 1).unwrap(), want, 1e-15));
        assert!(matches!(rhs_jin(&[a, b], beta, 1), Err(Error::InvalidSplit { .. })));
        assert_eq!(rhs_jzsz_eof(0.6, 0.0, 3.0).unwrap(), 0.6f64.powf(3.0));
        assert!(close(rhs_jzsz_eof(0.5, 0.5, 3.0).unwrap(), (1.0 + h_factor_eof(3.0)) * 0.125, 1e-15));
    }

    #[test]
    fn ordering_classes() {
        let all = classify_ordering(&[0.5, 0.4, 0.3], &[0.4, 0.3]);
        assert!(all.fully_ordered);
        assert_eq!(all.split_m, Some(2));
        assert_eq!(all.theorem2_split(4), None);
        let none = classify_ordering(&[0.1, 0.1, 0.3], &[0.4, 0.3]);
        assert!(!none.fully_ordered);
        assert_eq!(none.split_m, None);
        let mixed = classify_ordering(&[0.6, 0.5, 0.1, 0.2], &[0.5, 0.4, 0.3]);
        assert_eq!(mixed.ordered_prefix, 2);
        assert_eq!(mixed.split_m, Some(2));
        assert_eq!(mixed.theorem2_split(5), Some(2));
    }

    #[test]
    fn bound_id_parsing() {
        for b in BoundId::ALL {
            assert_eq!(b.as_str().parse::<BoundId>().unwrap(), b);
        }
        assert_eq!("lemma2".parse::<BoundId>().unwrap(), BoundId::Thm1);
        assert!(matches!("nope".parse::<BoundId>(), Err(Error::UnknownBound(_))));
    }

    #[test]
    fn g_chain_gap_examples() {
        assert!(g_power_chain_gap(0.8, 0.5, 3.0).unwrap() >= -1e-10);
        assert!(g_power_chain_gap(0.5, 0.8, 3.0).is_err());
        assert!(g_power_chain_gap(0.9, 0.8, 3.0).is_err());
        assert!(g_power_chain_gap(0.6, 0.0, 4.0).unwrap().abs() < 1e-15);
    }
}
