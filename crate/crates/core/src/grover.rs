//! Grover exhaustive key-search cost from a per-encryption resource summary.
//!
//! The oracle encrypts `r = ceil(key_bits / block_bits)` blocks and is run
//! twice per iteration (compute and uncompute); the diffusion operator is
//! not charged. Iteration counts are exact: `floor(pi/4 * 2^(k/2))` is
//! evaluated with interval bounds on pi until the floor is certain.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::resources::ResourceSummary;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GroverError {
    #[error("key size must be at least 1 bit")]
    ZeroKeyBits,
    #[error("block size must be at least 1 bit")]
    ZeroBlockBits,
    #[error("unknown security level {0:?} (expected 1..=5)")]
    UnknownLevel(String),
    #[error("thresholds must increase strictly with level (level {level} is not above level {below})")]
    NotIncreasing { level: u8, below: u8 },
    #[error("threshold configuration has no levels")]
    NoLevels,
    #[error("malformed threshold configuration: {0}")]
    Config(String),
}

/// `atan(1/x) * 2^prec`, truncated term by term.
fn arctan_inv(x: u32, prec: u64) -> BigInt {
    let x2 = BigUint::from(x) * x;
    let mut power = (BigUint::one() << prec) / x;
    let mut sum = BigInt::zero();
    let mut k = 0u32;
    while !power.is_zero() {
        let term = BigInt::from_biguint(Sign::Plus, &power / (2 * k + 1));
        if k.is_multiple_of(2) {
            sum += term;
        } else {
            sum -= term;
        }
        power /= &x2;
        k += 1;
    }
    sum
}

/// Bounds `lo <= pi * 2^prec <= hi`.
fn pi_bounds(prec: u64) -> (BigUint, BigUint) {
    let approx: BigInt = arctan_inv(5, prec) * 16 - arctan_inv(239, prec) * 4;
    let approx = approx.to_biguint().expect("pi is positive");
    // each series contributes under 2 ulps per term, far below this slack
    let slack = BigUint::from(64 * (prec + 64));
    (&approx - &slack, approx + slack)
}

/// `floor(pi/4 * 2^(key_bits/2))`, exact.
pub fn grover_iterations(key_bits: u32) -> BigUint {
    let mut prec = key_bits as u64 / 2 + 192;
    loop {
        let (lo, hi) = pi_bounds(prec);
        let (a, b) = if key_bits.is_multiple_of(2) {
            let h = key_bits as u64 / 2;
            ((lo << h) >> (prec + 2), (hi << h) >> (prec + 2))
        } else {
            // s <= sqrt(2^k) * 2^prec < s + 1
            let s = (BigUint::one() << (key_bits as u64 + 2 * prec)).sqrt();
            let shift = 2 * prec + 2;
            ((lo * &s) >> shift, (hi * (s + 1u32)) >> shift)
        };
        if a == b {
            return a;
        }
        prec *= 2;
    }
}

/// `ceil(key_bits / block_bits)`.
pub fn replication(key_bits: u32, block_bits: u32) -> Result<u32, GroverError> {
    if key_bits == 0 {
        return Err(GroverError::ZeroKeyBits);
    }
    if block_bits == 0 {
        return Err(GroverError::ZeroBlockBits);
    }
    Ok(key_bits.div_ceil(block_bits))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttackParameters {
    pub key_bits: u32,
    pub block_bits: u32,
    pub replication: u32,
    pub oracle_factor: u32,
}

impl AttackParameters {
    pub fn new(key_bits: u32, block_bits: u32) -> Result<Self, GroverError> {
        Ok(AttackParameters {
            key_bits,
            block_bits,
            replication: replication(key_bits, block_bits)?,
            oracle_factor: 2,
        })
    }
}

/// Which decomposed gates enter the "total gates" figure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GatePolicy {
    /// CNOT + H + T + X.
    #[default]
    AllGates,
    /// CNOT + H + X.
    CliffordOnly,
}

impl GatePolicy {
    pub fn gates(self, s: &ResourceSummary) -> u64 {
        match self {
            GatePolicy::AllGates => s.total_gates(),
            GatePolicy::CliffordOnly => s.clifford_gates(),
        }
    }
}

impl std::str::FromStr for GatePolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "all-gates" | "all" => Ok(GatePolicy::AllGates),
            "clifford-only" | "clifford" => Ok(GatePolicy::CliffordOnly),
            other => Err(format!("unknown gate policy {other:?}")),
        }
    }
}

impl fmt::Display for GatePolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GatePolicy::AllGates => "all-gates",
            GatePolicy::CliffordOnly => "clifford-only",
        })
    }
}

/// `mantissa * 2^exponent` with `1 <= mantissa < 2` (or zero).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Normalized {
    pub mantissa: f64,
    pub exponent: i64,
}

impl Normalized {
    pub fn of(n: &BigUint) -> Self {
        let bits = n.bits();
        if bits == 0 {
            return Normalized {
                mantissa: 0.0,
                exponent: 0,
            };
        }
        let keep = bits.min(64);
        let top = (n >> (bits - keep)).to_u64().expect("at most 64 bits");
        Normalized {
            mantissa: top as f64 / 2f64.powi(keep as i32 - 1),
            exponent: bits as i64 - 1,
        }
    }

    pub fn new(mantissa: f64, exponent: i64) -> Self {
        let mut n = Normalized { mantissa, exponent };
        if mantissa == 0.0 {
            return n;
        }
        while n.mantissa >= 2.0 {
            n.mantissa /= 2.0;
            n.exponent += 1;
        }
        while n.mantissa < 1.0 {
            n.mantissa *= 2.0;
            n.exponent -= 1;
        }
        n
    }

    /// Nearest integer with 52 significant bits (exact below 2^52).
    pub fn to_biguint(&self) -> BigUint {
        if self.mantissa == 0.0 || self.exponent < 0 {
            return BigUint::zero();
        }
        let scaled = BigUint::from((self.mantissa * 2f64.powi(52)).round() as u64);
        if self.exponent >= 52 {
            scaled << (self.exponent - 52) as u64
        } else {
            scaled >> (52 - self.exponent) as u64
        }
    }

    pub fn mul(&self, other: &Normalized) -> Normalized {
        Normalized::new(self.mantissa * other.mantissa, self.exponent + other.exponent)
    }

    pub fn log2(&self) -> f64 {
        self.exponent as f64 + self.mantissa.log2()
    }
}

impl fmt::Display for Normalized {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.3}x2^{}", self.mantissa, self.exponent)
    }
}

/// An exact count together with its normalized form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Quantity {
    #[serde(with = "decimal")]
    pub exact: BigUint,
    pub normalized: Normalized,
}

impl Quantity {
    pub fn new(exact: BigUint) -> Self {
        Quantity {
            normalized: Normalized::of(&exact),
            exact,
        }
    }
}

mod decimal {
    use num_bigint::BigUint;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(n: &BigUint, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&n.to_str_radix(10))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigUint, D::Error> {
        let s = String::deserialize(d)?;
        BigUint::parse_bytes(s.as_bytes(), 10)
            .ok_or_else(|| serde::de::Error::custom(format!("not a decimal integer: {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NistLevel {
    BelowLevel1,
    Level1,
    Level2,
    Level3,
    Level4,
    Level5,
}

impl NistLevel {
    fn from_number(n: u8) -> Option<Self> {
        match n {
            1 => Some(NistLevel::Level1),
            2 => Some(NistLevel::Level2),
            3 => Some(NistLevel::Level3),
            4 => Some(NistLevel::Level4),
            5 => Some(NistLevel::Level5),
            _ => None,
        }
    }
}

impl fmt::Display for NistLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NistLevel::BelowLevel1 => f.write_str("Not reaching level 1"),
            other => write!(f, "Level {}", *other as u8),
        }
    }
}

/// One level in a threshold file: an explicit cost, or a resource summary
/// of a reference cipher whose all-gates Grover cost becomes the threshold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ThresholdSpec {
    Cost {
        cost_log2: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        source: Option<String>,
    },
    Summary {
        summary: ResourceSummary,
        key_bits: u32,
        block_bits: u32,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        source: Option<String>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdConfig {
    pub levels: BTreeMap<String, ThresholdSpec>,
}

/// Resolved thresholds as `log2(gates x depth)` per level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NistThresholds {
    pub levels: BTreeMap<u8, f64>,
}

impl Default for NistThresholds {
    /// Gate-times-depth costs of AES-128/192/256 key search as published in
    /// NIST's post-quantum call for proposals.
    fn default() -> Self {
        NistThresholds {
            levels: [(1, 170.0), (3, 233.0), (5, 298.0)].into_iter().collect(),
        }
    }
}

impl NistThresholds {
    pub fn from_config(config: &ThresholdConfig) -> Result<Self, GroverError> {
        let mut levels = BTreeMap::new();
        for (key, spec) in &config.levels {
            let level = key
                .trim()
                .parse::<u8>()
                .ok()
                .filter(|l| NistLevel::from_number(*l).is_some())
                .ok_or_else(|| GroverError::UnknownLevel(key.clone()))?;
            let log2 = match spec {
                ThresholdSpec::Cost { cost_log2, .. } => *cost_log2,
                ThresholdSpec::Summary {
                    summary,
                    key_bits,
                    block_bits,
                    ..
                } => {
                    let params = AttackParameters::new(*key_bits, *block_bits)?;
                    let (_, _, cost) = scaled(summary, &params, GatePolicy::AllGates);
                    Normalized::of(&cost).log2()
                }
            };
            levels.insert(level, log2);
        }
        let t = NistThresholds { levels };
        t.check()?;
        Ok(t)
    }

    pub fn from_json(text: &str) -> Result<Self, GroverError> {
        let cfg: ThresholdConfig =
            serde_json::from_str(text).map_err(|e| GroverError::Config(e.to_string()))?;
        Self::from_config(&cfg)
    }

    fn check(&self) -> Result<(), GroverError> {
        if self.levels.is_empty() {
            return Err(GroverError::NoLevels);
        }
        let mut prev: Option<(u8, f64)> = None;
        for (&l, &v) in &self.levels {
            if let Some((pl, pv)) = prev {
                if v <= pv {
                    return Err(GroverError::NotIncreasing { level: l, below: pl });
                }
            }
            prev = Some((l, v));
        }
        Ok(())
    }

    /// Highest level whose threshold the cost reaches.
    pub fn verdict(&self, cost: &BigUint) -> NistLevel {
        let c = Normalized::of(cost).log2();
        self.levels
            .iter()
            .rev()
            .find(|(_, &t)| c >= t)
            .and_then(|(&l, _)| NistLevel::from_number(l))
            .unwrap_or(NistLevel::BelowLevel1)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttackCost {
    pub params: AttackParameters,
    pub policy: GatePolicy,
    #[serde(with = "decimal")]
    pub iterations: BigUint,
    pub total_gates: Quantity,
    pub full_depth: Quantity,
    pub cost: Quantity,
    pub nist_level: NistLevel,
}

fn scaled(s: &ResourceSummary, p: &AttackParameters, policy: GatePolicy) -> (BigUint, BigUint, BigUint) {
    let factor = grover_iterations(p.key_bits) * (p.oracle_factor * p.replication);
    let gates = BigUint::from(policy.gates(s)) * &factor;
    let depth = BigUint::from(s.full_depth) * &factor;
    let cost = &gates * &depth;
    (gates, depth, cost)
}

/// `G * 2 * r * iterations` gates and `D * 2 * r * iterations` depth, with
/// the cost their product.
pub fn estimate(
    summary: &ResourceSummary,
    params: &AttackParameters,
    policy: GatePolicy,
    thresholds: &NistThresholds,
) -> AttackCost {
    let (gates, depth, cost) = scaled(summary, params, policy);
    AttackCost {
        params: *params,
        policy,
        iterations: grover_iterations(params.key_bits),
        nist_level: thresholds.verdict(&cost),
        total_gates: Quantity::new(gates),
        full_depth: Quantity::new(depth),
        cost: Quantity::new(cost),
    }
}

fn render(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for r in rows {
        for (w, c) in widths.iter_mut().zip(r) {
            *w = (*w).max(c.len());
        }
    }
    let fmt_row = |cells: Vec<String>| -> String {
        let parts: Vec<String> = cells
            .iter()
            .zip(&widths)
            .enumerate()
            .map(|(i, (c, &w))| if i == 0 { format!("{c:<w$}") } else { format!("{c:>w$}") })
            .collect();
        parts.join("  ").trim_end().to_string() + "\n"
    };
    let mut out = fmt_row(header.iter().map(|s| s.to_string()).collect());
    for r in rows {
        out.push_str(&fmt_row(r.clone()));
    }
    out
}

/// Table of attack estimates: R, total gates, full depth, cost, level.
pub fn render_attack_table(rows: &[(String, AttackCost)]) -> String {
    let body: Vec<Vec<String>> = rows
        .iter()
        .map(|(name, c)| {
            vec![
                name.clone(),
                c.params.replication.to_string(),
                c.total_gates.normalized.to_string(),
                c.full_depth.normalized.to_string(),
                c.cost.normalized.to_string(),
                c.nist_level.to_string(),
                c.policy.to_string(),
            ]
        })
        .collect();
    render(
        &["Algorithm", "R", "Total gates", "Full depth", "Cost", "Level of security", "Policy"],
        &body,
    )
}

/// One row of the cross-cipher comparison, with H and X merged into
/// single-qubit Cliffords.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub name: String,
    pub qubits: u64,
    pub cnot: u64,
    pub clifford_1q: u64,
    pub t: u64,
    pub depth: u64,
}

impl ComparisonRow {
    pub fn from_summary(name: impl Into<String>, s: &ResourceSummary) -> Self {
        ComparisonRow {
            name: name.into(),
            qubits: s.qubits as u64,
            cnot: s.cnot,
            clifford_1q: s.h + s.x,
            t: s.t,
            depth: s.full_depth,
        }
    }
}

/// Published figures for other block ciphers, bundled as a fixture.
pub fn comparison_fixture() -> Vec<ComparisonRow> {
    serde_json::from_str(include_str!("../fixtures/comparison.json"))
        .expect("bundled comparison fixture parses")
}

pub fn render_comparison(rows: &[ComparisonRow]) -> String {
    if rows.is_empty() {
        return String::new();
    }
    let body: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.name.clone(),
                r.qubits.to_string(),
                r.cnot.to_string(),
                r.clifford_1q.to_string(),
                r.t.to_string(),
                r.depth.to_string(),
            ]
        })
        .collect();
    render(&["Algorithm", "#Qubits", "#CNOT", "#1qClifford", "#T", "Depth"], &body)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_iteration_counts() {
        // pi/4 * sqrt(2^k) for k = 1..4: 1.11, 1.57, 2.22, 3.14
        assert_eq!(grover_iterations(1), BigUint::from(1u32));
        assert_eq!(grover_iterations(2), BigUint::from(1u32));
        assert_eq!(grover_iterations(3), BigUint::from(2u32));
        assert_eq!(grover_iterations(4), BigUint::from(3u32));
    }

    #[test]
    fn pi_bounds_bracket_pi() {
        let (lo, hi) = pi_bounds(60);
        // pi * 2^60 = 3622009729038561421.19...
        let pi60 = BigUint::from(3_622_009_729_038_561_421u64);
        assert!(lo <= pi60 && pi60 < hi);
        assert!(&hi - &lo < BigUint::from(1u32 << 16));
    }

    #[test]
    fn replication_ceiling() {
        assert_eq!(replication(80, 64).unwrap(), 2);
        assert_eq!(replication(128, 64).unwrap(), 2);
        assert_eq!(replication(64, 64).unwrap(), 1);
        assert_eq!(replication(129, 64).unwrap(), 3);
        assert_eq!(replication(0, 64), Err(GroverError::ZeroKeyBits));
        assert_eq!(replication(80, 0), Err(GroverError::ZeroBlockBits));
    }

    #[test]
    fn normalization() {
        let n = Normalized::of(&BigUint::from(3u32 << 10));
        assert_eq!((n.mantissa, n.exponent), (1.5, 11));
        assert_eq!(Normalized::of(&BigUint::zero()).mantissa, 0.0);
        assert_eq!(Normalized::new(6.0, 0), Normalized::new(1.5, 2));
        let big = BigUint::from(0xdead_beefu64) << 100u32;
        assert_eq!(Normalized::of(&big).to_biguint(), big);
        assert_eq!(n.to_string(), "1.500x2^11");
    }

    #[test]
    fn threshold_config() {
        let t = NistThresholds::from_json(r#"{"levels":{"1":{"cost_log2":10},"3":{"cost_log2":20}}}"#).unwrap();
        assert_eq!(t.verdict(&BigUint::from(1000u32)), NistLevel::BelowLevel1);
        assert_eq!(t.verdict(&BigUint::from(1u32 << 10)), NistLevel::Level1);
        assert_eq!(t.verdict(&(BigUint::one() << 30u32)), NistLevel::Level3);
        assert!(matches!(
            NistThresholds::from_json(r#"{"levels":{"1":{"cost_log2":20},"3":{"cost_log2":10}}}"#),
            Err(GroverError::NotIncreasing { level: 3, below: 1 })
        ));
        assert!(matches!(
            NistThresholds::from_json(r#"{"levels":{"7":{"cost_log2":20}}}"#),
            Err(GroverError::UnknownLevel(_))
        ));
        assert!(matches!(NistThresholds::from_json(r#"{"levels":{}}"#), Err(GroverError::NoLevels)));
    }

    #[test]
    fn summary_threshold_uses_all_gates() {
        let s = ResourceSummary {
            qubits: 1,
            t: 7,
            cnot: 1,
            full_depth: 4,
            ..Default::default()
        };
        let cfg = ThresholdConfig {
            levels: [(
                "1".to_string(),
                ThresholdSpec::Summary {
                    summary: s,
                    key_bits: 2,
                    block_bits: 2,
                    source: None,
                },
            )]
            .into_iter()
            .collect(),
        };
        // one iteration, factor 2: 16 gates x 8 depth = 2^7
        let t = NistThresholds::from_config(&cfg).unwrap();
        assert!((t.levels[&1] - 7.0).abs() < 1e-12);
    }

    #[test]
    fn estimate_structure() {
        let s = ResourceSummary {
            qubits: 3,
            cnot: 6,
            h: 2,
            t: 7,
            x: 1,
            toffoli: 1,
            full_depth: 8,
            t_depth: 4,
        };
        let p = AttackParameters::new(4, 2).unwrap();
        let c = estimate(&s, &p, GatePolicy::AllGates, &NistThresholds::default());
        // iterations 3, factor 2 * r(=2) * 3 = 12
        assert_eq!(c.total_gates.exact, BigUint::from(16u32 * 12));
        assert_eq!(c.full_depth.exact, BigUint::from(8u32 * 12));
        assert_eq!(c.cost.exact, BigUint::from(16u32 * 12 * 8 * 12));
        let cl = estimate(&s, &p, GatePolicy::CliffordOnly, &NistThresholds::default());
        assert_eq!(cl.total_gates.exact, BigUint::from(9u32 * 12));
        assert_eq!(c.nist_level, NistLevel::BelowLevel1);
    }

    #[test]
    fn empty_comparison_is_empty() {
        assert_eq!(render_comparison(&[]), "");
        assert!(comparison_fixture().len() >= 9);
    }
}
