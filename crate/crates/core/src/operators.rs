//! Exact simulation of banded operators on finitely supported vectors:
//! shifts, diagonal and block-nilpotent operators, and the Foguel operator
//! `F = [[S*, P], [0, S]]` on `H ⊕ H`.
//!
//! Every operator here maps a finitely supported vector to a finitely
//! supported vector in a computable way, so powers and pairings are exact
//! in infinite dimensions. Dense finite sections only serve as a check.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::classify::{Outcome, SubsequenceWitness, Verdict, WitnessKind};
use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Finitely supported vector indexed by integers. Unilateral spaces use
/// indices `≥ 0` only.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SparseVector(BTreeMap<i64, Complex64>);

impl SparseVector {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn basis(k: i64) -> Self {
        Self(BTreeMap::from([(k, ONE)]))
    }

    pub fn from_entries(entries: impl IntoIterator<Item = (i64, Complex64)>) -> Self {
        let mut v = Self::default();
        for (k, c) in entries {
            v.add_at(k, c);
        }
        v
    }

    pub fn add_at(&mut self, k: i64, c: Complex64) {
        let e = self.0.entry(k).or_insert(ZERO);
        *e += c;
        if *e == ZERO {
            self.0.remove(&k);
        }
    }

    pub fn get(&self, k: i64) -> Complex64 {
        self.0.get(&k).copied().unwrap_or(ZERO)
    }

    pub fn entries(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        self.0.iter().map(|(k, c)| (*k, *c))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn support_max(&self) -> Option<i64> {
        self.0.keys().next_back().copied()
    }

    pub fn support_min(&self) -> Option<i64> {
        self.0.keys().next().copied()
    }

    /// `⟨self; other⟩`, linear in `self`.
    pub fn inner(&self, other: &Self) -> Complex64 {
        self.entries().map(|(k, c)| c * other.get(k).conj()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.0.values().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.0.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    fn map_indices(&self, f: impl Fn(i64) -> Option<i64>) -> Self {
        Self::from_entries(self.entries().filter_map(|(k, c)| f(k).map(|j| (j, c))))
    }
}

impl FromStr for SparseVector {
    type Err = Error;

    /// `e5` for a basis vector, `0` for the zero vector, otherwise the
    /// `k:re,im;k:re,im` coefficient list.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "0" || s.is_empty() {
            return Ok(Self::zero());
        }
        if let Some(k) = s.strip_prefix('e') {
            let k: i64 = k.parse().map_err(|_| Error::InvalidArgument(format!("malformed basis vector `{s}`")))?;
            return Ok(Self::basis(k));
        }
        let poly: crate::position::TrigPolynomial = s.parse()?;
        Ok(Self::from_entries(poly.terms()))
    }
}

impl fmt::Display for SparseVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.entries().map(|(k, c)| format!("{k}:{},{}", c.re, c.im)).collect();
        f.write_str(&parts.join(";"))
    }
}

/// Infinite set of positive integers with `i < j ⟹ 2i < j`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SparseSet {
    /// `{b^k : k ≥ 0}`.
    Powers { base: u64 },
    /// Finite prefix given explicitly.
    Explicit(Vec<u64>),
}

impl Default for SparseSet {
    fn default() -> Self {
        SparseSet::Powers { base: 3 }
    }
}

impl SparseSet {
    pub fn powers(base: u64) -> Result<Self> {
        if base < 3 {
            return Err(Error::InvalidOperator(format!("powers of {base} violate 2i < j")));
        }
        Ok(SparseSet::Powers { base })
    }

    pub fn explicit(mut members: Vec<u64>) -> Result<Self> {
        members.sort_unstable();
        if members.first() == Some(&0) {
            return Err(Error::InvalidOperator("sparse set members must be positive".into()));
        }
        // For a sorted list the consecutive check implies the pairwise one.
        if let Some(w) = members.windows(2).find(|w| 2 * w[0] >= w[1]) {
            return Err(Error::InvalidOperator(format!("{} and {} violate 2i < j", w[0], w[1])));
        }
        Ok(SparseSet::Explicit(members))
    }

    /// Members in `[lo, hi]`, ascending.
    pub fn members_in(&self, lo: u64, hi: u64) -> Vec<u64> {
        match self {
            SparseSet::Explicit(v) => v.iter().copied().filter(|j| (lo..=hi).contains(j)).collect(),
            SparseSet::Powers { base } => {
                let mut out = Vec::new();
                let mut p: u64 = 1;
                while p <= hi {
                    if p >= lo {
                        out.push(p);
                    }
                    match p.checked_mul(*base) {
                        Some(q) => p = q,
                        None => break,
                    }
                }
                out
            }
        }
    }

    pub fn contains(&self, j: u64) -> bool {
        !self.members_in(j, j).is_empty()
    }
}

/// Output indices of `P_n e_k`, where `P_n = Σ_{i<n} S*^{n-1-i} P S^i` is
/// the corner of `F^n`. The term `i` survives when `j = k + i ∈ J` and the
/// adjoint shift does not run past `e_0`; it lands on `2j − k − n + 1`.
/// Sparsity of `J` makes the outputs distinct.
pub fn corner_image(set: &SparseSet, n: u64, k: u64) -> Vec<u64> {
    if n == 0 {
        return Vec::new();
    }
    set.members_in(k, k + n - 1).into_iter().filter(|&j| 2 * j + 1 >= k + n).map(|j| 2 * j + 1 - k - n).collect()
}

/// Indices `k` with `r` among the outputs of `P_n e_k`, i.e. `P_n* e_r`.
pub fn corner_preimage(set: &SparseSet, n: u64, r: u64) -> Vec<u64> {
    if n == 0 {
        return Vec::new();
    }
    // k = 2j + 1 − r − n with k ≤ j ≤ k + n − 1 and k ≥ 0.
    set.members_in((r + n).saturating_sub(1) / 2, r + n - 1)
        .into_iter()
        .filter_map(|j| {
            let k = (2 * j + 1).checked_sub(r + n)?;
            (k <= j && j < k + n).then_some(k)
        })
        .collect()
}

/// `P_n x` for a vector supported on indices `≥ 0`.
pub fn corner_apply(set: &SparseSet, n: u64, x: &SparseVector) -> SparseVector {
    let mut out = SparseVector::zero();
    for (k, c) in x.entries().filter(|(k, _)| *k >= 0) {
        for r in corner_image(set, n, k as u64) {
            out.add_at(r as i64, c);
        }
    }
    out
}

/// `P_n* y`.
pub fn corner_adjoint_apply(set: &SparseSet, n: u64, y: &SparseVector) -> SparseVector {
    let mut out = SparseVector::zero();
    for (r, c) in y.entries().filter(|(r, _)| *r >= 0) {
        for k in corner_preimage(set, n, r as u64) {
            out.add_at(k as i64, c);
        }
    }
    out
}

fn shift(x: &SparseVector, n: u64) -> SparseVector {
    x.map_indices(|k| Some(k + n as i64))
}

fn adjoint_shift(x: &SparseVector, n: u64) -> SparseVector {
    x.map_indices(|k| (k >= n as i64).then(|| k - n as i64))
}

/// Vector of `H ⊕ H`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PairVector {
    pub first: SparseVector,
    pub second: SparseVector,
}

impl PairVector {
    pub fn new(first: SparseVector, second: SparseVector) -> Self {
        Self { first, second }
    }

    pub fn inner(&self, other: &Self) -> Complex64 {
        self.first.inner(&other.first) + self.second.inner(&other.second)
    }

    pub fn norm(&self) -> f64 {
        self.first.norm().hypot(self.second.norm())
    }

    fn support_max(&self) -> i64 {
        self.first.support_max().unwrap_or(0).max(self.second.support_max().unwrap_or(0))
    }

    /// Interleaved single-index form: `2k ↦ first[k]`, `2k+1 ↦ second[k]`.
    pub fn interleave(&self) -> SparseVector {
        SparseVector::from_entries(
            self.first.entries().map(|(k, c)| (2 * k, c)).chain(self.second.entries().map(|(k, c)| (2 * k + 1, c))),
        )
    }

    pub fn deinterleave(v: &SparseVector) -> Self {
        let mut out = Self::default();
        for (k, c) in v.entries() {
            if k.rem_euclid(2) == 0 {
                out.first.add_at(k.div_euclid(2), c);
            } else {
                out.second.add_at(k.div_euclid(2), c);
            }
        }
        out
    }
}

fn check_unilateral(x: &PairVector) -> Result<()> {
    if x.first.support_min().unwrap_or(0) < 0 || x.second.support_min().unwrap_or(0) < 0 {
        return Err(Error::InvalidArgument("Foguel vectors live on indices ≥ 0".into()));
    }
    Ok(())
}

/// `F^n x = (S*^n x₁ + P_n x₂, S^n x₂)`.
pub fn foguel_apply(set: &SparseSet, n: u64, x: &PairVector) -> PairVector {
    let mut first = adjoint_shift(&x.first, n);
    for (k, c) in corner_apply(set, n, &x.second).entries() {
        first.add_at(k, c);
    }
    PairVector::new(first, shift(&x.second, n))
}

/// `F*^n y = (S^n y₁, P_n* y₁ + S*^n y₂)`.
pub fn foguel_adjoint_apply(set: &SparseSet, n: u64, y: &PairVector) -> PairVector {
    let mut second = adjoint_shift(&y.second, n);
    for (k, c) in corner_adjoint_apply(set, n, &y.first).entries() {
        second.add_at(k, c);
    }
    PairVector::new(shift(&y.first, n), second)
}

/// `⟨F^n x; y⟩ = ⟨S*^n x₁; y₁⟩ + ⟨P_n x₂; y₁⟩ + ⟨S^n x₂; y₂⟩`, exact.
///
/// `dimension` is the finite-section size the result is meant to agree
/// with; it must be at least `n + max support index + 1`.
pub fn foguel_pairing(set: &SparseSet, n: u64, x: &PairVector, y: &PairVector, dimension: usize) -> Result<Complex64> {
    check_unilateral(x)?;
    check_unilateral(y)?;
    let required = n as usize + x.support_max().max(y.support_max()) as usize + 1;
    if dimension < required {
        return Err(Error::InsufficientMargin { dimension, required });
    }
    Ok(adjoint_shift(&x.first, n).inner(&y.first)
        + corner_apply(set, n, &x.second).inner(&y.first)
        + shift(&x.second, n).inner(&y.second))
}

/// `⟨F*^n y; x⟩`, computed through the transposed index rule.
pub fn foguel_adjoint_pairing(set: &SparseSet, n: u64, y: &PairVector, x: &PairVector) -> Result<Complex64> {
    check_unilateral(x)?;
    check_unilateral(y)?;
    Ok(foguel_adjoint_apply(set, n, y).inner(x))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoguelScan {
    pub verdict: Verdict,
    /// `(n, ⟨P_n x₂; y₁⟩)` for `n = 1..=horizon`.
    pub values: Vec<(u64, Complex64)>,
}

impl FoguelScan {
    /// Indices left out of the witness.
    pub fn excluded(&self) -> Vec<u64> {
        let w = self.verdict.witness.as_ref().map(|w| w.indices()).unwrap_or(&[]);
        self.values.iter().map(|v| v.0).filter(|n| w.binary_search(n).is_err()).collect()
    }
}

/// All `n ≤ horizon` with `|⟨P_n x₂; y₁⟩| < eps`. Since the shift terms
/// of `⟨F^n x; y⟩` vanish for large `n`, these carry the liminf.
pub fn foguel_quasistability_scan(
    set: &SparseSet,
    x2: &SparseVector,
    y1: &SparseVector,
    horizon: u64,
    eps: f64,
) -> Result<FoguelScan> {
    if !(eps.is_finite() && eps > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance {eps} must be positive")));
    }
    if x2.support_min().unwrap_or(0) < 0 || y1.support_min().unwrap_or(0) < 0 {
        return Err(Error::InvalidArgument("Foguel vectors live on indices ≥ 0".into()));
    }
    let values: Vec<(u64, Complex64)> = (1..=horizon).map(|n| (n, corner_apply(set, n, x2).inner(y1))).collect();
    let indices: Vec<u64> = values.iter().filter(|v| v.1.norm() < eps).map(|v| v.0).collect();
    let residual = values.iter().filter(|v| v.1.norm() < eps).map(|v| v.1.norm()).fold(0.0, f64::max);
    let (outcome, witness) = if indices.is_empty() {
        (Outcome::UndecidedAtHorizon, None)
    } else {
        (Outcome::Holds, Some(SubsequenceWitness::new(indices, horizon, eps, WitnessKind::WeakStability)?))
    };
    Ok(FoguelScan {
        verdict: Verdict {
            property: "foguel-weak-quasistability".into(),
            outcome,
            residual,
            witness,
            horizon,
            tolerance: eps,
        },
        values,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Block {
    pub size: usize,
    pub scale: f64,
}

/// Size and scale of the `k`-th Jordan block (`k ≥ 1`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BlockRule {
    /// Block `k` has size `k + 1` and scale `k^{1/k}`, so that
    /// `‖block_k^k‖ = k`.
    LinearGrowth,
    /// Block `k` has size `k + 1` and a fixed scale.
    ConstantScale { scale: f64 },
    /// A finite list; the operator is nilpotent.
    Explicit(Vec<Block>),
}

impl BlockRule {
    pub fn block(&self, k: usize) -> Option<Block> {
        match self {
            BlockRule::LinearGrowth => {
                let kf = k as f64;
                Some(Block { size: k + 1, scale: kf.powf(1.0 / kf) })
            }
            BlockRule::ConstantScale { scale } => Some(Block { size: k + 1, scale: *scale }),
            BlockRule::Explicit(list) => list.get(k.checked_sub(1)?).copied(),
        }
    }

    /// `(block number, first index, block)` holding basis index `i`.
    pub fn locate(&self, i: usize) -> Option<(usize, usize, Block)> {
        let mut offset = 0;
        let mut k = 1;
        loop {
            let b = self.block(k)?;
            if i < offset + b.size {
                return Some((k, offset, b));
            }
            offset += b.size;
            k += 1;
        }
    }

    /// First basis index of block `k`.
    pub fn offset(&self, k: usize) -> Option<usize> {
        (1..k).map(|j| self.block(j).map(|b| b.size)).sum()
    }

    fn validate(&self) -> Result<()> {
        let bad = |b: &Block| !(b.scale.is_finite() && b.scale >= 0.0) || b.size == 0;
        match self {
            BlockRule::LinearGrowth => Ok(()),
            BlockRule::ConstantScale { scale } if scale.is_finite() && *scale >= 0.0 => Ok(()),
            BlockRule::ConstantScale { scale } => Err(Error::InvalidOperator(format!("block scale {scale}"))),
            BlockRule::Explicit(list) => match list.iter().find(|b| bad(b)) {
                Some(b) => Err(Error::InvalidOperator(format!("block {b:?} needs positive size and scale ≥ 0"))),
                None => Ok(()),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OperatorKind {
    UnilateralShift,
    AdjointShift,
    /// Shift on `ℓ²(Z)`.
    BilateralShift,
    ProjectionOntoSparseSet(SparseSet),
    /// Acts on `H ⊕ H`, vectors interleaved (see [`PairVector::interleave`]).
    Foguel(SparseSet),
    BlockNilpotent(BlockRule),
    Diagonal(Vec<Complex64>),
}

/// Operator together with the finite-section size used for norms and for
/// the exactness bookkeeping.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruncatedOperator {
    kind: OperatorKind,
    dimension: usize,
}

impl TruncatedOperator {
    pub fn new(kind: OperatorKind, dimension: usize) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::InvalidOperator("dimension must be positive".into()));
        }
        match &kind {
            OperatorKind::ProjectionOntoSparseSet(s) | OperatorKind::Foguel(s) => {
                if let SparseSet::Explicit(v) = s {
                    SparseSet::explicit(v.clone())?;
                } else if let SparseSet::Powers { base } = s {
                    SparseSet::powers(*base)?;
                }
            }
            OperatorKind::BlockNilpotent(rule) => rule.validate()?,
            OperatorKind::Diagonal(d) if d.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) => {
                return Err(Error::InvalidOperator("diagonal entries must be finite".into()));
            }
            _ => {}
        }
        Ok(Self { kind, dimension })
    }

    pub fn foguel(set: SparseSet, dimension: usize) -> Result<Self> {
        Self::new(OperatorKind::Foguel(set), dimension)
    }

    pub fn kind(&self) -> &OperatorKind {
        &self.kind
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    /// Whether the finite section of size `dimension` reproduces `T^n x`
    /// exactly for vectors supported on `[0, support_max]`.
    pub fn exact_tail(&self, n: u64, support_max: i64) -> bool {
        let reach = match self.kind {
            OperatorKind::UnilateralShift | OperatorKind::BilateralShift | OperatorKind::Foguel(_) => {
                support_max + n as i64
            }
            _ => support_max,
        };
        reach < self.dimension as i64
    }

    /// `T^n x`, exact in infinite dimensions.
    pub fn apply_power(&self, n: u64, x: &SparseVector) -> Result<SparseVector> {
        let unilateral = !matches!(self.kind, OperatorKind::BilateralShift);
        if unilateral && x.support_min().unwrap_or(0) < 0 {
            return Err(Error::InvalidArgument("negative index on a unilateral space".into()));
        }
        Ok(match &self.kind {
            OperatorKind::UnilateralShift | OperatorKind::BilateralShift => shift(x, n),
            OperatorKind::AdjointShift => adjoint_shift(x, n),
            OperatorKind::ProjectionOntoSparseSet(s) => {
                if n == 0 {
                    x.clone()
                } else {
                    x.map_indices(|k| s.contains(k as u64).then_some(k))
                }
            }
            OperatorKind::Diagonal(d) => SparseVector::from_entries(
                x.entries().map(|(k, c)| (k, c * d.get(k as usize).copied().unwrap_or(ZERO).powu(n as u32))),
            ),
            OperatorKind::BlockNilpotent(rule) => {
                let mut out = SparseVector::zero();
                for (k, c) in x.entries() {
                    let Some((_, offset, b)) = rule.locate(k as usize) else { continue };
                    let pos = k as usize - offset;
                    if (n as usize) <= pos {
                        out.add_at((k as usize - n as usize) as i64, c * b.scale.powi(n as i32));
                    }
                }
                out
            }
            OperatorKind::Foguel(s) => foguel_apply(s, n, &PairVector::deinterleave(x)).interleave(),
        })
    }

    /// `‖T^n‖`. Exact for shifts, projections, diagonal and block
    /// operators; for the Foguel operator it is the norm of the compression
    /// of `F^n` to the first `dimension` basis vectors of each summand, a
    /// lower bound for the true norm.
    pub fn power_norm(&self, n: u64) -> Result<f64> {
        Ok(match &self.kind {
            OperatorKind::UnilateralShift | OperatorKind::AdjointShift | OperatorKind::BilateralShift => 1.0,
            OperatorKind::ProjectionOntoSparseSet(_) => 1.0,
            OperatorKind::Diagonal(d) => {
                if n == 0 {
                    1.0
                } else {
                    d.iter().map(|c| c.norm().powi(n as i32)).fold(0.0, f64::max)
                }
            }
            OperatorKind::BlockNilpotent(rule) => block_power_norm(rule, n),
            OperatorKind::Foguel(s) => foguel_section_norm(s, n, self.dimension),
        })
    }

    /// Whether `sup_n ‖T^n‖ = ∞` follows from the block formulas.
    pub fn certified_power_unbounded(&self) -> bool {
        match &self.kind {
            OperatorKind::BlockNilpotent(BlockRule::LinearGrowth) => true,
            OperatorKind::BlockNilpotent(BlockRule::ConstantScale { scale }) => *scale > 1.0,
            OperatorKind::Diagonal(d) => d.iter().any(|c| c.norm() > 1.0),
            _ => false,
        }
    }
}

/// `sup_k ‖(s_k J_k)^n‖` where `‖J^n‖ = 1` for `n < size` and `0` after.
fn block_power_norm(rule: &BlockRule, n: u64) -> f64 {
    let n_us = n as usize;
    match rule {
        BlockRule::LinearGrowth => {
            if n == 0 {
                return 1.0;
            }
            // Block k needs k + 1 > n; k^{n/k} decreases for k ≥ 3.
            let lo = n_us.max(1);
            (lo..=lo.max(3)).map(|k| (k as f64).powf(n as f64 / k as f64)).fold(0.0, f64::max)
        }
        BlockRule::ConstantScale { scale } => scale.powi(n as i32),
        BlockRule::Explicit(list) => list
            .iter()
            .filter(|b| b.size > n_us)
            .map(|b| if n == 0 { 1.0 } else { b.scale.powi(n as i32) })
            .fold(0.0, f64::max),
    }
}

/// Largest singular value of the compression of `F^n` by power iteration
/// on `A*A`, with `A` and `A*` applied through the index rules.
fn foguel_section_norm(set: &SparseSet, n: u64, dimension: usize) -> f64 {
    let dim = dimension;
    let crop = |v: &PairVector| -> PairVector {
        let keep = |s: &SparseVector| SparseVector::from_entries(s.entries().filter(|(k, _)| (*k as usize) < dim));
        PairVector::new(keep(&v.first), keep(&v.second))
    };
    // Deterministic start with weight on every coordinate.
    let start = |i: usize| Complex64::new(1.0 + (i % 7) as f64 * 0.1, 0.0);
    let mut v = PairVector::new(
        SparseVector::from_entries((0..dim).map(|i| (i as i64, start(i)))),
        SparseVector::from_entries((0..dim).map(|i| (i as i64, start(i + 3)))),
    );
    let mut sigma = 0.0;
    for _ in 0..2000 {
        let nv = v.norm();
        if nv == 0.0 {
            return 0.0;
        }
        let scale = Complex64::new(1.0 / nv, 0.0);
        v = PairVector::new(
            SparseVector::from_entries(v.first.entries().map(|(k, c)| (k, c * scale))),
            SparseVector::from_entries(v.second.entries().map(|(k, c)| (k, c * scale))),
        );
        let av = crop(&foguel_apply(set, n, &v));
        let next = crop(&foguel_adjoint_apply(set, n, &av));
        let est = av.norm();
        let done = (est - sigma).abs() <= 1e-13 * est.max(1.0);
        sigma = est;
        v = next;
        if done {
            break;
        }
    }
    sigma
}

/// Power-unbounded block operator on `ℓ²₊`: every finitely supported
/// vector is eventually annihilated, so `liminf ‖T^n x‖ = 0`.
pub fn block_unbounded_quasistable(rule: BlockRule) -> Result<TruncatedOperator> {
    let unbounded = match &rule {
        BlockRule::LinearGrowth => true,
        BlockRule::ConstantScale { scale } => *scale > 1.0,
        BlockRule::Explicit(_) => false,
    };
    if !unbounded {
        return Err(Error::InvalidOperator("block rule gives bounded powers".into()));
    }
    // Finite-section bookkeeping only: the first 200 blocks.
    let dimension = rule.offset(201).expect("infinite rule");
    TruncatedOperator::new(OperatorKind::BlockNilpotent(rule), dimension)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HorizonIntersection {
    pub horizon: u64,
    /// `{n : ‖T^n x₀‖ > M}`.
    pub coercive: Vec<u64>,
    /// Number of `n` with pairing residual `< eps`.
    pub stable_count: usize,
    pub intersection: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DisjointnessReport {
    pub horizons: Vec<HorizonIntersection>,
    /// `|C ∩ S|` did not grow between horizons.
    pub bounded: bool,
}

/// Coercivity indices `C = {n : ‖T^n x₀‖ > M}` against weak-stability
/// indices `S = {n : max_y |⟨T^n x₀; y⟩| < eps}` at several horizons.
/// The test vectors `y` are the basis vectors of the support of `x₀`
/// widened by `spread` on both sides.
pub fn disjointness_report(
    op: &TruncatedOperator,
    x0: &SparseVector,
    horizons: &[u64],
    eps: f64,
    level: f64,
    spread: i64,
) -> Result<DisjointnessReport> {
    if !(eps.is_finite() && eps > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance {eps} must be positive")));
    }
    let lo = x0.support_min().unwrap_or(0) - spread;
    let hi = x0.support_max().unwrap_or(0) + spread;
    let mut out = Vec::with_capacity(horizons.len());
    for &h in horizons {
        let mut coercive = Vec::new();
        let mut stable = Vec::new();
        for n in 1..=h {
            let v = op.apply_power(n, x0)?;
            if v.norm() > level {
                coercive.push(n);
            }
            let residual =
                v.entries().filter(|(k, _)| (lo..=hi).contains(k)).map(|(_, c)| c.norm()).fold(0.0, f64::max);
            if residual < eps {
                stable.push(n);
            }
        }
        let intersection = coercive.iter().copied().filter(|n| stable.binary_search(n).is_ok()).collect();
        out.push(HorizonIntersection { horizon: h, coercive, stable_count: stable.len(), intersection });
    }
    let bounded = out.windows(2).all(|w| w[1].intersection.len() <= w[0].intersection.len());
    Ok(DisjointnessReport { horizons: out, bounded })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(k: i64) -> SparseVector {
        SparseVector::basis(k)
    }

    #[test]
    fn sparse_set_rules() {
        assert!(SparseSet::explicit(vec![1, 3, 9]).is_ok());
        assert!(SparseSet::explicit(vec![1, 2]).is_err());
        assert!(SparseSet::explicit(vec![3, 5]).is_err());
        assert!(SparseSet::powers(2).is_err());
        let j = SparseSet::default();
        assert_eq!(j.members_in(0, 100), vec![1, 3, 9, 27, 81]);
        assert!(j.contains(243) && !j.contains(244));
    }

    #[test]
    fn corner_hits_origin_at_odd_thresholds() {
        let j = SparseSet::default();
        let hits: Vec<u64> = (1..=500).filter(|&n| corner_image(&j, n, 0).contains(&0)).collect();
        assert_eq!(hits, vec![3, 7, 19, 55, 163, 487]);
    }

    #[test]
    fn preimage_inverts_image() {
        let j = SparseSet::default();
        for n in 1..60 {
            for k in 0..40 {
                for r in corner_image(&j, n, k) {
                    assert!(corner_preimage(&j, n, r).contains(&k), "n={n} k={k} r={r}");
                }
            }
            for r in 0..40 {
                for k in corner_preimage(&j, n, r) {
                    assert!(corner_image(&j, n, k).contains(&r));
                }
            }
        }
    }

    #[test]
    fn pairing_examples() {
        let j = SparseSet::default();
        let x = PairVector::new(e(2), e(1));
        let y = PairVector::new(e(0), e(3));
        assert_eq!(foguel_pairing(&j, 0, &x, &y, 10).unwrap(), x.inner(&y));
        let x = PairVector::new(e(0), SparseVector::zero());
        let y = PairVector::new(SparseVector::zero(), e(0));
        for n in 1..30 {
            assert_eq!(foguel_pairing(&j, n, &x, &y, 40).unwrap(), ZERO);
        }
        assert!(matches!(foguel_pairing(&j, 30, &x, &y, 30), Err(Error::InsufficientMargin { .. })));
    }

    #[test]
    fn zero_vector_scan_is_everything() {
        let s = foguel_quasistability_scan(&SparseSet::default(), &SparseVector::zero(), &e(0), 50, 1e-12).unwrap();
        assert_eq!(s.verdict.witness.unwrap().len(), 50);
    }

    #[test]
    fn vector_literals() {
        assert_eq!("e3".parse::<SparseVector>().unwrap(), e(3));
        assert!("0".parse::<SparseVector>().unwrap().is_zero());
        let v: SparseVector = "0:1;2:0,1".parse().unwrap();
        assert_eq!(v.get(2), Complex64::new(0.0, 1.0));
        assert!("ex".parse::<SparseVector>().is_err());
    }

    #[test]
    fn diagonal_and_jordan_norms() {
        let d =
            TruncatedOperator::new(OperatorKind::Diagonal(vec![Complex64::new(0.5, 0.0), Complex64::new(0.0, 1.0)]), 2)
                .unwrap();
        for n in 0..10 {
            assert_eq!(d.power_norm(n).unwrap(), 1.0);
        }
        let cell = TruncatedOperator::new(
            OperatorKind::BlockNilpotent(BlockRule::Explicit(vec![Block { size: 3, scale: 2.0 }])),
            3,
        )
        .unwrap();
        assert_eq!(cell.power_norm(2).unwrap(), 4.0);
        assert_eq!(cell.power_norm(3).unwrap(), 0.0);
    }

    #[test]
    fn linear_growth_norm_profile() {
        let op = block_unbounded_quasistable(BlockRule::LinearGrowth).unwrap();
        assert!(op.certified_power_unbounded());
        assert!((op.power_norm(1).unwrap() - 3f64.powf(1.0 / 3.0)).abs() < 1e-15);
        for n in 3..40 {
            assert!((op.power_norm(n).unwrap() - n as f64).abs() < 1e-9);
        }
        assert!(block_unbounded_quasistable(BlockRule::ConstantScale { scale: 1.0 }).is_err());
        assert!(block_unbounded_quasistable(BlockRule::Explicit(vec![])).is_err());
    }

    #[test]
    fn block_three_is_annihilated_after_four_steps() {
        let op = block_unbounded_quasistable(BlockRule::LinearGrowth).unwrap();
        let off = BlockRule::LinearGrowth.offset(3).unwrap() as i64;
        let x = SparseVector::from_entries((0..4).map(|i| (off + i, Complex64::new(1.0 + i as f64, 0.0))));
        assert!(!op.apply_power(3, &x).unwrap().is_zero());
        for n in 4..20 {
            assert!(op.apply_power(n, &x).unwrap().is_zero());
        }
    }

    #[test]
    fn shifts_move_support() {
        let s = TruncatedOperator::new(OperatorKind::UnilateralShift, 50).unwrap();
        assert_eq!(s.apply_power(3, &e(2)).unwrap(), e(5));
        let a = TruncatedOperator::new(OperatorKind::AdjointShift, 50).unwrap();
        assert!(a.apply_power(3, &e(2)).unwrap().is_zero());
        let b = TruncatedOperator::new(OperatorKind::BilateralShift, 50).unwrap();
        assert_eq!(b.apply_power(3, &e(-2)).unwrap(), e(1));
        assert!(s.exact_tail(10, 39) && !s.exact_tail(10, 40));
    }
}
