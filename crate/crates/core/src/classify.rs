//! Horizon-qualified verdicts for the Rajchman, quasi-Rajchman and
//! continuity properties of a measure, read off a [`FourierTable`].
//!
//! Asymptotic statements cannot be decided from finitely many
//! coefficients. Every verdict therefore carries the horizon and tolerance
//! it was computed at, and the three-valued [`Outcome`] says "undecided"
//! rather than guessing.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::{FourierTable, Measure};

/// Default minimum number of indices behind an existential claim.
pub const DEFAULT_MIN_WITNESS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WitnessKind {
    WeakStability,
    Coercivity,
    VanishingCoefficients,
    NonVanishingCoefficients,
    /// Sorted union of a non-vanishing witness with part of a vanishing one.
    Supersequence,
}

impl fmt::Display for WitnessKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            WitnessKind::WeakStability => "weak-stability",
            WitnessKind::Coercivity => "coercivity",
            WitnessKind::VanishingCoefficients => "vanishing-coefficients",
            WitnessKind::NonVanishingCoefficients => "non-vanishing-coefficients",
            WitnessKind::Supersequence => "supersequence",
        };
        f.write_str(s)
    }
}

/// Finite prefix of a subsequence of the positive integers, certifying a
/// liminf/limsup-type claim up to `horizon` at `tolerance`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubsequenceWitness {
    indices: Vec<u64>,
    horizon: u64,
    tolerance: f64,
    kind: WitnessKind,
}

impl SubsequenceWitness {
    pub fn new(indices: Vec<u64>, horizon: u64, tolerance: f64, kind: WitnessKind) -> Result<Self> {
        if !(tolerance.is_finite() && tolerance > 0.0) {
            return Err(Error::InvalidArgument(format!("witness tolerance {tolerance} must be positive")));
        }
        if indices.first() == Some(&0) {
            return Err(Error::InvalidArgument("witness indices must be positive".into()));
        }
        if indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument("witness indices must be strictly increasing".into()));
        }
        if indices.last().is_some_and(|&n| n > horizon) {
            return Err(Error::InvalidArgument(format!("witness index beyond horizon {horizon}")));
        }
        Ok(Self { indices, horizon, tolerance, kind })
    }

    pub fn indices(&self) -> &[u64] {
        &self.indices
    }

    pub fn horizon(&self) -> u64 {
        self.horizon
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn kind(&self) -> WitnessKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// Re-checks a coefficient witness against a table.
    pub fn validate_against(&self, table: &FourierTable) -> Result<()> {
        for &n in &self.indices {
            let v = table.value(n as i64)?.norm();
            let ok = match self.kind {
                WitnessKind::VanishingCoefficients => v < self.tolerance,
                WitnessKind::NonVanishingCoefficients => v >= self.tolerance,
                _ => true,
            };
            if !ok {
                return Err(Error::InvariantBreach(format!(
                    "{} witness entry {n} has |μ̂| = {v:e} against tolerance {:e}",
                    self.kind, self.tolerance
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    Holds,
    Fails,
    UndecidedAtHorizon,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Outcome::Holds => "holds",
            Outcome::Fails => "fails",
            Outcome::UndecidedAtHorizon => "undecided-at-horizon",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub property: String,
    pub outcome: Outcome,
    /// The decisive quantity: a tail maximum, a liminf proxy or a mean.
    pub residual: f64,
    pub witness: Option<SubsequenceWitness>,
    pub horizon: u64,
    pub tolerance: f64,
}

impl Verdict {
    pub fn holds(&self) -> bool {
        self.outcome == Outcome::Holds
    }

    pub fn fails(&self) -> bool {
        self.outcome == Outcome::Fails
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanConfig {
    /// Minimum witness size for an existential claim.
    pub min_witness: usize,
    /// First index of the window whose minimum decides a quasi-Rajchman
    /// failure; `None` means half the table window.
    pub prefix_cut: Option<usize>,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self { min_witness: DEFAULT_MIN_WITNESS, prefix_cut: None }
    }
}

fn check_eps(eps: f64) -> Result<()> {
    if eps.is_finite() && eps > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("tolerance {eps} must be positive")))
    }
}

/// Decay verdict for a sampled sequence `(n, |a_n|)`: holds when every
/// sample is below `eps`, fails when at least `min_witness` samples stay at
/// or above `eps`.
pub fn decay_verdict(
    property: &str,
    samples: &[(u64, f64)],
    eps: f64,
    horizon: u64,
    cfg: &ScanConfig,
) -> Result<Verdict> {
    check_eps(eps)?;
    let residual = samples.iter().map(|s| s.1).fold(0.0, f64::max);
    let big: Vec<u64> = samples.iter().filter(|s| s.1 >= eps).map(|s| s.0).collect();
    let (outcome, witness) = if residual < eps {
        (Outcome::Holds, None)
    } else if big.len() >= cfg.min_witness {
        let w = SubsequenceWitness::new(big, horizon, eps, WitnessKind::NonVanishingCoefficients)?;
        (Outcome::Fails, Some(w))
    } else {
        (Outcome::UndecidedAtHorizon, None)
    };
    Ok(Verdict { property: property.to_string(), outcome, residual, witness, horizon, tolerance: eps })
}

/// Rajchman verdict: `μ̂(k) → 0` as `|k| → ∞`, probed on
/// `tail_start ≤ |k| ≤ window`.
pub fn rajchman_scan(table: &FourierTable, tail_start: usize, eps: f64) -> Result<Verdict> {
    rajchman_scan_with(table, tail_start, eps, &ScanConfig::default())
}

pub fn rajchman_scan_with(table: &FourierTable, tail_start: usize, eps: f64, cfg: &ScanConfig) -> Result<Verdict> {
    let window = table.window();
    if tail_start == 0 || tail_start > window {
        return Err(Error::InvalidArgument(format!("tail [{tail_start}, {window}] is empty")));
    }
    // Both signs: conjugate symmetry makes them equal up to the error bound,
    // but the maximum is taken over the whole two-sided tail.
    let samples: Vec<(u64, f64)> = (tail_start..=window)
        .map(|n| {
            let p = table.get(n as i64).expect("in window").norm();
            let m = table.get(-(n as i64)).expect("in window").norm();
            (n as u64, p.max(m))
        })
        .collect();
    decay_verdict("rajchman", &samples, eps, window as u64, cfg)
}

/// Quasi-Rajchman verdict: `liminf |μ̂(n)| = 0`.
pub fn quasi_rajchman_scan(table: &FourierTable, eps: f64) -> Result<Verdict> {
    quasi_rajchman_scan_with(table, eps, &ScanConfig::default())
}

pub fn quasi_rajchman_scan_with(table: &FourierTable, eps: f64, cfg: &ScanConfig) -> Result<Verdict> {
    check_eps(eps)?;
    let window = table.window();
    if window == 0 {
        return Err(Error::InvalidArgument("quasi-Rajchman scan needs a window of at least 1".into()));
    }
    let moduli = table.positive_moduli();
    let small: Vec<u64> = (1..=window as u64).filter(|&n| moduli[n as usize - 1] < eps).collect();
    let cut = cfg.prefix_cut.unwrap_or(window / 2).clamp(1, window);
    let tail_min = moduli[cut - 1..].iter().copied().fold(f64::INFINITY, f64::min);
    let (outcome, witness) = if small.len() >= cfg.min_witness {
        let w = SubsequenceWitness::new(small, window as u64, eps, WitnessKind::VanishingCoefficients)?;
        (Outcome::Holds, Some(w))
    } else if tail_min >= eps {
        (Outcome::Fails, None)
    } else {
        (Outcome::UndecidedAtHorizon, None)
    };
    Ok(Verdict {
        property: "quasi-rajchman".into(),
        outcome,
        residual: tail_min,
        witness,
        horizon: window as u64,
        tolerance: eps,
    })
}

/// Symmetric Wiener mean `(2n+1)^{-1} Σ_{|ℓ|≤n} |μ̂(ℓ)|`.
pub fn wiener_mean(table: &FourierTable, n: usize) -> Result<f64> {
    if n > table.window() {
        return Err(Error::WindowExceeded { requested: n as i64, window: table.window() });
    }
    let n = n as i64;
    let sum: f64 = (-n..=n).map(|l| table.get(l).expect("in window").norm()).sum();
    Ok(sum / (2 * n + 1) as f64)
}

/// One-sided variant `(2n+1)^{-1} Σ_{ℓ=1}^{n} |μ̂(ℓ)|`; it tends to zero
/// together with the symmetric mean.
pub fn wiener_mean_one_sided(table: &FourierTable, n: usize) -> Result<f64> {
    if n > table.window() {
        return Err(Error::WindowExceeded { requested: n as i64, window: table.window() });
    }
    let sum: f64 = (1..=n as i64).map(|l| table.get(l).expect("in window").norm()).sum();
    Ok(sum / (2 * n + 1) as f64)
}

/// Ratio `mean(n) / mean(n / PLATEAU_SPAN)` above which a Wiener mean counts
/// as settled. The span of 9 covers two periods of the log-periodic
/// oscillation of ternary self-similar measures.
pub const PLATEAU_SPAN: usize = 9;
pub const PLATEAU_RATIO: f64 = 0.9;

/// Structural and spectral continuity verdicts, side by side. An
/// undecided spectral verdict counts as agreement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContinuityReport {
    /// Ground truth from the representation: no atoms.
    pub structural: bool,
    /// Wiener mean at the requested `n` compared against `eps`.
    pub spectral: Verdict,
    pub agree: bool,
}

pub fn continuity_verdict(measure: &Measure, table: &FourierTable, n: usize, eps: f64) -> Result<ContinuityReport> {
    check_eps(eps)?;
    let mean = wiener_mean(table, n)?;
    // The mean tends to a positive limit for atomic measures but may decay
    // slowly for continuous ones, so failure needs a plateau as well.
    let outcome = if mean < eps {
        Outcome::Holds
    } else if mean >= PLATEAU_RATIO * wiener_mean(table, n / PLATEAU_SPAN)? {
        Outcome::Fails
    } else {
        Outcome::UndecidedAtHorizon
    };
    let structural = measure.is_continuous();
    let spectral = Verdict {
        property: "continuous".into(),
        outcome,
        residual: mean,
        witness: None,
        horizon: n as u64,
        tolerance: eps,
    };
    let agree = match spectral.outcome {
        Outcome::Holds => structural,
        Outcome::Fails => !structural,
        Outcome::UndecidedAtHorizon => true,
    };
    Ok(ContinuityReport { structural, agree, spectral })
}

/// Splits a witness by rank parity into two disjoint witnesses.
pub fn nontrivial_split(w: &SubsequenceWitness) -> Result<(SubsequenceWitness, SubsequenceWitness)> {
    if w.len() < 2 {
        return Err(Error::InvalidArgument("splitting needs at least two indices".into()));
    }
    let even = w.indices.iter().step_by(2).copied().collect();
    let odd = w.indices.iter().skip(1).step_by(2).copied().collect();
    Ok((
        SubsequenceWitness::new(even, w.horizon, w.tolerance, w.kind)?,
        SubsequenceWitness::new(odd, w.horizon, w.tolerance, w.kind)?,
    ))
}

/// Witnesses for a continuous non-Rajchman measure: a nontrivial index set
/// along which the coefficients do not vanish, containing a subsequence
/// along which they do.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupersequenceWitnesses {
    /// Sorted union of `non_vanishing` and `n_witness`.
    pub m_witness: SubsequenceWitness,
    /// Half of the vanishing indices; contained in `m_witness`.
    pub n_witness: SubsequenceWitness,
    pub non_vanishing: SubsequenceWitness,
    /// The other vanishing half, disjoint from `m_witness`: it makes the
    /// supersequence nontrivial.
    pub complement: SubsequenceWitness,
}

pub fn supersequence_witnesses(
    measure: &Measure,
    table: &FourierTable,
    eps_small: f64,
    eps_big: f64,
    cfg: &ScanConfig,
) -> Result<SupersequenceWitnesses> {
    check_eps(eps_small)?;
    check_eps(eps_big)?;
    if eps_small > eps_big {
        return Err(Error::InvalidArgument(format!("eps_small {eps_small} exceeds eps_big {eps_big}")));
    }
    if !measure.is_continuous() {
        return Err(Error::Precondition("the measure has atoms, so it is not continuous".into()));
    }
    let horizon = table.window();
    let moduli = table.positive_moduli();
    let pick = |keep: &dyn Fn(f64) -> bool| -> Vec<u64> {
        (1..=horizon as u64).filter(|&n| keep(moduli[n as usize - 1])).collect()
    };
    let big = pick(&|v| v >= eps_big);
    if big.len() < cfg.min_witness {
        return Err(Error::FailsToCertify {
            horizon,
            reason: format!("only {} coefficients with modulus ≥ {eps_big:e}", big.len()),
        });
    }
    let small = pick(&|v| v < eps_small);
    if small.len() < cfg.min_witness {
        return Err(Error::FailsToCertify {
            horizon,
            reason: format!("only {} coefficients with modulus < {eps_small:e}", small.len()),
        });
    }
    let h = horizon as u64;
    let non_vanishing = SubsequenceWitness::new(big, h, eps_big, WitnessKind::NonVanishingCoefficients)?;
    let vanishing = SubsequenceWitness::new(small, h, eps_small, WitnessKind::VanishingCoefficients)?;
    let (n_witness, complement) = nontrivial_split(&vanishing)?;
    let mut merged: Vec<u64> = non_vanishing.indices.iter().chain(&n_witness.indices).copied().collect();
    merged.sort_unstable();
    merged.dedup();
    let m_witness = SubsequenceWitness::new(merged, h, eps_big, WitnessKind::Supersequence)?;
    Ok(SupersequenceWitnesses { m_witness, n_witness, non_vanishing, complement })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::Atom;

    fn table(m: &Measure, k: usize) -> FourierTable {
        m.fourier_table(k, (4 * k).next_power_of_two()).unwrap()
    }

    #[test]
    fn witness_constructor_checks_order() {
        assert!(SubsequenceWitness::new(vec![1, 3, 2], 5, 0.1, WitnessKind::Coercivity).is_err());
        assert!(SubsequenceWitness::new(vec![0, 1], 5, 0.1, WitnessKind::Coercivity).is_err());
        assert!(SubsequenceWitness::new(vec![1, 6], 5, 0.1, WitnessKind::Coercivity).is_err());
        assert!(SubsequenceWitness::new(vec![1, 2], 5, 0.0, WitnessKind::Coercivity).is_err());
        assert!(SubsequenceWitness::new(vec![], 5, 0.1, WitnessKind::Coercivity).is_ok());
    }

    #[test]
    fn lebesgue_is_rajchman() {
        let v = rajchman_scan(&table(&Measure::lebesgue(), 64), 1, 1e-8).unwrap();
        assert!(v.holds());
        assert!(v.residual < 1e-10);
    }

    #[test]
    fn dirac_is_not_rajchman() {
        let v = rajchman_scan(&table(&Measure::dirac(0.0, 1.0).unwrap(), 64), 1, 0.5).unwrap();
        assert!(v.fails());
        assert_eq!(&v.witness.unwrap().indices()[..3], &[1, 2, 3]);
    }

    #[test]
    fn empty_tail_rejected() {
        let t = table(&Measure::lebesgue(), 8);
        assert!(rajchman_scan(&t, 9, 0.1).is_err());
        assert!(rajchman_scan(&t, 0, 0.1).is_err());
        assert!(rajchman_scan(&t, 8, 0.1).is_ok());
    }

    #[test]
    fn dirac_pair_quasi_rajchman_on_odd_integers() {
        let m = Measure::atomic(vec![Atom::new(0.0, 1.0), Atom::new(0.5, 1.0)]).unwrap();
        let v = quasi_rajchman_scan(&table(&m, 40), 1e-10).unwrap();
        assert!(v.holds());
        let odd: Vec<u64> = (1..=40).filter(|n| n % 2 == 1).collect();
        assert_eq!(v.witness.unwrap().indices(), odd.as_slice());
    }

    #[test]
    fn dirac_fails_quasi_rajchman() {
        let v = quasi_rajchman_scan(&table(&Measure::dirac(0.0, 1.0).unwrap(), 40), 0.5).unwrap();
        assert_eq!(v.outcome, Outcome::Fails);
        assert_eq!(v.residual, 1.0);
    }

    #[test]
    fn undecided_when_evidence_is_thin() {
        // Mass 1 at 0 and ½ at ½: |μ̂(n)| alternates 1.5, 0.5; at eps = 0.6
        // half the indices vanish, but the minimum witness size is not met.
        let m = Measure::atomic(vec![Atom::new(0.0, 1.0), Atom::new(0.5, 0.5)]).unwrap();
        let cfg = ScanConfig { min_witness: 100, prefix_cut: None };
        let v = quasi_rajchman_scan_with(&table(&m, 40), 0.6, &cfg).unwrap();
        assert_eq!(v.outcome, Outcome::UndecidedAtHorizon);
    }

    #[test]
    fn wiener_means_closed_forms() {
        let d = table(&Measure::dirac(0.0, 1.0).unwrap(), 50);
        for n in [0, 1, 7, 50] {
            assert_eq!(wiener_mean(&d, n).unwrap(), 1.0);
        }
        let l = table(&Measure::lebesgue(), 10);
        assert_eq!(wiener_mean(&l, 10).unwrap(), 1.0 / 21.0);
        assert!(wiener_mean(&l, 11).is_err());
    }

    #[test]
    fn one_sided_mean_agrees_with_symmetric() {
        let t = table(&Measure::cantor(), 200);
        for n in [10, 100, 200] {
            let sym = wiener_mean(&t, n).unwrap();
            let one = wiener_mean_one_sided(&t, n).unwrap();
            assert!((sym - (1.0 + 2.0 * one * (2 * n + 1) as f64) / (2 * n + 1) as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn split_examples() {
        let w = SubsequenceWitness::new(vec![1, 3, 5, 7, 9], 9, 0.1, WitnessKind::VanishingCoefficients).unwrap();
        let (a, b) = nontrivial_split(&w).unwrap();
        assert_eq!(a.indices(), &[1, 5, 9]);
        assert_eq!(b.indices(), &[3, 7]);
        let w = SubsequenceWitness::new(vec![2, 4], 5, 0.1, WitnessKind::VanishingCoefficients).unwrap();
        let (a, b) = nontrivial_split(&w).unwrap();
        assert_eq!((a.indices(), b.indices()), (&[2u64][..], &[4u64][..]));
        let w = SubsequenceWitness::new(vec![2], 5, 0.1, WitnessKind::VanishingCoefficients).unwrap();
        assert!(nontrivial_split(&w).is_err());
    }

    #[test]
    fn supersequence_preconditions() {
        let cfg = ScanConfig::default();
        let d = Measure::dirac(0.0, 1.0).unwrap();
        assert!(matches!(supersequence_witnesses(&d, &table(&d, 64), 1e-6, 0.5, &cfg), Err(Error::Precondition(_))));
        let l = Measure::lebesgue();
        assert!(matches!(
            supersequence_witnesses(&l, &table(&l, 64), 1e-6, 0.5, &cfg),
            Err(Error::FailsToCertify { .. })
        ));
    }
}
