//! The position operator `(Uψ)(z) = z ψ(z)` on `L²(T, μ)`.
//!
//! All computations reduce to the coefficient table: for trigonometric
//! polynomials `ψ = Σ c_a z^a`, `φ = Σ d_b z^b`,
//! `⟨U^n ψ; φ⟩ = ∫ z^n ψ φ̄ dμ = Σ_{a,b} c_a d̄_b μ̂(n + a − b)`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::classify::{decay_verdict, Outcome, ScanConfig, SubsequenceWitness, Verdict, WitnessKind};
use crate::error::{Error, Result};
use crate::measure::{FourierTable, Measure};

/// Finite sum `ψ(z) = Σ c_k z^k`. Zero coefficients are not stored.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TrigPolynomial {
    coefficients: BTreeMap<i64, Complex64>,
}

impl TrigPolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(0, Complex64::new(1.0, 0.0))
    }

    pub fn monomial(k: i64, c: Complex64) -> Self {
        Self::from_terms([(k, c)])
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (i64, Complex64)>) -> Self {
        let mut coefficients = BTreeMap::new();
        for (k, c) in terms {
            *coefficients.entry(k).or_insert(Complex64::new(0.0, 0.0)) += c;
        }
        coefficients.retain(|_, c| *c != Complex64::new(0.0, 0.0));
        Self { coefficients }
    }

    /// Real-coefficient shorthand: `from_real(&[(0, 1.0), (1, 0.5)])` is `1 + ½z`.
    pub fn from_real(terms: &[(i64, f64)]) -> Self {
        Self::from_terms(terms.iter().map(|&(k, c)| (k, Complex64::new(c, 0.0))))
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        self.coefficients.iter().map(|(k, c)| (*k, *c))
    }

    pub fn coefficient(&self, k: i64) -> Complex64 {
        self.coefficients.get(&k).copied().unwrap_or_default()
    }

    /// Lowest and highest exponent, `None` for the zero polynomial.
    pub fn exponent_range(&self) -> Option<(i64, i64)> {
        Some((*self.coefficients.keys().next()?, *self.coefficients.keys().next_back()?))
    }

    /// `z^j ψ`.
    pub fn shifted(&self, j: i64) -> Self {
        Self { coefficients: self.coefficients.iter().map(|(k, c)| (k + j, *c)).collect() }
    }

    /// Pointwise conjugate on the circle: `Σ c̄_k z^{-k}`.
    pub fn conj(&self) -> Self {
        Self { coefficients: self.coefficients.iter().map(|(k, c)| (-k, c.conj())).collect() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self::from_terms(self.terms().flat_map(|(a, c)| other.terms().map(move |(b, d)| (a + b, c * d))))
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::from_terms(self.terms().chain(other.terms()))
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::from_terms(self.terms().map(|(k, c)| (k, c * s)))
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.terms().map(|(k, c)| c * z.powi(k as i32)).sum()
    }
}

impl fmt::Display for TrigPolynomial {
    /// Same `k:re,im;k:re,im` syntax that [`FromStr`] accepts.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.terms().map(|(k, c)| format!("{k}:{},{}", c.re, c.im)).collect();
        f.write_str(&parts.join(";"))
    }
}

impl FromStr for TrigPolynomial {
    type Err = Error;

    /// Parses `k:re,im;k:re,im`; the imaginary part may be omitted. An
    /// empty string is the zero polynomial.
    fn from_str(s: &str) -> Result<Self> {
        let bad = |t: &str| Error::InvalidArgument(format!("malformed polynomial term `{t}` (expected k:re,im)"));
        let mut terms = Vec::new();
        for term in s.split(';').map(str::trim).filter(|t| !t.is_empty()) {
            let (k, c) = term.split_once(':').ok_or_else(|| bad(term))?;
            let k: i64 = k.trim().parse().map_err(|_| bad(term))?;
            let mut parts = c.split(',').map(str::trim);
            let re: f64 = parts.next().ok_or_else(|| bad(term))?.parse().map_err(|_| bad(term))?;
            let im: f64 = match parts.next() {
                Some(p) => p.parse().map_err(|_| bad(term))?,
                None => 0.0,
            };
            if parts.next().is_some() || !re.is_finite() || !im.is_finite() {
                return Err(bad(term));
            }
            terms.push((k, Complex64::new(re, im)));
        }
        Ok(Self::from_terms(terms))
    }
}

/// `⟨U^n ψ; φ⟩_{L²(μ)}`.
pub fn matrix_element(table: &FourierTable, n: i64, psi: &TrigPolynomial, phi: &TrigPolynomial) -> Result<Complex64> {
    let mut acc = Complex64::new(0.0, 0.0);
    for (a, c) in psi.terms() {
        for (b, d) in phi.terms() {
            acc += c * d.conj() * table.value(n + a - b)?;
        }
    }
    Ok(acc)
}

/// `‖ψ‖²_{L²(μ)}`.
pub fn norm_squared(table: &FourierTable, psi: &TrigPolynomial) -> Result<f64> {
    Ok(matrix_element(table, 0, psi, psi)?.re.max(0.0))
}

/// `∫ z^k g dμ` for a trigonometric-polynomial multiplier `g`.
pub fn weighted_coefficient(table: &FourierTable, k: i64, g: &TrigPolynomial) -> Result<Complex64> {
    g.terms().map(|(a, c)| Ok(c * table.value(k + a)?)).sum()
}

/// Gram matrix of `{z^j : |j| ≤ K}`: `G[j][k] = ⟨z^j; z^k⟩ = μ̂(j − k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GramMatrix {
    half: usize,
    entries: DMatrix<Complex64>,
}

pub fn gram_matrix(table: &FourierTable, half: usize) -> Result<GramMatrix> {
    if 2 * half > table.window() {
        return Err(Error::WindowExceeded { requested: 2 * half as i64, window: table.window() });
    }
    let size = 2 * half + 1;
    let entries = DMatrix::from_fn(size, size, |r, c| table.get(r as i64 - c as i64).expect("checked window"));
    Ok(GramMatrix { half, entries })
}

impl GramMatrix {
    pub fn half(&self) -> usize {
        self.half
    }

    pub fn size(&self) -> usize {
        self.entries.nrows()
    }

    /// Entry for exponents `j, k ∈ [-K, K]`.
    pub fn get(&self, j: i64, k: i64) -> Complex64 {
        let h = self.half as i64;
        self.entries[((j + h) as usize, (k + h) as usize)]
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn hermitian_defect(&self) -> f64 {
        (&self.entries - self.entries.adjoint()).iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn identity_defect(&self) -> f64 {
        let n = self.size();
        (&self.entries - DMatrix::<Complex64>::identity(n, n)).iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn min_off_diagonal_modulus(&self) -> f64 {
        let n = self.size();
        let mut m = f64::INFINITY;
        for r in 0..n {
            for c in 0..n {
                if r != c {
                    m = m.min(self.entries[(r, c)].norm());
                }
            }
        }
        m
    }

    /// Smallest eigenvalue, through the real symmetric embedding
    /// `[[A, -B], [B, A]]` of `A + iB` (same spectrum, doubled).
    pub fn min_eigenvalue(&self) -> f64 {
        let n = self.size();
        let h = (&self.entries + self.entries.adjoint()) * Complex64::new(0.5, 0.0);
        let real = DMatrix::from_fn(2 * n, 2 * n, |r, c| {
            let v = h[(r % n, c % n)];
            match (r < n, c < n) {
                (true, true) | (false, false) => v.re,
                (true, false) => -v.im,
                (false, true) => v.im,
            }
        });
        SymmetricEigen::new(real).eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Test functions for the facet report. Defaults follow the concrete
/// choices: `g = 1 + ½cos 2πα`, `ψ = 1 + ½z`, plus small fixed families.
#[derive(Debug, Clone)]
pub struct FacetFamilies {
    /// `q` with `g = |q|²` for the `L^p` facets.
    pub squares: Vec<TrigPolynomial>,
    pub positive_bounded: TrigPolynomial,
    pub pairs: Vec<(TrigPolynomial, TrigPolynomial)>,
    pub nonvanishing: TrigPolynomial,
}

impl Default for FacetFamilies {
    fn default() -> Self {
        let p = TrigPolynomial::from_real;
        Self {
            squares: vec![p(&[(0, 1.0), (1, 1.0)]), p(&[(0, 1.0), (2, -1.0)]), p(&[(1, 1.0), (3, 2.0)])],
            positive_bounded: p(&[(-1, 0.25), (0, 1.0), (1, 0.25)]),
            pairs: vec![
                (p(&[(0, 1.0)]), p(&[(1, 1.0)])),
                (p(&[(1, 1.0)]), p(&[(0, 1.0), (1, 1.0)])),
                (p(&[(0, 1.0), (2, -1.0)]), p(&[(1, 1.0), (3, 2.0)])),
                (p(&[(3, 1.0)]), p(&[(0, 1.0)])),
            ],
            nonvanishing: p(&[(0, 1.0), (1, 0.5)]),
        }
    }
}

impl FacetFamilies {
    /// Largest `|a − b|` over exponents met in any pairing.
    fn spread(&self) -> i64 {
        let span = |p: &TrigPolynomial| p.exponent_range().map_or(0, |(lo, hi)| hi - lo);
        let mut s = span(&self.positive_bounded).max(2 * span(&self.nonvanishing));
        for q in &self.squares {
            s = s.max(2 * span(q));
        }
        for (a, b) in &self.pairs {
            let (la, ha) = a.exponent_range().unwrap_or((0, 0));
            let (lb, hb) = b.exponent_range().unwrap_or((0, 0));
            s = s.max((ha - lb).abs()).max((la - hb).abs());
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FacetReport {
    pub facets: Vec<Verdict>,
    pub agree: bool,
}

/// Evaluates the equivalent characterisations of weak stability of the
/// position operator on the tail `tail_start ≤ n ≤ horizon`:
///
/// * `a` Rajchman decay of `μ̂`,
/// * `b/c` decay of `∫ z^k |q|² dμ` for the square family,
/// * `d` decay of `∫ z^k g dμ` for one positive bounded `g`,
/// * `e` decay of `⟨U^n ψ; φ⟩` over the pair family,
/// * `f` decay of `⟨U^n ψ; ψ⟩` for a zero-free `ψ`,
/// * `g` decay of `⟨U^n 1; 1⟩`.
///
/// Every sequence is normalised by the matching norm, so one `eps` applies.
pub fn weak_stability_facets(
    measure: &Measure,
    table: &FourierTable,
    horizon: usize,
    eps: f64,
    families: &FacetFamilies,
    cfg: &ScanConfig,
) -> Result<FacetReport> {
    let spread = families.spread();
    let needed = horizon as i64 + spread;
    if needed > table.window() as i64 {
        return Err(Error::WindowExceeded { requested: needed, window: table.window() });
    }
    let tail_start = (horizon / 2).max(1);
    let h = horizon as u64;
    let two_sided = |f: &dyn Fn(i64) -> Result<f64>| -> Result<Vec<(u64, f64)>> {
        (tail_start..=horizon)
            .map(|n| {
                let n = n as i64;
                Ok((n as u64, f(n)?.max(f(-n)?)))
            })
            .collect()
    };
    let one_sided = |f: &dyn Fn(i64) -> Result<f64>| -> Result<Vec<(u64, f64)>> {
        (tail_start..=horizon).map(|n| Ok((n as u64, f(n as i64)?))).collect()
    };
    let mass = measure.total_mass();
    let mut facets = Vec::with_capacity(7);

    let a = two_sided(&|k| Ok(table.value(k)?.norm() / mass))?;
    facets.push(decay_verdict("a:rajchman", &a, eps, h, cfg)?);

    let sq_norms: Vec<f64> = families.squares.iter().map(|q| norm_squared(table, q)).collect::<Result<_>>()?;
    let b = two_sided(&|k| {
        let mut worst: f64 = 0.0;
        for (q, nq) in families.squares.iter().zip(&sq_norms) {
            worst = worst.max(matrix_element(table, k, q, q)?.norm() / nq);
        }
        Ok(worst)
    })?;
    facets.push(decay_verdict("b:lp-all", &b, eps, h, cfg)?);
    facets.push(decay_verdict("c:lp-some", &b, eps, h, cfg)?);

    let g = &families.positive_bounded;
    let g_mass = weighted_coefficient(table, 0, g)?.re;
    let d = two_sided(&|k| Ok(weighted_coefficient(table, k, g)?.norm() / g_mass))?;
    facets.push(decay_verdict("d:positive-bounded", &d, eps, h, cfg)?);

    let pair_norms: Vec<f64> = families
        .pairs
        .iter()
        .map(|(x, y)| Ok((norm_squared(table, x)? * norm_squared(table, y)?).sqrt()))
        .collect::<Result<_>>()?;
    let e = one_sided(&|n| {
        let mut worst: f64 = 0.0;
        for ((x, y), nn) in families.pairs.iter().zip(&pair_norms) {
            worst = worst.max(matrix_element(table, n, x, y)?.norm() / nn);
        }
        Ok(worst)
    })?;
    facets.push(decay_verdict("e:weakly-stable", &e, eps, h, cfg)?);

    let psi = &families.nonvanishing;
    let psi_norm = norm_squared(table, psi)?;
    let f = one_sided(&|n| Ok(matrix_element(table, n, psi, psi)?.norm() / psi_norm))?;
    facets.push(decay_verdict("f:zero-free-psi", &f, eps, h, cfg)?);

    let one = TrigPolynomial::one();
    let gg = one_sided(&|n| Ok(matrix_element(table, n, &one, &one)?.norm() / mass))?;
    facets.push(decay_verdict("g:unit-vector", &gg, eps, h, cfg)?);

    let agree = facets.windows(2).all(|w| w[0].outcome == w[1].outcome);
    Ok(FacetReport { facets, agree })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HomogeneousReport {
    pub verdict: Verdict,
    /// Size of the vanishing witness for `⟨U^n 1; 1⟩` before validation.
    pub base_len: usize,
    /// Whether indices had to be dropped for some pair.
    pub widened: bool,
    pub pairs_checked: usize,
}

/// Looks for one index sequence along which `⟨U^n ψ; φ⟩` is small for
/// every `ψ, φ` of the family, starting from the vanishing witness of `μ`
/// itself and keeping only the indices that serve every pair.
pub fn homogeneous_quasistability_witness(
    measure: &Measure,
    table: &FourierTable,
    eps: f64,
    family: &[TrigPolynomial],
    cfg: &ScanConfig,
) -> Result<HomogeneousReport> {
    if !measure.is_continuous() {
        return Err(Error::Precondition("the measure has atoms, so it is not continuous".into()));
    }
    if !(eps.is_finite() && eps > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance {eps} must be positive")));
    }
    let spread = family
        .iter()
        .filter_map(TrigPolynomial::exponent_range)
        .fold((i64::MAX, i64::MIN), |(lo, hi), (a, b)| (lo.min(a), hi.max(b)));
    let spread = if spread.0 > spread.1 { 0 } else { spread.1 - spread.0 };
    let top = table.window() as i64 - spread;
    if top < 1 {
        return Err(Error::WindowExceeded { requested: spread + 1, window: table.window() });
    }
    let mass = measure.total_mass();
    let base: Vec<u64> =
        (1..=top).filter(|&n| table.get(n).expect("in window").norm() < eps * mass).map(|n| n as u64).collect();

    let norms: Vec<f64> = family.iter().map(|p| norm_squared(table, p).map(f64::sqrt)).collect::<Result<_>>()?;
    let mut pairs_checked = 0;
    let mut kept = Vec::with_capacity(base.len());
    for &n in &base {
        let mut ok = true;
        for (x, nx) in family.iter().zip(&norms) {
            for (y, ny) in family.iter().zip(&norms) {
                pairs_checked += 1;
                if matrix_element(table, n as i64, x, y)?.norm() >= eps * nx * ny {
                    ok = false;
                }
            }
        }
        if ok {
            kept.push(n);
        }
    }
    let widened = kept.len() != base.len();
    let horizon = top as u64;
    let (outcome, witness) = if kept.len() >= cfg.min_witness {
        (Outcome::Holds, Some(SubsequenceWitness::new(kept, horizon, eps, WitnessKind::WeakStability)?))
    } else {
        (Outcome::UndecidedAtHorizon, None)
    };
    let residual = match &witness {
        Some(w) => pair_residual(table, w.indices(), family, &norms)?,
        None => f64::NAN,
    };
    Ok(HomogeneousReport {
        verdict: Verdict {
            property: "homogeneous-weak-quasistability".into(),
            outcome,
            residual,
            witness,
            horizon,
            tolerance: eps,
        },
        base_len: base.len(),
        widened,
        pairs_checked,
    })
}

/// Largest normalised pairing `|⟨U^n ψ; φ⟩| / (‖ψ‖‖φ‖)` along `indices`.
pub fn pair_residual(table: &FourierTable, indices: &[u64], family: &[TrigPolynomial], norms: &[f64]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for &n in indices {
        for (x, nx) in family.iter().zip(norms) {
            for (y, ny) in family.iter().zip(norms) {
                worst = worst.max(matrix_element(table, n as i64, x, y)?.norm() / (nx * ny));
            }
        }
    }
    Ok(worst)
}

/// `Σ a_i b̄_i`.
pub fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x * y.conj()).sum()
}

/// Recovers `⟨T x; y⟩` from the quadratic form `q(v) = ⟨T v; v⟩`:
///
/// `4⟨Tx; y⟩ = q(x+y) − q(x−y) + i (q(x+iy) − q(x−iy))`.
pub fn polarisation_reconstruct(q: impl Fn(&[Complex64]) -> Complex64, x: &[Complex64], y: &[Complex64]) -> Complex64 {
    let i = Complex64::i();
    let comb = |s: Complex64| -> Vec<Complex64> { x.iter().zip(y).map(|(a, b)| a + s * b).collect() };
    let one = Complex64::new(1.0, 0.0);
    0.25 * ((q(&comb(one)) - q(&comb(-one))) + i * (q(&comb(i)) - q(&comb(-i))))
}
