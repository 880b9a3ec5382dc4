//! Acceptance suite: one line per criterion with its pinned tolerance and
//! wall-clock budget. Runs as a plain binary (`harness = false`).

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rajchman::classify::{quasi_rajchman_scan, rajchman_scan, wiener_mean, ScanConfig};
use rajchman::operators::{
    block_unbounded_quasistable, disjointness_report, foguel_pairing, foguel_quasistability_scan, BlockRule,
    PairVector, SparseSet, SparseVector, TruncatedOperator,
};
use rajchman::position::{
    gram_matrix, homogeneous_quasistability_witness, inner, polarisation_reconstruct, weak_stability_facets,
    FacetFamilies, TrigPolynomial,
};
use rajchman::{Atom, Density, DensityShape, FourierTable, Measure};

type Outcome = Result<String, String>;
type Criterion = (&'static str, f64, fn() -> Outcome);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn table(m: &Measure, window: usize) -> FourierTable {
    let quad = (4 * window).next_power_of_two().max(4096);
    m.fourier_table(window, quad).expect("table")
}

fn density(shape: DensityShape) -> Measure {
    Measure::from_density(Density::new(shape, 1.0).unwrap())
}

fn dirac_closed_forms() -> Outcome {
    let one = table(&Measure::dirac(0.0, 1.0).unwrap(), 1000);
    let pair = table(&Measure::atomic(vec![Atom::new(0.0, 1.0), Atom::new(0.5, 1.0)]).unwrap(), 1000);
    let e1 = one.iter().map(|(_, v)| (v - 1.0).norm()).fold(0.0, f64::max);
    let e2 = pair.iter().map(|(n, v)| (v - if n % 2 == 0 { 2.0 } else { 0.0 }).norm()).fold(0.0, f64::max);
    check(e1 < 1e-12 && e2 < 1e-12, format!("max errors {e1:.1e}, {e2:.1e}"))
}

fn cantor_self_similarity() -> Outcome {
    let t = table(&Measure::cantor(), 999);
    let threefold = (1..=333).map(|k| (t.get(k).unwrap() - t.get(3 * k).unwrap()).norm()).fold(0.0, f64::max);
    let oracle = common::ifs_branch_oracle(3, &[(0, 0.5), (2, 0.5)], 1.0, 0.0, 1.0, 20, 100);
    let vs_oracle = (-100i64..=100)
        .map(|k| {
            let o = if k >= 0 { oracle[k as usize] } else { oracle[(-k) as usize].conj() };
            (t.get(k).unwrap() - o).norm()
        })
        .fold(0.0, f64::max);
    check(threefold < 1e-10 && vs_oracle < 1e-8, format!("threefold {threefold:.1e}, oracle {vs_oracle:.1e}"))
}

fn smooth_density_decay() -> Outcome {
    let t = table(&density(DensityShape::OnePlusHalfCos), 1000);
    let tail = (100i64..=1000).map(|k| t.get(k).unwrap().norm().max(t.get(-k).unwrap().norm())).fold(0.0, f64::max);
    check(tail < 1e-8, format!("tail max {tail:.1e}"))
}

fn wiener_means() -> Outcome {
    let checkpoints = [27, 243, 2187, 19683, 30000];
    let t = table(&Measure::cantor(), 30000);
    let means: Vec<f64> = checkpoints.iter().map(|&n| wiener_mean(&t, n).unwrap()).collect();
    let decreasing = means.windows(2).all(|w| w[1] < w[0]);
    let dirac = table(&Measure::dirac(0.0, 1.0).unwrap(), 30000);
    let dirac_exact = checkpoints.iter().all(|&n| wiener_mean(&dirac, n).unwrap() == 1.0);
    let leb = table(&Measure::lebesgue(), 30000);
    let leb_exact = checkpoints.iter().all(|&n| wiener_mean(&leb, n).unwrap() == 1.0 / (2 * n + 1) as f64);
    check(
        means[4] < 0.1 && decreasing && dirac_exact && leb_exact,
        format!("cantor means {means:.4?}, dirac exact {dirac_exact}, lebesgue exact {leb_exact}"),
    )
}

fn bundled_continuous() -> Vec<(&'static str, Measure)> {
    vec![
        ("lebesgue", Measure::lebesgue()),
        ("1+cos/2", density(DensityShape::OnePlusHalfCos)),
        ("2sin^2", density(DensityShape::TwoSinSquared)),
        ("cantor", Measure::cantor()),
        ("cantor-q1", Measure::cantor_compressed(0.05).unwrap()),
    ]
}

fn quasi_rajchman_witnesses() -> Outcome {
    let mut notes = Vec::new();
    let mut ok = true;
    for (name, m) in bundled_continuous() {
        let v = quasi_rajchman_scan(&table(&m, 30000), 0.05).unwrap();
        ok &= v.holds() && v.witness.as_ref().is_some_and(|w| w.len() >= 10);
        notes.push(format!("{name} {}", v.outcome));
    }
    let d = quasi_rajchman_scan(&table(&Measure::dirac(0.0, 1.0).unwrap(), 30000), 0.05).unwrap();
    ok &= d.fails();
    notes.push(format!("dirac {}", d.outcome));
    check(ok, notes.join(", "))
}

fn gram_dichotomy() -> Outcome {
    let leb = table(&Measure::lebesgue(), 1000);
    let id = gram_matrix(&leb, 8).unwrap().identity_defect();
    let raj = rajchman_scan(&leb, 500, 0.05).unwrap();
    let q1 = gram_matrix(&table(&Measure::cantor_compressed(0.05).unwrap(), 10), 5).unwrap();
    let off = q1.min_off_diagonal_modulus();
    check(
        id < 1e-10 && raj.holds() && off > 1e-6,
        format!("identity defect {id:.1e}, rajchman {}, min off-diagonal {off:.3}", raj.outcome),
    )
}

fn facet_agreement() -> Outcome {
    let mut suite = bundled_continuous();
    suite.push(("dirac", Measure::dirac(0.0, 1.0).unwrap()));
    suite.push(("dirac+-1", Measure::atomic(vec![Atom::new(0.0, 0.5), Atom::new(0.5, 0.5)]).unwrap()));
    let families = FacetFamilies::default();
    let mut ok = true;
    let mut notes = Vec::new();
    for (name, m) in suite {
        let r = weak_stability_facets(&m, &table(&m, 10_016), 10_000, 0.05, &families, &ScanConfig::default()).unwrap();
        ok &= r.agree;
        notes.push(format!("{name} {}", r.facets[0].outcome));
    }
    check(ok, notes.join(", "))
}

fn foguel_operator() -> Outcome {
    let set = SparseSet::default();
    let op = TruncatedOperator::foguel(set.clone(), 600).unwrap();
    let norms: Vec<f64> = (1..=50).map(|n| op.power_norm(n).unwrap()).collect();
    let sup = norms.iter().copied().fold(0.0, f64::max);
    let late = norms[25..].iter().copied().fold(0.0, f64::max);
    let early = norms[..25].iter().copied().fold(0.0, f64::max);
    let bounded = sup.is_finite() && late <= early + 1e-9;

    let x = PairVector::new(SparseVector::zero(), SparseVector::basis(0));
    let y = PairVector::new(SparseVector::basis(0), SparseVector::zero());
    let hits = (1..=5u32).all(|j| {
        let n = 2 * 3u64.pow(j) + 1;
        foguel_pairing(&set, n, &x, &y, n as usize + 1).unwrap() == Complex64::new(1.0, 0.0)
    });

    let horizon = 1458;
    let scan =
        foguel_quasistability_scan(&set, &SparseVector::basis(0), &SparseVector::basis(0), horizon, 0.5).unwrap();
    let witness = scan.verdict.witness.as_ref().map_or(0, |w| w.len());
    let recursion = common::foguel_corner_recursion(common::powers_of(3), &[1.0], &[1.0], horizon as usize);
    let rec_err = scan.values.iter().zip(&recursion).map(|((_, v), r)| (v - r).norm()).fold(0.0, f64::max);
    let dense_horizon = 300;
    let dim = dense_horizon + 2;
    let f = common::foguel_dense(common::powers_of(3), dim);
    let mut xd = DVector::zeros(2 * dim);
    xd[dim] = 1.0;
    let mut yd = DVector::zeros(2 * dim);
    yd[0] = 1.0;
    let dense = common::dense_pairings(&f, &xd, &yd, dense_horizon);
    let dense_err = scan.values.iter().zip(&dense).map(|((_, v), r)| (v - r).norm()).fold(0.0, f64::max);
    check(
        bounded && hits && witness >= 100 && rec_err < 1e-12 && dense_err < 1e-12,
        format!(
            "section norms sup {sup:.4} (n ≤ 25: {early:.4}), thresholds hit {hits}, witness {witness}, \
             oracle errors {rec_err:.0e} / {dense_err:.0e}"
        ),
    )
}

fn coercive_stable_disjoint() -> Outcome {
    let op = block_unbounded_quasistable(BlockRule::LinearGrowth).unwrap();
    let span = BlockRule::LinearGrowth.offset(6).unwrap() as i64;
    let x0 = SparseVector::from_entries((0..span).map(|k| (k, Complex64::new(1.0, 0.0))));
    let r = disjointness_report(&op, &x0, &[1_000, 10_000], 1e-12, 10.0, 0).unwrap();
    let empty = r.horizons.iter().all(|h| h.intersection.is_empty());
    let counts: Vec<String> = r
        .horizons
        .iter()
        .map(|h| format!("N={}: |C|={} |S|={}", h.horizon, h.coercive.len(), h.stable_count))
        .collect();
    check(empty, counts.join(", "))
}

fn random_unitary(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<Complex64> {
    let a = DMatrix::from_fn(n, n, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    a.qr().q()
}

fn polarisation() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst: f64 = 0.0;
    for trial in 0..100 {
        let n = 2 + trial % 5;
        let u = random_unitary(&mut rng, n);
        let mut vec = || -> Vec<Complex64> {
            (0..n).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect()
        };
        let (x, y) = (vec(), vec());
        let apply = |v: &[Complex64]| -> Vec<Complex64> { (&u * DVector::from_column_slice(v)).as_slice().to_vec() };
        let q = |v: &[Complex64]| inner(&apply(v), v);
        let got = polarisation_reconstruct(q, &x, &y);
        worst = worst.max((got - inner(&apply(&x), &y)).norm());
    }
    check(worst < 1e-12, format!("max error {worst:.1e}"))
}

fn homogeneous_witness() -> Outcome {
    let m = Measure::cantor();
    let t = table(&m, 30000);
    let p = TrigPolynomial::from_real;
    let family = [p(&[(0, 1.0)]), p(&[(1, 1.0)]), p(&[(0, 1.0), (1, 1.0)]), p(&[(1, 1.0), (2, -1.0)])];
    let r = homogeneous_quasistability_witness(&m, &t, 0.05, &family, &ScanConfig::default()).unwrap();
    let len = r.verdict.witness.as_ref().map_or(0, |w| w.len());
    check(
        r.verdict.holds() && r.verdict.residual < 0.05,
        format!("witness {len} of {} indices, residual {:.2e}", r.base_len, r.verdict.residual),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("dirac closed forms", 1.0, dirac_closed_forms),
        ("cantor self-similarity and branch oracle", 10.0, cantor_self_similarity),
        ("smooth density coefficient decay", 1.0, smooth_density_decay),
        ("wiener means", 30.0, wiener_means),
        ("quasi-rajchman witnesses", 30.0, quasi_rajchman_witnesses),
        ("gram matrix dichotomy", 5.0, gram_dichotomy),
        ("facet agreement", 60.0, facet_agreement),
        ("foguel operator", 60.0, foguel_operator),
        ("coercive and stable indices disjoint", 10.0, coercive_stable_disjoint),
        ("polarisation identity", 1.0, polarisation),
        ("homogeneous witness", 30.0, homogeneous_witness),
    ];
    let mut failed = 0;
    for (i, (name, budget, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = f();
        let elapsed = start.elapsed();
        let in_time = elapsed <= Duration::from_secs_f64(*budget);
        let (pass, detail) = match outcome {
            Ok(d) => (in_time, d),
            Err(d) => (false, d),
        };
        if !pass {
            failed += 1;
        }
        let status = if pass { "PASS" } else { "FAIL" };
        println!("{status} {:>2} {name}: {detail} [{:.2} s of {budget} s]", i + 1, elapsed.as_secs_f64());
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
