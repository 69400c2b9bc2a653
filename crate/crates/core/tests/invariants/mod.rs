// Invariant checks shared by the `properties` target (one test each) and the
// acceptance suite (all of them, timed). Every check drives its own
// deterministic proptest runner so both targets see the same cases.

#![allow(dead_code)]

use std::fmt::Debug;
use std::path::Path;

use num_complex::Complex64;
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};

use apset::ap_functions::{grid_sup_diff, ExpPolynomial, Grid};
use apset::cli;
use apset::generators::{perturbed_lattice, IndexBox, LatticeMatrix};
use apset::kronecker::{common_integer_almost_periods, solve_system, KroneckerSystem};
use apset::matching::{bottleneck_general, bottleneck_line, card_bound, center_sweep, density, eps_star, MatchPolicy};
use apset::measures::{convolve, variation_in_ball, weak_ap_sup_diff, Mollifier};
use apset::model::{Point, PointMultiSet, Region, Window};
use apset::one_dim::{counting, decompose, discrepancy, sort_line};
use apset::signed_examples::{
    max_even_offset, theorem1_set, theorem2_set, two_adic, verify_distributional_ap, verify_unbounded_variation,
};

pub type Check = fn() -> Result<(), String>;

pub const ALL: &[(&str, Check)] = &[
    ("model: box counts add over a split", card_additive),
    ("model: counts commute with translation", card_translation),
    ("model: signed measure equals positive minus negative part", split_signs_measure),
    ("ap: grid difference never exceeds the certified bound", grid_below_certified),
    ("ap: shift bound is subadditive", shift_bound_subadditive),
    ("ap: shift bound is even", shift_bound_even),
    ("ap: real sums evaluate real", real_sums_are_real),
    ("kronecker: returned shifts pass an independent recheck", kronecker_recheck),
    ("kronecker: solutions symmetric and contain zero", kronecker_symmetric),
    ("kronecker: solutions grow with delta", kronecker_monotone),
    ("kronecker: sums of solutions solve the doubled system", kronecker_sums),
    ("generators: small perturbations stay injective", small_perturbation_injective),
    ("generators: density is the inverse covolume", lattice_density),
    ("generators: certified shifts confirmed by matching", certified_confirmed),
    ("matching: zero shift costs nothing", eps_star_zero),
    ("matching: opposite shifts cost the same", eps_star_symmetric),
    ("matching: line and general bottleneck equal brute force", matching_oracle),
    ("matching: larger margins never raise the bottleneck", margin_monotone),
    ("matching: integer lattice bottleneck is subadditive", integer_subadditive),
    ("measures: convolution is additive over disjoint sets", convolution_linear),
    ("measures: convolution bounded by local variation", convolution_bounded),
    ("measures: convolution commutes with translation", convolution_translation),
    ("measures: zero shift difference vanishes", zero_shift_difference),
    ("measures: convolution Lipschitz in a unit neighborhood", convolution_lipschitz),
    ("one_dim: counting is a step function with jumps equal to multiplicities", counting_steps),
    ("one_dim: decompose recovers slope and perturbation", decompose_roundtrip),
    ("one_dim: decomposition identity", decomposition_identity),
    ("one_dim: discrepancy within four card bounds", discrepancy_card_bound),
    ("signed: valuation shifts with powers of two", valuation_shifts),
    ("signed: first construction masses", first_construction_masses),
    ("signed: positive part offsets stay within a quarter", gap_structure),
    ("signed: unbounded variation next to almost periodic convolution", dichotomy),
    ("cli: file format roundtrip", format_roundtrip),
    ("cli: reports deterministic apart from wall time", report_determinism),
    ("cli: exit codes", exit_codes),
];

fn run<S>(cases: u32, strategy: S, test: impl Fn(S::Value) -> Result<(), TestCaseError>) -> Result<(), String>
where
    S: Strategy,
    S::Value: Debug,
{
    let config = Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    };
    let mut runner = TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha));
    runner.run(&strategy, test).map_err(|e| e.to_string())
}

fn fail(e: impl Debug) -> TestCaseError {
    TestCaseError::fail(format!("{e:?}"))
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

// Coordinates on a 1/8 grid keep sums and translations exact.
fn eighths(lo: i64, hi: i64) -> impl Strategy<Value = f64> {
    (lo * 8..=hi * 8).prop_map(|k| k as f64 / 8.0)
}

fn positive_items(dim: usize, half: i64, max: usize) -> impl Strategy<Value = Vec<(Vec<f64>, i64)>> {
    prop::collection::vec((prop::collection::vec(eighths(-half, half), dim), 1i64..=3), 0..max)
}

fn signed_items(dim: usize, half: i64, max: usize) -> impl Strategy<Value = Vec<(Vec<f64>, i64)>> {
    let m = prop_oneof![-3i64..=-1, 1i64..=3];
    prop::collection::vec((prop::collection::vec(eighths(-half, half), dim), m), 0..max)
}

fn build(dim: usize, half: i64, items: &[(Vec<f64>, i64)], signed: bool) -> PointMultiSet {
    let items: Vec<(Point, i64)> = items.iter().map(|(c, m)| (Point::new(c.clone()).unwrap(), *m)).collect();
    PointMultiSet::new(Window::cube(dim, -half as f64, half as f64).unwrap(), items, signed).unwrap()
}

fn boxed(lo: &[f64], hi: &[f64]) -> Option<Region> {
    let (lo, hi): (Vec<f64>, Vec<f64>) = lo.iter().zip(hi).map(|(a, b)| (a.min(*b), a.max(*b))).unzip();
    Window::new(Point::new(lo).ok()?, Point::new(hi).ok()?).ok().map(Region::Box)
}

pub fn card_additive() -> Result<(), String> {
    let s = (1usize..=2).prop_flat_map(|d| {
        (
            Just(d),
            positive_items(d, 20, 40),
            prop::collection::vec(eighths(-25, 25), d),
            prop::collection::vec(eighths(-25, 25), d),
            eighths(-25, 25),
        )
    });
    run(128, s, |(d, items, lo, hi, cut)| {
        let a = build(d, 20, &items, false);
        let Some(Region::Box(w)) = boxed(&lo, &hi) else {
            return Ok(());
        };
        let cut = cut.clamp(w.lower().x(), w.upper().x());
        let mut left_hi = w.upper().coords().to_vec();
        left_hi[0] = cut;
        let mut right_lo = w.lower().coords().to_vec();
        right_lo[0] = cut;
        let whole = a.card_in(&Region::Box(w.clone())).map_err(fail)?.value;
        let mut parts = 0;
        for r in [boxed(w.lower().coords(), &left_hi), boxed(&right_lo, w.upper().coords())].into_iter().flatten() {
            parts += a.card_in(&r).map_err(fail)?.value;
        }
        // a degenerate half has no interior; it holds nothing
        prop_assert_eq!(whole, parts);
        Ok(())
    })
}

pub fn card_translation() -> Result<(), String> {
    let s = (1usize..=2).prop_flat_map(|d| {
        (
            Just(d),
            positive_items(d, 20, 40),
            prop::collection::vec(eighths(-20, 20), d),
            prop::collection::vec(eighths(-20, 20), d),
            prop::collection::vec(eighths(-30, 30), d),
        )
    });
    run(128, s, |(d, items, lo, hi, t)| {
        let a = build(d, 20, &items, false);
        let tau = Point::new(t).unwrap();
        let Some(Region::Box(w)) = boxed(&lo, &hi) else {
            return Ok(());
        };
        let moved = a.translate(&tau).map_err(fail)?;
        let c0 = a.card_in(&Region::Box(w.clone())).map_err(fail)?.value;
        let c1 = moved.card_in(&Region::Box(w.translate(&tau))).map_err(fail)?.value;
        prop_assert_eq!(c0, c1);
        let center = w.center();
        let b0 = a.card_in(&Region::ball(center.clone(), 3.5)).map_err(fail)?.value;
        let b1 = moved.card_in(&Region::ball(&center + &tau, 3.5)).map_err(fail)?.value;
        prop_assert_eq!(b0, b1);
        Ok(())
    })
}

pub fn split_signs_measure() -> Result<(), String> {
    let s = (1usize..=2).prop_flat_map(|d| {
        (
            Just(d),
            signed_items(d, 20, 40),
            prop::collection::vec(eighths(-20, 20), d),
            prop::collection::vec(eighths(-20, 20), d),
        )
    });
    run(128, s, |(d, items, lo, hi)| {
        let a = build(d, 20, &items, true);
        let (plus, minus) = a.split_signs();
        prop_assert!(plus.items().iter().chain(minus.items()).all(|w| w.multiplicity > 0));
        let Some(r) = boxed(&lo, &hi) else {
            return Ok(());
        };
        let whole = a.card_in(&r).map_err(fail)?.value;
        let p = plus.card_in(&r).map_err(fail)?.value;
        let m = minus.card_in(&r).map_err(fail)?.value;
        prop_assert_eq!(whole, p - m);
        prop_assert_eq!(a.variation_in(&r).map_err(fail)?.value, p + m);
        Ok(())
    })
}

fn exp_poly(dim: usize) -> impl Strategy<Value = ExpPolynomial> {
    prop::collection::vec(
        (prop::collection::vec(-3.0f64..3.0, dim), -1.0f64..1.0, -1.0f64..1.0),
        1..4,
    )
    .prop_map(move |terms| {
        terms
            .into_iter()
            .map(|(f, a, b)| ExpPolynomial::trig(f, a, b).unwrap())
            .fold(ExpPolynomial::zero(dim), |acc, t| acc.add(&t).unwrap())
    })
}

pub fn grid_below_certified() -> Result<(), String> {
    let s = (1usize..=2).prop_flat_map(|d| (Just(d), exp_poly(d), prop::collection::vec(-50.0f64..50.0, d)));
    run(64, s, |(d, p, t)| {
        let tau = Point::new(t).unwrap();
        let step = if d == 1 { 0.01 } else { 0.25 };
        let grid = Grid::new(Window::cube(d, -5.0, 5.0).unwrap(), step).unwrap();
        let sampled = grid_sup_diff(&p, &tau, &grid).map_err(fail)?;
        let certified = p.shift_bound(&tau).map_err(fail)?;
        prop_assert!(sampled <= certified, "{} > {}", sampled, certified);
        Ok(())
    })
}

pub fn shift_bound_subadditive() -> Result<(), String> {
    let s = (1usize..=3).prop_flat_map(|d| {
        (
            exp_poly(d),
            prop::collection::vec(-100.0f64..100.0, d),
            prop::collection::vec(-100.0f64..100.0, d),
        )
    });
    run(256, s, |(p, t1, t2)| {
        let (a, b) = (Point::new(t1).unwrap(), Point::new(t2).unwrap());
        let sum = p.shift_bound(&(&a + &b)).map_err(fail)?;
        let parts = p.shift_bound(&a).map_err(fail)? + p.shift_bound(&b).map_err(fail)?;
        prop_assert!(sum <= parts + 1e-9, "{} > {}", sum, parts);
        Ok(())
    })
}

pub fn shift_bound_even() -> Result<(), String> {
    let s = (1usize..=3).prop_flat_map(|d| (exp_poly(d), prop::collection::vec(-1000.0f64..1000.0, d)));
    run(256, s, |(p, t)| {
        let tau = Point::new(t).unwrap();
        prop_assert_eq!(p.shift_bound(&tau).map_err(fail)?, p.shift_bound(&-&tau).map_err(fail)?);
        Ok(())
    })
}

pub fn real_sums_are_real() -> Result<(), String> {
    let s = (1usize..=2).prop_flat_map(|d| (exp_poly(d), prop::collection::vec(prop::collection::vec(-1e3f64..1e3, d), 1000)));
    run(16, s, |(p, xs)| {
        prop_assert!(p.is_real_valued());
        for x in xs {
            let v = p.eval(&Point::new(x).unwrap()).map_err(fail)?;
            prop_assert!(v.im.abs() <= 1e-12, "imaginary part {}", v.im);
        }
        Ok(())
    })
}

fn independent_shift(p: &ExpPolynomial, r: &[i64]) -> f64 {
    p.terms()
        .iter()
        .map(|t| {
            let phase: f64 = t.frequency.iter().zip(r).map(|(l, k)| l * *k as f64).sum();
            t.coefficient.norm() * (Complex64::new(0.0, phase).exp() - 1.0).norm()
        })
        .sum()
}

fn line_poly() -> impl Strategy<Value = Vec<ExpPolynomial>> {
    prop::collection::vec((0.1f64..6.0, -0.3f64..0.3, -0.3f64..0.3), 1..3).prop_map(|terms| {
        let f = terms
            .into_iter()
            .map(|(l, a, b)| ExpPolynomial::trig(vec![l], a, b).unwrap())
            .fold(ExpPolynomial::zero(1), |acc, t| acc.add(&t).unwrap());
        vec![f]
    })
}

pub fn kronecker_recheck() -> Result<(), String> {
    run(48, (line_poly(), 1e-3f64..0.2), |(f, eps)| {
        for r in common_integer_almost_periods(&f, eps, 300).map_err(fail)? {
            let v = independent_shift(&f[0], &r);
            prop_assert!(v < eps * (1.0 + 1e-12), "r = {:?}: {} >= {}", r, v, eps);
        }
        Ok(())
    })
}

fn frequencies() -> impl Strategy<Value = Vec<Vec<f64>>> {
    (1usize..=2).prop_flat_map(|d| prop::collection::vec(prop::collection::vec(-4.0f64..4.0, d), 1..3))
}

pub fn kronecker_symmetric() -> Result<(), String> {
    run(48, (frequencies(), 0.01f64..0.5), |(freqs, delta)| {
        let d = freqs[0].len();
        let bound = if d == 1 { 400 } else { 30 };
        let sys = KroneckerSystem::new(freqs, delta, bound).map_err(fail)?;
        let sol = solve_system(&sys).map_err(fail)?;
        prop_assert!(sol.contains(&vec![0; d]));
        for r in &sol {
            let neg: Vec<i64> = r.iter().map(|k| -k).collect();
            prop_assert!(sol.contains(&neg), "{:?} without its negative", r);
        }
        Ok(())
    })
}

pub fn kronecker_monotone() -> Result<(), String> {
    run(48, (frequencies(), 0.01f64..0.5, 0.01f64..0.5), |(freqs, d1, d2)| {
        let (lo, hi) = (d1.min(d2), d1.max(d2));
        let bound = if freqs[0].len() == 1 { 400 } else { 30 };
        let small = solve_system(&KroneckerSystem::new(freqs.clone(), lo, bound).map_err(fail)?).map_err(fail)?;
        let large = solve_system(&KroneckerSystem::new(freqs, hi, bound).map_err(fail)?).map_err(fail)?;
        prop_assert!(small.iter().all(|r| large.contains(r)));
        Ok(())
    })
}

pub fn kronecker_sums() -> Result<(), String> {
    run(32, (frequencies(), 0.05f64..0.5), |(freqs, delta)| {
        let bound = if freqs[0].len() == 1 { 200 } else { 20 };
        let sys = KroneckerSystem::new(freqs.clone(), delta, bound).map_err(fail)?;
        let sol = solve_system(&sys).map_err(fail)?;
        for r1 in sol.iter().take(40) {
            for r2 in sol.iter().take(40) {
                let r: Vec<i64> = r1.iter().zip(r2).map(|(a, b)| a + b).collect();
                if r.iter().any(|k| k.abs() > bound) {
                    continue;
                }
                let worst = freqs
                    .iter()
                    .map(|f| {
                        let phase: f64 = f.iter().zip(&r).map(|(l, k)| l * *k as f64).sum();
                        (Complex64::new(0.0, phase).exp() - 1.0).norm()
                    })
                    .fold(0.0, f64::max);
                prop_assert!(worst < 2.0 * delta, "{:?}: {} >= {}", r, worst, 2.0 * delta);
            }
        }
        Ok(())
    })
}

fn lattice(d: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    (prop::collection::vec(0.8f64..2.5, d), prop::collection::vec(-0.3f64..0.3, d * d)).prop_map(move |(diag, off)| {
        (0..d)
            .map(|i| (0..d).map(|j| if i == j { diag[i] } else { off[i * d + j] }).collect())
            .collect()
    })
}

fn shortest_vector(rows: &[Vec<f64>]) -> f64 {
    let d = rows.len();
    let g = LatticeMatrix::new(rows.to_vec()).unwrap();
    let mut best = f64::INFINITY;
    let box_ = IndexBox::symmetric(d, 4).unwrap();
    for i in 0..box_.len() {
        let k = box_.index(i);
        if k.iter().all(|x| *x == 0) {
            continue;
        }
        best = best.min(g.apply(&k).iter().map(|x| x * x).sum::<f64>().sqrt());
    }
    best
}

fn perturbation(d: usize) -> impl Strategy<Value = Vec<Vec<(Vec<f64>, f64, f64)>>> {
    prop::collection::vec(
        prop::collection::vec((prop::collection::vec(-3.0f64..3.0, d), -1.0f64..1.0, -1.0f64..1.0), 1..3),
        d,
    )
}

fn scaled_perturbation(raw: &[Vec<(Vec<f64>, f64, f64)>], d: usize, target_mass: f64) -> Vec<ExpPolynomial> {
    let fs: Vec<ExpPolynomial> = raw
        .iter()
        .map(|terms| {
            terms
                .iter()
                .map(|(f, a, b)| ExpPolynomial::trig(f.clone(), *a, *b).unwrap())
                .fold(ExpPolynomial::zero(d), |acc, t| acc.add(&t).unwrap())
        })
        .collect();
    let mass = fs.iter().map(ExpPolynomial::coefficient_mass).fold(0.0, f64::max);
    if mass == 0.0 {
        return fs;
    }
    fs.iter().map(|f| f.scale(target_mass / mass)).collect()
}

pub fn small_perturbation_injective() -> Result<(), String> {
    let s = (1usize..=2).prop_flat_map(|d| (Just(d), lattice(d), perturbation(d), 0.0f64..1.0));
    run(48, s, |(d, rows, raw, frac)| {
        let shortest = shortest_vector(&rows);
        // each point moves less than half the shortest lattice vector
        let mass = frac * shortest / (2.0 * (d as f64).sqrt()) * 0.999;
        let f = scaled_perturbation(&raw, d, mass);
        let g = LatticeMatrix::new(rows).map_err(fail)?;
        let k = if d == 1 { 200 } else { 12 };
        let pl = perturbed_lattice(&g, &f, &IndexBox::symmetric(d, k).unwrap()).map_err(fail)?;
        prop_assert!(pl.is_injective(), "{} generated, {} kept", pl.raw_count, pl.set.len());
        Ok(())
    })
}

pub fn lattice_density() -> Result<(), String> {
    let s = (1usize..=2).prop_flat_map(|d| (Just(d), lattice(d), perturbation(d), 0.0f64..0.3));
    run(24, s, |(d, rows, raw, mass)| {
        let f = scaled_perturbation(&raw, d, mass);
        let g = LatticeMatrix::new(rows).map_err(fail)?;
        let covolume = g.det().abs();
        let k = if d == 1 { 4000 } else { 120 };
        let pl = perturbed_lattice(&g, &f, &IndexBox::symmetric(d, k).unwrap()).map_err(fail)?;
        let w = pl.set.window();
        let radius = 0.45 * w.min_side();
        let t = density(&pl.set, &[w.center()], &[radius]).map_err(fail)?;
        let rel = t.estimate * covolume - 1.0;
        prop_assert!(rel.abs() < 0.03, "density {} vs {}", t.estimate, 1.0 / covolume);
        Ok(())
    })
}

pub fn certified_confirmed() -> Result<(), String> {
    let s = (0.5f64..3.0, 0.5f64..2.5, 0.05f64..0.3);
    run(16, s, |(lambda, g, amp)| {
        let f = vec![ExpPolynomial::sine(vec![lambda], amp).unwrap()];
        let gamma = LatticeMatrix::scalar(1, g).unwrap();
        let pl = perturbed_lattice(&gamma, &f, &IndexBox::symmetric(1, 1500).unwrap()).map_err(fail)?;
        let eps = 0.02;
        let policy = MatchPolicy::new(5.0).unwrap();
        for p in pl.certified_periods(eps, 400).map_err(fail)? {
            let e = eps_star(&pl.set, &p.tau, &policy).map_err(fail)?;
            prop_assert!(e <= p.set_eps + 1e-9, "r = {:?}: eps* {} > {}", p.r, e, p.set_eps);
        }
        Ok(())
    })?;
    // a planar instance with two frequencies per component
    let f = vec![
        ExpPolynomial::sine(vec![1.0, 0.0], 0.1).unwrap(),
        ExpPolynomial::sine(vec![0.0, 1.0], 0.1).unwrap(),
    ];
    let pl = perturbed_lattice(&LatticeMatrix::identity(2), &f, &IndexBox::symmetric(2, 30).unwrap())
        .map_err(|e| e.to_string())?;
    let policy = MatchPolicy::new(3.0).unwrap();
    for p in pl.certified_periods(0.02, 25).map_err(|e| e.to_string())? {
        let e = eps_star(&pl.set, &p.tau, &policy).map_err(|e| e.to_string())?;
        ensure(e <= p.set_eps + 1e-9, || format!("r = {:?}: eps* {e} > {}", p.r, p.set_eps))?;
    }
    Ok(())
}

pub fn eps_star_zero() -> Result<(), String> {
    let s = (1usize..=2).prop_flat_map(|d| (Just(d), positive_items(d, 10, 60), 0.0f64..4.0));
    run(64, s, |(d, items, margin)| {
        let a = build(d, 10, &items, false);
        let policy = MatchPolicy::new(margin).unwrap();
        prop_assert_eq!(eps_star(&a, &Point::origin(d), &policy).map_err(fail)?, 0.0);
        Ok(())
    })
}

pub fn eps_star_symmetric() -> Result<(), String> {
    let s = (1usize..=2).prop_flat_map(|d| {
        (
            Just(d),
            positive_items(d, 10, 60),
            prop::collection::vec(eighths(-3, 3), d),
            1.0f64..4.0,
        )
    });
    run(64, s, |(d, items, t, margin)| {
        let a = build(d, 10, &items, false);
        let tau = Point::new(t).unwrap();
        let policy = MatchPolicy::new(margin).unwrap();
        let fwd = eps_star(&a, &tau, &policy).ok();
        let bwd = eps_star(&a, &-&tau, &policy).ok();
        prop_assert_eq!(fwd, bwd);
        Ok(())
    })
}

fn injections(n: usize, m: usize) -> Vec<Vec<usize>> {
    fn go(n: usize, m: usize, used: &mut Vec<bool>, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for j in 0..m {
            if !used[j] {
                used[j] = true;
                cur.push(j);
                go(n, m, used, cur, out);
                cur.pop();
                used[j] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(n, m, &mut vec![false; m], &mut Vec::new(), &mut out);
    out
}

/// Minimum over all injections of the longest edge.
pub fn brute_bottleneck(sources: &[Vec<f64>], targets: &[Vec<f64>]) -> f64 {
    let dist = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
    injections(sources.len(), targets.len())
        .iter()
        .map(|inj| {
            inj.iter()
                .enumerate()
                .map(|(i, &j)| dist(&sources[i], &targets[j]))
                .fold(0.0, f64::max)
        })
        .fold(f64::INFINITY, f64::min)
}

pub fn matching_instance(dim: usize, max: usize) -> impl Strategy<Value = (Vec<Vec<f64>>, Vec<Vec<f64>>)> {
    (1..=max).prop_flat_map(move |m| {
        (1..=m).prop_flat_map(move |n| {
            (
                prop::collection::vec(prop::collection::vec(-10.0f64..10.0, dim), n),
                prop::collection::vec(prop::collection::vec(-10.0f64..10.0, dim), m),
            )
        })
    })
}

pub fn line_matches_brute(sources: &[Vec<f64>], targets: &[Vec<f64>]) -> (f64, f64) {
    let mut s: Vec<f64> = sources.iter().map(|p| p[0]).collect();
    let mut t: Vec<f64> = targets.iter().map(|p| p[0]).collect();
    s.sort_by(f64::total_cmp);
    t.sort_by(f64::total_cmp);
    let got = bottleneck_line(&s, &t, 1e6).expect("feasible").0;
    let want = brute_bottleneck(&s.iter().map(|x| vec![*x]).collect::<Vec<_>>(), &t.iter().map(|x| vec![*x]).collect::<Vec<_>>());
    (got, want)
}

pub fn general_matches_brute(sources: &[Vec<f64>], targets: &[Vec<f64>]) -> (f64, f64) {
    let got = bottleneck_general(sources, targets, 1e6).expect("feasible").0;
    (got, brute_bottleneck(sources, targets))
}

pub fn matching_oracle() -> Result<(), String> {
    run(200, matching_instance(1, 7), |(s, t)| {
        let (got, want) = line_matches_brute(&s, &t);
        prop_assert_eq!(got, want);
        Ok(())
    })?;
    run(100, matching_instance(2, 6), |(s, t)| {
        let (got, want) = general_matches_brute(&s, &t);
        prop_assert_eq!(got, want);
        Ok(())
    })
}

pub fn margin_monotone() -> Result<(), String> {
    let s = (1usize..=2).prop_flat_map(|d| {
        (
            Just(d),
            positive_items(d, 10, 60),
            prop::collection::vec(-3.0f64..3.0, d),
            0.5f64..4.0,
            0.5f64..4.0,
        )
    });
    run(64, s, |(d, items, t, m1, m2)| {
        let a = build(d, 10, &items, false);
        let _ = d;
        let tau = Point::new(t).unwrap();
        let (small, large) = (m1.min(m2), m1.max(m2));
        let e_small = eps_star(&a, &tau, &MatchPolicy::new(small).unwrap());
        let e_large = eps_star(&a, &tau, &MatchPolicy::new(large).unwrap());
        if let (Ok(es), Ok(el)) = (e_small, e_large) {
            prop_assert!(el <= es, "margin {}: {} > margin {}: {}", large, el, small, es);
        }
        Ok(())
    })
}

fn integers(lo: i64, hi: i64) -> PointMultiSet {
    PointMultiSet::from_points(
        Window::interval(lo as f64, hi as f64).unwrap(),
        (lo..=hi).map(|k| Point::scalar(k as f64)),
    )
    .unwrap()
}

pub fn integer_subadditive() -> Result<(), String> {
    let z = integers(-200, 200);
    let policy = MatchPolicy::new(50.0).unwrap();
    let sixty_fourths = || (-20 * 64..=20i64 * 64).prop_map(|k| k as f64 / 64.0);
    run(128, (sixty_fourths(), sixty_fourths()), |(t1, t2)| {
        let e = |t: f64| eps_star(&z, &Point::scalar(t), &policy).map_err(fail);
        let (e1, e2, e12) = (e(t1)?, e(t2)?, e(t1 + t2)?);
        prop_assert!(e12 <= e1 + e2, "{} > {} + {}", e12, e1, e2);
        Ok(())
    })
}

fn line_set(items: &[(f64, i64)], half: f64, signed: bool) -> PointMultiSet {
    PointMultiSet::new(
        Window::interval(-half, half).unwrap(),
        items.iter().map(|(x, m)| (Point::scalar(*x), *m)).collect::<Vec<_>>(),
        signed,
    )
    .unwrap()
}

fn line_items(max: usize) -> impl Strategy<Value = Vec<(f64, i64)>> {
    prop::collection::vec((-20.0f64..20.0, prop_oneof![-3i64..=-1, 1i64..=3]), 0..max)
}

pub fn convolution_linear() -> Result<(), String> {
    run(64, (line_items(40), line_items(40), 0.1f64..0.5, -18.0f64..18.0), |(a, b, s, x)| {
        let union: Vec<(f64, i64)> = a.iter().chain(&b).copied().collect();
        let phi = Mollifier::new(s).unwrap();
        let x = Point::scalar(x);
        let g = |items: &[(f64, i64)]| convolve(&line_set(items, 20.0, true), &phi, &x).map(|c| c.value).map_err(fail);
        let (ga, gb, gu) = (g(&a)?, g(&b)?, g(&union)?);
        prop_assert!((gu - ga - gb).abs() <= 1e-9, "{} vs {} + {}", gu, ga, gb);
        Ok(())
    })
}

pub fn convolution_bounded() -> Result<(), String> {
    run(128, (line_items(80), 0.05f64..=0.5, -18.0f64..18.0), |(items, s, x)| {
        let a = line_set(&items, 20.0, true);
        let phi = Mollifier::new(s).unwrap();
        let c = Point::scalar(x);
        let g = convolve(&a, &phi, &c).map_err(fail)?.value;
        let v = variation_in_ball(&a, &c, 1.0).map_err(fail)?;
        prop_assert!(g.abs() <= v as f64 + 1e-12, "|g| = {} > {}", g.abs(), v);
        Ok(())
    })
}

pub fn convolution_translation() -> Result<(), String> {
    run(64, (line_items(40), 0.1f64..0.5, -10.0f64..10.0, -5.0f64..5.0), |(items, s, x, t)| {
        let a = line_set(&items, 20.0, true);
        let phi = Mollifier::new(s).unwrap();
        let moved = a.translate(&Point::scalar(t)).map_err(fail)?;
        let g0 = convolve(&moved, &phi, &Point::scalar(x)).map_err(fail)?.value;
        let g1 = convolve(&a, &phi, &Point::scalar(x - t)).map_err(fail)?.value;
        prop_assert!((g0 - g1).abs() <= 1e-9, "{} vs {}", g0, g1);
        Ok(())
    })
}

pub fn zero_shift_difference() -> Result<(), String> {
    run(32, (line_items(60), 0.1f64..0.5), |(items, s)| {
        let a = line_set(&items, 20.0, true);
        let phi = Mollifier::new(s).unwrap();
        let grid = Grid::new(Window::interval(-15.0, 15.0).unwrap(), 1e-2).unwrap();
        prop_assert_eq!(weak_ap_sup_diff(&a, &phi, &Point::scalar(0.0), &grid).map_err(fail)?, 0.0);
        Ok(())
    })
}

pub fn convolution_lipschitz() -> Result<(), String> {
    run(128, (line_items(80), 0.05f64..=0.5, -18.0f64..18.0, 0.0f64..1.0), |(items, s, x, frac)| {
        let a = line_set(&items, 20.0, true);
        let phi = Mollifier::new(s).unwrap();
        let y = x + frac * (1.0 - s);
        let g = |p: f64| convolve(&a, &phi, &Point::scalar(p)).map(|c| c.value).map_err(fail);
        let v = variation_in_ball(&a, &Point::scalar(x), 1.0).map_err(fail)?;
        let lhs = (g(x)? - g(y)?).abs();
        let rhs = v as f64 * phi.deriv_sup() * (y - x).abs();
        prop_assert!(lhs <= rhs + 1e-12, "{} > {}", lhs, rhs);
        Ok(())
    })
}

pub fn counting_steps() -> Result<(), String> {
    let items = prop::collection::vec((-20.0f64..20.0, 1i64..=3), 1..50);
    run(64, (items, prop::collection::vec(-20.0f64..20.0, 30)), |(mut items, ts)| {
        items.push((0.5, 1));
        let a = line_set(&items, 20.0, false);
        let line = sort_line(&a).map_err(fail)?;
        let mut sorted = ts;
        sorted.sort_by(f64::total_cmp);
        let values: Vec<i64> = sorted.iter().map(|t| counting(&line, *t).unwrap()).collect();
        prop_assert!(values.windows(2).all(|w| w[0] <= w[1]));
        let pts: Vec<(f64, i64)> = a.items().iter().map(|w| (w.point.x(), w.multiplicity)).collect();
        for (i, (x, m)) in pts.iter().enumerate() {
            let before = if i == 0 { -20.0 } else { 0.5 * (pts[i - 1].0 + x) };
            let jump = counting(&line, *x).map_err(fail)? - counting(&line, before).map_err(fail)?;
            prop_assert_eq!(jump, *m);
        }
        Ok(())
    })
}

fn sine_sum(max_terms: usize) -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((0.1f64..5.0, 0.0f64..1.0), 1..=max_terms)
}

pub fn decompose_roundtrip() -> Result<(), String> {
    run(24, (0.5f64..3.0, sine_sum(3), 0.0f64..0.49), |(g, terms, frac)| {
        let total: f64 = terms.iter().map(|t| t.1).sum();
        let f = terms
            .iter()
            .map(|(l, a)| ExpPolynomial::sine(vec![*l], a / total * frac * g).unwrap())
            .fold(ExpPolynomial::zero(1), |acc, t| acc.add(&t).unwrap());
        let kmax = 2000;
        let pl = perturbed_lattice(&LatticeMatrix::scalar(1, g).unwrap(), &[f.clone()], &IndexBox::symmetric(1, kmax).unwrap())
            .map_err(fail)?;
        let d = decompose(&sort_line(&pl.set).map_err(fail)?).map_err(fail)?;
        let w = pl.set.window();
        let length = w.upper().x() - w.lower().x();
        let ratio = d.slope / g;
        prop_assert!((ratio - 1.0).abs() <= 10.0 / length, "D/g = {}", ratio);
        let tol = 2.0 * (d.slope - g).abs() * kmax as f64 + 1e-9;
        for k in d.f.k_min..=d.f.k_max() {
            let want = f.eval_real(&Point::scalar(k as f64)).map_err(fail)?;
            let got = d.f.get(k).unwrap();
            prop_assert!((got - want).abs() <= tol, "k = {}: {} vs {}", k, got, want);
        }
        Ok(())
    })
}

pub fn decomposition_identity() -> Result<(), String> {
    let items = prop::collection::vec((-20.0f64..20.0, 1i64..=2), 2..60);
    run(64, items, |mut items| {
        items.push((0.25, 1));
        let line = sort_line(&line_set(&items, 20.0, false)).map_err(fail)?;
        let d = decompose(&line).map_err(fail)?;
        for k in d.f.k_min..=d.f.k_max() {
            let a = line.get(k).unwrap();
            prop_assert!((d.slope * k as f64 + d.f.get(k).unwrap() - a).abs() <= 1e-9);
        }
        Ok(())
    })
}

pub fn discrepancy_card_bound() -> Result<(), String> {
    let samples = prop::collection::vec((0.0f64..1.0, 0.0f64..1.0), 200);
    run(16, (sine_sum(3), 0.0f64..0.49, samples), |(terms, frac, pairs)| {
        let total: f64 = terms.iter().map(|t| t.1).sum();
        let f = terms
            .iter()
            .map(|(l, a)| ExpPolynomial::sine(vec![*l], a / total * frac).unwrap())
            .fold(ExpPolynomial::zero(1), |acc, t| acc.add(&t).unwrap());
        let pl = perturbed_lattice(&LatticeMatrix::identity(1), &[f], &IndexBox::symmetric(1, 2000).unwrap())
            .map_err(fail)?;
        let line = sort_line(&pl.set).map_err(fail)?;
        let centers = center_sweep(pl.set.window(), 1.0, 0.05).map_err(fail)?;
        let m = card_bound(&pl.set, &centers).map_err(fail)?;
        let xh: Vec<(f64, f64)> = pairs
            .iter()
            .map(|(u, v)| {
                let h = 0.1 + v * 1000.0;
                (-2000.0 + u * (4000.0 - h), h)
            })
            .collect();
        let disc = discrepancy(&line, 1.0, &xh).map_err(fail)?;
        prop_assert!(disc <= 4.0 * m as f64, "{} > 4 * {}", disc, m);
        Ok(())
    })
}

pub fn valuation_shifts() -> Result<(), String> {
    run(512, (-1_000_000i64..1_000_000, 0u32..20), |(m, j)| {
        let n = 2 * m + if m == 0 { 2 } else { 0 };
        let base = two_adic(n).map_err(fail)?;
        prop_assert_eq!(two_adic(2 * n).map_err(fail)?, base + 1);
        prop_assert_eq!(two_adic(n * (1 << j)).map_err(fail)?, base + j);
        let odd = 2 * m + 1;
        prop_assert!(two_adic(odd).is_err());
        prop_assert_eq!(two_adic(odd * (1 << (j + 1))).map_err(fail)?, j + 1);
        Ok(())
    })
}

pub fn first_construction_masses() -> Result<(), String> {
    run(8, 2i64..3000, |n_max| {
        let a = theorem1_set(n_max).map_err(fail)?;
        let mut seen = 0;
        for n in (-n_max..=n_max).filter(|n| n % 2 == 0 && *n != 0) {
            let alpha = two_adic(n).map_err(fail)? as i64;
            let off = 1.0 / ((alpha + 1) * (alpha + 1)) as f64;
            let at = |x: f64| a.card_in(&Region::ball(Point::scalar(x), 1e-9)).map(|c| c.value).map_err(fail);
            prop_assert_eq!(at(n as f64 + off)?, alpha);
            prop_assert_eq!(at(n as f64 - off)?, -alpha);
            seen += 2;
        }
        prop_assert_eq!(a.len(), seen);
        Ok(())
    })
}

pub fn gap_structure() -> Result<(), String> {
    for n in [2, 3, 64, 1000, 1 << 11] {
        let (plus, _) = theorem2_set(n).map_err(|e| e.to_string())?.split_signs();
        let off = max_even_offset(&plus);
        ensure(off < 0.25, || format!("N = {n}: offset {off}"))?;
    }
    Ok(())
}

pub fn dichotomy() -> Result<(), String> {
    let a = theorem1_set(1 << 11).map_err(|e| e.to_string())?;
    let var = verify_unbounded_variation(&a, 10).map_err(|e| e.to_string())?;
    let phi = Mollifier::new(0.4).map_err(|e| e.to_string())?;
    let grid = Grid::new(Window::interval(-300.0, 300.0).unwrap(), 1e-3).unwrap();
    let weak = verify_distributional_ap(&a, &phi, &[3, 4, 5, 6, 7, 8], 2, &grid, 1e-6).map_err(|e| e.to_string())?;
    ensure(var.holds && weak.holds, || format!("variation {var:?}, weak {weak:?}"))
}

fn random_set() -> impl Strategy<Value = PointMultiSet> {
    (1usize..=3, any::<bool>()).prop_flat_map(|(d, signed)| {
        let items = if signed { signed_items(d, 20, 30).boxed() } else { positive_items(d, 20, 30).boxed() };
        (Just(d), Just(signed), items, prop::collection::vec(-1e3f64..1e3, 30)).prop_map(|(d, signed, items, jitter)| {
            // irrational-looking coordinates exercise the digit count
            let items: Vec<(Vec<f64>, i64)> = items
                .into_iter()
                .enumerate()
                .map(|(i, (c, m))| (c.iter().map(|x| (x + jitter[i % 30] * 1e-3 / 7.0).clamp(-20.0, 20.0)).collect(), m))
                .collect();
            build(d, 20, &items, signed)
        })
    })
}

pub fn format_roundtrip() -> Result<(), String> {
    run(64, random_set(), |a| {
        let text = cli::format::to_string(&a);
        let b = cli::format::parse(&text).map_err(fail)?;
        prop_assert_eq!(&a, &b);
        prop_assert_eq!(cli::format::to_string(&b), text);
        Ok(())
    })?;
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    for kind in [
        vec!["sine", "--K", "300"],
        vec!["sine", "--dim", "2", "--K", "10"],
        vec!["perturbed", "--gamma", "2", "--F", "1:0.1", "--K", "200"],
        vec!["theorem1", "--N", "512"],
        vec!["theorem2", "--N", "512"],
        vec!["corollary", "--N", "512"],
    ] {
        let out = dir.path().join("set.txt");
        let mut args = vec!["apset", "--report", dir.path().join("r.json").to_str().unwrap().to_string().leak(), "generate"];
        args.extend(kind.iter().copied());
        args.extend(["--out", out.to_str().unwrap()]);
        ensure(cli::run(args.clone()) == 0, || format!("{args:?} failed"))?;
        let text = std::fs::read_to_string(&out).map_err(|e| e.to_string())?;
        let parsed = cli::format::parse(&text).map_err(|e| e.to_string())?;
        ensure(cli::format::to_string(&parsed) == text, || format!("{kind:?} does not round-trip"))?;
    }
    Ok(())
}

fn strip_wall_time(path: &Path) -> serde_json::Value {
    let mut v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    v.as_object_mut().unwrap().remove("wall_time");
    v
}

fn command_lines(dir: &Path) -> Vec<Vec<String>> {
    let p = |name: &str| dir.join(name).to_str().unwrap().to_string();
    let s = |xs: &[&str]| xs.iter().map(|x| x.to_string()).collect::<Vec<_>>();
    vec![
        s(&["generate", "sine", "--K", "400", "--eps", "0.01", "--bound", "500", "--out", &p("sine.txt")]),
        s(&["periods", &p("sine.txt"), "--eps", "0.05", "--candidates", "1:1:100", "--csv", &p("eps.csv")]),
        s(&["periods", &p("sine.txt"), "--eps", "0.01", "--margin", "20", "--kronecker", "--F", "1:0.2", "--bound", "200"]),
        s(&["check", &p("sine.txt"), "--tau", "710", "--eps", "0.05"]),
        s(&["density", &p("sine.txt"), "--radii", "10,100", "--centers", "0;-50"]),
        s(&["convolve", &p("sine.txt"), "--tau-list", "44;120", "--grid", "-100;100", "--grid-step", "0.01", "--csv", &p("g.csv")]),
        s(&["decompose", &p("sine.txt"), "--q-list", "3,44,355", "--taus", "355", "--f-csv", &p("f.csv")]),
        s(&["counterexample", "theorem1", "--N", "1024", "--K", "9", "--grid", "-50;50"]),
        s(&["counterexample", "theorem2", "--N", "1024", "--grid", "-50;50", "--tau-max", "32"]),
        s(&["counterexample", "corollary", "--N", "1024", "--tau-max", "32"]),
    ]
}

pub fn report_determinism() -> Result<(), String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    for (i, line) in command_lines(dir.path()).into_iter().enumerate() {
        let mut reports = Vec::new();
        for round in 0..2 {
            let report = dir.path().join(format!("r{i}_{round}.json"));
            let mut args = vec!["apset".to_string(), "--report".into(), report.to_str().unwrap().into()];
            args.extend(line.iter().cloned());
            let code = cli::run(&args);
            ensure(code == 0, || format!("{line:?} exited {code}"))?;
            reports.push(strip_wall_time(&report));
        }
        ensure(reports[0] == reports[1], || format!("{line:?} is not deterministic"))?;
    }
    Ok(())
}

pub fn exit_codes() -> Result<(), String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let p = |name: &str| dir.path().join(name).to_str().unwrap().to_string();
    let report = p("r.json");
    std::fs::write(p("bad.txt"), "apset v9 dim=1\n").unwrap();
    let z = integers(-100, 100);
    cli::format::write(Path::new(&p("z.txt")), &z).map_err(|e| e.to_string())?;
    cli::format::write(Path::new(&p("t1.txt")), &theorem1_set(64).unwrap()).map_err(|e| e.to_string())?;
    let cube = build(2, 5, &[(vec![0.0, 0.0], 1), (vec![1.0, 1.0], 1)], false);
    cli::format::write(Path::new(&p("plane.txt")), &cube).map_err(|e| e.to_string())?;
    let cases: Vec<(i32, Vec<String>)> = [
        (0, vec!["generate", "sine", "--K", "50", "--out", &p("s.txt")]),
        (2, vec!["generate", "perturbed", "--gamma", "0", "--F", "1:0.1", "--out", &p("s2.txt")]),
        (2, vec!["generate", "perturbed", "--gamma", "1", "--F", "1:0.1:x", "--out", &p("s2.txt")]),
        (2, vec!["generate", "nonsense", "--out", &p("s2.txt")]),
        (0, vec!["periods", &p("z.txt"), "--eps", "0.1", "--candidates", "1:1:10"]),
        (2, vec!["periods", &p("z.txt"), "--eps", "0.1"]),
        (2, vec!["periods", &p("bad.txt"), "--eps", "0.1", "--candidates", "1:1:10"]),
        (0, vec!["check", &p("z.txt"), "--tau", "5", "--eps", "0.1"]),
        (1, vec!["check", &p("z.txt"), "--tau", "5.5", "--eps", "0.1"]),
        (2, vec!["check", &p("bad.txt"), "--tau", "5", "--eps", "0.1"]),
        (2, vec!["check", &p("missing.txt"), "--tau", "5", "--eps", "0.1"]),
        (0, vec!["density", &p("z.txt"), "--radii", "10,50"]),
        (2, vec!["density", &p("z.txt"), "--radii", "500"]),
        (0, vec!["convolve", &p("t1.txt"), "--tau-list", "8;16", "--grid", "-20;20"]),
        (2, vec!["convolve", &p("t1.txt"), "--tau-list", "8", "--grid", "-60;60"]),
        (0, vec!["decompose", &p("z.txt")]),
        (2, vec!["decompose", &p("plane.txt")]),
        (0, vec!["counterexample", "theorem1", "--N", "512", "--K", "8", "--grid", "-20;20"]),
        (1, vec!["counterexample", "theorem1", "--N", "512", "--K", "8", "--grid", "-20;20", "--tolerance=-100"]),
        (2, vec!["counterexample", "theorem1", "--N", "512", "--K", "12"]),
        (2, vec!["frobnicate"]),
    ]
    .into_iter()
    .map(|(c, args)| (c, args.into_iter().map(String::from).collect()))
    .collect();
    for (want, line) in cases {
        let mut args = vec!["apset".to_string(), "--report".into(), report.clone()];
        args.extend(line.iter().cloned());
        let got = cli::run(&args);
        ensure(got == want, || format!("{line:?}: exit {got}, expected {want}"))?;
    }
    Ok(())
}
