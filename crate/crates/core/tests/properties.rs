mod common;

use std::f64::consts::PI;

use common::*;
use nalgebra::ComplexField;
use perdde::certify::{delay_family, delay_family_bound};
use perdde::fourier::fejer_coeffs;
use perdde::mild::mild_check_coeffs;
use perdde::scalar::{opnorm, singular_values};
use perdde::solver::{default_truncation, equation_defect};
use perdde::symbol::multiplier;
use perdde::*;
use proptest::prelude::*;
use rand::Rng;

fn poly_strategy(d: usize, max_mode: i64) -> impl Strategy<Value = FourierCoefficients64> {
    prop::collection::vec((-max_mode..=max_mode, prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), d)), 1..8)
        .prop_map(move |terms| {
            FourierCoefficients64::from_modes(
                d,
                terms
                    .into_iter()
                    .map(|(k, v)| (k, CVector64::from_iterator(d, v.into_iter().map(|(re, im)| cplx(re, im))))),
            )
            .unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn analyze_inverts_sampling(f in poly_strategy(2, 12), extra in 0usize..20) {
        let kmax = f.max_mode();
        let m = 2 * kmax + 1 + extra;
        let samples = SampledSignal64::from_coeffs(&f, m).unwrap();
        let back = analyze(&samples, kmax).unwrap();
        prop_assert!(back.max_abs_diff(&f) <= 1e-12);
    }

    #[test]
    fn parseval_on_grid(f in poly_strategy(3, 10), extra in 0usize..10) {
        let m = 2 * f.max_mode() + 1 + extra;
        let samples = SampledSignal64::from_coeffs(&f, m).unwrap();
        prop_assert!((samples.mean_energy() - f.energy()).abs() <= 1e-10);
    }

    #[test]
    fn linearity_of_solve(f in poly_strategy(1, 8), g in poly_strategy(1, 8), a in -2.0..2.0f64, b in -2.0..2.0f64) {
        let sys = s1();
        let k = 8.max(default_truncation(&sys, &f));
        let (alpha, beta) = (cplx(a, 0.5), cplx(-0.25, b));
        let combo = f.combine(alpha, &g, beta);
        let lhs = solve(&sys, &combo, k).unwrap().coeffs;
        let rhs = solve(&sys, &f, k).unwrap().coeffs.combine(alpha, &solve(&sys, &g, k).unwrap().coeffs, beta);
        prop_assert!(lhs.max_abs_diff(&rhs) <= 1e-12);
    }

    #[test]
    fn semigroup_law(seed in any::<u64>(), s in 0.0..2.0 * PI, t in 0.0..2.0 * PI) {
        let mut rng = rng(seed);
        let d = rng.random_range(1..=4);
        let a = complex_matrix(&mut rng, d, 1.0);
        let lhs = semigroup(&a, s + t, 1e-15);
        let rhs = semigroup(&a, s, 1e-15) * semigroup(&a, t, 1e-15);
        let bound = 1e-10 * ((s + t) * opnorm(&a)).exp();
        prop_assert!(opnorm(&(lhs - rhs)) <= bound);
    }
}

#[test]
fn real_flag_gives_real_values() {
    let mut r = rng(1);
    for _ in 0..50 {
        let f = random_real_poly(&mut r, 2, 9);
        assert!(f.real_valued());
        for m in 0..97 {
            let v = f.evaluate(2.0 * PI * m as f64 / 97.0);
            assert!(v.iter().all(|z| z.im.abs() <= 1e-12));
        }
    }
}

/// Square wave `sign(sin t)` truncated at a high mode; Fejér means of it stay
/// within [−1, 1] while the Dirichlet sums overshoot (Gibbs).
#[test]
fn fejer_never_overshoots() {
    let top = 255;
    let f = FourierCoefficients64::scalar(
        (-top..=top)
            .filter(|k| k % 2 != 0)
            .map(|k| (k, cplx(0.0, -2.0 / (PI * k as f64)))),
    );
    let m = 4096;
    let grid: Vec<f64> = (0..m).map(|j| 2.0 * PI * j as f64 / m as f64).collect();
    let sup = |h: &dyn Fn(f64) -> f64| grid.iter().map(|&t| h(t)).fold(0.0, f64::max);
    let f_sup = sup(&|t| f.evaluate(t)[0].modulus());
    for l in [8usize, 32, 128, 255] {
        let s = sup(&|t| fejer_sum(&f, l, t)[0].modulus());
        assert!(s <= 1.0 + 1e-10, "l = {l}: {s}");
        assert!(s <= f_sup + 1e-10);
    }
    let dirichlet = sup(&|t| dirichlet_sum(&f, 63, t)[0].modulus());
    assert!(dirichlet > 1.05);

    let mut r = rng(2);
    for _ in 0..20 {
        let g = random_poly(&mut r, 2, 12, 10);
        let g_sup = sup(&|t| g.evaluate(t).norm());
        for l in [1usize, 4, 12, 20] {
            assert!(sup(&|t| fejer_sum(&g, l, t).norm()) <= g_sup + 1e-10);
        }
    }
}

#[test]
fn fejer_formulas_agree() {
    let mut r = rng(3);
    for _ in 0..100 {
        let d = r.random_range(1..=3);
        let f = random_poly(&mut r, d, 20, 12);
        let l = r.random_range(0..=30);
        let t = r.random_range(-PI..PI);
        let diff = (fejer_sum(&f, l, t) - fejer_sum_cesaro(&f, l, t)).norm();
        assert!(diff <= 1e-12, "{diff}");
    }
}

#[test]
fn symbol_conjugate_symmetry_for_real_systems() {
    let mut r = rng(4);
    for _ in 0..50 {
        let sys = random_system(&mut r);
        for k in 0..=20 {
            let plus = assemble_delta(&sys, k).delta;
            let minus = assemble_delta(&sys, -k).delta;
            assert!(opnorm(&(minus - plus.map(|z| z.conj()))) <= 1e-13);
        }
    }
}

#[test]
fn symbol_grows_linearly() {
    let mut r = rng(5);
    for _ in 0..50 {
        let sys = random_system(&mut r);
        let slack = sys.norm_a() + sys.n_delays() as f64 * sys.norm_b();
        for k in -40i64..=40 {
            let e = assemble_delta(&sys, k);
            let lower = k.abs() as f64 - slack;
            assert!(opnorm(&e.delta) >= lower - 1e-12);
            assert!(e.sigma_min >= lower - 1e-12);
        }
    }
}

#[test]
fn singular_modes_symmetric_for_real_systems() {
    // A = 0, B = −1, r = π/2: Δ_{±1} = ±i + e^{∓iπ/2} = 0.
    let sys = DelaySystem64::scalar(c(0.0), c(-1.0), vec![PI / 2.0]).unwrap();
    let report = scan(&sys, 10);
    assert!(report.singular_modes.contains(&1) && report.singular_modes.contains(&-1));

    let mut r = rng(6);
    let mut systems: Vec<DelaySystem64> = (0..30).map(|_| random_system(&mut r)).collect();
    systems.push(sys);
    for sys in systems {
        let s = scan(&sys, 15).singular_modes;
        let mut mirrored: Vec<i64> = s.iter().map(|k| -k).collect();
        mirrored.sort();
        assert_eq!(s, mirrored);
    }
}

#[test]
fn real_data_gives_real_solution() {
    let mut r = rng(7);
    for _ in 0..30 {
        let sys = random_system(&mut r);
        let f = random_real_poly(&mut r, sys.dim(), 6);
        let Ok(sol) = solve(&sys, &f, default_truncation(&sys, &f)) else {
            continue;
        };
        for m in 0..64 {
            let v = sol.evaluate(2.0 * PI * m as f64 / 64.0);
            assert!(v.iter().all(|z| z.im.abs() <= 1e-10));
        }
    }
}

#[test]
fn derivative_is_multiplier_applied_to_forcing() {
    let mut r = rng(8);
    for _ in 0..30 {
        let sys = random_system(&mut r);
        let f = random_poly(&mut r, sys.dim(), 10, 8);
        let Ok(sol) = solve(&sys, &f, default_truncation(&sys, &f)) else {
            continue;
        };
        let dx = derivative_coeffs(&sol.coeffs);
        for (k, fk) in f.iter() {
            let mk = multiplier(&sys, k).unwrap();
            assert!((dx.coeff(k) - mk * fk).norm() <= 1e-10);
        }
    }
}

#[test]
fn perturbing_an_invertible_mode_raises_the_residual() {
    let sys = s1();
    let f = FourierCoefficients64::scalar([(1, c(1.0)), (-3, cplx(0.0, 0.5))]);
    let sol = solve(&sys, &f, 4).unwrap();
    let base = equation_defect(&sys, &sol.coeffs, &f, 64);
    assert!(base <= 1e-12);
    for k in -6i64..=6 {
        let mut x = sol.coeffs.clone();
        x.add_to_mode(k, &CVector64::from_element(1, cplx(1e-4, -2e-4)));
        assert!(equation_defect(&sys, &x, &f, 64) > base);
    }
    let zero = solve(&sys, &FourierCoefficients64::zero(1), 4).unwrap();
    assert!(zero.coeffs.is_zero());
}

#[test]
fn solution_closes_the_period() {
    let mut r = rng(9);
    for _ in 0..20 {
        let sys = damped_system(&mut r);
        let f = random_poly(&mut r, sys.dim(), 5, 6);
        let sol = solve(&sys, &f, default_truncation(&sys, &f)).unwrap();
        let check = mild_check(&sys, &sol, &f, MildOptions::default()).unwrap();
        assert!((sol.evaluate(2.0 * PI) - &check.phi).norm() <= 1e-10);
    }
}

#[test]
fn fejer_approximants_approach_the_fixed_point() {
    let sys = s1();
    let f = FourierCoefficients64::scalar((-48i64..=48).map(|k| (k, c(1.0 / (1.0 + (k * k) as f64)))));
    let sol = solve(&sys, &f, 48).unwrap();
    let opts = MildOptions::default();
    let full = mild_check(&sys, &sol, &f, opts).unwrap().fixed_point_residual;
    let residuals: Vec<f64> = [4usize, 8, 16, 32, 64, 128, 256]
        .iter()
        .map(|&l| mild_check_coeffs(&sys, &fejer_coeffs(&sol.coeffs, l), &f, opts).unwrap().fixed_point_residual)
        .collect();
    for w in residuals.windows(2) {
        assert!(w[1] <= w[0] * 1.05, "{residuals:?}");
    }
    let last = *residuals.last().unwrap();
    assert!(last < residuals[0] / 20.0, "{residuals:?}");
    assert!(last >= full - 1e-9);
    assert!(full <= 1e-6);
}

#[test]
fn tail_certificate_holds() {
    let mut r = rng(10);
    for _ in 0..50 {
        let sys = random_system(&mut r);
        let tail = tail_mode(&sys) as i64;
        for _ in 0..20 {
            let k = r.random_range(tail..=10 * tail) * if r.random_bool(0.5) { 1 } else { -1 };
            let e = assemble_delta(&sys, k);
            assert!(e.invertible);
            assert!(opnorm(&multiplier(&sys, k).unwrap()) <= 2.0 + 1e-9);
        }
    }
}

#[test]
fn rbound_collapses_for_diagonal_families() {
    let mut r = rng(11);
    for _ in 0..10 {
        let d = r.random_range(1..=3);
        let family: Vec<CMatrix64> = (0..r.random_range(1..=12))
            .map(|_| CMatrix64::from_diagonal(&random_vector(&mut r, d)))
            .collect();
        let top = family.iter().map(opnorm).fold(0.0, f64::max);
        let est = rbound_estimate(&family, 2.0, 300, 5).unwrap();
        assert!((est - top).abs() <= 1e-9, "{est} vs {top}");
    }
}

#[test]
fn rbound_is_monotone_in_trials() {
    let mut r = rng(12);
    let family: Vec<CMatrix64> = (0..8).map(|_| complex_matrix(&mut r, 3, 1.0)).collect();
    let top = family.iter().map(opnorm).fold(0.0, f64::max);
    let mut prev = 0.0;
    for trials in [0usize, 10, 100, 1000] {
        let est = rbound_estimate(&family, 2.0, trials, 9).unwrap();
        assert!(est >= prev);
        assert!(est <= top * (1.0 + 1e-9));
        prev = est;
    }
    let p3 = rbound_estimate(&family, 3.0, 200, 9).unwrap();
    assert!(p3 >= singular_values(&family[0])[0] - 1e-9);
}

#[test]
fn delay_family_stays_under_claimed_bound() {
    let mut r = rng(13);
    for _ in 0..10 {
        let sys = random_system(&mut r);
        let est = rbound_estimate(&delay_family(&sys, 20), 2.0, 500, 1).unwrap();
        assert!(est <= delay_family_bound(&sys, 2.0) + 1e-9);
    }
}

#[test]
fn variation_does_not_grow() {
    let sys = s1();
    let norms: Vec<(i64, f64)> = (-50i64..=50)
        .filter(|&k| k != -1)
        .map(|k| (k, opnorm(&variation_pair(&sys, k).unwrap().direct_diff)))
        .collect();
    let band = |lo: i64, hi: i64| {
        norms
            .iter()
            .filter(|(k, _)| (lo..=hi).contains(&k.abs()))
            .map(|p| p.1)
            .fold(0.0, f64::max)
    };
    assert!(band(25, 50) <= 2.0 * band(1, 25));
    assert!(variation_report(&sys, 50).unwrap().is_finite());
}

#[test]
fn single_precision_smoke() {
    let sys = DelaySystem32::scalar(cplx(-1.0f32, 0.0), cplx(0.5f32, 0.0), vec![std::f32::consts::PI]).unwrap();
    let f = FourierCoefficients32::scalar([(1, cplx(1.0f32, 0.0))]);
    let sol: PeriodicSolution32 = solve(&sys, &f, 4).unwrap();
    let expected = cplx(1.0f32, 0.0) / cplx(1.5f32, 1.0);
    assert!((sol.coeffs.coeff(1)[0] - expected).modulus() <= 1e-6);
    assert!(sol.residual_sup <= 1e-5);
    assert_eq!(scan(&sys, 8).verdict, Verdict::Solvable);
}
