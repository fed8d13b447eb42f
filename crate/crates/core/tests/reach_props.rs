use std::sync::Arc;

use fracreach::model::{build_cubic, ConstantRule, CubicCase, QuasiLinearSystem};
use fracreach::reach::{contract_lambda, iterate_lambda, simulate, IterOptions, SimOptions, Slicing};
use fracreach::{Interval, IntervalMatrix, IntervalVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn constant(a: IntervalMatrix, nu: Interval, x0: &[(f64, f64)]) -> QuasiLinearSystem {
    QuasiLinearSystem::new(nu, Arc::new(ConstantRule::new(a)), IntervalVector::from_bounds(x0).unwrap()).unwrap()
}

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(f64::MIN_POSITIVE)
}

#[test]
fn contractor_never_widens() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let opts = IterOptions::default();
    let mut contracted = 0;
    for case in 0..1000 {
        let a_lo = rng.random_range(-3.0..-0.1);
        let a = Interval::new(a_lo, a_lo + rng.random_range(0.0..0.3)).unwrap();
        let nu_lo = rng.random_range(0.5..1.0);
        let nu = Interval::new(nu_lo, (nu_lo + rng.random_range(0.0..0.02)).min(1.0)).unwrap();
        let x_lo = rng.random_range(0.1..2.0);
        let x0 = [(x_lo, x_lo + rng.random_range(0.0..0.5))];
        let sys = if case % 2 == 0 {
            constant(IntervalMatrix::new(1, 1, vec![a]).unwrap(), nu, &x0)
        } else {
            build_cubic(if case % 4 == 1 { CubicCase::A } else { CubicCase::B })
        };
        let dd = sys.untransformed();
        let t = rng.random_range(0.05..1.0);
        let longer = t * rng.random_range(1.0..2.0);
        let (Ok(curr), Ok(reference)) =
            (iterate_lambda(&dd, dd.z0(), t, &opts), iterate_lambda(&dd, dd.z0(), longer, &opts))
        else {
            continue;
        };
        let lo = rng.random_range(0.0..t);
        let window = Interval::new(lo, rng.random_range(lo..=t)).unwrap();
        let out = contract_lambda(&curr, &reference, &dd, window, window).unwrap();
        assert!(out.lambdas.subset_of(&curr.lambdas), "case {case}: {} ⊄ {}", out.lambdas, curr.lambdas);
        contracted += usize::from(out.lambdas != curr.lambdas);
    }
    assert!(contracted > 0);
}

#[test]
fn linear_scalar_iteration_recovers_the_coefficient() {
    for (a, nu) in [(-2.0, 0.7), (-0.5, 0.5), (-1.0, 1.0), (0.3, 0.9)] {
        let sys = constant(IntervalMatrix::from_points(1, 1, &[a]).unwrap(), Interval::point(nu), &[(1.0, 1.2)]);
        let dd = sys.untransformed();
        let e = iterate_lambda(&dd, dd.z0(), 1.0, &IterOptions::default()).unwrap();
        assert!(e.lambdas[0].contains(a) && e.lambdas[0].width() <= 1e-9, "a = {a}: {}", e.lambdas[0]);
    }
}

#[test]
fn accepted_iterates_are_nested() {
    let dd = build_cubic(CubicCase::A).untransformed();
    let mut prev: Option<IntervalVector> = None;
    for max_iter in 1..=12 {
        let opts = IterOptions { max_iter, stall_tol: 0.0, ..IterOptions::default() };
        let Ok(e) = iterate_lambda(&dd, dd.z0(), 0.5, &opts) else { continue };
        if let Some(p) = &prev {
            assert!(e.lambdas.subset_of(p), "iterate {max_iter}: {} ⊄ {p}", e.lambdas);
        }
        prev = Some(e.lambdas);
    }
    assert!(prev.is_some());
}

#[test]
fn unit_order_tube_is_the_exponential_enclosure() {
    let a = [-1.0, -2.0];
    let x0 = [(1.0, 1.1), (0.5, 0.6)];
    let sys = constant(IntervalMatrix::from_points(2, 2, &[a[0], 0.0, 0.0, a[1]]).unwrap(), Interval::ONE, &x0);
    let tube = simulate(&sys, 1.0, &Slicing::Uniform(0.25), &SimOptions::default()).unwrap();
    for t in [0.25, 0.5, 0.75] {
        let x = tube.point_enclosure(t).unwrap();
        for i in 0..2 {
            let e = (a[i] * t).exp();
            let (lo, hi) = (e * x0[i].0, e * x0[i].1);
            assert!(x[i].contains(lo) || rel_close(x[i].lo(), lo, 1e-12), "t = {t}");
            assert!(rel_close(x[i].lo(), lo, 1e-8) && rel_close(x[i].hi(), hi, 1e-8), "t = {t}, x{i} = {}", x[i]);
        }
    }
    for s in &tube.slices {
        assert!(s.mu.iter().all(|&m| m == 0.0));
        let z = s.evaluate(Interval::point(s.t_end)).unwrap();
        for (zi, ze) in z.iter().zip(s.z_end.iter()) {
            assert!(rel_close(zi.lo(), ze.lo(), 1e-8) && rel_close(zi.hi(), ze.hi(), 1e-8));
        }
    }
}

#[test]
fn running_supremum_never_decreases() {
    for case in [CubicCase::A, CubicCase::B] {
        let tube = simulate(&build_cubic(case), 1.0, &Slicing::Uniform(0.125), &SimOptions::default()).unwrap();
        for w in tube.slices.windows(2) {
            for (a, b) in w[0].z_sup.iter().zip(&w[1].z_sup) {
                assert!(a <= b);
            }
        }
    }
}

#[test]
fn cubic_a_first_slice_parameter() {
    let sys = build_cubic(CubicCase::A);
    let tube = simulate(&sys, 1.0, &Slicing::Uniform(1.0 / 16.0), &SimOptions::default()).unwrap();
    let l = tube.slices[0].enclosure.lambdas[0];
    assert!(l.subset_of(&Interval::new(-2.0, -1.23).unwrap()), "{l}");
}

#[test]
fn cubic_a_state_at_the_end() {
    let sys = build_cubic(CubicCase::A);
    let tube = simulate(&sys, 1.0, &Slicing::Uniform(1.0), &SimOptions::default()).unwrap();
    let x = tube.point_enclosure(1.0).unwrap()[0];
    assert!(x.subset_of(&Interval::new(0.18, 0.94).unwrap()), "{x}");
    assert!(x.lo() > 0.0 && x.hi() < 1.0);
}

#[test]
fn tube_rows_are_ordered_and_cover_the_horizon() {
    let tube = simulate(&build_cubic(CubicCase::B), 2.0, &Slicing::Uniform(0.5), &SimOptions::default()).unwrap();
    assert_eq!(tube.rows.first().unwrap().t.lo(), 0.0);
    assert_eq!(tube.t_end(), 2.0);
    for w in tube.rows.windows(2) {
        assert!(w[0].t.lo() <= w[1].t.lo() && w[1].t.lo() <= w[0].t.hi());
    }
    for r in &tube.rows {
        assert!(r.x.iter().all(|x| x.lo() <= x.hi() && x.is_finite()));
    }
}

#[test]
fn zero_crossing_initial_box_is_reported() {
    let sys = constant(IntervalMatrix::from_points(1, 1, &[-1.0]).unwrap(), Interval::point(0.5), &[(-0.1, 0.2)]);
    let err = simulate(&sys, 1.0, &Slicing::Uniform(0.5), &SimOptions::default()).unwrap_err();
    assert!(err.to_string().contains("bisect"), "{err}");
}
