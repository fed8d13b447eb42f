mod common;

use std::cmp::Ordering;

use common::Dyadic;
use fracreach::Interval;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn encloses_exact(r: &Interval, v: &Dyadic) -> bool {
    Dyadic::of(r.lo()).cmp(v) != Ordering::Greater && Dyadic::of(r.hi()).cmp(v) != Ordering::Less
}

/// `x / y ∈ r` decided exactly as `lo·y ≤ x ≤ hi·y` (sign-adjusted).
fn encloses_quotient(r: &Interval, x: f64, y: f64) -> bool {
    let (dx, dy) = (Dyadic::of(x), Dyadic::of(y));
    let lo = Dyadic::of(r.lo()).mul(&dy);
    let hi = Dyadic::of(r.hi()).mul(&dy);
    if y > 0.0 {
        lo.cmp(&dx) != Ordering::Greater && hi.cmp(&dx) != Ordering::Less
    } else {
        lo.cmp(&dx) != Ordering::Less && hi.cmp(&dx) != Ordering::Greater
    }
}

fn scaled(rng: &mut ChaCha8Rng) -> f64 {
    let m: f64 = rng.random_range(-1.0..1.0);
    m * 10f64.powi(rng.random_range(-8..8))
}

fn random_interval(rng: &mut ChaCha8Rng) -> Interval {
    let (a, b) = (scaled(rng), scaled(rng));
    Interval::new(a.min(b), a.max(b)).unwrap()
}

fn pick(iv: &Interval, rng: &mut ChaCha8Rng) -> f64 {
    match rng.random_range(0..4) {
        0 => iv.lo(),
        1 => iv.hi(),
        _ => (iv.lo() + (iv.hi() - iv.lo()) * rng.random::<f64>()).clamp(iv.lo(), iv.hi()),
    }
}

#[test]
fn arithmetic_contains_exact_results_of_random_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..100_000 {
        let (a, b) = (random_interval(&mut rng), random_interval(&mut rng));
        let (x, y) = (pick(&a, &mut rng), pick(&b, &mut rng));
        let (dx, dy) = (Dyadic::of(x), Dyadic::of(y));
        assert!(encloses_exact(&(a + b), &dx.add(&dy)), "{a} + {b} at {x}, {y}");
        assert!(encloses_exact(&(a - b), &dx.add(&dy.neg())), "{a} - {b} at {x}, {y}");
        assert!(encloses_exact(&(a * b), &dx.mul(&dy)), "{a} * {b} at {x}, {y}");
        if !b.contains_zero() {
            assert!(encloses_quotient(&(a / b).unwrap(), x, y), "{a} / {b} at {x}, {y}");
        }
    }
}

#[test]
fn decimal_sum_is_widened() {
    let s = Interval::point(0.1) + Interval::point(0.2);
    assert!(s.lo() < s.hi());
    // 0.1 + 0.2 in binary lies strictly between the two endpoints
    let exact = Dyadic::of(0.1).add(&Dyadic::of(0.2));
    assert!(encloses_exact(&s, &exact));
}

#[test]
fn power_grid_contains_pointwise_powers() {
    let base = Interval::new(0.25, 4.0).unwrap();
    let nu = Interval::new(0.8, 0.9).unwrap();
    let p = base.pow_real(&nu).unwrap();
    for i in 0..=40 {
        let x = 0.25 + 3.75 * i as f64 / 40.0;
        for j in 0..=10 {
            let y = 0.8 + 0.1 * j as f64 / 10.0;
            assert!(p.contains(x.powf(y)), "{x}^{y} outside {p}");
        }
    }
    assert!((p.lo() - 0.25f64.powf(0.9)).abs() < 1e-14 && (p.hi() - 4f64.powf(0.9)).abs() < 1e-13);
}

fn interval() -> impl Strategy<Value = Interval> {
    (-1e6..1e6f64, 0.0..1e3f64).prop_map(|(m, r)| Interval::mid_rad(m, r).unwrap())
}

/// An interval and a random sub-interval of it.
fn nested() -> impl Strategy<Value = (Interval, Interval)> {
    (interval(), 0.0..=1.0f64, 0.0..=1.0f64).prop_map(|(outer, u, v)| {
        let w = outer.hi() - outer.lo();
        let (a, b) = (outer.lo() + w * u.min(v), outer.lo() + w * u.max(v));
        let inner = Interval::new(a.clamp(outer.lo(), outer.hi()), b.clamp(outer.lo(), outer.hi())).unwrap();
        (inner, outer)
    })
}

proptest! {
    #[test]
    fn operations_are_inclusion_isotone((a, a2) in nested(), (b, b2) in nested()) {
        prop_assert!((a + b).subset_of(&(a2 + b2)));
        prop_assert!((a - b).subset_of(&(a2 - b2)));
        prop_assert!((a * b).subset_of(&(a2 * b2)));
        if !b2.contains_zero() {
            prop_assert!((a / b).unwrap().subset_of(&(a2 / b2).unwrap()));
        }
    }

    #[test]
    fn lattice_laws(a in interval(), b in interval()) {
        let h = a.hull(&b);
        prop_assert!(a.subset_of(&h) && b.subset_of(&h));
        prop_assert_eq!(h, b.hull(&a));
        match (a.intersect(&b), b.intersect(&a)) {
            (Ok(i), Ok(j)) => {
                prop_assert_eq!(i, j);
                prop_assert!(i.subset_of(&a) && i.subset_of(&b));
            }
            (Err(_), Err(_)) => prop_assert!(a.hi() < b.lo() || b.hi() < a.lo()),
            _ => prop_assert!(false, "intersection not commutative"),
        }
        prop_assert_eq!(a.intersect(&a).unwrap(), a);
    }

    #[test]
    fn real_powers_contain_samples(
        lo in 0.0..10.0f64, w in 0.0..10.0f64, nlo in 0.01..1.0f64, nw in 0.0..0.5f64,
        u in 0.0..=1.0f64, v in 0.0..=1.0f64,
    ) {
        let base = Interval::new(lo, lo + w).unwrap();
        let nu = Interval::new(nlo, (nlo + nw).min(1.0)).unwrap();
        let p = base.pow_real(&nu).unwrap();
        let x = (lo + w * u).min(base.hi());
        let y = (nu.lo() + (nu.hi() - nu.lo()) * v).clamp(nu.lo(), nu.hi());
        prop_assert!(p.contains(x.powf(y)), "{}^{} outside {}", x, y, p);
    }

    #[test]
    fn endpoints_stay_ordered(a in interval(), b in interval()) {
        for r in [a + b, a - b, a * b, a.sqr(), a.abs(), a.powi(3)] {
            prop_assert!(r.lo() <= r.hi());
        }
    }
}
