use fracreach::linalg::{eigenvalues, transform_state};
use fracreach::model::{
    battery_output, build_battery, build_cubic, char_poly, poly_from_roots, BatteryParams, CubicCase, Scenario,
    BATTERY_EIGENVALUES,
};
use fracreach::{Interval, IntervalVector};
use proptest::prelude::*;

/// Transformed initial boxes as printed, lower and upper endpoint strings.
const PRINTED_Z0: [(Scenario, [(&str, &str); 3]); 2] = [
    (Scenario::BatterySmall, [("0.089139", "0.091348"), ("7.880509", "8.120525"), ("-9.110572", "-8.890557")]),
    (Scenario::BatteryLarge, [("0.079204", "0.101283"), ("6.800442", "9.200592"), ("-10.10064", "-7.900495")]),
];

fn decimals(s: &str) -> i32 {
    s.split('.').nth(1).map_or(0, |f| f.len() as i32)
}

#[test]
fn transformed_initial_boxes_match_the_printed_ones() {
    for (sc, printed) in PRINTED_Z0 {
        let (sys, layout) = sc.setup().unwrap();
        let dd = sys.diag_dominant(layout.as_ref()).unwrap();
        let z0 = transform_state(dd.transform(), sys.x0()).unwrap();
        for (i, (lo, hi)) in printed.iter().enumerate() {
            let (plo, phi): (f64, f64) = (lo.parse().unwrap(), hi.parse().unwrap());
            assert!((z0[i].lo() - plo).abs() <= 1e-5 * plo.abs(), "{sc} z{i} lo {} vs {lo}", z0[i].lo());
            assert!((z0[i].hi() - phi).abs() <= 1e-5 * phi.abs(), "{sc} z{i} hi {} vs {hi}", z0[i].hi());
            // the print is our enclosure rounded outward
            let (dl, dh) = (10f64.powi(decimals(lo)), 10f64.powi(decimals(hi)));
            assert!(((z0[i].lo() * dl).floor() / dl - plo).abs() < 0.5 / dl, "{sc} z{i} lo");
            assert!(((z0[i].hi() * dh).ceil() / dh - phi).abs() < 0.5 / dh, "{sc} z{i} hi");
        }
    }
}

#[test]
fn closed_loop_polynomial_matches_the_desired_poles() {
    let m = Scenario::BatterySmall.battery_model().unwrap().unwrap();
    let got = char_poly(&m.a_closed);
    let want = poly_from_roots(&BATTERY_EIGENVALUES);
    for (g, w) in got.iter().zip(&want) {
        assert!((g - w).abs() <= 1e-6 * w.abs(), "{got:?} vs {want:?}");
    }
    let a33 = m.a_closed[(2, 2)];
    assert!((a33 + 0.4832).abs() <= 5e-4, "A_C33 = {a33}");
    let nominal = -1.0 / (m.params.r * m.params.q);
    assert!((nominal + 0.483_233).abs() < 1e-6);
}

#[test]
fn zero_inflation_gives_a_point_matrix_with_the_desired_spectrum() {
    let x0 = Scenario::BatterySmall.battery_x0().unwrap();
    let m = build_battery(&BatteryParams::default(), &BATTERY_EIGENVALUES, 0.0, 0.0, true, x0).unwrap();
    assert!(m.a_interval.is_point());
    let (mut re, im) = eigenvalues(&m.a_closed).unwrap();
    assert!(im.iter().all(|v| *v == 0.0));
    re.sort_by(f64::total_cmp);
    let mut want = BATTERY_EIGENVALUES;
    want.sort_by(f64::total_cmp);
    for (g, w) in re.iter().zip(&want) {
        assert!((g - w).abs() <= 1e-6 * w.abs(), "{re:?}");
    }
}

#[test]
fn output_refines_with_more_slabs() {
    let p = BatteryParams::default();
    let x = IntervalVector::from_bounds(&[(0.2, 0.9), (-0.001, 0.001), (0.05, 0.1)]).unwrap();
    let mut prev = battery_output(&x, 1.0, &p, 1).unwrap();
    for n in [2, 4, 8, 16, 32, 64, 128] {
        let v = battery_output(&x, 1.0, &p, n).unwrap();
        assert!(v.subset_of(&prev), "{n} slabs: {v} not inside {prev}");
        prev = v;
    }
}

fn nonneg_box() -> impl Strategy<Value = (Interval, Interval)> {
    (0.0..2.0f64, 0.0..1.0f64, 0.0..=1.0f64, 0.0..=1.0f64).prop_map(|(lo, w, u, v)| {
        let outer = Interval::new(lo, lo + w).unwrap();
        let (a, b) = (lo + w * u.min(v), lo + w * u.max(v));
        (Interval::new(a.min(outer.hi()), b.min(outer.hi())).unwrap(), outer)
    })
}

fn nested_box3() -> impl Strategy<Value = (IntervalVector, IntervalVector)> {
    prop::collection::vec((-2.0..2.0f64, 0.0..0.5f64, 0.0..=1.0f64, 0.0..=1.0f64), 3).prop_map(|v| {
        let outer: Vec<(f64, f64)> = v.iter().map(|&(c, w, ..)| (c, c + w)).collect();
        let inner: Vec<(f64, f64)> =
            v.iter().map(|&(c, w, s, t)| ((c + w * s.min(t)).min(c + w), (c + w * s.max(t)).min(c + w))).collect();
        (IntervalVector::from_bounds(&inner).unwrap(), IntervalVector::from_bounds(&outer).unwrap())
    })
}

proptest! {
    #[test]
    fn cubic_factor_is_inclusion_isotone((inner, outer) in nonneg_box()) {
        for case in [CubicCase::A, CubicCase::B] {
            let sys = build_cubic(case);
            let a = sys.eval_a(&IntervalVector::new(vec![inner])).unwrap();
            let b = sys.eval_a(&IntervalVector::new(vec![outer])).unwrap();
            prop_assert!(a.subset_of(&b));
        }
    }

    #[test]
    fn battery_factor_is_inclusion_isotone((inner, outer) in nested_box3()) {
        let (sys, _) = Scenario::BatteryLarge.setup().unwrap();
        prop_assert!(sys.eval_a(&inner).unwrap().subset_of(&sys.eval_a(&outer).unwrap()));
        prop_assert!(sys.eval_f(&inner).unwrap().subset_of(&sys.eval_f(&outer).unwrap()));
    }

    #[test]
    fn quasi_linear_cubic_matches_the_direct_form((b, _) in nonneg_box()) {
        for case in [CubicCase::A, CubicCase::B] {
            let sys = build_cubic(case);
            let x = IntervalVector::new(vec![b]);
            let f = sys.eval_f(&x).unwrap();
            let p = match case {
                CubicCase::A => Interval::new(-2.0, -1.99).unwrap(),
                CubicCase::B => Interval::new(-2.0, -1.0).unwrap(),
            };
            let direct = p * b.powi(3);
            prop_assert!(f[0].subset_of(&direct.eps_inflate(1e-15, 1e-300)), "{} vs {}", f[0], direct);
            prop_assert!(direct.subset_of(&f[0].eps_inflate(1e-15, 1e-300)));
        }
    }
}
