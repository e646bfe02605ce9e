use proptest::prelude::*;

use ietlab::dynamics::{orbit, star_discrepancy};
use ietlab::iet::{build_composition, compose, CompositionSpec, Iet, Permutation};
use ietlab::numerics::{circle_distance, Fixed, NumericsConfig, Rational, Scalar};

fn cfg() -> NumericsConfig {
    NumericsConfig::default()
}

fn unit_rational() -> impl Strategy<Value = Rational> {
    (1i64..2000).prop_flat_map(|den| (0..den).prop_map(move |num| Rational::new(num, den)))
}

fn any_rational() -> impl Strategy<Value = Rational> {
    (-5000i64..5000, 1i64..500).prop_map(|(n, d)| Rational::new(n, d))
}

fn fixed_at(bits: u32) -> impl Strategy<Value = Fixed> {
    (any::<i64>(), any::<u64>()).prop_map(move |(hi, lo)| {
        let cfg = NumericsConfig::new(bits).unwrap();
        // a few units of magnitude with a full-width fraction
        let m = (num_bigint::BigInt::from(hi % 1024) << bits)
            + (num_bigint::BigInt::from(lo) << (bits - 64));
        Fixed::from_big_ratio(&m, &(num_bigint::BigInt::from(1) << bits), &cfg)
    })
}

fn rational_iet(max_m: usize) -> impl Strategy<Value = Iet<Rational>> {
    (1..=max_m)
        .prop_flat_map(|m| {
            (
                prop::collection::vec(1i64..50, m),
                Just((0..m).collect::<Vec<_>>()).prop_shuffle(),
            )
        })
        .prop_map(|(weights, images)| {
            let total: i64 = weights.iter().sum();
            let lengths = weights.iter().map(|&w| Rational::new(w, total)).collect();
            Iet::new(lengths, Permutation::from_zero_based(images).unwrap()).unwrap()
        })
}

proptest! {
    #[test]
    fn mod_one_lands_in_unit_interval_and_is_idempotent(a in any_rational(), f in fixed_at(256)) {
        let r = a.mod_one();
        prop_assert!(!r.is_negative() && r < Rational::new(1, 1));
        prop_assert_eq!(r.mod_one(), r.clone());
        prop_assert_eq!((a.clone() - &r).mod_one(), Rational::new(0, 1));
        let g = f.mod_one();
        prop_assert!(!g.is_negative() && g < Fixed::one(&cfg()));
        prop_assert_eq!(g.mod_one(), g);
    }

    #[test]
    fn fixed_addition_is_exact(a in fixed_at(256), b in fixed_at(256)) {
        prop_assert_eq!(a.clone() + &b - &b, a.clone());
        prop_assert_eq!(a.clone() + &b, b + &a);
    }

    #[test]
    fn fixed_display_round_trips(a in fixed_at(256), b in fixed_at(100)) {
        prop_assert_eq!(Fixed::parse(&a.to_string(), &cfg()).unwrap(), a);
        prop_assert_eq!(Fixed::parse(&b.to_string(), &NumericsConfig::new(100).unwrap()).unwrap(), b);
    }

    #[test]
    fn rotations_form_a_group(a in unit_rational(), b in unit_rational()) {
        let ab = compose(&Iet::rotation(&a), &Iet::rotation(&b)).unwrap();
        prop_assert_eq!(ab, Iet::rotation(&(a + &b).mod_one()));
    }

    #[test]
    fn composition_is_pointwise(s in rational_iet(6), t in rational_iet(6), x in unit_rational()) {
        let st = compose(&s, &t).unwrap();
        prop_assert_eq!(st.map(&x), s.map(&t.map(&x)));
        prop_assert!(st.len() < s.len() + t.len());
    }

    #[test]
    fn composition_is_associative(a in rational_iet(5), b in rational_iet(5), c in rational_iet(5)) {
        let left = compose(&compose(&a, &b).unwrap(), &c).unwrap();
        let right = compose(&a, &compose(&b, &c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn inverse_undoes(t in rational_iet(7), x in unit_rational()) {
        let inv = t.invert();
        prop_assert_eq!(inv.map(&t.map(&x)), x.clone());
        prop_assert_eq!(t.map(&inv.map(&x)), x);
        prop_assert!(compose(&inv, &t).unwrap().is_identity());
    }

    #[test]
    fn images_tile_the_interval(t in rational_iet(8)) {
        // interval i lands on [b_i + δ_i, b_{i+1} + δ_i); the images partition [0, 1)
        let mut images: Vec<(Rational, Rational)> = (0..t.len())
            .map(|i| {
                let d = &t.offsets()[i];
                (t.breakpoints()[i].clone() + d, t.breakpoints()[i + 1].clone() + d)
            })
            .collect();
        images.sort();
        let mut edge = Rational::new(0, 1);
        for (lo, hi) in images {
            prop_assert_eq!(&lo, &edge);
            edge = hi;
        }
        prop_assert_eq!(edge, Rational::new(1, 1));
    }

    #[test]
    fn composition_equals_stepwise(
        iets in prop::collection::vec(rational_iet(4), 1..4),
        coeffs in prop::collection::vec((1i64..20, 1i64..6), 3),
        alpha in unit_rational(),
        x in unit_rational(),
    ) {
        let c: Vec<Rational> = coeffs.iter().take(iets.len()).map(|&(p, q)| Rational::new(p, q)).collect();
        let spec = CompositionSpec::new(iets, c).unwrap();
        let s = build_composition(&spec, &alpha).unwrap();
        let mut y = x.clone();
        for (t, c) in spec.iets().iter().zip(spec.coefficients()) {
            y = t.map(&(y + &(c.clone() * &alpha)).mod_one());
        }
        prop_assert_eq!(s.map(&x), y);
    }

    #[test]
    fn discrepancy_is_in_unit_range(points in prop::collection::vec(unit_rational(), 1..40)) {
        let d = star_discrepancy(&points).unwrap();
        prop_assert!(d.is_positive() && d <= Rational::new(1, 1));
    }

    #[test]
    fn rotation_drift_shrinks_with_precision(num in 1u64..u64::MAX, x0 in 0u64..1000) {
        // the only rounding is in α itself, so n steps drift by at most n 2^-P
        let (lo, hi) = (NumericsConfig::new(128).unwrap(), NumericsConfig::new(256).unwrap());
        let alpha_lo = Fixed::from_ratio(num as i64 & i64::MAX, i64::MAX, &lo);
        let alpha_hi = Fixed::from_ratio(num as i64 & i64::MAX, i64::MAX, &hi);
        let n = 1000;
        let a = orbit(&Iet::rotation(&alpha_lo), &Fixed::from_ratio(x0 as i64, 1000, &lo), n).unwrap();
        let b = orbit(&Iet::rotation(&alpha_hi), &Fixed::from_ratio(x0 as i64, 1000, &hi), n).unwrap();
        for (j, (p, q)) in a.points.iter().zip(&b.points).enumerate() {
            let p_hi = Fixed::parse(&p.to_string(), &hi).unwrap();
            let gap = circle_distance(&p_hi, q).to_f64();
            prop_assert!(gap <= (j as f64 + 2.0) * (-128f64).exp2(), "step {}: {:e}", j, gap);
        }
    }
}
