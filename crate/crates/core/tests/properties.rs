use bifurc_core::angle::{Angle, Frac};
use bifurc_core::kneading::{cylinder_cover, kneading};
use bifurc_core::measure::{laplacian_measure, pairwise_sum, EmpiricalMeasure, GridField, GridSpec, Rect};
use bifurc_core::portrait::{leaf_action_exact, leaf_compose, validate_portrait, Cb0Sampler};
use bifurc_core::Complex64;
use proptest::prelude::*;

fn frac() -> impl Strategy<Value = Frac> {
    (0i128..10_000, 1i128..10_000).prop_map(|(p, q)| Frac::new(p, q))
}

fn positive_frac() -> impl Strategy<Value = Frac> {
    (1i128..500, 1i128..500).prop_map(|(p, q)| Frac::new(p, q))
}

proptest! {
    #[test]
    fn angle_parse_round_trip(p in -10_000i128..10_000, q in 1i128..10_000) {
        let a = Angle::exact(p, q).unwrap();
        let f = a.as_frac().unwrap();
        prop_assert!(f >= Frac::from_integer(0) && f < Frac::from_integer(1));
        prop_assert_eq!(Angle::parse(&a.to_string_pq()).unwrap(), a);
    }

    #[test]
    fn angle_multiplication_is_exact_and_compositional(p in 0i128..1000, q in 1i128..1000, d in 2i128..6, n in 0u32..20) {
        let a = Angle::exact(p, q).unwrap();
        let direct = Angle::from_frac(Frac::new(p, q) * Frac::from_integer(d.pow(n.min(12))));
        if n <= 12 {
            prop_assert_eq!(a.mul_pow(d, n), direct);
        }
        prop_assert_eq!(a.mul_pow(d, n).mul(d), a.mul_pow(d, n + 1));
        let f = a.mul(d).to_f64();
        let g = (a.to_f64() * d as f64).rem_euclid(1.0);
        prop_assert!((f - g).abs() < 1e-9 || (f - g).abs() > 1.0 - 1e-9);
    }

    #[test]
    fn sampled_portraits_are_valid(d in 2usize..5, seed in any::<u64>()) {
        let mut s = Cb0Sampler::new(d, seed);
        let theta = s.sample().unwrap();
        let v = validate_portrait(&theta, d);
        prop_assert!(v.valid && v.in_cb0, "{:?}", v.messages);
        prop_assert_eq!(theta.sets.len(), d - 1);
    }

    #[test]
    fn translation_preserves_validity(d in 2usize..4, seed in any::<u64>(), x in frac()) {
        let theta = Cb0Sampler::new(d, seed).sample().unwrap();
        let moved = theta.translate(&Angle::from_frac(x));
        let v = validate_portrait(&moved, d);
        prop_assert!(v.valid, "{:?}", v.messages);
        let back = moved.translate(&Angle::from_frac(-x));
        prop_assert_eq!(back, theta);
    }

    #[test]
    fn leaf_action_group_law(s1 in positive_frac(), t1 in frac(), s2 in positive_frac(), t2 in frac(), r in positive_frac(), seed in any::<u64>()) {
        let theta = Cb0Sampler::new(3, seed).sample().unwrap();
        let (th2, r2) = leaf_action_exact(s2, t2, &theta, r).unwrap();
        let (th12, r12) = leaf_action_exact(s1, t1, &th2, r2).unwrap();
        let (u0, u1) = leaf_compose((s1, t1), (s2, t2));
        let (th, rr) = leaf_action_exact(u0, u1, &theta, r).unwrap();
        prop_assert_eq!(rr, r12);
        prop_assert_eq!(th, th12);
        let (id, r_id) = leaf_action_exact(Frac::from_integer(1), Frac::from_integer(0), &theta, r).unwrap();
        prop_assert_eq!(id, theta);
        prop_assert_eq!(r_id, r);
    }

    #[test]
    fn kneading_word_locates_its_cylinder(p in 1i128..5000, q in 2i128..5000, n in 1usize..8) {
        let (d, k) = (3usize, 1usize);
        let alpha = Angle::exact(p, q).unwrap();
        let r = kneading(&alpha, d, k, n).unwrap();
        prop_assume!(r.boundary_hit_at.is_none());
        let word = r.word();
        let x = alpha.as_frac().unwrap();
        prop_assert!(cylinder_cover(&word, d, k).unwrap().contains(x));
        for flip in 0..word.len() {
            let mut other: Vec<char> = word.chars().collect();
            other[flip] = if other[flip] == '0' { '1' } else { '0' };
            let other: String = other.into_iter().collect();
            prop_assert!(!cylinder_cover(&other, d, k).unwrap().contains(x));
        }
    }

    #[test]
    fn cylinders_refine(bits in proptest::collection::vec(0u8..2, 0..7)) {
        let (d, k) = (3usize, 1usize);
        let word: String = bits.iter().map(|b| if *b == 0 { '0' } else { '1' }).collect();
        let parent = cylinder_cover(&word, d, k).unwrap();
        let c0 = parent.refine(0, d, k).unwrap();
        let c1 = parent.refine(1, d, k).unwrap();
        prop_assert!(c0.total_length() + c1.total_length() <= parent.total_length());
        for (lo, hi) in c0.intervals.iter().chain(&c1.intervals) {
            let mid = (lo + hi) / Frac::from_integer(2);
            prop_assert!(parent.contains(mid));
        }
    }

    #[test]
    fn measure_mass_bookkeeping(ws in proptest::collection::vec(1e-6f64..10.0, 1..60), s in 1e-3f64..1e3) {
        let atoms: Vec<(Complex64, f64)> = ws.iter().enumerate().map(|(i, &w)| (Complex64::new(i as f64, -(i as f64)), w)).collect();
        let m = EmpiricalMeasure::new(atoms).unwrap();
        let naive: f64 = ws.iter().sum();
        prop_assert!((m.total_mass - naive).abs() <= 1e-12 * naive);
        prop_assert!((m.scaled(s).unwrap().total_mass - s * m.total_mass).abs() <= 1e-12 * s * m.total_mass);
        let split = m.push_split(|z| vec![z, -z, z * 2.0]).unwrap();
        prop_assert_eq!(split.atoms.len(), 3 * ws.len());
        prop_assert!((split.total_mass - m.total_mass).abs() <= 1e-12 * m.total_mass);
        prop_assert!((m.integrate(|_| 1.0) - m.total_mass).abs() <= 1e-12 * m.total_mass);
    }

    #[test]
    fn pairwise_sum_is_split_invariant(v in proptest::collection::vec(-1e3f64..1e3, 0..200)) {
        let s = pairwise_sum(&v);
        let naive: f64 = v.iter().sum();
        let scale: f64 = v.iter().map(|x| x.abs()).sum::<f64>().max(1.0);
        prop_assert!((s - naive).abs() <= 1e-12 * scale);
    }

    #[test]
    fn laplacian_mass_of_a_quadratic(alpha in 0.01f64..10.0, n in 4usize..40) {
        // 5-point stencil is exact on α|z|²: every interior cell carries 4αh²/2π
        let spec = GridSpec::new(Rect::centered(Complex64::new(0.3, -0.2), 1.5).unwrap(), n, n).unwrap();
        let g = GridField::sample(spec, |z| alpha * z.norm_sqr());
        let lap = laplacian_measure(&g).unwrap();
        let h = spec.hx();
        let expect = 4.0 * alpha * h * h * ((n - 2) * (n - 2)) as f64 / (2.0 * std::f64::consts::PI);
        prop_assert!((lap.signed_mass() - expect).abs() <= 1e-9 * expect);
        prop_assert_eq!(lap.significant_negative_cells, 0);
    }
}
