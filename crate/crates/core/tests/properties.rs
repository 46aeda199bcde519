use gue_extremes::cli::format_number;
use gue_extremes::distributions::{joint_cdf, marginal_max_cdf, min_cdf, tw_cdf};
use gue_extremes::fredholm::{det_one_minus, discretize_fn};
use gue_extremes::kernels::{edge_scaled_kernel, hermite_kernel, Block};
use gue_extremes::montecarlo::{extreme_eigenvalues, sample_matrix, EnsembleSpec, SymTridiagonal};
use gue_extremes::quadrature::{gauss_legendre, map_to_interval};
use gue_extremes::specfun::hermite_phi;
use proptest::prelude::*;

const TOL: f64 = 1e-10;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn hermite_parity(m in 0usize..300, t in 0.0f64..30.0) {
        let a = hermite_phi(m, t).unwrap();
        let b = hermite_phi(m, -t).unwrap();
        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
        prop_assert_eq!(b.true_value(), sign * a.true_value());
    }

    #[test]
    fn gauss_legendre_exact_for_low_degree(m in 1usize..40, lo in -2.0f64..0.0, width in 0.1f64..3.0, seed in 0u64..1000) {
        let rule = map_to_interval(&gauss_legendre(m).unwrap(), lo, lo + width).unwrap();
        let degree = (seed as usize) % (2 * m);
        let hi = lo + width;
        let got = rule.integrate(|x| x.powi(degree as i32));
        let d = degree as i32 + 1;
        let exact = (hi.powi(d) - lo.powi(d)) / d as f64;
        let scale = width * lo.abs().max(hi.abs()).max(1.0).powi(degree as i32);
        prop_assert!((got - exact).abs() <= 1e-13 * scale, "{} vs {}", got, exact);
    }

    #[test]
    fn rank_one_determinant(a in -1.0f64..1.0, b in -1.0f64..1.0, k in 0.1f64..2.0) {
        // Kernel f(x) g(y) with f = a + x, g = b + k y on (0, 1).
        let rule = map_to_interval(&gauss_legendre(12).unwrap(), 0.0, 1.0).unwrap();
        let op = discretize_fn(|x, y| (a + x) * (b + k * y), &rule, &rule);
        let inner = a * b + a * k / 2.0 + b / 2.0 + k / 3.0;
        prop_assert!((det_one_minus(&op).unwrap() - (1.0 - inner)).abs() < 1e-12);
    }

    #[test]
    fn kernels_symmetric(n in 1usize..80, x in -6.0f64..6.0, y in -6.0f64..6.0) {
        prop_assert_eq!(hermite_kernel(n, x, y).unwrap(), hermite_kernel(n, y, x).unwrap());
        let k22 = edge_scaled_kernel(n.max(2), Block::B22, x, y).unwrap();
        let k11 = edge_scaled_kernel(n.max(2), Block::B11, x, y).unwrap();
        prop_assert!((k22 - k11).abs() <= 1e-13 * (1.0 + k22.abs()));
    }

    #[test]
    fn sturm_count_monotone(d in prop::collection::vec(-5.0f64..5.0, 2..30), xs in prop::collection::vec(-20.0f64..20.0, 2..10)) {
        let e: Vec<f64> = d.iter().skip(1).map(|v| 0.5 * v.cos()).collect();
        let t = SymTridiagonal { d: d.clone(), e };
        let mut xs = xs;
        xs.sort_by(f64::total_cmp);
        let counts: Vec<usize> = xs.iter().map(|&x| t.count_below(x)).collect();
        prop_assert!(counts.windows(2).all(|w| w[0] <= w[1]));
        prop_assert_eq!(t.count_below(100.0), d.len());
        prop_assert_eq!(t.count_below(-100.0), 0);
    }

    #[test]
    fn extremes_bracket_diagonal(seed in 0u64..10_000, n in 2usize..20) {
        let a = sample_matrix(EnsembleSpec::gue(n), seed, 0);
        let p = extreme_eigenvalues(&a);
        for i in 0..n {
            let d = a.get(i, i).re;
            prop_assert!(p.lam_min <= d + 1e-11 && d <= p.lam_max + 1e-11);
        }
        prop_assert_eq!(p, extreme_eigenvalues(&a));
    }

    #[test]
    fn format_keeps_fifteen_digits(v in -1e6f64..1e6) {
        let back: f64 = format_number(v).parse().unwrap();
        prop_assert!((back - v).abs() <= 1e-14 * v.abs().max(f64::MIN_POSITIVE));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn tracy_widom_cdf_monotone_in_unit_interval(s in -8.0f64..5.0, gap in 0.05f64..3.0) {
        let a = tw_cdf(s, TOL).unwrap();
        let b = tw_cdf(s + gap, TOL).unwrap();
        prop_assert!((0.0..=1.0).contains(&a) && (0.0..=1.0).contains(&b));
        prop_assert!(a <= b);
    }

    #[test]
    fn joint_within_frechet_bounds(n in 2usize..24, x in -4.0f64..4.0, y in -4.0f64..4.0) {
        let v = joint_cdf(n, x, y, TOL).unwrap();
        let fx = min_cdf(n, x, TOL).unwrap();
        let fy = marginal_max_cdf(n, y, TOL).unwrap();
        prop_assert!(v.joint <= fx.min(fy) + 1e-9);
        prop_assert!(v.joint >= (fx + fy - 1.0).max(0.0) - 1e-9);
        // Positive dependence of the extremes.
        prop_assert!(v.joint >= v.product - 1e-9);
    }
}
