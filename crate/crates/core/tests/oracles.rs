//! Cross-checks against independent oracles: exact integer Hermite
//! polynomials, brute-force quadrature of the n = 2 eigenvalue density,
//! characteristic-polynomial root isolation and the semicircle law.

use gue_extremes::distributions::{
    joint_cdf, marginal_max_cdf, reflected_joint_cdf, unscaled_endpoints,
};
use gue_extremes::montecarlo::{
    extreme_eigenvalues, sample_matrix, tridiagonalize, EnsembleSpec, HermitianMatrix,
};
use gue_extremes::quadrature::composite_gauss_legendre;
use gue_extremes::specfun::hermite_phi;
use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_complex::Complex64;
use statrs::distribution::{ChiSquared, ContinuousCDF};
use std::f64::consts::PI;

const TOL: f64 = 1e-10;

/// `H_m(x)` for integer `x` by the exact recurrence `H_{k+1} = 2x H_k - 2k H_{k-1}`.
fn hermite_exact(m: usize, x: i64) -> BigInt {
    let mut prev = BigInt::from(1);
    let mut cur = BigInt::from(2 * x);
    if m == 0 {
        return prev;
    }
    for k in 1..m {
        let next = BigInt::from(2 * x) * &cur - BigInt::from(2 * k as i64) * &prev;
        prev = std::mem::replace(&mut cur, next);
    }
    cur
}

fn big_to_f64(v: &BigInt) -> f64 {
    v.to_string().parse().expect("integer literal")
}

#[test]
fn hermite_function_against_exact_integers() {
    for (m, x) in [(50usize, 2i64), (7, 1), (20, 3), (0, 2)] {
        let h = big_to_f64(&hermite_exact(m, x));
        let factorial: f64 = (1..=m).map(|k| k as f64).product();
        let xf = x as f64;
        let exact = (-xf * xf / 2.0).exp() * h
            / (PI.powf(0.25) * factorial.sqrt() * 2f64.powf(m as f64 / 2.0));
        let got = hermite_phi(m, xf).unwrap().true_value();
        assert!(
            (got - exact).abs() < 1e-10 * exact.abs().max(1.0),
            "m={m}, x={x}: {got} vs {exact}"
        );
    }
}

/// `P(lo < λmin, λmax ≤ hi)` for n = 2 by Gauss–Legendre on the ordered
/// triangle `lo < b < a ≤ hi` of the density `(1/π) e^(-a²-b²)(a-b)²`.
fn n2_window_probability(lo: f64, hi: f64) -> f64 {
    if hi <= lo {
        return 0.0;
    }
    let panels = |a: f64, b: f64| ((b - a) / 0.25).ceil().max(1.0) as usize;
    let outer = composite_gauss_legendre(lo, hi, panels(lo, hi), 12).unwrap();
    let mut total = 0.0;
    for (&b, &wb) in outer.nodes().iter().zip(outer.weights()) {
        let inner = composite_gauss_legendre(b, hi, panels(b, hi), 12).unwrap();
        for (&a, &wa) in inner.nodes().iter().zip(inner.weights()) {
            total += 2.0 * wa * wb * (-(a * a) - b * b).exp() * (a - b).powi(2) / PI;
        }
    }
    total
}

#[test]
fn n2_laws_against_brute_force_quadrature() {
    let edge = 2.0;
    let c = std::f64::consts::FRAC_1_SQRT_2 * 2f64.powf(-1.0 / 6.0);
    for (x, y) in [(0.0, 0.0), (1.0, -1.0), (-1.5, 0.5), (2.0, 1.0)] {
        // Public orientation: P(λ̃min ≤ x, λ̃max ≤ y).
        let below_max = n2_window_probability(-12.0, edge + c * y);
        let window = n2_window_probability(-edge + c * x, edge + c * y);
        let v = joint_cdf(2, x, y, TOL).unwrap();
        assert!(
            (v.joint - (below_max - window)).abs() < 1e-8,
            "({x},{y}): {} vs {}",
            v.joint,
            below_max - window
        );
        assert!((marginal_max_cdf(2, y, TOL).unwrap() - below_max).abs() < 1e-8);
        // Reflected orientation: the window itself.
        let (big_x, big_y) = unscaled_endpoints(2, -x, y);
        assert!((big_x - (-edge + c * x)).abs() < 1e-14 && (big_y - (edge + c * y)).abs() < 1e-14);
        let r = reflected_joint_cdf(2, -x, y, TOL).unwrap();
        assert!((r - window).abs() < 1e-8, "({x},{y}): {r} vs {window}");
    }
}

fn char_poly(a: &HermitianMatrix, lambda: f64) -> f64 {
    let n = a.size();
    let m = DMatrix::from_fn(n, n, |i, j| {
        a.get(i, j)
            - if i == j {
                Complex64::new(lambda, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
    });
    m.lu().determinant().re
}

fn bisect_root(a: &HermitianMatrix, mut lo: f64, mut hi: f64) -> f64 {
    let flo = char_poly(a, lo).signum();
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if char_poly(a, mid).signum() == flo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn extremes_match_characteristic_polynomial_roots() {
    for seed in 0..12u64 {
        let a = sample_matrix(EnsembleSpec::gue(6), seed, 3);
        let bound: f64 = (0..6)
            .map(|i| (0..6).map(|j| a.get(i, j).norm()).sum::<f64>())
            .fold(0.0, f64::max)
            + 1.0;
        let steps = 4000;
        let grid: Vec<f64> = (0..=steps)
            .map(|k| -bound + 2.0 * bound * k as f64 / steps as f64)
            .collect();
        let signs: Vec<f64> = grid.iter().map(|&l| char_poly(&a, l).signum()).collect();
        let changes: Vec<usize> = (0..steps).filter(|&k| signs[k] != signs[k + 1]).collect();
        assert_eq!(changes.len(), 6, "seed {seed}: roots not isolated");
        let smallest = bisect_root(&a, grid[changes[0]], grid[changes[0] + 1]);
        let largest = bisect_root(&a, grid[changes[5]], grid[changes[5] + 1]);
        let p = extreme_eigenvalues(&a);
        assert!(
            (p.lam_min - smallest).abs() < 1e-9,
            "seed {seed}: {} vs {smallest}",
            p.lam_min
        );
        assert!(
            (p.lam_max - largest).abs() < 1e-9,
            "seed {seed}: {} vs {largest}",
            p.lam_max
        );
    }
}

#[test]
fn spectral_density_matches_semicircle() {
    let n = 200usize;
    let matrices = 10u64;
    let r = (2.0 * n as f64).sqrt();
    let bins = 20usize;
    // Semicircle CDF on [-r, r] for the density (1/(πn)) √(r² - λ²).
    let cdf = |l: f64| {
        let l = l.clamp(-r, r);
        0.5 + (l * (r * r - l * l).sqrt() + r * r * (l / r).asin()) / (PI * r * r)
    };
    let edges: Vec<f64> = (0..=bins)
        .map(|k| -r + 2.0 * r * k as f64 / bins as f64)
        .collect();
    let mut counts = vec![0usize; bins];
    for seed in 0..matrices {
        let t = tridiagonalize(&sample_matrix(EnsembleSpec::gue(n), 99, seed));
        let below: Vec<usize> = edges.iter().map(|&e| t.count_below(e)).collect();
        for k in 0..bins {
            counts[k] += below[k + 1] - below[k];
        }
        counts[0] += below[0];
        counts[bins - 1] += n - below[bins];
    }
    let total = (n as u64 * matrices) as f64;
    let chi2: f64 = (0..bins)
        .map(|k| {
            let expected = total * (cdf(edges[k + 1]) - cdf(edges[k]));
            (counts[k] as f64 - expected).powi(2) / expected
        })
        .sum();
    let critical = ChiSquared::new((bins - 1) as f64)
        .unwrap()
        .inverse_cdf(1.0 - 1e-3);
    assert!(chi2 < critical, "chi-square {chi2} exceeds {critical}");
}
