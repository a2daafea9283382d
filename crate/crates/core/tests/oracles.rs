//! Library values checked against independent oracles and hand-worked
//! examples.

mod common;

use common::*;
use num_complex::Complex64;
use permcodec::ident::{encode_ident, encode_pairwise_baseline, identifier_prime_log, IdentCodec, Identifier};
use permcodec::numerics::{monic_roots, newton_girard, power_sums_from_roots, MonicPoly};
use permcodec::poly::{decode_poly, encode_poly, moments, poly_at, poly_latent_dim, psi, ExponentIndex, PolyCodec};
use permcodec::tensor::{encoder_dims, latent_dims, TensorMode};
use permcodec::{matching_distance, Multiset};
use rand::Rng;

fn ms(rows: &[&[f64]]) -> Multiset {
    Multiset::from_elements(rows).unwrap()
}

#[test]
fn worked_example_two_copies() {
    let x = ms(&[&[1.0, 0.0], &[1.0, 0.0]]);
    let l = encode_poly(&x, 2).unwrap();
    assert_eq!(l.values, vec![2.0, 0.0, 2.0, 0.0, 0.0]);
    let z = [0.7, -1.3];
    let e = moments(&z, &l).unwrap();
    assert_eq!((e.0[0].re, e.0[1].re), (2.0 * 0.7, 2.0 * 0.7 * 0.7));
    let p = poly_at(&[1.0, 1.0], &l).unwrap();
    assert_eq!(p.descending().iter().map(|c| c.re).collect::<Vec<_>>(), vec![1.0, -2.0, 1.0]);
    assert!(matching_distance(&decode_poly(&l, 0).unwrap(), &x) <= 1e-9);
}

#[test]
fn worked_example_two_points() {
    let x = ms(&[&[1.0, -1.0], &[-3.0, 2.0]]);
    let l = encode_poly(&x, 2).unwrap();
    assert_eq!(l.values, vec![-2.0, 1.0, 10.0, -7.0, 5.0]);
    let (z1, z2) = (0.3, 1.7);
    let p = poly_at(&[z1, z2], &l).unwrap();
    let a1 = -2.0 * z1 + z2;
    let a2 = -3.0 * z1 * z1 + 5.0 * z1 * z2 - 2.0 * z2 * z2;
    assert!((p.coeffs[0].re - a1).abs() < 1e-12);
    assert!((p.coeffs[1].re - a2).abs() < 1e-12);
    let e = moments(&[z1, z2], &l).unwrap();
    assert!((e.0[1].re - (10.0 * z1 * z1 - 14.0 * z1 * z2 + 5.0 * z2 * z2)).abs() < 1e-12);
    assert!(matching_distance(&decode_poly(&l, 0).unwrap(), &x) <= 1e-9);
}

#[test]
fn psi_weights_for_two_by_two() {
    let idx = ExponentIndex::new(2, 2).unwrap();
    let (z1, z2) = (0.4, -2.5);
    assert_eq!(psi(&[z1, z2], 1, &idx), vec![z1, z2, 0.0, 0.0, 0.0]);
    assert_eq!(psi(&[z1, z2], 2, &idx), vec![0.0, 0.0, z1 * z1, 2.0 * z1 * z2, z2 * z2]);
}

#[test]
fn latent_dims_match_enumeration() {
    for n in 1..=6 {
        for d in 1..=6 {
            let count = monomial_count(n, d);
            assert_eq!(poly_latent_dim(n, d), Some(count), "N={n} D={d}");
            assert_eq!(PolyCodec::new(n, d).unwrap().latent_dim(), count);
            assert_eq!(IdentCodec::prime_log(n, d).unwrap().latent_dim(), 2 * d * n);
        }
    }
    assert_eq!(monomial_count(6, 3), 83);
}

#[test]
fn coefficients_and_powers_match_oracles() {
    let mut r = rng(41);
    for _ in 0..300 {
        let n = r.gen_range(1..=6);
        let d = r.gen_range(1..=3);
        let x = random_multiset(&mut r, n, d);
        let z: Vec<f64> = (0..d).map(|_| r.gen_range(-1.0..1.0)).collect();
        let l = encode_poly(&x, n).unwrap();
        let proj: Vec<f64> = x.iter().map(|e| dot(&z, e)).collect();
        let want = coefficient_oracle(&proj);
        let got: Vec<f64> = poly_at(&z, &l).unwrap().descending().iter().map(|c| c.re).collect();
        let scale = want.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        assert!(l2(&want, &got) <= 1e-10 * scale, "{want:?} vs {got:?}");
        let e = moments(&z, &l).unwrap();
        for k in 1..=n {
            let p = power_oracle(&x, &z, k);
            assert!((e.0[k - 1].re - p).abs() <= 1e-10 * (1.0 + p.abs()));
        }
    }
}

#[test]
fn newton_girard_matches_expansion() {
    let mut r = rng(5);
    for _ in 0..200 {
        let n = r.gen_range(1..=8);
        let roots: Vec<Complex64> = (0..n)
            .map(|_| Complex64::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0)))
            .collect();
        let direct = MonicPoly::from_roots(&roots);
        let via_sums = newton_girard(&power_sums_from_roots(&roots));
        for (a, b) in direct.coeffs.iter().zip(&via_sums.coeffs) {
            assert!((a - b).norm() <= 1e-10 * (1.0 + a.norm()));
        }
        let back = monic_roots(&direct, 1e-10, 200).unwrap();
        let re = |v: &[Complex64]| v.iter().map(|c| vec![c.re, c.im]).collect::<Vec<_>>();
        assert!(brute_matching(&re(&roots), &re(&back)) <= 1e-6);
    }
}

#[test]
fn matching_distance_matches_brute_force() {
    let mut r = rng(17);
    for _ in 0..200 {
        let n = r.gen_range(1..=7);
        let d = r.gen_range(1..=3);
        let x = random_multiset(&mut r, n, d);
        let y = random_multiset(&mut r, n, d);
        let want = brute_matching(&x.to_vecs(), &y.to_vecs());
        assert!((matching_distance(&x, &y) - want).abs() <= 1e-12 * (1.0 + want));
    }
    assert_eq!(matching_distance(&ms(&[&[0.0], &[0.0]]), &ms(&[&[0.0]])), f64::INFINITY);
    assert_eq!(matching_distance(&ms(&[&[0.0, 0.0]]), &ms(&[&[3.0, 4.0]])), 5.0);
}

#[test]
fn ident_rows_are_complex_power_sums() {
    let mut r = rng(8);
    for _ in 0..100 {
        let n = r.gen_range(1..=5);
        let d = r.gen_range(1..=4);
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..d).map(|_| r.gen_range(0..=32) as f64 / 16.0).collect())
            .collect();
        let x = Multiset::from_elements(&rows).unwrap();
        let z = encode_ident(&x, n, &Identifier::PrimeLog).unwrap();
        for dd in 0..d {
            let row = z.row(dd);
            for k in 1..=n {
                let want: Complex64 = x
                    .iter()
                    .map(|e| Complex64::new(e[dd], identifier_prime_log(e)).powu(k as u32))
                    .sum();
                assert!((row[k - 1] - want).norm() <= 1e-12 * (1.0 + want.norm()));
            }
        }
    }
}

#[test]
fn prime_log_identifier_values() {
    assert_eq!(identifier_prime_log(&[1.0, 0.0]), 2f64.ln());
    assert_eq!(identifier_prime_log(&[0.0, 1.0]), 3f64.ln());
    let v = identifier_prime_log(&[0.5, 2.0, 1.0]);
    assert!((v - (0.5 * 2f64.ln() + 2.0 * 3f64.ln() + 5f64.ln())).abs() < 1e-15);
}

#[test]
fn pairwise_baseline_entries() {
    let x = ms(&[&[1.0, 2.0], &[0.5, -1.0]]);
    let p = encode_pairwise_baseline(&x, 3).unwrap();
    for n in 1..=3 {
        let w: Complex64 = x.iter().map(|e| Complex64::new(e[0], e[1]).powu(n as u32)).sum();
        assert!((p.get(0, 1, n) - w.re).abs() < 1e-12);
        let w: Complex64 = x.iter().map(|e| Complex64::new(e[1], e[0]).powu(n as u32)).sum();
        assert!((p.get(1, 0, n) - w.im).abs() < 1e-12);
    }
}

#[test]
fn pairwise_counterexample_negative_control() {
    let x = ms(&[&[1.0, 1.0, 1.0], &[3.0, 2.0, 1.0], &[1.0, 2.0, 2.0], &[3.0, 1.0, 2.0]]);
    let y = ms(&[&[1.0, 2.0, 1.0], &[3.0, 1.0, 1.0], &[3.0, 2.0, 2.0], &[1.0, 1.0, 2.0]]);
    assert!(encode_pairwise_baseline(&x, 4).unwrap().max_abs_diff(&encode_pairwise_baseline(&y, 4).unwrap()) < 1e-9);
    assert!(encode_poly(&x, 4).unwrap().distance(&encode_poly(&y, 4).unwrap()) >= 1e-6);
    let c = IdentCodec::prime_log(4, 3).unwrap();
    assert!(c.encode(&x).unwrap().distance(&c.encode(&y).unwrap()) >= 1e-6);
}

#[test]
fn tensor_dimensions_by_hand() {
    // D_2 = 2, D_1 = 2 (1 + 2) 3 = 18.
    assert_eq!(latent_dims(2, 3, 1, 2, TensorMode::Rational).unwrap(), vec![18, 2]);
    // E_1 = 18, E_0 = 2 (1 + 18) 3 = 114.
    assert_eq!(encoder_dims(2, 3, 1, 2, TensorMode::Rational).unwrap(), vec![114, 18]);
    // Real mode: D_1 = C(3 + 2, 3) - 1 = 9.
    assert_eq!(latent_dims(2, 3, 1, 2, TensorMode::Real).unwrap(), vec![9, 2]);
    assert_eq!(latent_dims(1, 4, 1, 3, TensorMode::Rational).unwrap(), vec![3]);
}
