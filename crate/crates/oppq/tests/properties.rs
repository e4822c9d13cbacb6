use oppq::bender_dunne::{build_lambda, build_quantizer, hill_series};
use oppq::moments::{build_recursion, build_transfer, Representation};
use oppq::numeric::real_roots;
use oppq::orthopoly::{build_monic_from, hankel_polys, orthonormal_basis_from};
use oppq::potential::{Parity, PotentialSpec};
use oppq::quantizer::{build_determinant, Mode, OrderRoots, QuantizationProblem, RootClass, RootEntry, RootReport};
use oppq::weights::{interleave_full_line, sextic_quadrature, sextic_weight_moments, WeightSpec};
use oppq::{EnergyPolynomial, Float, Precision};
use proptest::prelude::*;
use rug::ops::Pow;

fn p() -> Precision {
    Precision::new(40).unwrap()
}

fn rel_close(a: &Float, b: &Float, tol: &Float) -> bool {
    let d = Float::with_val(a.prec(), a - b).abs();
    let s = Float::with_val(a.prec(), b.abs_ref()).max(&p().one());
    d <= Float::with_val(a.prec(), tol * &s)
}

/// Distinct roots with a minimum gap, as exact sixteenths.
fn spaced_roots() -> impl Strategy<Value = Vec<i32>> {
    prop::collection::btree_set(-320i32..320, 1..7).prop_map(|s| {
        let mut v: Vec<i32> = Vec::new();
        for r in s {
            if v.last().is_none_or(|l| r - l >= 2) {
                v.push(r);
            }
        }
        v
    })
}

/// Even QES sextic with `g = 1`: `m = b²/4 - (4n* + 3 + 2σ*)`.
fn qes_sextic(b: f64, n_star: usize, sigma: Parity) -> PotentialSpec {
    let prec = p();
    let b = prec.float(b);
    let b2 = Float::with_val(prec.bits(), b.square_ref()) / 4u32;
    let m = b2 - (4 * n_star + 3 + 2 * sigma.index() as usize) as u32;
    PotentialSpec::sextic(prec.one(), b, m, sigma).unwrap()
}

fn parity() -> impl Strategy<Value = Parity> {
    prop_oneof![Just(Parity::Even), Just(Parity::Odd)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn real_roots_recover_seeded_roots(seeds in spaced_roots(), lead in 1i32..50) {
        let prec = p();
        let roots: Vec<Float> = seeds.iter().map(|&r| prec.float(r) / 16u32).collect();
        let q = EnergyPolynomial::from_roots(&roots, prec).scale(&prec.float(lead));
        let found = real_roots(&q, &prec.float(-25), &prec.float(25)).unwrap();
        prop_assert_eq!(found.len(), roots.len());
        let tol = prec.tol(0.5);
        for (a, b) in found.roots.iter().zip(&roots) {
            prop_assert!(Float::with_val(prec.bits(), a - b).abs() <= tol);
        }
        let bound = Float::with_val(prec.bits(), &tol * q.max_abs_coeff());
        for r in &found.roots {
            prop_assert!(q.eval(r).abs() <= bound);
        }
    }

    #[test]
    fn transfer_is_linear(
        b in 0.0f64..4.0, m in -20.0f64..5.0, e in -10.0f64..40.0,
        v1 in prop::collection::vec(-5.0f64..5.0, 3), v2 in prop::collection::vec(-5.0f64..5.0, 3),
        a in -3.0f64..3.0, c in -3.0f64..3.0,
    ) {
        let prec = p();
        let bits = prec.bits();
        let spec = PotentialSpec::sextic(prec.one(), prec.float(b), prec.float(m), Parity::Even).unwrap();
        let t = build_transfer(&build_recursion(&spec, Representation::PsiU).unwrap(), 12).unwrap();
        let f = |v: &[f64]| v.iter().map(|x| prec.float(*x)).collect::<Vec<_>>();
        let (x1, x2) = (f(&v1), f(&v2));
        let (fa, fc) = (prec.float(a), prec.float(c));
        let mix: Vec<Float> = x1
            .iter()
            .zip(&x2)
            .map(|(p1, p2)| Float::with_val(bits, p1 * &fa) + Float::with_val(bits, p2 * &fc))
            .collect();
        let e = prec.float(e);
        let (m1, m2, mm) = (t.propagate(&e, &x1).unwrap(), t.propagate(&e, &x2).unwrap(), t.propagate(&e, &mix).unwrap());
        let tol = prec.tol(0.6);
        for r in 0..mm.len() {
            let lin = Float::with_val(bits, &m1[r] * &fa) + Float::with_val(bits, &m2[r] * &fc);
            prop_assert!(rel_close(&mm[r], &lin, &tol), "row {}", r);
        }
    }

    #[test]
    fn report_json_round_trips(
        energies in prop::collection::vec((-100.0f64..100.0, 0u8..3, prop::option::of(1e-12f64..1.0)), 0..8),
        digits in 30u32..80,
    ) {
        let prec = Precision::new(digits).unwrap();
        let roots = energies
            .iter()
            .enumerate()
            .map(|(i, (e, c, d))| RootEntry {
                level: 2 * i,
                energy: prec.float(*e) / 7u32,
                class: match c {
                    0 => RootClass::QesExact,
                    1 => RootClass::Converging { level: 2 * i },
                    _ => RootClass::Spurious,
                },
                delta: *d,
            })
            .collect();
        let report = RootReport {
            representation: Representation::PsiU,
            mode: Mode::Full,
            digits,
            window: (-100.0, 100.0),
            orders: vec![OrderRoots { n: 7, degree: energies.len(), roots }],
        };
        let back = RootReport::from_json(&report.to_json().unwrap()).unwrap();
        prop_assert_eq!(back, report);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10))]

    #[test]
    fn weight_moments_are_hankel_positive(g in 0.3f64..3.0, b in -3.0f64..4.0, four in any::<bool>()) {
        let prec = p();
        let s = if four { 4 } else { 2 };
        let w = WeightSpec::sextic(prec.float(g), prec.float(b), prec.float(s)).unwrap();
        let t = sextic_weight_moments(&w, 18).unwrap();
        prop_assert!(t.check_positivity().is_ok());
        let tol = prec.tol(0.5);
        for rho in [2, 4, 6] {
            let q = sextic_quadrature(&w, rho).unwrap();
            prop_assert!(rel_close(&t.values[rho], &q, &tol), "rho {}", rho);
        }
    }

    #[test]
    fn monic_recurrence_matches_hankel_form(g in 0.3f64..3.0, b in -2.0f64..4.0) {
        let prec = p();
        let w = WeightSpec::sextic(prec.float(g), prec.float(b), prec.float(4)).unwrap();
        let m = sextic_weight_moments(&w, 20).unwrap().values;
        let basis = build_monic_from(&m, 8).unwrap();
        let tol = prec.tol(0.4);
        for j in 0..=8 {
            let h = hankel_polys(&m, j).unwrap();
            let r = basis.monic_poly(j);
            prop_assert_eq!(h.degree(), j);
            for k in 0..=j {
                prop_assert!(rel_close(&r.coeff(k), &h.coeff(k), &tol), "j {} k {}", j, k);
            }
        }
    }

    #[test]
    fn symmetric_weight_polynomials_have_definite_parity(g in 0.3f64..3.0, b in -2.0f64..4.0) {
        let prec = p();
        let w = WeightSpec::sextic(prec.float(g), prec.float(b), prec.float(4)).unwrap();
        let m = interleave_full_line(&sextic_weight_moments(&w, 14).unwrap(), 26).unwrap();
        let basis = orthonormal_basis_from(&m, 12).unwrap();
        let tiny = prec.tol(0.8);
        for j in 0..=12 {
            for (i, c) in basis.xi[j].iter().enumerate() {
                if (i + j) % 2 == 1 {
                    prop_assert!(Float::with_val(prec.bits(), c.abs_ref()) <= tiny, "j {} i {}", j, i);
                }
            }
        }
    }

    #[test]
    fn kink_sits_at_n_star_plus_one(b in 0.0f64..4.0, n_star in 0usize..6, sigma in parity()) {
        let spec = qes_sextic(b, n_star, sigma);
        let rec = build_recursion(&spec, Representation::PhiNu).unwrap();
        prop_assert_eq!(rec.kink, Some(n_star));
        for k in 1..3 * n_star + 6 {
            prop_assert_eq!(rec.c1(k).is_zero(), k == n_star + 1, "k {}", k);
        }
    }

    #[test]
    fn unsegmented_transfer_degree_law(b in 0.0f64..4.0, m in -20.0f64..5.0, sigma in parity()) {
        let prec = p();
        let spec = PotentialSpec::sextic(prec.one(), prec.float(b), prec.float(m) + 0.123f64, sigma).unwrap();
        let rec = build_recursion(&spec, Representation::PhiNu).unwrap();
        prop_assume!(rec.kink.is_none());
        let t = build_transfer(&rec, 14).unwrap();
        for rho in 0..14 {
            prop_assert_eq!(t.entry(rho, 0).unwrap().degree(), rho);
        }
    }

    #[test]
    fn energy_polynomial_degree_laws(b in 0.0f64..4.0, n_star in 1usize..5, sigma in parity()) {
        let spec = qes_sextic(b, n_star, sigma);
        for (rho, l) in build_lambda(&spec, None).unwrap().iter().enumerate() {
            prop_assert_eq!(l.degree(), rho);
        }
        for (i, c) in hill_series(&spec, n_star + 6).iter().enumerate() {
            if i <= n_star + 1 {
                prop_assert_eq!(c.degree(), i);
            }
        }
    }

    #[test]
    fn hill_series_truncates_at_qes_roots(b in 0.0f64..4.0, n_star in 1usize..5, sigma in parity()) {
        let prec = p();
        let spec = qes_sextic(b, n_star, sigma);
        let q = build_quantizer(&spec).unwrap();
        let roots = real_roots(&q, &prec.float(-500), &prec.float(500)).unwrap().roots;
        prop_assert_eq!(roots.len(), n_star + 1);
        let c = hill_series(&spec, n_star + 6);
        for e in &roots {
            let scale = Float::with_val(prec.bits(), e.abs_ref()) + 1u32;
            for (i, ci) in c.iter().enumerate().skip(n_star + 1) {
                let bound = prec.tol(0.5) * ci.max_abs_coeff() * scale.clone().pow(i as u32);
                prop_assert!(ci.eval(e).abs() <= bound, "i {}", i);
            }
        }
    }

    #[test]
    fn qes_energies_are_roots_of_every_determinant(b in 0.0f64..3.0, n_star in 1usize..4, sigma in parity()) {
        let prec = p();
        let spec = qes_sextic(b, n_star, sigma);
        let q = build_quantizer(&spec).unwrap();
        let roots = real_roots(&q, &prec.float(-500), &prec.float(500)).unwrap().roots;
        let orders: Vec<usize> = (n_star + 1..=n_star + 3).collect();
        let qp = QuantizationProblem::new(&spec, Representation::PsiU, None, orders.clone()).unwrap();
        for n in orders {
            let d = build_determinant(&qp, n).unwrap();
            for e in &roots {
                let mut scale = prec.zero();
                let mut pow = prec.one();
                for c in d.coeffs() {
                    scale += Float::with_val(prec.bits(), c.abs_ref()) * &pow;
                    pow *= Float::with_val(prec.bits(), e.abs_ref());
                }
                prop_assert!(d.eval(e).abs() <= prec.tol(0.5) * scale, "N {}", n);
            }
        }
    }
}
