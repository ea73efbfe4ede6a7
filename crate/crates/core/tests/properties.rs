use num_complex::Complex64;
use proptest::prelude::*;

use symentropy::bernstein::{check_variety, lk_density_H, lk_density_Q, LKSurfacePoint};
use symentropy::contour::{entropy_contour_auto, subentropy_contour_auto};
use symentropy::direct::{entropy_direct, subentropy_direct};
use symentropy::haar::{estimate_q, HaarConfig};
use symentropy::halfaxis::{dh, entropy_e, subentropy_e, MultiIndex};
use symentropy::identities::c_bound;
use symentropy::report::residual;
use symentropy::sympoly::{elementary_symmetric, p_eval, q_eval_complex, roots_from_symmetric};
use symentropy::{ProbVector, QuadratureConfig, SymPolyPoint};

/// Probability vectors whose sorted entries are at least `gap` apart
/// relative to the largest entry.
fn separated(max_d: usize, gap: f64) -> impl Strategy<Value = Vec<f64>> {
    (2..=max_d).prop_flat_map(move |d| {
        prop::collection::vec(0.0f64..1.0, d).prop_map(move |u| {
            // cumulative spacings keep entries ordered and apart
            let mut acc = 0.0;
            let raw: Vec<f64> = u
                .iter()
                .map(|v| {
                    acc += gap + v;
                    acc
                })
                .collect();
            let s: f64 = raw.iter().sum();
            raw.into_iter().map(|v| v / s).collect()
        })
    })
}

fn positive(max_d: usize) -> impl Strategy<Value = Vec<f64>> {
    (2..=max_d).prop_flat_map(|d| {
        prop::collection::vec(0.05f64..1.0, d).prop_map(|v| {
            let s: f64 = v.iter().sum();
            v.into_iter().map(|t| t / s).collect()
        })
    })
}

fn nonneg_e(max_d: usize) -> impl Strategy<Value = Vec<f64>> {
    (1..=max_d).prop_flat_map(|d| prop::collection::vec(0.0f64..3.0, d))
}

fn pv(x: &[f64]) -> ProbVector {
    ProbVector::new(x.to_vec()).unwrap()
}

fn e_of(x: &[f64]) -> SymPolyPoint {
    elementary_symmetric(&pv(x))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn roots_round_trip(x in separated(8, 0.2)) {
        let roots = roots_from_symmetric(&e_of(&x), 1e-14).unwrap();
        let mut found = roots.real_roots().expect("real spectrum");
        found.sort_by(f64::total_cmp);
        for (i, (r, v)) in found.iter().zip(&x).enumerate() {
            // coefficient rounding moves a root by about eps * prod(v + x_j) / |p'(v)|
            let spread: f64 = x.iter().map(|t| v + t).product();
            let slope: f64 = x.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, t)| (v - t).abs()).product();
            let conditioning = 16.0 * f64::EPSILON * spread / slope;
            prop_assert!((r - v).abs() <= 1e-10 * v + conditioning, "{r} vs {v}");
        }
    }

    #[test]
    fn p_and_q_are_reflections(e in nonneg_e(8), re in -3.0f64..3.0, im in -3.0f64..3.0) {
        let e = SymPolyPoint::new(e).unwrap();
        let z = Complex64::new(re, im);
        let sign = if e.dim() % 2 == 0 { 1.0 } else { -1.0 };
        let lhs = p_eval(&e, z);
        let rhs = q_eval_complex(&e, -z) * sign;
        prop_assert!((lhs - rhs).norm() <= 1e-12 * lhs.norm().max(rhs.norm()).max(1.0));
    }

    #[test]
    fn q_dominates_constant_term(e in nonneg_e(8), tau in 0.0f64..50.0) {
        let e = SymPolyPoint::new(e).unwrap();
        let d = e.dim();
        prop_assert!(symentropy::sympoly::q_eval(&e, tau) >= e.e(d));
    }

    #[test]
    fn no_negative_real_roots(e in nonneg_e(6)) {
        let e = SymPolyPoint::new(e).unwrap();
        if let Ok(roots) = roots_from_symmetric(&e, 1e-12) {
            for z in roots.roots {
                prop_assert!(!(z.im == 0.0 && z.re < -1e-12), "{z}");
            }
        }
    }

    #[test]
    fn scaling_is_exact(x in positive(8), theta in 0.1f64..10.0) {
        let p = pv(&x);
        let scaled = p.scaled(theta).unwrap();
        let shift = theta * p.sum() * theta.ln();
        prop_assert!(residual(entropy_direct(&scaled), theta * entropy_direct(&p) - shift) < 1e-10);
        prop_assert!(residual(subentropy_direct(&scaled), theta * subentropy_direct(&p) - shift) < 1e-10);
    }

    #[test]
    fn permutation_invariance(x in positive(8), seed in any::<u64>()) {
        let mut y = x.clone();
        let n = y.len();
        y.rotate_left((seed % n as u64) as usize);
        y.swap(0, n - 1);
        prop_assert!((entropy_direct(&pv(&x)) - entropy_direct(&pv(&y))).abs() < 1e-12);
        prop_assert!((subentropy_direct(&pv(&x)) - subentropy_direct(&pv(&y))).abs() < 1e-12);
    }

    #[test]
    fn entropy_dominates_subentropy(x in positive(8)) {
        let h = entropy_direct(&pv(&x));
        let q = subentropy_direct(&pv(&x));
        prop_assert!(h >= q - 1e-12 && q >= -1e-12, "H={h} Q={q}");
    }

    #[test]
    fn evaluators_agree(x in separated(6, 0.05)) {
        let e = e_of(&x);
        let cfg = QuadratureConfig::default();
        let (h, q) = (entropy_direct(&pv(&x)), subentropy_direct(&pv(&x)));
        prop_assert!((entropy_contour_auto(&e).unwrap().value - h).abs() < 1e-9);
        prop_assert!((subentropy_contour_auto(&e).unwrap().value - q).abs() < 1e-9);
        prop_assert!(residual(entropy_e(&e, &cfg).unwrap(), h) < 1e-8);
        prop_assert!(residual(subentropy_e(&e, &cfg).unwrap(), q) < 1e-8);
    }

    #[test]
    fn first_derivatives_respect_lower_bound(x in positive(5), k in 2usize..=5) {
        let e = e_of(&x);
        let d = e.dim();
        prop_assume!(k <= d);
        let value = dh(&e, &MultiIndex::new(vec![k], d).unwrap(), &QuadratureConfig::default()).unwrap();
        let bound = c_bound(d, k, e.e(1)).unwrap();
        prop_assert!(value >= bound * (1.0 - 1e-9), "{value} < {bound}");
    }

    #[test]
    fn e1_derivative_at_most_minus_one(x in positive(6), theta in 1.0f64..4.0) {
        let e = e_of(&x).scaled(theta).unwrap();
        let d = e.dim();
        let value = dh(&e, &MultiIndex::new(vec![1], d).unwrap(), &QuadratureConfig::default()).unwrap();
        prop_assert!(value <= -1.0 + 1e-10, "{value}");
    }

    #[test]
    fn levy_densities_nonnegative(d in 2usize..=6, lr in -3.0f64..3.0, lt in -3.0f64..3.0) {
        let p = LKSurfacePoint::new(10f64.powf(lr), 10f64.powf(lt)).unwrap();
        prop_assert!(lk_density_H(&p, d).unwrap().weight >= 0.0);
        prop_assert!(lk_density_Q(&p, d).unwrap().weight >= 0.0);
        prop_assert!(check_variety(&p, d).pass);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn haar_estimate_is_reproducible(x in positive(4), seed in any::<u64>()) {
        let cfg = HaarConfig::new(pv(&x), 200, seed).unwrap();
        prop_assert_eq!(estimate_q(&cfg), estimate_q(&cfg));
    }
}
