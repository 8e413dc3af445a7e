use awlab_core::aw3::{aw_residual, build_rep, validate_positivity, AlphaParams, Param};
use awlab_core::linalg::{comm_residual, sym_eig, Matrix};
use awlab_core::qcore::{qpoch, QContext, Quad};
use awlab_core::suite::{run_group, Group, SuiteConfig};
use awlab_core::qracah::{identity_defect, orthogonality, qracah_table, weights, NormConstant, QRacahParams};
use awlab_core::rank2::{build_aw2, stencil_checks, verify_aw2_relations, Aw2Options, Grid2, MixedSign};
use awlab_core::uqsl2::{build_irrep, build_tensor, commuting_pairs, TwistCoeffs};
use proptest::prelude::*;

fn alpha() -> impl Strategy<Value = [f64; 3]> {
    (0.1..1.2_f64, 0.2..1.6_f64, -0.6..0.6_f64).prop_map(|(a, b, c)| [a, b, c])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn rank1_relations_hold(q in 0.35..0.9_f64, a in alpha(), n in 1usize..7) {
        let ctx = QContext::<f64>::new(q).unwrap();
        let p = AlphaParams::finite(&ctx, a[0], a[1], a[2], n);
        prop_assume!(validate_positivity(&ctx, &p, n).is_ok());
        let rep = build_rep(&ctx, &p, n).unwrap();
        let r = aw_residual(&ctx, &rep.k, &rep.l, &p.consts(&ctx).map(Param::Scalar)).unwrap();
        prop_assert!(r.max_rel() <= 1e-10, "residual {}", r.max_rel());
        prop_assert!(rep.l.asymmetry() <= 1e-14);
    }

    #[test]
    fn rank1_swap_is_dual(q in 0.35..0.9_f64, a in alpha(), n in 1usize..6) {
        let ctx = QContext::<f64>::new(q).unwrap();
        let p = AlphaParams::finite(&ctx, a[0], a[1], a[2], n);
        let s = p.swapped();
        prop_assume!(validate_positivity(&ctx, &p, n).is_ok() && validate_positivity(&ctx, &s, n).is_ok());
        let rep = build_rep(&ctx, &s, n).unwrap();
        let r = aw_residual(&ctx, &rep.k, &rep.l, &s.consts(&ctx).map(Param::Scalar)).unwrap();
        prop_assert!(r.max_rel() <= 1e-10);
    }

    #[test]
    fn qracah_orthogonality_positive_weights(q in 0.4..0.85_f64, a in alpha(), n in 1usize..5) {
        let ctx = QContext::<Quad>::new(q).unwrap();
        let f = Quad::from_f64;
        let p = AlphaParams::finite(&ctx, f(a[0]), f(a[1]), f(a[2]), n);
        prop_assume!(validate_positivity(&ctx, &p, n).is_ok());
        let w = weights(&ctx, &p, n, NormConstant::Rescaled).unwrap();
        prop_assume!(w.positive);
        let t = qracah_table(&QRacahParams::from_alpha(&ctx, &p), n).unwrap();
        let d = identity_defect(&orthogonality(&w.w, &t));
        prop_assert!(d <= 1e-20, "defect {}", d);

        // The double-precision suite promotes when the series is ill-conditioned.
        let cfg = SuiteConfig { q, n, alpha: a, ..Default::default() };
        for c in run_group::<f64>(Group::QRacah, &cfg) {
            if c.check_id == "qracah.orthogonality" && !c.warning {
                prop_assert!(c.pass, "{:?}", c);
            }
        }
    }

    #[test]
    fn tensor_pairs_commute(q in 0.4..0.9_f64, n1 in 0usize..4, n2 in 0usize..4, t in 0.5..2.0_f64) {
        let ctx = QContext::<f64>::new(q).unwrap();
        let c = TwistCoeffs::canonical(&ctx, 0.3, 0.8, 0.2, t);
        let g = build_tensor(&ctx, &build_irrep(&ctx, n1), &build_irrep(&ctx, n2), &c);
        for (label, r) in commuting_pairs(&g).unwrap() {
            prop_assert!(r <= 1e-10, "{} {}", label, r);
        }
    }

    #[test]
    fn rank2_relations_hold(q in 0.45..0.85_f64, a in alpha(), n1 in 1usize..5, n2 in 0usize..5) {
        let ctx = QContext::<f64>::new(q).unwrap();
        let rep = build_aw2(&ctx, n1, n2, a, &Aw2Options::default());
        // Some alpha draws make squared coefficients negative; those are rejected.
        prop_assume!(rep.is_ok());
        let rep = rep.unwrap();
        for r in verify_aw2_relations(&ctx, &rep, MixedSign::Minus).unwrap() {
            prop_assert!(r.relation <= 1e-9 && r.locality <= 1e-9, "{} {} {}", r.id, r.relation, r.locality);
        }
        let st = stencil_checks(&rep);
        prop_assert!(st.off_stencil <= 1e-12);
        prop_assert!(st.e_consistency <= 1e-10);
    }

    #[test]
    fn symmetric_eigensolver_reconstructs(entries in proptest::collection::vec(-2.0..2.0_f64, 15)) {
        let n = 5;
        let mut it = entries.into_iter();
        let mut m = Matrix::<f64>::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let v = it.next().unwrap();
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
        let e = sym_eig(&m).unwrap();
        let v = &e.vectors;
        let recon = v.try_mul(&Matrix::from_diag(&e.values)).unwrap().try_mul(&v.transpose()).unwrap();
        let err = recon.try_sub(&m).unwrap().norm() / m.norm().max(1.0);
        prop_assert!(err <= 1e-12, "{}", err);
    }

    #[test]
    fn qpoch_recursion(a in -2.0..2.0_f64, q in 0.1..0.95_f64, n in 0usize..12) {
        let lhs = qpoch(a, q, n + 1);
        let rhs = qpoch(a, q, n) * (1.0 - a * q.powi(n as i32));
        prop_assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs().max(1.0));
    }
}

#[test]
fn grid_ordering_is_k2_outer() {
    let g = Grid2::new(2, 1);
    assert_eq!(g.len(), 6);
    assert_eq!(g.k_indices(0), (0, 0));
    assert_eq!(g.k_indices(1), (1, 0));
    assert_eq!(g.k_indices(3), (0, 1));
    for (i, &(t1, t2)) in g.states().iter().enumerate() {
        assert_eq!(g.position(t1, t2), Some(i));
    }
}

#[test]
fn casimir_commutes_on_probe() {
    let ctx = QContext::<f64>::new(0.6).unwrap();
    let p = AlphaParams::finite(&ctx, 0.3, 0.8, 0.2, 5);
    let rep = build_rep(&ctx, &p, 5).unwrap();
    let qm = awlab_core::aw3::casimir_q(&ctx, &rep.k, &rep.l, &p.structure(&ctx)).unwrap();
    assert!(comm_residual(&qm, &rep.k).unwrap() <= 1e-10);
    assert!(comm_residual(&qm, &rep.l).unwrap() <= 1e-10);
}
