use num_rational::Rational64;
use nodal_theta::curve::{cohomology, theta_invariants, RationalNodalCurve, TfSheaf};
use nodal_theta::multiplicity::{check_eqnmat, hilbert_samuel, RingSpec};
use nodal_theta::{Field, LocalModel, Rational};

fn eqnmat_over<K: Field>() -> (u32, u64, u64) {
    let model = LocalModel::new(1, 1).unwrap();
    let f = model.parse::<K>("v1 - u1^2", 12).unwrap();
    let r = check_eqnmat(&f).unwrap();
    (r.ord_d, r.mult_v, r.mult_d)
}

fn theta_over<K: Field>() -> (u64, u64, u64) {
    let pts = [(1, -1), (2, -2), (3, -3)].map(|(a, b)| (K::from_int(a), K::from_int(b)));
    let curve = RationalNodalCurve::from_finite(pts.to_vec()).unwrap();
    let sheaf = TfSheaf::new(&curve, Default::default(), 2, (0..3).map(|j| (j, K::one())).collect()).unwrap();
    let r = theta_invariants(&curve, &sheaf).unwrap();
    (r.h0, r.ord, r.mult_theta)
}

#[test]
fn both_exact_fields_agree() {
    assert_eq!(eqnmat_over::<Rational>(), (1, 2, 3));
    assert_eq!(eqnmat_over::<Rational64>(), (1, 2, 3));
    assert_eq!(theta_over::<Rational>(), (2, 2, 2));
    assert_eq!(theta_over::<Rational64>(), (2, 2, 2));
}

#[test]
fn hilbert_samuel_over_small_rationals() {
    let spec: RingSpec<Rational64> = RingSpec::for_model(LocalModel::new(2, 0).unwrap(), None, 8).unwrap();
    let t = hilbert_samuel(&spec, 8).unwrap();
    assert_eq!(t.multiplicity, Some(4));
}

#[test]
fn riemann_roch_on_fixed_curve() {
    let q = |n| Rational::from_int(n);
    let curve = RationalNodalCurve::from_finite(vec![(q(0), q(1)), (q(2), q(3))]).unwrap();
    for d in -2..=5i64 {
        let sheaf = TfSheaf::new(&curve, Default::default(), d, [(0, q(2)), (1, q(-1))].into()).unwrap();
        let c = cohomology(&curve, &sheaf).unwrap();
        assert_eq!(c.h0 as i64 - c.h1 as i64, d - 1, "d = {d}");
    }
}
