use super::*;
use crate::algebra::OperatorAlgebra;
use crate::fixtures::{bell_basis, pauli_x};
use crate::linalg::{c64, dagger, eigh, identity, kron, trace_of_product, CMatrix};
use crate::man::{man_collinear, LogBase};
use crate::rng::{haar_state, haar_unitary, RngStream};

const B2: LogBase = LogBase::Two;

fn left() -> OperatorAlgebra {
    OperatorAlgebra::factor_left(2, 2).unwrap()
}

fn bell() -> OperatorAlgebra {
    OperatorAlgebra::masa(&bell_basis()).unwrap()
}

fn collinear_pairs() -> Vec<(OperatorAlgebra, OperatorAlgebra)> {
    vec![
        (left(), bell()),
        (left(), left()),
        (left(), OperatorAlgebra::factor_right(2, 2).unwrap()),
        (
            OperatorAlgebra::full(3).unwrap(),
            OperatorAlgebra::diagonal_masa(3).unwrap(),
        ),
        (
            OperatorAlgebra::diagonal_masa(4).unwrap(),
            OperatorAlgebra::full(4).unwrap(),
        ),
        (bell(), OperatorAlgebra::symmetric_operators(2).unwrap()),
    ]
}

fn purity_fixtures() -> Vec<OperatorAlgebra> {
    vec![
        OperatorAlgebra::full(2).unwrap(),
        OperatorAlgebra::full(4).unwrap(),
        OperatorAlgebra::trivial(3).unwrap(),
        left(),
        OperatorAlgebra::factor_right(2, 2).unwrap(),
        bell(),
        OperatorAlgebra::diagonal_masa(3).unwrap(),
        OperatorAlgebra::symmetric_operators(2).unwrap(),
        OperatorAlgebra::asymptotically_abelian(4).unwrap(),
        OperatorAlgebra::structural(&[(2, 1), (1, 2)], None).unwrap(),
    ]
}

#[test]
fn algebra_state_examples_and_purity_law() {
    let full = algebra_state(&OperatorAlgebra::full(2).unwrap());
    assert!((full.purity() - 1.0).abs() < 1e-12);
    let triv = algebra_state(&OperatorAlgebra::trivial(2).unwrap());
    assert!((triv.matrix() - identity(4).scale(0.25)).norm() < 1e-12);
    for a in purity_fixtures() {
        let w = algebra_state(&a);
        let d = a.dim() as f64;
        assert!((w.purity() - a.algebra_dim() as f64 / (d * d)).abs() < 1e-9);
        assert!((w.matrix().trace().re - 1.0).abs() < 1e-9);
        assert!(eigh(w.matrix()).0.iter().all(|&x| x > -1e-9));
    }
}

#[test]
fn choi_examples() {
    let a = left();
    let commutant = a.commutant();
    let zero = protocol_choi(&a, &commutant, None, 0).unwrap();
    assert!(zero.estimate.abs() < 1e-12);
    let selfman = protocol_choi_self(&OperatorAlgebra::full(2).unwrap(), None, 0).unwrap();
    assert!((selfman.estimate - 0.75).abs() < 1e-12);
    let r = protocol_choi(&a, &bell(), None, 0).unwrap();
    assert!((r.estimate - 0.75).abs() < 1e-12);
}

#[test]
fn choi_requires_collinear() {
    let a = OperatorAlgebra::asymptotically_abelian(4).unwrap();
    let err = protocol_choi(&a, &left(), None, 0).unwrap_err();
    assert!(matches!(err, crate::error::ManError::NotCollinear));
}

#[test]
fn exact_protocols_match_collinear_form() {
    for (a, b) in collinear_pairs() {
        let target = man_collinear(&a, &b, B2).unwrap().s;
        let choi = protocol_choi(&a, &b, None, 1).unwrap();
        assert!((choi.estimate - target).abs() < 1e-9);
        let stoch = protocol_stochastic_exact(&a, &b).unwrap();
        assert!((stoch.estimate - target).abs() < 1e-9);
    }
}

#[test]
fn stochastic_self_example() {
    let r = protocol_stochastic_self_exact(&OperatorAlgebra::full(2).unwrap()).unwrap();
    assert!((r.numerator_mean.unwrap() - 0.5).abs() < 1e-12);
    assert!((r.estimate - 0.75).abs() < 1e-12);
    let s = protocol_stochastic_self(&OperatorAlgebra::full(2).unwrap(), 10_000, None, 3).unwrap();
    assert!(s.agrees_with(0.75, 5.0), "{s:?}");
}

#[test]
fn stochastic_commutant_has_zero_ratio_variance() {
    let a = left();
    let r = protocol_stochastic(&a, &a.commutant(), 200, None, 5).unwrap();
    assert!(r.estimate.abs() < 1e-12);
    assert!(r.std_error < 1e-12);
}

#[test]
fn stochastic_trivial_is_ill_conditioned() {
    let t = OperatorAlgebra::trivial(8).unwrap();
    let err = protocol_stochastic(&t, &t, 10, Some(10), 1).unwrap_err();
    assert!(matches!(err, crate::error::ManError::IllConditioned(_)));
}

#[test]
fn sampled_protocols_within_five_sigma() {
    let (a, b) = (left(), bell());
    let s = protocol_stochastic(&a, &b, 10_000, None, 11).unwrap();
    assert!(s.agrees_with(0.75, 5.0), "{s:?}");
    let shots = protocol_stochastic(&a, &b, 2_000, Some(1_000), 12).unwrap();
    assert!(shots.agrees_with(0.75, 5.0), "{shots:?}");
    let c = protocol_choi(&a, &b, Some(10_000), 13).unwrap();
    assert!(c.agrees_with(0.75, 5.0), "{c:?}");
    assert!(c.std_error > 0.0);
}

#[test]
fn sampling_is_reproducible() {
    let (a, b) = (left(), bell());
    let r1 = protocol_stochastic(&a, &b, 500, Some(100), 42).unwrap();
    let r2 = protocol_stochastic(&a, &b, 500, Some(100), 42).unwrap();
    assert_eq!(r1, r2);
    let m1 = mc_man_direct(&a, &b, 300, 9).unwrap();
    let m2 = mc_man_direct(&a, &b, 300, 9).unwrap();
    assert_eq!(m1, m2);
}

#[test]
fn renyi_identity() {
    for a in purity_fixtures() {
        if !a.decomposition().unwrap().is_collinear().collinear {
            continue;
        }
        let r = choi_renyi_identity(&a, B2).unwrap();
        assert!((r.nc2 - r.entropy_gap).abs() < 1e-9, "{r:?}");
    }
}

#[test]
fn monte_carlo_examples() {
    let a = left();
    let zero = mc_man_direct(&a, &a.commutant(), 100, 1).unwrap();
    assert!(zero.estimate.abs() < 1e-12 && zero.std_error < 1e-12);
    let full = OperatorAlgebra::full(2).unwrap();
    let r = mc_man_direct(&full, &full, 10_000, 2).unwrap();
    assert!(r.agrees_with(0.75, 5.0), "{r:?}");
    let r = mc_man_direct(&a, &bell(), 10_000, 3).unwrap();
    assert!(r.agrees_with(0.75, 5.0), "{r:?}");
    let o = mc_orbit_averaged_man(&a, &a, 10_000, 4).unwrap();
    assert!(o.agrees_with(0.6, 5.0), "{o:?}");
}

#[test]
fn single_sample_has_infinite_error() {
    let full = OperatorAlgebra::full(2).unwrap();
    let r = mc_man_direct(&full, &full, 1, 2).unwrap();
    assert!(r.std_error.is_infinite());
    let json = serde_json::to_string(&r).unwrap();
    let back: EstimatorResult = serde_json::from_str(&json).unwrap();
    assert!(back.std_error.is_infinite());
}

#[test]
fn restricted_distance_examples() {
    let full = OperatorAlgebra::full(2).unwrap();
    let mut rho = CMatrix::zeros(2, 2);
    rho[(0, 0)] = c64(1.0, 0.0);
    let v = identity(2);
    assert!(restricted_distance(&v, &v, &full, &rho).unwrap().abs() < 1e-12);
    let d = restricted_distance(&pauli_x(), &v, &full, &rho).unwrap();
    assert!((d - 2.0).abs() < 1e-12);

    let a = left();
    let b = a.commutant();
    let mut rng = RngStream::new(8, 0);
    let dec = a.decomposition().unwrap();
    for _ in 0..5 {
        let u = dec.haar_unitary(&mut rng);
        let w = dec.haar_unitary(&mut rng);
        let phi = haar_state(4, &mut rng).unwrap();
        let rho = &phi * phi.adjoint();
        assert!(restricted_distance(&u, &w, &b, &rho).unwrap() < 1e-10);
    }
}

#[test]
fn restricted_distance_rejects_bad_inputs() {
    let full = OperatorAlgebra::full(2).unwrap();
    let rho = identity(2).scale(0.5);
    let bad = identity(2).scale(2.0);
    assert!(restricted_distance(&bad, &identity(2), &full, &rho).is_err());
    assert!(restricted_distance(&identity(2), &identity(2), &full, &identity(2)).is_err());
}

fn sign_matrix(m: &CMatrix) -> CMatrix {
    let (vals, vecs) = eigh(m);
    let mut s = CMatrix::zeros(m.nrows(), m.ncols());
    for (i, v) in vals.iter().enumerate() {
        s[(i, i)] = c64(if *v >= 0.0 { 1.0 } else { -1.0 }, 0.0);
    }
    &vecs * s * dagger(&vecs)
}

fn operator_norm(m: &CMatrix) -> f64 {
    m.clone().singular_values().max()
}

#[test]
fn restricted_distance_sandwich() {
    let fixtures = [
        OperatorAlgebra::full(2).unwrap(),
        left(),
        bell(),
        OperatorAlgebra::structural(&[(2, 1), (1, 2)], None).unwrap(),
        OperatorAlgebra::symmetric_operators(2).unwrap(),
    ];
    let mut rng = RngStream::new(21, 0);
    for b in &fixtures {
        let d = b.dim();
        let u = haar_unitary(d, &mut rng).unwrap();
        let v = haar_unitary(d, &mut rng).unwrap();
        let phi = haar_state(d, &mut rng).unwrap();
        let rho = &phi * phi.adjoint();
        let closed = restricted_distance(&u, &v, b, &rho).unwrap();
        let delta = dagger(&u) * &rho * &u - dagger(&v) * &rho * &v;

        let mut best = 0.0f64;
        for _ in 0..500 {
            let x = b.random_element(&mut rng);
            let x = x.scale(1.0 / operator_norm(&x));
            let val = trace_of_product(&x, &delta).norm();
            assert!(val <= closed + 1e-9);
            best = best.max(val);
        }
        let mut x_star = CMatrix::zeros(d, d);
        for blk in b.decomposition().unwrap().blocks() {
            let restricted = dagger(&blk.isometry) * &delta * &blk.isometry;
            let m =
                crate::linalg::partial_trace(&restricted, &[blk.multiplicity, blk.irrep_dim], &[1])
                    .unwrap();
            let local = kron(&identity(blk.multiplicity), &sign_matrix(&m));
            x_star += &blk.isometry * local * dagger(&blk.isometry);
        }
        assert!(b.contains(&x_star));
        assert!(operator_norm(&x_star) <= 1.0 + 1e-9);
        let val = trace_of_product(&x_star, &delta).norm();
        best = best.max(val);
        assert!((closed - best).abs() < 1e-6, "closed {closed} best {best}");
    }
}

#[test]
fn markov_examples() {
    let a = left();
    let r = markov_bound_check(&a, &a.commutant(), 0.1, 50, 4, 1).unwrap();
    assert_eq!(r.bound, 0.0);
    assert!(r.max_distance < 1e-10);
    assert!(!r.violation);

    let full = OperatorAlgebra::full(2).unwrap();
    let r = markov_bound_check(&full, &full, 0.1, 100, 8, 2).unwrap();
    assert!(r.bound > 1.0);
    assert!(r.max_distance <= 2.0 + 1e-9);
    assert!(!r.violation);
}

#[test]
fn markov_sweep_is_monotone_and_below_bound() {
    let a = OperatorAlgebra::diagonal_masa(2).unwrap();
    let b = OperatorAlgebra::full(2).unwrap();
    let eps = [0.05, 0.1, 0.2, 0.4, 0.8, 1.2, 1.6];
    let reports = markov_sweep(&a, &b, &eps, 1_000, 32, 7).unwrap();
    for w in reports.windows(2) {
        assert!(w[1].probability <= w[0].probability);
        assert!(w[1].bound <= w[0].bound);
    }
    assert!(reports.iter().all(|r| !r.violation));
}

#[test]
fn markov_constants_values() {
    let (c, c_variant) = markov_constants(&OperatorAlgebra::full(2).unwrap()).unwrap();
    assert!((c - 2.0 * (2.0f64 * 4.0 * 2.0).sqrt()).abs() < 1e-12);
    assert!((c_variant - 2.0 * (8.0f64).sqrt() * 2.0).abs() < 1e-12);
}
