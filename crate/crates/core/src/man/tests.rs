use super::*;
use crate::error::ManError;
use crate::fixtures::{bell_basis, columns, computational_basis, fourier, hadamard, swap_gate};
use crate::linalg::{commutator, identity, swap_operator, CMatrix};
use crate::rng::{haar_unitary, RngStream};

const B2: LogBase = LogBase::Two;

fn alg(name: &str) -> OperatorAlgebra {
    match name {
        "full2" => OperatorAlgebra::full(2).unwrap(),
        "full4" => OperatorAlgebra::full(4).unwrap(),
        "triv4" => OperatorAlgebra::trivial(4).unwrap(),
        "left" => OperatorAlgebra::factor_left(2, 2).unwrap(),
        "right" => OperatorAlgebra::factor_right(2, 2).unwrap(),
        "diag2" => OperatorAlgebra::diagonal_masa(2).unwrap(),
        "had2" => OperatorAlgebra::masa(&columns(&hadamard())).unwrap(),
        "diag4" => OperatorAlgebra::diagonal_masa(4).unwrap(),
        "bell" => OperatorAlgebra::masa(&bell_basis()).unwrap(),
        "sym2" => OperatorAlgebra::symmetric_operators(2).unwrap(),
        "aa4" => OperatorAlgebra::asymptotically_abelian(4).unwrap(),
        "mixed4" => OperatorAlgebra::structural(&[(2, 1), (1, 2)], None).unwrap(),
        other => panic!("unknown fixture {other}"),
    }
}

/// `(1/2d) Σ_{α,β} ||[e_α, f_β]||²` over the matrix-unit bases.
fn commutator_oracle(a: &OperatorAlgebra, b: &OperatorAlgebra) -> f64 {
    let ea = a.decomposition().unwrap().block_bases().e;
    let eb = b.decomposition().unwrap().block_bases().e;
    let mut total = 0.0;
    for x in &ea {
        for y in &eb {
            total += commutator(x, y).norm_squared();
        }
    }
    total / (2.0 * a.dim() as f64)
}

#[test]
fn omega_examples() {
    let full = omega_operator(&alg("full2")).unwrap();
    let s = swap_operator(&[2], &[0]).unwrap();
    assert!((full.matrix() - s.scale(0.5)).norm() < 1e-12);
    let triv = omega_operator(&alg("triv4")).unwrap();
    assert!((triv.matrix() - identity(16)).norm() < 1e-12);
    assert!((triv.swap_trace() - 4.0).abs() < 1e-12);
    let diag = omega_operator(&alg("diag4")).unwrap();
    let mut expect = CMatrix::zeros(16, 16);
    for i in 0..4 {
        expect[(i * 4 + i, i * 4 + i)] = crate::linalg::c64(1.0, 0.0);
    }
    assert!((diag.matrix() - expect).norm() < 1e-12);
}

#[test]
fn omega_routes_agree_and_traces() {
    for name in ["full2", "left", "bell", "sym2", "aa4", "mixed4", "had2"] {
        let a = alg(name);
        let blocks = omega_operator_via(&a, OmegaRoute::Blocks).unwrap();
        let swap = omega_operator_via(&a, OmegaRoute::Swap).unwrap();
        let reshuffle = omega_operator_via(&a, OmegaRoute::Reshuffle).unwrap();
        assert!((blocks.matrix() - swap.matrix()).norm() < 1e-10, "{name}");
        assert!(
            (blocks.matrix() - reshuffle.matrix()).norm() < 1e-10,
            "{name}"
        );
        assert!(
            (blocks.swap_trace() - a.dim() as f64).abs() < 1e-10,
            "{name}"
        );
        let dc = a.decomposition().unwrap().commutant_dim() as f64;
        assert!((blocks.trace() - dc).abs() < 1e-10, "{name}");
    }
}

#[test]
fn omega_of_second_factor_swap_form() {
    // Ω of M₂ ⊗ 1 is S_{11'}/2 on (C²⊗C²)^{⊗2}.
    let o = omega_operator(&alg("left")).unwrap();
    let s = swap_operator(&[2, 2], &[0]).unwrap();
    assert!((o.matrix() - s.scale(0.5)).norm() < 1e-12);
}

#[test]
fn man_examples() {
    assert!(man_omega(&alg("left"), &alg("right"), B2).unwrap().s.abs() < 1e-12);
    let frac = man_omega(&alg("left"), &alg("full4"), B2).unwrap();
    assert!((frac.s - 0.75).abs() < 1e-12);
    let masa = man_omega(&alg("diag2"), &alg("had2"), B2).unwrap();
    assert!((masa.s - 0.5).abs() < 1e-12);
    assert!((masa.s2 - 1.0).abs() < 1e-12);
}

#[test]
fn projection_examples() {
    let prod = man_projection(&alg("left"), &alg("diag4"), B2).unwrap();
    assert!((prod.s - 0.5).abs() < 1e-12);
    let bell = man_projection(&alg("left"), &alg("bell"), B2).unwrap();
    assert!((bell.s - 0.75).abs() < 1e-12);
    for name in ["full2", "left", "bell", "sym2", "aa4", "mixed4"] {
        let a = alg(name);
        let r = man_projection(&a, &a.commutant(), B2).unwrap();
        assert!(r.s.abs() < 1e-12, "{name}");
    }
}

#[test]
fn formulas_match_commutator_oracle() {
    let names = [
        "full2", "diag2", "had2", "left", "right", "diag4", "bell", "sym2", "aa4", "mixed4",
    ];
    for x in names {
        for y in names {
            let (a, b) = (alg(x), alg(y));
            if a.dim() != b.dim() {
                continue;
            }
            let oracle = commutator_oracle(&a, &b);
            let omega = man_omega(&a, &b, B2).unwrap().s;
            let proj = man_projection(&a, &b, B2).unwrap().s;
            let ent = entropy_decomposition_man(&a, &b, B2).unwrap().0.s;
            assert!((omega - oracle).abs() < 1e-10, "{x} {y}");
            assert!((proj - oracle).abs() < 1e-10, "{x} {y}");
            assert!((ent - oracle).abs() < 1e-10, "{x} {y}");
            if a.decomposition().unwrap().is_collinear().collinear {
                let coll = man_collinear(&a, &b, B2).unwrap();
                assert!((coll.s - oracle).abs() < 1e-10, "{x} {y}");
                if let Some(dist) = coll.check("collinear-distance") {
                    assert!((dist - oracle).abs() < 1e-10, "{x} {y}");
                }
            }
            let bounds = man_bounds(&a, &b, B2).unwrap();
            assert!(bounds.respected_by(oracle), "{x} {y}");
        }
    }
}

#[test]
fn collinear_examples() {
    let r = man_collinear(&alg("full2"), &alg("full2"), B2).unwrap();
    assert!((r.s - 0.75).abs() < 1e-12);
    let overlap = alg("full2")
        .projection_overlap(&alg("full2").commutant())
        .unwrap();
    assert!((overlap - 1.0).abs() < 1e-12);
    let a = alg("left");
    let b = a.commutant();
    let r = man_collinear(&a, &b, B2).unwrap();
    assert!(r.check("collinear-distance").unwrap().abs() < 1e-12);
    assert!(matches!(
        man_collinear(&alg("sym2"), &alg("full4"), B2),
        Err(ManError::NotCollinear)
    ));
}

#[test]
fn self_man_examples() {
    assert!((self_man(&alg("full2"), B2).unwrap().s - 0.75).abs() < 1e-12);
    assert!((self_man(&alg("sym2"), B2).unwrap().s - 2.0 / 3.0).abs() < 1e-12);
    for d in [3usize, 4, 8] {
        let nc = self_man(&OperatorAlgebra::asymptotically_abelian(d).unwrap(), B2).unwrap();
        assert!((nc.s - 1.5 / d as f64).abs() < 1e-12, "d={d}");
    }
    for k in [2usize, 3] {
        let kf = k as f64;
        let nc = self_man(&OperatorAlgebra::symmetric_operators(k).unwrap(), B2).unwrap();
        assert!((nc.s - (1.0 - 4.0 / (kf * kf * (kf * kf - 1.0)))).abs() < 1e-12);
    }
}

#[test]
fn self_man_identities() {
    for name in ["full2", "left", "bell", "sym2", "aa4", "mixed4", "triv4"] {
        let a = alg(name);
        let r = self_man(&a, B2).unwrap();
        assert!(
            (r.check("irrep-mean").unwrap() - r.s).abs() < 1e-12,
            "{name}"
        );
        assert!(
            (r.check("nc2-structural").unwrap() - r.s2).abs() < 1e-9,
            "{name}"
        );
        assert!(r.s <= r.check("max-irrep-bound").unwrap() + 1e-12, "{name}");
        assert!(r.s <= r.check("ambient-bound").unwrap() + 1e-12, "{name}");
        assert!(r.s2 <= r.check("nc2-irrep-bound").unwrap() + 1e-9, "{name}");
        if let Some(c) = r.check("self-man-collinear") {
            assert!((c - r.s).abs() < 1e-12, "{name}");
        }
        let direct = man_omega(&a, &a, B2).unwrap().s;
        assert!((direct - r.s).abs() < 1e-10, "{name}");
    }
    assert!(self_man(&alg("sym2"), B2)
        .unwrap()
        .check("self-man-collinear")
        .is_none());
}

#[test]
fn bounds_examples() {
    let b = man_bounds(&alg("left"), &alg("full4"), B2).unwrap();
    assert!((b.commutant_bound - 0.75).abs() < 1e-12);
    assert!((b.commutant_log_bound - 2.0).abs() < 1e-12);
    let s12 = OperatorAlgebra::lattice(&[2, 2, 2], &[0, 1]).unwrap();
    let s23p = OperatorAlgebra::lattice(&[2, 2, 2], &[1, 2])
        .unwrap()
        .commutant();
    let s = man_projection(&s12, &s23p, B2).unwrap().s;
    let b = man_bounds(&s12, &s23p, B2).unwrap();
    assert!((b.intersection_bound.unwrap() - s).abs() < 1e-12);
    let triv = alg("triv4");
    for name in ["left", "bell", "sym2", "full4"] {
        let r = man_projection(&triv, &alg(name), B2).unwrap();
        assert!(r.s.abs() < 1e-12);
        assert!(man_bounds(&triv, &alg(name), B2).unwrap().respected_by(r.s));
    }
}

#[test]
fn orbit_average_examples() {
    assert!((orbit_averaged_man(&alg("full2"), &alg("full2")).unwrap() - 0.75).abs() < 1e-12);
    assert!((orbit_averaged_man(&alg("left"), &alg("left")).unwrap() - 0.6).abs() < 1e-12);
    assert!(
        orbit_averaged_man(&alg("triv4"), &alg("bell"))
            .unwrap()
            .abs()
            < 1e-12
    );
    let one = OperatorAlgebra::full(1).unwrap();
    assert!(orbit_averaged_man(&one, &one).is_err());
}

#[test]
fn lattice_examples() {
    let r = lattice_man(&[2, 2, 2], &[0], &[0], B2).unwrap();
    assert!((r.s - 0.75).abs() < 1e-12);
    assert!((r.s2 - 2.0).abs() < 1e-12);
    assert!(lattice_man(&[2, 2, 2], &[0], &[1, 2], B2).unwrap().s.abs() < 1e-12);
    let r = lattice_man(&[2, 2, 2], &[0, 1], &[1, 2], B2).unwrap();
    assert!((r.s - 0.75).abs() < 1e-12);
    assert!((r.check("conditional-s2").unwrap() - 2.0).abs() < 1e-12);
    assert!(matches!(
        lattice_man(&[2, 3], &[0], &[1], B2),
        Err(ManError::NonUniformSites)
    ));
    let e = lattice_man(&[3, 3], &[0], &[0], LogBase::E).unwrap();
    assert!((e.s2 - 9f64.ln()).abs() < 1e-12);
}

#[test]
fn lattice_closed_form_matches_explicit_algebras() {
    let sites = [2, 2, 2];
    let regions: Vec<Vec<usize>> = (0..8u32)
        .map(|m| (0..3).filter(|i| m & (1 << i) != 0).collect())
        .collect();
    for r1 in &regions {
        for r2 in &regions {
            let a = OperatorAlgebra::lattice(&sites, r1).unwrap();
            let b = OperatorAlgebra::lattice(&sites, r2).unwrap();
            let closed = lattice_man(&sites, r1, r2, B2).unwrap();
            let explicit = man_omega(&a, &b, B2).unwrap();
            assert!((closed.s - explicit.s).abs() < 1e-10, "{r1:?} {r2:?}");
            assert!((closed.s2 - explicit.s2).abs() < 1e-9, "{r1:?} {r2:?}");
        }
    }
}

#[test]
fn masa_examples() {
    let comp = computational_basis(2);
    assert!(masa_man(&comp, &comp, B2).unwrap().s.abs() < 1e-12);
    let had = columns(&hadamard());
    assert!((masa_man(&comp, &had, B2).unwrap().s - 0.5).abs() < 1e-12);
    let f3 = columns(&fourier(3));
    let r = masa_man(&computational_basis(3), &f3, B2).unwrap();
    assert!((r.s - 2.0 / 3.0).abs() < 1e-12);
    assert!((r.s2 - 3f64.log2()).abs() < 1e-12);
    let mut rng = RngStream::new(21, 0);
    for _ in 0..10 {
        let u = haar_unitary(3, &mut rng).unwrap();
        let v = haar_unitary(3, &mut rng).unwrap();
        let (bu, bv) = (columns(&u), columns(&v));
        let closed = masa_man(&bu, &bv, B2).unwrap();
        let omega = man_omega(
            &OperatorAlgebra::masa(&bu).unwrap(),
            &OperatorAlgebra::masa(&bv).unwrap(),
            B2,
        )
        .unwrap();
        assert!((closed.s - omega.s).abs() < 1e-9);
        assert!((closed.s2 - omega.s2).abs() < 1e-9);
    }
}

#[test]
fn quantumness_examples() {
    let comp = computational_basis(2);
    let q = quantumness(&comp, &comp).unwrap();
    assert!(q.quantumness.abs() < 1e-12);
    let mub = quantumness(&comp, &columns(&hadamard())).unwrap();
    assert!((mub.quantumness - 0.5).abs() < 1e-12);
    assert!((mub.man - 0.5).abs() < 1e-12);
    assert!(mub.lower_holds && mub.upper_holds);
}

#[test]
fn quantumness_matches_variance_sampling() {
    // The sup over unit-norm observables is attained at the top eigenvector;
    // random observables never exceed it.
    let mut rng = RngStream::new(22, 0);
    let u = haar_unitary(3, &mut rng).unwrap();
    let comp = computational_basis(3);
    let other = columns(&u);
    let q = quantumness(&comp, &other).unwrap().quantumness;
    let mut best: f64 = 0.0;
    for _ in 0..2000 {
        let mut a: Vec<f64> = (0..3).map(|_| rng.normal()).collect();
        let norm = a.iter().map(|x| x * x).sum::<f64>().sqrt();
        a.iter_mut().for_each(|x| *x /= norm);
        let mut obs = CMatrix::zeros(3, 3);
        for (j, v) in other.iter().enumerate() {
            obs += v * v.adjoint() * crate::linalg::c64(a[j], 0.0);
        }
        let sq = &obs * &obs;
        let var: f64 = (0..3)
            .map(|i| sq[(i, i)].re - obs[(i, i)].re * obs[(i, i)].re)
            .sum::<f64>()
            / 3.0;
        assert!(var <= q + 1e-12);
        best = best.max(var);
    }
    assert!(q - best < 2e-2);
}

#[test]
fn a_otoc_examples() {
    let left = alg("left");
    assert!(a_otoc(&left, &identity(4), B2).unwrap().s.abs() < 1e-12);
    let swapped = a_otoc(&left, &swap_gate(2), B2).unwrap();
    assert!((swapped.s - 0.75).abs() < 1e-12);
    let via_omega = man_omega(
        &left,
        &left.commutant().conjugate(&swap_gate(2)).unwrap(),
        B2,
    )
    .unwrap()
    .s;
    assert!((swapped.s - via_omega).abs() < 1e-12);
    let cgp = a_otoc(&alg("diag2"), &hadamard(), B2).unwrap();
    assert!((cgp.s - 0.5).abs() < 1e-12);
    assert!(a_otoc(&left, &identity(4).scale(2.0), B2).is_err());
}

#[test]
fn entropy_examples() {
    let (r, terms) = entropy_decomposition_man(&alg("left"), &alg("diag4"), B2).unwrap();
    assert!((r.s - 0.5).abs() < 1e-12);
    assert_eq!(terms.len(), 4);
    let total: f64 = terms.iter().map(|t| t.contribution).sum();
    assert!((total - r.s).abs() < 1e-12);
    for t in &terms {
        assert!((t.a - 2.0).abs() < 1e-12 && t.b.abs() < 1e-12);
    }
    let a = alg("sym2");
    assert!(
        entropy_decomposition_man(&a, &a.commutant(), B2)
            .unwrap()
            .0
            .s
            .abs()
            < 1e-12
    );
}

#[test]
fn entropy_expectation_matches_sampling() {
    // Exact two-design average of ||T(φ̂)||² against Monte Carlo over states.
    let a = alg("left");
    let b = alg("bell");
    let (_, terms) = entropy_decomposition_man(&a, &b, B2).unwrap();
    let a_comm = a.commutant();
    let dec = b.decomposition().unwrap();
    let block = &dec.blocks()[0];
    let mut rng = RngStream::new(23, 0);
    let n = 20000;
    let mut acc = 0.0;
    for _ in 0..n {
        let phi = crate::rng::haar_state(block.irrep_dim, &mut rng).unwrap();
        let x = &phi * phi.adjoint();
        let t = a_comm.project(&block.embed_irrep(&x).scale(1.0 / block.multiplicity as f64));
        acc += 1.0 - t.norm_squared();
    }
    assert!((acc / n as f64 - terms[0].mean_pure_entropy).abs() < 1e-2);
}

#[test]
fn factor_entropy_reduces_to_operator_entanglement() {
    // For A = M_2 ⊗ 1 and B = U(A'), the entropy form equals the A-OTOC.
    let mut rng = RngStream::new(24, 0);
    let a = alg("left");
    for _ in 0..5 {
        let u = haar_unitary(4, &mut rng).unwrap();
        let b = a.commutant().conjugate(&u).unwrap();
        let ent = entropy_decomposition_man(&a, &b, B2).unwrap().0.s;
        let otoc = a_otoc(&a, &u, B2).unwrap().s;
        assert!((ent - otoc).abs() < 1e-10);
    }
}

#[test]
fn clamp_and_log() {
    assert_eq!(clamp_unit(-5e-10).unwrap(), 0.0);
    assert_eq!(clamp_unit(1.0 + 5e-10).unwrap(), 1.0);
    assert!(clamp_unit(-1e-6).is_err());
    assert!(clamp_unit(f64::NAN).is_err());
    assert!(log_man(1.0, B2).is_infinite());
    assert!((log_man(0.75, B2) - 2.0).abs() < 1e-12);
    assert!((log_man(0.75, LogBase::E) - 4f64.ln()).abs() < 1e-12);
}

#[test]
fn report_serialization_round_trip() {
    let mut r = man_omega(&alg("left"), &alg("full4"), B2).unwrap();
    r = r.with_bounds(man_bounds(&alg("left"), &alg("full4"), B2).unwrap());
    let json = serde_json::to_string(&r).unwrap();
    let back: ManReport = serde_json::from_str(&json).unwrap();
    assert_eq!(r, back);
    let inf = ManReport::new(1.0, Method::Omega, B2).unwrap();
    let json = serde_json::to_string(&inf).unwrap();
    assert!(json.contains("\"inf\""));
    let back: ManReport = serde_json::from_str(&json).unwrap();
    assert!(back.s2.is_infinite());
}

#[test]
fn dimension_mismatch_errors() {
    let err = man_omega(&alg("full2"), &alg("full4"), B2).unwrap_err();
    assert_eq!(err, ManError::DimensionMismatch { left: 2, right: 4 });
    assert!(man_projection(&alg("full2"), &alg("full4"), B2).is_err());
    assert!(man_bounds(&alg("full2"), &alg("full4"), B2).is_err());
    assert!(entropy_decomposition_man(&alg("full2"), &alg("full4"), B2).is_err());
}

#[test]
fn unitary_invariance() {
    let mut rng = RngStream::new(25, 0);
    let pairs = [("left", "bell"), ("sym2", "diag4"), ("aa4", "mixed4")];
    for (x, y) in pairs {
        let (a, b) = (alg(x), alg(y));
        let s = man_projection(&a, &b, B2).unwrap().s;
        for _ in 0..20 {
            let u = haar_unitary(a.dim(), &mut rng).unwrap();
            let ua = a.conjugate(&u).unwrap();
            let ub = b.conjugate(&u).unwrap();
            assert!((man_projection(&ua, &ub, B2).unwrap().s - s).abs() < 1e-9);
        }
    }
}
