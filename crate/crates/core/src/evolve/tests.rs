use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::model::{collapse_channels, Channel};
use crate::qops::{annihilation, atomic_op, lift, max_abs, number, AtomLevel, CVector};

const ALL_BACKENDS: [Backend; 3] = [Backend::Pade, Backend::Taylor, Backend::Rk4];

fn random_matrix(rng: &mut ChaCha8Rng, d: usize) -> CMatrix {
    CMatrix::from_fn(d, d, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
}

fn random_state(rng: &mut ChaCha8Rng, space: &HilbertSpace) -> DensityMatrix {
    let a = random_matrix(rng, space.dim());
    let m = &a * a.adjoint();
    let tr = m.trace();
    DensityMatrix::new(space.clone(), m / tr).unwrap()
}

fn random_unitary(rng: &mut ChaCha8Rng, space: &HilbertSpace) -> Operator {
    let a = random_matrix(rng, space.dim());
    let h = hermitian_part(&a);
    Operator::new(space.clone(), expm(&(h * C64::new(0.0, 1.0))).unwrap()).unwrap()
}

fn jc_setup(nmax: usize) -> (PhysicalParams, HilbertSpace, Liouvillian) {
    let p = PhysicalParams::default().lossless();
    let space = HilbertSpace::atom_cavity(nmax).unwrap();
    let l = Liouvillian::for_segment(&p, &SegmentConfig::resonant(&p), &space).unwrap();
    (p, space, l)
}

#[test]
fn photon_loss_rate() {
    let kappa: f64 = 2.5e4;
    let space = HilbertSpace::cavity(3).unwrap();
    let a = annihilation(3).unwrap();
    let l = build_liouvillian(&Operator::zeros(&space), &[a.scale_re(kappa.sqrt())]).unwrap();
    let rho = DensityMatrix::basis(space, 1).unwrap();
    let drho = l.apply(rho.data());
    let dn = (drho * number(3).unwrap().data()).trace();
    assert!((dn - c(-kappa)).norm() < 1e-9 * kappa);
}

#[test]
fn hamiltonian_only_generator_is_commutator() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (_, space, l) = jc_setup(2);
    let rho = random_state(&mut rng, &space);
    let h = l.hamiltonian().data();
    let expected = (h * rho.data() - rho.data() * h) * C64::new(0.0, -1.0);
    assert!(max_abs(&(l.apply(rho.data()) - expected)) < 1e-12 * l.norm_bound());
}

#[test]
fn generator_is_traceless_on_random_hermitian_inputs() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let p = PhysicalParams { temperature: 0.08, gamma_phi: 30.0, ..PhysicalParams::default() };
    let space = HilbertSpace::atom_cavity(2).unwrap();
    let l = Liouvillian::for_segment(&p, &SegmentConfig::detuned_drive(&p), &space).unwrap();
    let sup = l.superoperator();
    let d = space.dim();
    for _ in 0..100 {
        let rho = hermitian_part(&random_matrix(&mut rng, d));
        let scale = rho.iter().map(|z| z.norm()).sum::<f64>();
        let out = l.apply(&rho);
        assert!(out.trace().norm() < 1e-10 * scale * l.norm_bound());
        let v = nalgebra::DVector::from_column_slice(rho.as_slice());
        let out_dense = CMatrix::from_column_slice(d, d, (&sup * v).as_slice());
        assert!(out_dense.trace().norm() < 1e-10 * scale * l.norm_bound());
        assert!(max_abs(&(out_dense - out)) < 1e-12 * l.norm_bound());
    }
}

#[test]
fn vacuum_rabi_oscillation_on_every_backend() {
    let (p, space, l) = jc_setup(3);
    let r1 = space.index_of(&[AtomLevel::Rydberg.index(), 1]);
    let rp0 = space.index_of(&[AtomLevel::RydbergP.index(), 0]);
    let rho0 = DensityMatrix::basis(space, r1).unwrap();
    for backend in ALL_BACKENDS {
        for k in 1..=8 {
            let t = k as f64 * 0.125 * std::f64::consts::PI / p.g;
            let rho = propagate_with(&rho0, &l, t, backend).unwrap();
            let expected = (p.g * t).sin().powi(2);
            assert!((rho.population(rp0) - expected).abs() < 1e-8, "{backend:?} t={t:e}");
        }
    }
}

#[test]
fn damped_cavity_occupation() {
    let p = PhysicalParams { q_factor: 1e4, ..PhysicalParams::default().lossless() };
    let space = HilbertSpace::cavity(3).unwrap();
    let l = build_liouvillian(&Operator::zeros(&space), &collapse_ops(&p, &space).unwrap()).unwrap();
    let rho0 = DensityMatrix::basis(space, 1).unwrap();
    let n = number(3).unwrap();
    for backend in ALL_BACKENDS {
        for t in [1e-7, 1e-6, 5e-6] {
            let rho = propagate_with(&rho0, &l, t, backend).unwrap();
            assert!((rho.expectation(&n).re - (-p.kappa() * t).exp()).abs() < 1e-8);
        }
    }
}

#[test]
fn zero_duration_is_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (_, space, l) = jc_setup(2);
    let rho = random_state(&mut rng, &space);
    assert_eq!(propagate(&rho, &l, 0.0).unwrap(), rho);
    assert!(propagate(&rho, &l, -1.0).is_err());
}

#[test]
fn semigroup_property() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let p = PhysicalParams { q_factor: 3e3, temperature: 0.1, ..PhysicalParams::default() };
    let space = HilbertSpace::atom_cavity(2).unwrap();
    let l = Liouvillian::for_segment(&p, &SegmentConfig::resonant(&p), &space).unwrap();
    for backend in [Backend::Pade, Backend::Taylor] {
        for _ in 0..5 {
            let rho = random_state(&mut rng, &space);
            let (t1, t2) = (rng.gen_range(1e-8..2e-7), rng.gen_range(1e-8..2e-7));
            let split = propagate_with(&propagate_with(&rho, &l, t1, backend).unwrap(), &l, t2, backend).unwrap();
            let joint = propagate_with(&rho, &l, t1 + t2, backend).unwrap();
            assert!(max_abs(&(split.data() - joint.data())) < 1e-9);
        }
    }
}

#[test]
fn unitary_evolution_conserves_purity() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let p = PhysicalParams::default().lossless();
    let space = HilbertSpace::atom_cavity(3).unwrap();
    let l = Liouvillian::for_segment(&p, &SegmentConfig::detuned_drive(&p), &space).unwrap();
    assert!(l.c_ops().is_empty());
    let rho = random_state(&mut rng, &space);
    for backend in ALL_BACKENDS {
        let out = propagate_with(&rho, &l, 37e-9, backend).unwrap();
        assert!((out.purity() - rho.purity()).abs() < 1e-9, "{backend:?}");
    }
}

#[test]
fn backends_agree_with_dissipation() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let p = PhysicalParams { q_factor: 1e3, temperature: 0.15, gamma_phi: 1e5, ..PhysicalParams::default() };
    let space = HilbertSpace::atom_cavity(3).unwrap();
    let l = Liouvillian::for_segment(&p, &SegmentConfig::resonant(&p), &space).unwrap();
    let rho = random_state(&mut rng, &space);
    let t = 180e-9;
    let reference = propagate_with(&rho, &l, t, Backend::Pade).unwrap();
    for backend in [Backend::Taylor, Backend::Rk4] {
        let other = propagate_with(&rho, &l, t, backend).unwrap();
        assert!(max_abs(&(other.data() - reference.data())) < 1e-9, "{backend:?}");
        assert!(other.is_valid());
    }
}

#[test]
fn trajectory_matches_independent_propagation() {
    let (p, space, l) = jc_setup(2);
    let r1 = space.index_of(&[AtomLevel::Rydberg.index(), 1]);
    let rho0 = DensityMatrix::basis(space, r1).unwrap();
    let times: Vec<f64> = (0..=10).map(|k| k as f64 * 0.1 * std::f64::consts::PI / p.g).collect();
    let traj = trajectory(&rho0, &l, &times, Backend::Pade).unwrap();
    for (t, rho) in times.iter().zip(&traj) {
        let direct = propagate_with(&rho0, &l, *t, Backend::Taylor).unwrap();
        assert!(max_abs(&(direct.data() - rho.data())) < 1e-10);
    }
}

#[test]
fn unitary_application() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let space = HilbertSpace::atom_cavity(1).unwrap();
    let rho = random_state(&mut rng, &space);
    assert!(max_abs(&(apply_unitary(&rho, &Operator::identity(&space)).unwrap().data() - rho.data())) < 1e-15);

    for _ in 0..10 {
        let u = random_unitary(&mut rng, &space);
        let out = apply_unitary(&rho, &u).unwrap();
        assert!((out.trace() - rho.trace()).norm() < 1e-12);
        for (a, b) in out.eigenvalues().iter().zip(rho.eigenvalues()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    // a reflection is its own inverse
    let mut psi = CVector::zeros(space.dim());
    psi[0] = c(0.6);
    psi[3] = C64::new(0.0, 0.8);
    let reflect = Operator::identity(&space) - Operator::new(space.clone(), &psi * psi.adjoint() * c(2.0)).unwrap();
    let twice = apply_unitary(&apply_unitary(&rho, &reflect).unwrap(), &reflect).unwrap();
    assert!(max_abs(&(twice.data() - rho.data())) < 1e-13);

    let not_unitary = Operator::identity(&space).scale_re(1.1);
    assert!(matches!(apply_unitary(&rho, &not_unitary), Err(Error::NonUnitary { .. })));
}

#[test]
fn schedules() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let p = PhysicalParams { q_factor: 5e3, ..PhysicalParams::default() };
    let space = HilbertSpace::atom_cavity(3).unwrap();
    let rho = random_state(&mut rng, &space);

    assert_eq!(run_schedule(&rho, &p, &Schedule::new()).unwrap(), rho);

    let seg = SegmentConfig::resonant(&p);
    let mut split = Schedule::new();
    split.push_evolve("a", 70e-9, seg).unwrap();
    split.push_evolve("b", 110e-9, seg).unwrap();
    let mut joint = Schedule::new();
    joint.push_evolve("ab", 180e-9, seg).unwrap();
    let a = run_schedule(&rho, &p, &split).unwrap();
    let b = run_schedule(&rho, &p, &joint).unwrap();
    assert!(max_abs(&(a.data() - b.data())) < 1e-10);
    assert!((split.total_duration() - 180e-9).abs() < 1e-20);

    assert!(split.push_evolve("zero", 0.0, seg).is_err());
    assert!(split.push_unitary("bad", Operator::zeros(&space)).is_err());
}

#[test]
fn mismatched_spaces_are_rejected() {
    let (_, _, l) = jc_setup(3);
    let other = DensityMatrix::basis(HilbertSpace::atom_cavity(2).unwrap(), 0).unwrap();
    assert!(matches!(propagate(&other, &l, 1e-9), Err(Error::DimensionMismatch(_))));

    let space = HilbertSpace::atom_cavity(3).unwrap();
    let foreign = lift(&HilbertSpace::atom_cavity(2).unwrap(), &atomic_op(AtomLevel::Rydberg, AtomLevel::Reservoir)).unwrap();
    assert!(build_liouvillian(&Operator::zeros(&space), &[foreign]).is_err());
}

#[test]
fn positivity_holds_at_checkpoints() {
    let p = PhysicalParams { q_factor: 2e3, temperature: 0.2, ..PhysicalParams::default() };
    let space = HilbertSpace::atom_cavity(4).unwrap();
    let ch = collapse_channels(&p, &space).unwrap();
    assert!(ch.iter().any(|c| c.channel == Channel::CavityGain));
    let l = Liouvillian::for_segment(&p, &SegmentConfig::resonant(&p), &space).unwrap();
    let mut rho = DensityMatrix::basis(space.clone(), space.index_of(&[1, 0])).unwrap();
    for _ in 0..6 {
        rho = propagate(&rho, &l, 100e-9).unwrap();
        assert!(rho.min_eigenvalue() > -1e-8);
        assert!(rho.is_valid());
    }
}
