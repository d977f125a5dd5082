use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::sync::Arc;

use approx::assert_abs_diff_eq;
use num_complex::Complex64 as C64;
use rydberg_nhqc::dynamics::{evolve_master, TimeDependentHamiltonian};
use rydberg_nhqc::model::*;
use rydberg_nhqc::operators::{kron, pauli, phase, Operator, StateVector};
use rydberg_nhqc::units::{mhz, to_mhz, van_der_waals};

fn ladder_params(n: usize) -> EnsembleParams {
    let ob = mhz(10.0);
    EnsembleParams {
        n_atoms: n,
        omega_a: -ob,
        omega_b: ob,
        omega_c: ob,
        phi_a: 0.0,
        phi_b: 0.0,
        delta: 12.0 * ob,
        delta_prime: 0.0,
        gamma_p: 0.0,
        gamma_rydberg: 0.0,
        gamma_phi: 0.0,
    }
}

fn constant(op: &Operator) -> TimeDependentHamiltonian {
    let mut h = TimeDependentHamiltonian::new(op.dim());
    h.add_constant(op).unwrap();
    h
}

#[test]
fn kron_identity_and_basis_action() {
    assert_eq!(kron(&Operator::identity(2), &Operator::identity(3)), Operator::identity(6));
    let psi = StateVector::from_vec(vec![C64::new(0.6, 0.0), C64::new(0.0, 0.8)]);
    let out = kron(&pauli(1), &Operator::identity(2)).apply(&StateVector::basis(2, 0).kron(&psi));
    let want = StateVector::basis(2, 1).kron(&psi);
    assert!((0..4).all(|i| (out.get(i) - want.get(i)).norm() < 1e-15));
    assert_eq!(Operator::identity(4).dagger(), Operator::identity(4));
}

#[test]
fn control_hamiltonian_examples() {
    let w = mhz(10.0);
    let h = control_hamiltonian(&ControlAtomParams { omega0: 0.0, omega1: w, phi0: 0.0, phi1: 0.0, gamma_r: 0.0 });
    let mut want = Operator::zeros(3);
    want.set(1, 2, C64::from(w / 2.0));
    want.set(2, 1, C64::from(w / 2.0));
    assert!(h.max_abs_diff(&want) < 1e-14);
    assert!(h.dagger().max_abs_diff(&h) < 1e-14);

    let zero = control_hamiltonian(&ControlAtomParams { omega0: 0.0, omega1: 0.0, phi0: 0.3, phi1: 0.1, gamma_r: 0.0 });
    assert_eq!(zero.max_abs(), 0.0);

    let mut ev = control_hamiltonian(&ControlAtomParams { omega0: 1.0, omega1: 1.0, phi0: 0.0, phi1: 0.0, gamma_r: 0.0 })
        .eigvalsh();
    ev.sort_by(f64::total_cmp);
    let s = 2f64.sqrt() / 2.0;
    assert_abs_diff_eq!(ev[0], -s, epsilon = 1e-12);
    assert_abs_diff_eq!(ev[1], 0.0, epsilon = 1e-12);
    assert_abs_diff_eq!(ev[2], s, epsilon = 1e-12);
}

#[test]
fn ensemble_space_dimensions() {
    assert_eq!(ensemble_space(1).unwrap().dim(), 5);
    assert_eq!(ensemble_space(4).unwrap().dim(), 17);
    assert_eq!(ensemble_space(8).unwrap().dim(), 33);
    let s = ensemble_space(2).unwrap();
    assert!(s.index_of("Q1").is_err());
}

#[test]
fn collective_state_examples() {
    let one = EnsembleSpace::per_atom(1).unwrap();
    let a = collective_state(&one, Level::A).unwrap();
    assert_eq!(a, StateVector::basis(5, one.hilbert_space().index_of("A1").unwrap()));

    let four = EnsembleSpace::per_atom(4).unwrap();
    let r = collective_state(&four, Level::R).unwrap();
    for k in 0..4 {
        let i = four.atom_index(Level::R, k).unwrap();
        assert_abs_diff_eq!(r.get(i).re, 0.5, epsilon = 1e-15);
    }
    assert_abs_diff_eq!(r.norm(), 1.0, epsilon = 1e-15);
    let three = EnsembleSpace::new(2, vec![Level::A, Level::B, Level::R], Representation::PerAtom).unwrap();
    assert!(three.collective_state(Level::P).is_err());
}

#[test]
fn full_hamiltonian_examples() {
    let mut p = ladder_params(2);
    p.omega_a = 0.0;
    p.omega_b = 0.0;
    p.omega_c = 0.0;
    for frame in [Frame::PhaseRotating, Frame::DiagonalDetuning] {
        let h = ensemble_hamiltonian_full(&p, frame, 0.0, 0.3).unwrap();
        for i in 0..h.dim() {
            for j in 0..h.dim() {
                if i != j {
                    assert_eq!(h.get(i, j), C64::from(0.0));
                }
            }
        }
    }

    // collective matrix element ⟨𝓑̄|H|p̄⟩ = Ω′ e^{iφ_B}/2
    let mut p = ladder_params(4);
    p.phi_a = 0.7;
    p.phi_b = 0.7;
    let h = ensemble_hamiltonian_full(&p, Frame::PhaseRotating, 0.0, 0.0).unwrap();
    let space = EnsembleSpace::per_atom(4).unwrap();
    let b = bright_state(&space, p.vartheta(), p.phi()).unwrap();
    let pbar = space.collective_state(Level::P).unwrap();
    let elem = b.inner(&h.apply(&pbar));
    let want = 0.5 * p.omega_prime() * phase(p.phi_b);
    assert!((elem - want).norm() < 1e-9, "{elem} vs {want}");
}

#[test]
fn effective_hamiltonian_examples() {
    let p = ladder_params(4);
    let h = ensemble_hamiltonian_effective(&p);
    let bright = StateVector::from_real(&[-FRAC_1_SQRT_2, FRAC_1_SQRT_2, 0.0]);
    let dark = StateVector::from_real(&[FRAC_1_SQRT_2, FRAC_1_SQRT_2, 0.0]);
    let r = StateVector::basis(3, 2);
    assert_abs_diff_eq!(bright.inner(&h.apply(&r)).re, p.omega_eff() / 2.0, epsilon = 1e-12);
    for k in 0..3 {
        assert!(dark.inner(&h.apply(&StateVector::basis(3, k))).norm() < 1e-12);
    }

    // a 2π-area pulse realises U(ϑ, φ) on {Ā, B̄}
    let t = 2.0 * PI / p.omega_eff();
    let u = holonomic_gate(p.vartheta(), p.phi());
    let hh = constant(&h);
    for (i, j) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
        let rho = Operator::unit(3, i, j);
        let out = evolve_master(&rho, &hh, &[], t, t / 4000.0).unwrap().final_state;
        let want = u.dot(&Operator::unit(2, i, j)).dot(&u.dagger());
        let got = out.restrict(&[StateVector::basis(3, 0), StateVector::basis(3, 1)]);
        assert!(got.max_abs_diff(&want) < 1e-9);
    }
}

#[test]
fn dark_state_is_stationary() {
    let p = ladder_params(1);
    let h = constant(&ensemble_hamiltonian_effective(&p));
    let dark = StateVector::from_real(&[FRAC_1_SQRT_2, FRAC_1_SQRT_2, 0.0]);
    let out = evolve_master(&dark.density(), &h, &[], 37.0, 0.002).unwrap().final_state;
    assert!(out.expectation(&dark).re >= 1.0 - 1e-10);
}

#[test]
fn dispersive_examples() {
    let w = mhz(10.0);
    let mut p = ladder_params(1);
    // Ω_C = 2Δ makes the two-photon amplitudes equal to Ω_A, Ω_B
    p.omega_c = 2.0 * p.delta;
    p.delta_prime = 10.0 * w;
    let h = dispersive_effective_hamiltonian(&p).unwrap();
    let ev = h.eigvalsh().into_iter().fold(f64::INFINITY, f64::min);
    assert_abs_diff_eq!(ev, -2.0 * w * w / (4.0 * p.delta_prime), epsilon = 1e-9);

    // ∫Ω″²/(2Δ′) dt = 2π gives phase π on the bright state, i.e. U(ϑ, φ)
    let t = 4.0 * PI * p.delta_prime / (2.0 * w * w);
    let u = holonomic_gate(p.vartheta(), p.phi());
    let out = evolve_master(&Operator::unit(3, 0, 1), &constant(&h), &[], t, t / 4000.0).unwrap().final_state;
    let got = out.restrict(&[StateVector::basis(3, 0), StateVector::basis(3, 1)]);
    assert!(got.max_abs_diff(&u.dot(&Operator::unit(2, 0, 1)).dot(&u.dagger())) < 1e-9);

    p.omega_a = 0.0;
    p.omega_b = 0.0;
    assert_eq!(dispersive_effective_hamiltonian(&p).unwrap().max_abs(), 0.0);
    p.omega_a = -w;
    p.omega_b = w;
    p.delta_prime = w;
    assert!(dispersive_effective_hamiltonian(&p).is_err());
}

#[test]
fn interaction_examples() {
    let es = EnsembleSpace::per_atom(4).unwrap();
    let cs = ControlSpace::standard();
    let h = interaction_hamiltonian(&InteractionParams::uniform(4, 0.0), InteractionKind::Blockade, &cs, &es).unwrap();
    assert_eq!(h.max_abs(), 0.0);
    assert_abs_diff_eq!(to_mhz(van_der_waals(139.0, 3.5)), 75.6, epsilon = 0.1);
    assert!(interaction_hamiltonian(&InteractionParams::uniform(4, 1.0), InteractionKind::DarkStateExchange, &cs, &es)
        .is_err());
}

#[test]
fn exchange_dark_state_is_annihilated() {
    // control [0, 1, r, R] ⊗ ensemble [ā, Ā, B̄, R̄, r̄] (single atom; the collective algebra is identical)
    let w2 = mhz(10.0) * 2f64.sqrt();
    let vp = 20.0 * mhz(10.0);
    let phi_b = 0.4;
    let sys = System {
        controls: vec![0.0],
        aux_rydberg: true,
        ensemble: Some(Ensemble {
            n_atoms: 1,
            repr: Representation::Symmetric,
            coupling: EnsembleCoupling::DarkState,
            gamma_p: 0.0,
            gamma_rydberg: 0.0,
            gamma_phi: 0.0,
        }),
        blockade: vec![0.0],
        control_control: 0.0,
        exchange: vp,
    };
    let ops = sys.ensemble_drive_operators(-PI / 2.0, 0.0).unwrap();
    let e = w2 * phase(phi_b);
    let drive = &ops.coupling.scale(ops.coupling_scale * e);
    let h = &(&sys.static_hamiltonian().unwrap() + drive) + &drive.dagger();
    let cs = sys.control_space();
    let es = sys.ensemble_space().unwrap();
    let bright = bright_state(&es, -PI / 2.0, 0.0).unwrap();
    let r_c = cs.ket(ControlLevel::Rydberg).unwrap();
    let big_r = cs.ket(ControlLevel::AuxRydberg).unwrap();
    let rr = es.collective_state(Level::Rr).unwrap();
    let d = &r_c.kron(&bright).scale(C64::from(vp)) - &big_r.kron(&rr).scale(0.5 * w2 * phase(-phi_b));
    assert!(h.apply(&d).norm() < 1e-9 * vp);
}

#[test]
fn lindblad_examples() {
    let es = EnsembleSpace::per_atom(4).unwrap();
    let cp = ControlAtomParams { omega0: 0.0, omega1: 0.0, phi0: 0.0, phi1: 0.0, gamma_r: 0.0 };
    let mut ep = ladder_params(4);
    let j = lindblad_ops(&cp, &ep, &es).unwrap();
    assert!(j.control.is_empty() && j.ensemble.is_empty());

    ep.gamma_p = 1.0;
    let j = lindblad_ops(&cp, &ep, &es).unwrap();
    assert_eq!(j.ensemble.len(), 12);
    for l in &j.ensemble {
        assert_abs_diff_eq!(l.max_abs(), (1.0f64 / 3.0).sqrt(), epsilon = 1e-15);
    }

    ep.gamma_p = 0.0;
    ep.gamma_rydberg = 0.004;
    let j = lindblad_ops(&cp, &ep, &es).unwrap();
    let sum = j.ensemble.iter().fold(Operator::zeros(es.dim()), |acc, l| &acc + &l.dagger().dot(l));
    let want = &es.lift(&[(Level::R, Level::R, C64::from(1.0))]).unwrap() * 0.004;
    assert!(sum.max_abs_diff(&want) < 1e-15);

    let cp = ControlAtomParams { gamma_r: 0.01, ..cp };
    let j = lindblad_ops(&cp, &ep, &es).unwrap();
    assert_eq!(j.control.len(), 2);
}

#[test]
fn blockade_suppresses_transfer() {
    // control in |r⟩, V = 2Δ: the two-photon transfer |𝓑̄⟩ → |R̄⟩ stays below 1%
    let ob = mhz(10.0);
    let delta = 12.0 * ob;
    let mut p = ladder_params(4);
    p.delta = delta;
    let es = EnsembleSpace::per_atom(4).unwrap();
    let h = &ensemble_hamiltonian_on(&es, &p, Frame::DiagonalDetuning, 2.0 * delta, 0.0).unwrap()
        + &stark_compensation(&es, &p).unwrap();
    let t = 2.0 * PI / p.omega_eff();
    let b = bright_state(&es, p.vartheta(), p.phi()).unwrap();
    let r = es.collective_projector(Level::R).unwrap();
    let res = evolve_master(&b.density(), &constant(&h), &[], t, 1e-4).unwrap();
    let rbar = es.collective_state(Level::R).unwrap();
    let idx: Vec<usize> = (0..4).map(|k| es.atom_index(Level::R, k).unwrap()).collect();
    let peak = res.samples.iter().map(|(_, d)| idx.iter().map(|&i| d[i]).sum::<f64>()).fold(0.0, f64::max);
    assert!(peak < 0.01, "peak R population {peak}");
    assert!(res.final_state.dot(&r).trace().re < 0.01);
    assert!(rbar.norm() > 0.0);
}

#[test]
fn effective_model_matches_ladder_for_one_atom() {
    let p = ladder_params(1);
    let es = EnsembleSpace::per_atom(1).unwrap();
    let full = &ensemble_hamiltonian_on(&es, &p, Frame::DiagonalDetuning, 0.0, 0.0).unwrap()
        + &stark_compensation(&es, &p).unwrap();
    let eff = ensemble_hamiltonian_effective(&p);
    let keep: Vec<StateVector> = ["A1", "B1", "R1"].iter().map(|l| es.hilbert_space().ket(l).unwrap()).collect();
    let b3 = StateVector::from_real(&[-FRAC_1_SQRT_2, FRAC_1_SQRT_2, 0.0]);
    let b5 = bright_state(&es, p.vartheta(), p.phi()).unwrap();
    let t = 2.0 * PI / p.omega_eff();
    let mut worst: f64 = 0.0;
    let (mut rf, mut re) = (b5.density(), b3.density());
    let steps = 20;
    for _ in 0..steps {
        rf = evolve_master(&rf, &constant(&full), &[], t / steps as f64, 2e-4).unwrap().final_state;
        re = evolve_master(&re, &constant(&eff), &[], t / steps as f64, 2e-4).unwrap().final_state;
        worst = worst.max(rf.restrict(&keep).trace_distance(&re));
    }
    assert!(worst <= 0.02, "trace distance {worst}");
}

#[test]
fn frames_agree_on_populations() {
    let mut p = ladder_params(1);
    p.phi_a = 0.3;
    p.phi_b = 0.3;
    let es = EnsembleSpace::per_atom(1).unwrap();
    let shift = 0.5 * p.delta;
    let stark = stark_compensation(&es, &p).unwrap();
    let diag = &ensemble_hamiltonian_on(&es, &p, Frame::DiagonalDetuning, shift, 0.0).unwrap() + &stark;
    let mut rot = TimeDependentHamiltonian::new(es.dim());
    rot.add_constant(&stark).unwrap();
    let lift = |x, y| es.lift(&[(x, y, C64::from(1.0))]).unwrap();
    let (d, ds) = (p.delta, p.delta + shift);
    let (ca, cb, cc) = (0.5 * p.omega_a * phase(p.phi_a), 0.5 * p.omega_b * phase(p.phi_b), 0.5 * p.omega_c);
    rot.add_with_hc(&lift(Level::A, Level::P), Arc::new(move |t| ca * phase(d * t))).unwrap();
    rot.add_with_hc(&lift(Level::B, Level::P), Arc::new(move |t| cb * phase(d * t))).unwrap();
    rot.add_with_hc(&lift(Level::R, Level::P), Arc::new(move |t| cc * phase(ds * t))).unwrap();
    let rho0 = es.hilbert_space().ket("B1").unwrap().density();
    let t = 0.8;
    let a = evolve_master(&rho0, &constant(&diag), &[], t, 2e-5).unwrap().final_state;
    let b = evolve_master(&rho0, &rot, &[], t, 2e-5).unwrap().final_state;
    for i in 0..es.dim() {
        assert!((a.get(i, i).re - b.get(i, i).re).abs() < 1e-6);
    }
}

#[test]
fn gate_examples() {
    let not = holonomic_gate(-PI / 2.0, 0.0);
    assert!(not.max_abs_diff(&pauli(1)) < 1e-12);
    let u = holonomic_gate(-PI / 4.0, 0.3);
    assert!(u.dot(&u.dagger()).max_abs_diff(&Operator::identity(2)) < 1e-12);
    let c = controlled_on_zero(&not);
    assert!((c.get(0, 1) - 1.0).norm() < 1e-12);
    assert_eq!(c.get(2, 2), C64::from(1.0));
    assert_eq!(named_gate("hadamard").unwrap(), (-PI / 4.0, 0.0));
    assert!(named_gate("swap").is_err());
}
