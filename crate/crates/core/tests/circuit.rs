use pmrsim::circuit::*;
use pmrsim::divdiff::{alpha_coeffs, for_each_ktuple, KTuple};
use pmrsim::lcu::{build_oaa_operator, params_from_norms, SimParams};
use pmrsim::linalg::max_abs;
use pmrsim::pauli::parity;
use pmrsim::pmr::pmr_decompose;
use pmrsim::{Complex64, Mask, PauliHamiltonian, PmrHamiltonian};
use proptest::prelude::*;

fn tiny(labels: &[(&str, f64)], q_max: usize, kappa: u32) -> (PmrHamiltonian, SimParams) {
    let pairs: Vec<(&str, Complex64)> = labels.iter().map(|(l, c)| (*l, Complex64::new(*c, 0.0))).collect();
    let h = pmr_decompose(&PauliHamiltonian::from_labels(&pairs).unwrap()).unwrap();
    let p = params_from_norms(0.2, 0.5, h.gamma_total, h.delta_e).unwrap();
    let p = SimParams {
        q_max,
        kappa,
        big_k: 1 << kappa,
        ..p
    };
    (h, p)
}

#[test]
fn tiny_instance_matches_operator_model() {
    for mode in [AlphaMode::BinarySearch, AlphaMode::Membership] {
        for (q, kappa) in [(1, 0), (2, 1)] {
            let (h, p) = tiny(&[("X", 0.8), ("Z", 0.5)], q, kappa);
            let ops = compiled_operators(&h, &p, mode, 14).unwrap();
            let oaa = build_oaa_operator(&h, &p, 14).unwrap();
            assert!(max_abs(&(&ops.b - &oaa.b)) < 1e-10);
            // Select is specified on branch codewords; W on zero-ancilla inputs.
            let ds = 1usize << h.n;
            for a in 0..1usize << oaa.layout.n_ancilla() {
                if oaa.layout.decode(a as Mask).is_none() {
                    continue;
                }
                for z in 0..ds {
                    let col = a * ds + z;
                    assert!((ops.select.column(col) - oaa.select.column(col)).camax() < 1e-10);
                }
            }
            let cols = |m: &pmrsim::linalg::CMat| m.columns(0, ds).into_owned();
            assert!(max_abs(&(cols(&ops.w) - cols(&oaa.w))) < 1e-10);
        }
    }
}

#[test]
fn state_prep_amplitudes() {
    let (h, p) = tiny(&[("X", 0.8), ("Z", 0.5)], 2, 1);
    let step = compile_step(&h, &p, AlphaMode::BinarySearch).unwrap();
    let anc = step.layout.anc;
    let ops = compiled_operators(&h, &p, AlphaMode::BinarySearch, 14).unwrap();
    let col = ops.b.column(0);
    let mut seen = 0.0;
    for (br, amp) in step.weights.entries(1e6).unwrap() {
        let code = anc.codeword(&br.iq, &br.k, &br.pm) as usize;
        assert!((col[code] - Complex64::new(amp, 0.0)).norm() < 1e-10);
        seen += amp * amp;
    }
    assert!((seen - 1.0).abs() < 1e-12);
}

#[test]
fn diag_gadget_closed_form() {
    for (n, mask) in [(1usize, 0b1u128), (3, 0b101), (4, 0b1111)] {
        let (j, angle) = (0.7, 0.45);
        let c = compile_diag_phase(n, mask, j, angle).unwrap();
        let g = gate_count(&c);
        assert_eq!(g.get("CNOT") as u32, 2 * mask.count_ones());
        for z in 0..1u128 << n {
            let (out, ph) = run_reversible(&c, z).unwrap();
            assert_eq!(out, z, "scratch not restored");
            let sign = if parity(z & mask) { -1.0 } else { 1.0 };
            assert!((ph - Complex64::from_polar(1.0, -angle * j * sign)).norm() < 1e-12);
        }
    }
}

#[test]
fn alpha_unit_is_exhaustively_correct() {
    for mode in [AlphaMode::BinarySearch, AlphaMode::Membership] {
        for kappa in 0..=2 {
            for q in 1..=3 {
                let sw = alpha_sweep(q, kappa, mode).unwrap();
                assert!(sw.cases > 0);
                assert_eq!(sw.dirty, 0, "{sw:?}");
                assert!(sw.max_error < 1e-12, "{sw:?}");
            }
        }
    }
}

#[test]
fn search_outputs_match_block_extents() {
    for kappa in 0..=2u32 {
        let big_k = 1 << kappa;
        for q in 0..=3 {
            for_each_ktuple(q, big_k, |k| {
                let ws = alpha_coeffs(&KTuple::new(k.to_vec(), big_k).unwrap());
                for s in 0..=q {
                    let (lo, hi, bl, bh, f) = search_outputs(k, 3, kappa, s).unwrap();
                    assert_eq!((lo, hi), (ws.lmin[s], ws.lmax[s]), "k={k:?} s={s}");
                    assert_eq!((bl, bh), (ws.occupation[lo - 1], ws.occupation[hi - 1]));
                    assert_eq!(f, hi > lo);
                }
            });
        }
    }
}

#[test]
fn text_and_qasm_round_trip() {
    let (h, p) = tiny(&[("XZX", 0.4), ("YZY", 0.4), ("IXI", 0.2), ("ZZI", 0.3)], 2, 1);
    for mode in [AlphaMode::BinarySearch, AlphaMode::Membership] {
        let step = compile_step(&h, &p, mode).unwrap();
        for c in [&step.prep, &step.select, &step.w] {
            assert_eq!(&from_text(&to_text(c)).unwrap(), c);
        }
        assert!(to_qasm(&step.w).starts_with("OPENQASM 2.0;"));
        // Counting without building must agree with the built circuit.
        let counted = count_step(&h, &p, mode).unwrap();
        assert_eq!(counted.step.total, gate_count(&step.w).total);
    }
}

#[test]
fn gate_totals_grow_with_q_m_kappa() {
    let law = gate_count_law(&[1, 2, 3], &[1, 2, 4], &[0, 1, 2], AlphaMode::BinarySearch).unwrap();
    assert_eq!(law.points.len(), 27);
    assert!(law.fit.slope > 0.0);
    for a in &law.points {
        for b in &law.points {
            if a.q_max <= b.q_max && a.m <= b.m && a.kappa <= b.kappa {
                assert!(a.step_gates <= b.step_gates);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn inverse_undoes_reversible_macro(mask in 1u128..16, z in 0u128..16, angle in -3.0f64..3.0) {
        let c = compile_diag_phase(4, mask, 1.0, angle).unwrap();
        let (mid, a) = run_reversible(&c, z).unwrap();
        let (back, b) = run_reversible(&c.inverse(), mid).unwrap();
        prop_assert_eq!(back, z);
        prop_assert!((a * b - Complex64::new(1.0, 0.0)).norm() < 1e-12);
    }
}
