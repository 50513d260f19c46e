use proptest::prelude::*;
use zigzag::lattice::{
    bands_extended, bloch_extended, bloch_pauli, build_zigzag_chain, build_zigzag_ring, ZigZagParams, CHIRAL_DIAGONAL,
};
use zigzag::lattice::{build_ssh_chain, SSHParams};
use zigzag::numerics::{eig_hermitian, eigvals_hermitian, HermitianMatrix};
use zigzag::spectral::chiral_pairing_defect;
use zigzag::Error;
use zigzag::topology::{
    band_ratio_path, half_gap, phase_boundary, winding_contour, winding_number, BulkBand, CellConvention,
};

fn coupling() -> impl Strategy<Value = f64> {
    -0.2f64..0.2
}

fn max_entry_diff(a: &HermitianMatrix, b: &HermitianMatrix) -> f64 {
    a.as_slice().iter().zip(b.as_slice()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Largest entry of ΓH + HΓ for a diagonal Γ.
fn anticommutator(h: &HermitianMatrix, gamma: &[f64]) -> f64 {
    let n = h.dim();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            worst = worst.max((h.get(i, j) * (gamma[i] + gamma[j])).norm());
        }
    }
    worst
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pauli_form_equals_matrix_form_at_reversed_momentum(
        t_par in coupling(), t_perp in coupling(), g in coupling(), k in -3.2f64..3.2
    ) {
        let p = ZigZagParams::new(t_par, t_perp, g, 1);
        let pauli = bloch_pauli(k, &p).unwrap();
        prop_assert!(max_entry_diff(&pauli, &bloch_extended(-k, &p).unwrap()) < 1e-12);
        let conj = HermitianMatrix::from_row_major(
            4,
            bloch_extended(k, &p).unwrap().as_slice().iter().map(|z| z.conj()).collect(),
        ).unwrap();
        prop_assert!(max_entry_diff(&pauli, &conj) < 1e-12);
    }

    #[test]
    fn bloch_matrix_anticommutes_with_gamma(
        t_par in coupling(), t_perp in coupling(), g in coupling(), k in -3.2f64..3.2
    ) {
        let p = ZigZagParams::new(t_par, t_perp, g, 1);
        prop_assert!(anticommutator(&bloch_extended(k, &p).unwrap(), &CHIRAL_DIAGONAL) < 1e-12);
    }

    #[test]
    fn bands_match_direct_diagonalization(
        t_par in coupling(), t_perp in coupling(), g in coupling(), k in -3.2f64..3.2
    ) {
        let p = ZigZagParams::new(t_par, t_perp, g, 1);
        let direct = eigvals_hermitian(&bloch_extended(k, &p).unwrap()).unwrap();
        let closed = bands_extended(k, &p).unwrap();
        for (a, b) in direct.iter().zip(&closed) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn finite_chain_is_chiral(t_par in coupling(), t_perp in coupling(), g in coupling(), n in 1usize..30) {
        let h = build_zigzag_chain(&ZigZagParams::new(t_par, t_perp, g, n)).unwrap();
        let gamma: Vec<f64> = (0..2 * n)
            .map(|i| {
                let (site, pol) = (i % n, i / n);
                if (site + pol) % 2 == 0 { 1.0 } else { -1.0 }
            })
            .collect();
        prop_assert!(anticommutator(&h.matrix, &gamma) == 0.0);
        let e = eigvals_hermitian(&h.matrix).unwrap();
        prop_assert!(chiral_pairing_defect(&e) < 1e-12);
    }

    #[test]
    fn ring_spectrum_is_union_of_bloch_bands(
        t_par in coupling(), t_perp in coupling(), g in coupling()
    ) {
        let n = 8;
        let p = ZigZagParams::new(t_par, t_perp, g, n);
        let ring = eigvals_hermitian(&build_zigzag_ring(&p).unwrap().matrix).unwrap();
        let cells = n / 2;
        let mut bloch: Vec<f64> = (0..cells)
            .flat_map(|m| bands_extended(2.0 * std::f64::consts::PI * m as f64 / cells as f64, &p).unwrap())
            .collect();
        bloch.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (a, b) in ring.iter().zip(&bloch) {
            prop_assert!((a - b).abs() < 1e-9, "ring {} vs bloch {}", a, b);
        }
    }

    #[test]
    fn winding_stable_under_grid_doubling(t_perp in -0.15f64..0.15, g in 0.0f64..0.12) {
        let t_par = -0.1;
        let gc = phase_boundary(t_par, t_perp);
        prop_assume!((g - gc).abs() > 0.003 && (t_par + t_perp).abs() > 0.01);
        let p = ZigZagParams::new(t_par, t_perp, g, 1);
        grid_doubling_consistent(&p, 1024)?;
    }
}

/// A grid may decline an under-resolved contour, but two grids never report different windings.
fn grid_doubling_consistent(p: &ZigZagParams, n_k: usize) -> Result<(), TestCaseError> {
    let coarse = winding_number(p, n_k);
    let fine = winding_number(p, 2 * n_k);
    match (&coarse, &fine) {
        (Ok(a), Ok(b)) => prop_assert_eq!(a.winding, b.winding),
        (Ok(_), Err(e)) => prop_assert!(false, "coarse grid resolved but fine grid failed: {e}"),
        (Err(Error::InsufficientResolution { .. }), _) => {}
        (Err(e), _) => prop_assert!(false, "gapped draw failed: {e}"),
    }
    Ok(())
}

#[test]
fn grid_doubling_near_equal_couplings() {
    let p = ZigZagParams::new(-0.1, -0.096997523535525, 0.08541349056666145, 1);
    assert!(matches!(winding_number(&p, 256), Err(Error::InsufficientResolution { .. })));
    grid_doubling_consistent(&p, 256).unwrap();
    assert_eq!(winding_number(&p, 1024).unwrap().winding.map(i64::abs), Some(1));
}

#[test]
fn winding_magnitude_follows_phase_boundary() {
    for &t_perp in &[-0.15, -0.06, 0.037, 0.08, 0.15] {
        let gc = phase_boundary(-0.1, t_perp);
        let below = winding_number(&ZigZagParams::new(-0.1, t_perp, 0.5 * gc, 1), 1024).unwrap();
        assert_eq!(below.winding.map(i64::abs), Some(1), "t_perp {t_perp}");
        let above = winding_number(&ZigZagParams::new(-0.1, t_perp, gc + 0.02, 1), 1024).unwrap();
        assert_eq!(above.winding, Some(0), "t_perp {t_perp}");
        assert!(!winding_contour(&ZigZagParams::new(-0.1, t_perp, gc, 1), 1024).unwrap().is_gapped());
    }
}

#[test]
fn bulk_boundary_correspondence() {
    // A nontrivial winding comes with zero modes of the finite chain and vice versa.
    for &(g, topological) in &[(0.01, true), (0.02, true), (0.045, false), (0.055, false)] {
        let p = ZigZagParams::new(-0.1, 0.037, g, 61);
        let w = winding_number(&p, 1024).unwrap().winding.unwrap();
        assert_eq!(w.abs() == 1, topological);
        let e = eigvals_hermitian(&build_zigzag_chain(&p).unwrap().matrix).unwrap();
        let half_gap = half_gap(&p, 1024).unwrap();
        let in_gap = e.iter().filter(|x| x.abs() < 0.9 * half_gap).count();
        assert_eq!(in_gap > 0, topological, "g {g}: {in_gap} in-gap states");
    }
}

#[test]
fn ssh_band_winding_matches_cell_convention() {
    let h = build_ssh_chain(&SSHParams::new(0.037, 0.1, 17)).unwrap();
    let s = eig_hermitian(&h.matrix).unwrap();
    for band in [BulkBand::Lower, BulkBand::Upper] {
        let left = band_ratio_path(&h, &s, band, CellConvention::Left).unwrap();
        let right = band_ratio_path(&h, &s, band, CellConvention::Right).unwrap();
        assert_eq!(left.winding, 1);
        assert_eq!(right.winding, 0);
    }
}
