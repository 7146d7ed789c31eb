use std::f64::consts::PI;

use ultraspec::complexes::{
    hodge_density, hodge_operator, lattice_cover, parse_complex, quotient_complex, sobolev_ratio,
    triangulated_plane_cover, twisted_blocks, AbelianCoverSpec,
};
use ultraspec::spectral_ops::{decompose, gamma_trace, projector, spectral_density_from};

fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v
}

fn assert_spectra_match(spec: &AbelianCoverSpec, k: usize) {
    let dense = decompose(&hodge_operator(spec, k).unwrap()).unwrap();
    let blocks = sorted(twisted_blocks(spec, k).unwrap().eigenvalues());
    let dense = sorted(dense.eigenvalues().to_vec());
    assert_eq!(dense.len(), blocks.len());
    for (a, b) in dense.iter().zip(&blocks) {
        assert!((a - b).abs() < 1e-9, "{a} vs {b}");
    }
}

#[test]
fn block_spectra_equal_quotient_spectra() {
    assert_spectra_match(&lattice_cover(2, 4).unwrap(), 0);
    assert_spectra_match(&lattice_cover(2, 4).unwrap(), 1);
    assert_spectra_match(&triangulated_plane_cover(3, 3).unwrap(), 0);
    assert_spectra_match(&triangulated_plane_cover(3, 3).unwrap(), 1);
}

#[test]
fn block_density_is_group_trace_of_projectors() {
    let spec = triangulated_plane_cover(3, 2).unwrap();
    let op = hodge_operator(&spec, 1).unwrap();
    let d = decompose(&op).unwrap();
    let blocks = hodge_density(&spec, 1).unwrap();
    let ultra = spectral_density_from(&op, &d).unwrap();
    let clusters = d.clusters();
    // between eigenvalues, away from rounding ties
    for w in clusters.windows(2) {
        let l = 0.5 * (w[0].0 + w[1].0);
        let trace = gamma_trace(&projector(&d, l), op.group_size());
        assert!((trace - blocks.eval(l)).abs() < 1e-9, "λ={l}: {trace} vs {}", blocks.eval(l));
        assert!(ultra.eval(l) <= blocks.eval(l) + 1e-9);
    }
}

#[test]
fn quotient_is_a_complex() {
    let spec = triangulated_plane_cover(3, 2).unwrap();
    let q = quotient_complex(&spec).unwrap();
    assert_eq!(q.count(0), 9 * 4);
    assert_eq!(q.count(1), 27 * 4);
    assert_eq!(q.count(2), 18 * 4);
    assert!(q.coboundary(0).then(&q.coboundary(1)).is_zero());
}

#[test]
fn lattice_density_mass_is_rank_over_group() {
    for (d, n) in [(1, 16), (2, 8), (3, 4)] {
        let f = hodge_density(&lattice_cover(d, n).unwrap(), 0).unwrap();
        let g = (n as f64).powi(d as i32);
        assert!((f.total_mass() - (g - 1.0) / g).abs() < 1e-12);
    }
}

#[test]
fn cycle_tower_converges_to_arcsin_law() {
    let oracle = |l: f64| 2.0 / PI * (l.sqrt() / 2.0).asin();
    for n in [8, 32, 128, 512] {
        let f = hodge_density(&lattice_cover(1, n).unwrap(), 0).unwrap();
        let locs = f.locations();
        for w in locs.windows(2) {
            let mid = 0.5 * (w[0] + w[1]);
            assert!((f.eval(mid) - oracle(mid)).abs() <= 2.0 / n as f64, "N={n} λ={mid}");
        }
    }
}

#[test]
fn parsed_circle_cover_matches_lattice() {
    let text = "# a single loop\n[k=0]\n0\n[k=1]\n0 0\n[labels]\n0 1\n";
    let file = parse_complex(text, false).unwrap();
    let spec = AbelianCoverSpec::new(file.complex, file.labels.unwrap(), 1, 8).unwrap();
    let a = hodge_density(&spec, 0).unwrap();
    let b = hodge_density(&lattice_cover(1, 8).unwrap(), 0).unwrap();
    assert_eq!(a.locations().len(), b.locations().len());
    for (x, y) in a.atoms().zip(b.atoms()) {
        assert!((x.0 - y.0).abs() < 1e-12 && (x.1 - y.1).abs() < 1e-12);
    }
}

#[test]
fn malformed_complexes_are_rejected() {
    assert!(parse_complex("[k=1]\n0 1\n", false).is_err());
    assert!(parse_complex("0\n", false).is_err());
    assert!(parse_complex("[k=0]\n0\n1\n[k=1]\n0 1\n[labels]\n5 1\n", false).is_err());
    assert!(parse_complex("[k=1]\n0 1\n", true).is_ok());
    assert!(lattice_cover(1, 1).is_err());
}

#[test]
fn sobolev_bracket_is_ordered() {
    for p in [2.0, 4.0, 6.0] {
        let b = sobolev_ratio(&lattice_cover(2, 8).unwrap(), 0, p, 8, 3).unwrap();
        assert!(b.lower > 0.0 && b.lower <= b.upper * (1.0 + 1e-9), "{b:?}");
    }
    assert!(sobolev_ratio(&lattice_cover(2, 8).unwrap(), 0, 1.5, 8, 3).is_err());
}
