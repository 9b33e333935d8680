//! Constructors for the classical matrix Lie superalgebras and the
//! exceptional three-parameter deformation of `osp(4|2)`.
//!
//! All matrix families are produced through [`LieSuperalgebra::from_matrix_span`],
//! so their structure constants come from actual super-commutators and close
//! by construction. Conventions:
//!
//! * block layout is `(even | odd)` with the even block first;
//! * even basis elements are listed before odd ones;
//! * for `osp(n|2m)` the odd-odd form on the symplectic block is the standard
//!   one pairing the two halves of the `2m` coordinates;
//! * `u(n|m)` is realified: each complex matrix entry `x + iy` becomes a
//!   `2x2` real block, doubling the matrix size.

use crate::error::{Error, Result};
use crate::grassmann::Parity;

use super::{LieSuperalgebra, MatrixBasis, Realization, ReducedGroupInfo, SparseMat};

/// Label for the matrix unit `E_rc` (0-based input, 1-based label).
fn unit_label(r: usize, c: usize, size: usize) -> String {
    if size <= 9 {
        format!("E{}{}", r + 1, c + 1)
    } else {
        format!("E{}_{}", r + 1, c + 1)
    }
}

fn unit(size: usize, r: usize, c: usize) -> SparseMat {
    SparseMat::from_entries(size, &[(r, c, 1.0)])
}

/// The full matrix superalgebra `gl(n|m)`: all matrix units, even blocks
/// first.
pub fn gl(n: usize, m: usize) -> Result<LieSuperalgebra> {
    let d = n + m;
    if d == 0 {
        return Err(Error::InvalidParams("gl(0|0) is empty".into()));
    }
    let mut items = Vec::new();
    for (lo, hi) in [(0, n), (n, d)] {
        for i in lo..hi {
            for j in lo..hi {
                items.push((unit_label(i, j, d), Parity::Even, unit(d, i, j)));
            }
        }
    }
    for (rows, cols) in [((0, n), (n, d)), ((n, d), (0, n))] {
        for i in rows.0..rows.1 {
            for j in cols.0..cols.1 {
                items.push((unit_label(i, j, d), Parity::Odd, unit(d, i, j)));
            }
        }
    }
    let mut g = LieSuperalgebra::from_matrix_span(format!("gl({n}|{m})"), n, m, items)?;
    g.set_reduced_group(ReducedGroupInfo {
        name: format!("GL({n})xGL({m})"),
        dim: n * n + m * m,
    });
    Ok(g)
}

/// The supertraceless subalgebra `sl(n|m)`: diagonal differences plus all
/// off-diagonal units.
pub fn sl(n: usize, m: usize) -> Result<LieSuperalgebra> {
    let d = n + m;
    if d < 2 {
        return Err(Error::InvalidParams("sl needs total dimension >= 2".into()));
    }
    let str_sign = |i: usize| if i < n { 1.0 } else { -1.0 };
    let mut items = Vec::new();
    // Supertraceless diagonal basis relative to the first slot.
    for a in 1..d {
        let coeff = -str_sign(a) / str_sign(0);
        items.push((
            format!("H{a}"),
            Parity::Even,
            SparseMat::from_entries(d, &[(a, a, 1.0), (0, 0, coeff)]),
        ));
    }
    for (lo, hi) in [(0, n), (n, d)] {
        for i in lo..hi {
            for j in lo..hi {
                if i != j {
                    items.push((unit_label(i, j, d), Parity::Even, unit(d, i, j)));
                }
            }
        }
    }
    for (rows, cols) in [((0, n), (n, d)), ((n, d), (0, n))] {
        for i in rows.0..rows.1 {
            for j in cols.0..cols.1 {
                items.push((unit_label(i, j, d), Parity::Odd, unit(d, i, j)));
            }
        }
    }
    let mut g = LieSuperalgebra::from_matrix_span(format!("sl({n}|{m})"), n, m, items)?;
    g.set_reduced_group(ReducedGroupInfo {
        name: format!("S(GL({n})xGL({m}))"),
        dim: n * n + m * m - 1,
    });
    Ok(g)
}

/// The projective quotient `psl(n|n) = sl(n|n) / R·I`, realized on the
/// complement of the identity cut out by ordinary tracelessness. Brackets of
/// representatives are reduced modulo the identity, so the stored matrices
/// realize the quotient only up to the center (`faithful = false`).
pub fn psl(n: usize) -> Result<LieSuperalgebra> {
    if n < 2 {
        return Err(Error::InvalidParams("psl(n|n) needs n >= 2".into()));
    }
    let d = 2 * n;
    let mut labels = Vec::new();
    let mut parities = Vec::new();
    let mut mats: Vec<SparseMat> = Vec::new();
    // Diagonal representatives, traceless within each block.
    for (block, prefix) in [(0usize, "H"), (n, "K")] {
        for a in 0..n - 1 {
            labels.push(format!("{prefix}{}", a + 1));
            parities.push(Parity::Even);
            mats.push(SparseMat::from_entries(
                d,
                &[(block + a, block + a, 1.0), (block + a + 1, block + a + 1, -1.0)],
            ));
        }
    }
    for (lo, hi) in [(0, n), (n, d)] {
        for i in lo..hi {
            for j in lo..hi {
                if i != j {
                    labels.push(unit_label(i, j, d));
                    parities.push(Parity::Even);
                    mats.push(unit(d, i, j));
                }
            }
        }
    }
    for (rows, cols) in [((0, n), (n, d)), ((n, d), (0, n))] {
        for i in rows.0..rows.1 {
            for j in cols.0..cols.1 {
                labels.push(unit_label(i, j, d));
                parities.push(Parity::Odd);
                mats.push(unit(d, i, j));
            }
        }
    }
    let dim = mats.len();

    // Brackets land in span ⊕ R·I; dropping the identity coordinate is the
    // quotient map.
    let mut augmented = mats.clone();
    augmented.push(SparseMat::identity(d));
    let basis = MatrixBasis::new(augmented)?;
    let mut triples = Vec::new();
    for i in 0..dim {
        for j in i..dim {
            let bracket = mats[i].super_commutator(&mats[j], parities[i], parities[j]);
            let coords = basis.coords(&bracket, 1e-9)?;
            let max = coords.amax();
            let swap = -parities[i].sign_swap_with(parities[j]);
            for k in 0..dim {
                let v = coords[k];
                if v.abs() <= 1e-12 * (1.0 + max) {
                    continue;
                }
                triples.push((i, j, k, v));
                if i != j {
                    triples.push((j, i, k, swap * v));
                }
            }
        }
    }
    let mut g =
        LieSuperalgebra::from_structure_constants(format!("psl({n}|{n})"), labels, parities, &triples)?;
    g.set_realization(Realization::new(n, n, mats, false)?);
    g.set_reduced_group(ReducedGroupInfo {
        name: format!("PS(GL({n})xGL({n}))"),
        dim: 2 * (n * n - 1),
    });
    Ok(g)
}

/// The orthosymplectic algebra `osp(n|2m)`: preserves a symmetric form on the
/// even block and a symplectic form (pairing the two `m`-halves) on the odd
/// block. `m = 0` gives plain `so(n)`, `n = 0` plain `sp(2m)`.
pub fn osp(n: usize, m: usize) -> Result<LieSuperalgebra> {
    let d = n + 2 * m;
    let so_dim = n.saturating_sub(1) * n / 2;
    let sp_dim = m * (2 * m + 1);
    if so_dim + sp_dim == 0 {
        return Err(Error::InvalidParams(format!(
            "osp({n}|{}) has no even part",
            2 * m
        )));
    }
    let mut items = Vec::new();
    // Rotations of the even block.
    for i in 0..n {
        for j in i + 1..n {
            items.push((
                format!("A{}{}", i + 1, j + 1),
                Parity::Even,
                SparseMat::from_entries(d, &[(i, j, 1.0), (j, i, -1.0)]),
            ));
        }
    }
    // Symplectic block in (P, Q; R, -Pᵗ) form with Q, R symmetric.
    for a in 0..m {
        for b in 0..m {
            items.push((
                format!("P{}{}", a + 1, b + 1),
                Parity::Even,
                SparseMat::from_entries(d, &[(n + a, n + b, 1.0), (n + m + b, n + m + a, -1.0)]),
            ));
        }
    }
    for a in 0..m {
        for b in a..m {
            let q = if a == b {
                SparseMat::from_entries(d, &[(n + a, n + m + a, 1.0)])
            } else {
                SparseMat::from_entries(d, &[(n + a, n + m + b, 1.0), (n + b, n + m + a, 1.0)])
            };
            items.push((format!("Q{}{}", a + 1, b + 1), Parity::Even, q));
        }
    }
    for a in 0..m {
        for b in a..m {
            let r = if a == b {
                SparseMat::from_entries(d, &[(n + m + a, n + a, 1.0)])
            } else {
                SparseMat::from_entries(d, &[(n + m + a, n + b, 1.0), (n + m + b, n + a, 1.0)])
            };
            items.push((format!("R{}{}", a + 1, b + 1), Parity::Even, r));
        }
    }
    // Odd part: upper-right block free, lower-left determined by the forms.
    for i in 0..n {
        for a in 0..m {
            items.push((
                format!("U{}{}", i + 1, a + 1),
                Parity::Odd,
                SparseMat::from_entries(d, &[(i, n + a, 1.0), (n + m + a, i, 1.0)]),
            ));
        }
    }
    for i in 0..n {
        for a in 0..m {
            items.push((
                format!("V{}{}", i + 1, a + 1),
                Parity::Odd,
                SparseMat::from_entries(d, &[(i, n + m + a, 1.0), (n + a, i, -1.0)]),
            ));
        }
    }
    let mut g =
        LieSuperalgebra::from_matrix_span(format!("osp({n}|{})", 2 * m), n, 2 * m, items)?;
    g.set_reduced_group(ReducedGroupInfo {
        name: format!("SO({n})xSp({})", 2 * m),
        dim: so_dim + sp_dim,
    });
    Ok(g)
}

/// Appends the real `2x2` blocks of a complex entry `x + iy` at complex
/// position `(a, b)` to a realified entry list.
fn realify_entry(entries: &mut Vec<(usize, usize, f64)>, a: usize, b: usize, x: f64, y: f64) {
    let (ra, rb) = (2 * a, 2 * b);
    if x != 0.0 {
        entries.push((ra, rb, x));
        entries.push((ra + 1, rb + 1, x));
    }
    if y != 0.0 {
        entries.push((ra, rb + 1, -y));
        entries.push((ra + 1, rb, y));
    }
}

fn realify(size_c: usize, complex_entries: &[(usize, usize, f64, f64)]) -> SparseMat {
    let mut entries = Vec::new();
    for &(a, b, x, y) in complex_entries {
        realify_entry(&mut entries, a, b, x, y);
    }
    SparseMat::from_entries(2 * size_c, &entries)
}

/// The realified unitary superalgebra `u(n|m)`: block matrices
/// `(A, B; iB†, D)` with `A, D` skew-hermitian, viewed as real matrices of
/// twice the size.
pub fn u(n: usize, m: usize) -> Result<LieSuperalgebra> {
    let dc = n + m;
    if dc == 0 {
        return Err(Error::InvalidParams("u(0|0) is empty".into()));
    }
    let mut items = Vec::new();
    for (lo, hi, prefix) in [(0, n, "A"), (n, dc, "D")] {
        // Imaginary diagonal.
        for a in lo..hi {
            items.push((
                format!("{prefix}i{}{}", a - lo + 1, a - lo + 1),
                Parity::Even,
                realify(dc, &[(a, a, 0.0, 1.0)]),
            ));
        }
        // Real antisymmetric and imaginary symmetric off-diagonal pairs.
        for a in lo..hi {
            for b in a + 1..hi {
                items.push((
                    format!("{prefix}r{}{}", a - lo + 1, b - lo + 1),
                    Parity::Even,
                    realify(dc, &[(a, b, 1.0, 0.0), (b, a, -1.0, 0.0)]),
                ));
                items.push((
                    format!("{prefix}i{}{}", a - lo + 1, b - lo + 1),
                    Parity::Even,
                    realify(dc, &[(a, b, 0.0, 1.0), (b, a, 0.0, 1.0)]),
                ));
            }
        }
    }
    // Odd part: B free complex, lower-left block i·B†.
    for a in 0..n {
        for b in 0..m {
            items.push((
                format!("Br{}{}", a + 1, b + 1),
                Parity::Odd,
                realify(dc, &[(a, n + b, 1.0, 0.0), (n + b, a, 0.0, 1.0)]),
            ));
            items.push((
                format!("Bi{}{}", a + 1, b + 1),
                Parity::Odd,
                realify(dc, &[(a, n + b, 0.0, 1.0), (n + b, a, 1.0, 0.0)]),
            ));
        }
    }
    let mut g = LieSuperalgebra::from_matrix_span(format!("u({n}|{m})"), 2 * n, 2 * m, items)?;
    g.set_reduced_group(ReducedGroupInfo {
        name: format!("U({n})xU({m})"),
        dim: n * n + m * m,
    });
    Ok(g)
}

/// The exceptional family with even part `sl(2)³` and odd part the triple
/// tensor cube of the defining representation, with odd-odd brackets weighted
/// by `(s1, s2, s3)`. The graded Jacobi identity holds exactly when
/// `s1 + s2 + s3 = 0`; this unbalanced constructor skips that requirement so
/// the defect is observable.
pub fn d21_unbalanced(s1: f64, s2: f64, s3: f64) -> Result<LieSuperalgebra> {
    let sigmas = [s1, s2, s3];
    let mut labels: Vec<String> = Vec::new();
    for i in 1..=3 {
        labels.extend([format!("h{i}"), format!("e{i}"), format!("f{i}")]);
    }
    let bit = |bits: usize, slot: usize| (bits >> (2 - slot)) & 1;
    for bits in 0..8 {
        labels.push(format!(
            "x{}{}{}",
            bit(bits, 0) + 1,
            bit(bits, 1) + 1,
            bit(bits, 2) + 1
        ));
    }
    let parities = [vec![Parity::Even; 9], vec![Parity::Odd; 8]].concat();
    let mut triples: Vec<(usize, usize, usize, f64)> = Vec::new();
    let sym = |triples: &mut Vec<(usize, usize, usize, f64)>, a: usize, b: usize, k: usize, v: f64| {
        triples.push((a, b, k, v));
        triples.push((b, a, k, -v));
    };
    // Three commuting copies of sl(2).
    for i in 0..3 {
        let (h, e, f) = (3 * i, 3 * i + 1, 3 * i + 2);
        sym(&mut triples, h, e, e, 2.0);
        sym(&mut triples, h, f, f, -2.0);
        sym(&mut triples, e, f, h, 1.0);
    }
    // Slot-wise action on the odd cube: index 1 is the highest-weight vector.
    let odd0 = 9;
    for bits in 0..8usize {
        let xi = odd0 + bits;
        for slot in 0..3 {
            let (h, e, f) = (3 * slot, 3 * slot + 1, 3 * slot + 2);
            let flipped = odd0 + (bits ^ (1 << (2 - slot)));
            if bit(bits, slot) == 0 {
                sym(&mut triples, h, xi, xi, 1.0);
                sym(&mut triples, f, xi, flipped, 1.0);
            } else {
                sym(&mut triples, h, xi, xi, -1.0);
                sym(&mut triples, e, xi, flipped, 1.0);
            }
        }
    }
    // Odd-odd brackets: the symplectic pairing on two slots times the
    // symmetric square map into the remaining sl(2) copy.
    let psi = |a: usize, b: usize| -> f64 {
        if a == b {
            0.0
        } else if a == 0 {
            1.0
        } else {
            -1.0
        }
    };
    for xb in 0..8usize {
        for yb in 0..8usize {
            for slot in 0..3 {
                let mut factor = sigmas[slot];
                for other in 0..3 {
                    if other != slot {
                        factor *= psi(bit(xb, other), bit(yb, other));
                    }
                }
                if factor == 0.0 {
                    continue;
                }
                let (h, e, f) = (3 * slot, 3 * slot + 1, 3 * slot + 2);
                let (xi, eta) = (odd0 + xb, odd0 + yb);
                match (bit(xb, slot), bit(yb, slot)) {
                    (0, 0) => triples.push((xi, eta, e, 2.0 * factor)),
                    (1, 1) => triples.push((xi, eta, f, -2.0 * factor)),
                    _ => triples.push((xi, eta, h, -factor)),
                }
            }
        }
    }
    let mut g = LieSuperalgebra::from_structure_constants(
        format!("d(2,1;{s1},{s2},{s3})"),
        labels,
        parities,
        &triples,
    )?;
    g.set_reduced_group(ReducedGroupInfo {
        name: "SL(2)^3".into(),
        dim: 9,
    });
    Ok(g)
}

/// The exceptional family member with weights `(s1, s2, -s1-s2)`, the unique
/// balancing for which the graded Jacobi identity holds.
pub fn d21(s1: f64, s2: f64) -> Result<LieSuperalgebra> {
    let s3 = -s1 - s2;
    let g = d21_unbalanced(s1, s2, s3)?;
    let scale = 1.0 + s1.abs().max(s2.abs()).max(s3.abs());
    let defect = g.jacobi_residual();
    if defect > 1e-10 * scale {
        return Err(Error::InvalidParams(format!(
            "balanced weights still leave a Jacobi defect of {defect:.3e}"
        )));
    }
    Ok(g)
}

/// Dispatches a family by name, as used by the command-line interface.
/// For `osp`/`sosp` the second parameter is the full odd size `2m`; for
/// `d21` the two weights are taken from `sigma` (third weight balanced).
pub fn construct_named(
    family: &str,
    n: usize,
    m: usize,
    sigma: Option<(f64, f64)>,
) -> Result<LieSuperalgebra> {
    match family {
        "gl" => gl(n, m),
        "sl" => sl(n, m),
        "psl" => {
            if m != n {
                return Err(Error::InvalidParams(format!(
                    "psl needs equal block sizes, got ({n}|{m})"
                )));
            }
            psl(n)
        }
        "osp" | "sosp" => {
            if m % 2 != 0 {
                return Err(Error::InvalidParams(format!(
                    "osp needs an even odd-block size, got ({n}|{m})"
                )));
            }
            osp(n, m / 2)
        }
        "u" => u(n, m),
        "d21" => {
            let (s1, s2) = sigma.unwrap_or((1.0, 1.0));
            d21(s1, s2)
        }
        other => Err(Error::InvalidParams(format!("unknown family `{other}`"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn family_dimensions() {
        let cases: Vec<(LieSuperalgebra, usize, usize)> = vec![
            (gl(1, 1).unwrap(), 2, 2),
            (gl(2, 1).unwrap(), 5, 4),
            (sl(2, 1).unwrap(), 4, 4),
            (psl(2).unwrap(), 6, 8),
            (osp(2, 1).unwrap(), 4, 4),
            (osp(3, 2).unwrap(), 13, 12),
            (u(1, 1).unwrap(), 2, 2),
            (u(2, 1).unwrap(), 5, 4),
            (d21(1.0, 1.0).unwrap(), 9, 8),
        ];
        for (g, even, odd) in cases {
            assert_eq!(g.dim_even(), even, "{} even part", g.name());
            assert_eq!(g.dim_odd(), odd, "{} odd part", g.name());
        }
    }

    #[test]
    fn families_satisfy_the_graded_jacobi_identity() {
        for g in [
            gl(2, 2).unwrap(),
            sl(2, 1).unwrap(),
            psl(2).unwrap(),
            osp(3, 1).unwrap(),
            u(2, 1).unwrap(),
            d21(0.7, -2.3).unwrap(),
        ] {
            assert!(
                g.jacobi_residual() < 1e-10,
                "{} fails Jacobi: {}",
                g.name(),
                g.jacobi_residual()
            );
            assert!(g.antisymmetry_residual() < 1e-12, "{}", g.name());
        }
    }

    #[test]
    fn gl11_label_convention() {
        let g = gl(1, 1).unwrap();
        assert_eq!(g.labels(), &["E11", "E22", "E12", "E21"]);
    }

    #[test]
    fn unbalanced_weights_break_jacobi() {
        let g = d21_unbalanced(1.0, 1.0, 1.0).unwrap();
        assert!(g.jacobi_residual() > 1.0);
        assert!(d21(1.0, 1.0).is_ok());
    }

    #[test]
    fn killing_form_is_proportional_to_supertrace_form() {
        // sl(n|m): B = 2(n-m)·str; osp(n|2m): B = (n-2m-2)·str.
        let g = sl(2, 1).unwrap();
        let b = g.killing_form();
        let s = g.str_form().unwrap();
        assert!((b.matrix.clone() - s.matrix.clone() * 2.0).amax() < 1e-10);

        let g = osp(3, 1).unwrap();
        let b = g.killing_form();
        let s = g.str_form().unwrap();
        assert!((b.matrix.clone() - s.matrix.clone() * -1.0).amax() < 1e-10);

        let g = osp(4, 1).unwrap();
        let b = g.killing_form();
        assert!(b.matrix.amax() < 1e-12, "osp(4|2) is Killing-degenerate");
    }

    #[test]
    fn psl_quotient_kills_the_identity_direction() {
        let g = psl(2).unwrap();
        assert_eq!(g.dim(), 14);
        // Odd-odd brackets of E13-type units close without any identity
        // component; sanity-check one against the quotient of sl(2|2).
        let sl22 = sl(2, 2).unwrap();
        assert_eq!(sl22.dim(), 15);
        assert!(g.jacobi_residual() < 1e-10);
        let r = g.realization().unwrap();
        assert!(!r.faithful);
    }

    #[test]
    fn construct_named_dispatches_and_validates() {
        assert_eq!(construct_named("gl", 2, 1, None).unwrap().dim(), 9);
        assert_eq!(construct_named("osp", 2, 2, None).unwrap().dim(), 8);
        assert!(construct_named("osp", 2, 3, None).is_err());
        assert!(construct_named("psl", 2, 1, None).is_err());
        assert!(construct_named("nope", 1, 1, None).is_err());
    }
}
