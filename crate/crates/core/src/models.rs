//! Ready-made frame models used by the CLI generator and the test suites.

use crate::error::Result;
use crate::frame::FrameModel;
use crate::poly::{q, Poly, Q};

fn names(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

fn parse_rows(rows: &[&[&str]], coords: &[String]) -> Result<Vec<Vec<Poly>>> {
    rows.iter().map(|r| r.iter().map(|s| Poly::parse(s, coords)).collect()).collect()
}

/// `D = span{∂x, ∂y + φ(x,y,z)∂z}` on ℝ³ with `V = span{∂z}`.
pub fn heisenberg_like(phi: &str, base_point: Vec<Q>) -> Result<FrameModel> {
    let c = names(&["x", "y", "z"]);
    let rows = parse_rows(&[&["1", "0", "0"], &["0", "1", phi], &["0", "0", "1"]], &c)?;
    FrameModel::from_chart(c, names(&["X", "Y", "Z"]), rows, vec![0, 1], vec![2], base_point)
}

pub fn heisenberg() -> FrameModel {
    heisenberg_like("x", vec![q(0); 3]).expect("valid model")
}

/// Contact structure on ℝ^{2n+1}: `X_j = ∂x_j`, `Y_j = ∂y_j + x_j ∂z`, and
/// `Z = ∂z + zfield` for a polynomial coordinate vector `zfield` on the
/// `X, Y` directions (`Z` stays transverse).
pub fn contact(n: usize, z_extra: &[(usize, &str)]) -> Result<FrameModel> {
    let mut coords = Vec::new();
    for j in 1..=n {
        coords.push(format!("x{j}"));
    }
    for j in 1..=n {
        coords.push(format!("y{j}"));
    }
    coords.push("z".to_string());
    let dim = 2 * n + 1;
    let mut rows = vec![vec![Poly::zero(); dim]; dim];
    let mut frame = Vec::new();
    for j in 0..n {
        rows[j][j] = Poly::one();
        frame.push(format!("X{}", j + 1));
    }
    for j in 0..n {
        rows[n + j][n + j] = Poly::one();
        rows[n + j][2 * n] = Poly::var(j);
        frame.push(format!("Y{}", j + 1));
    }
    rows[2 * n][2 * n] = Poly::one();
    // Z = ∂z + Σ f_i E_i with E_i among the horizontal fields.
    for (i, f) in z_extra {
        let f = Poly::parse(f, &coords)?;
        for k in 0..dim {
            let add = &f * &rows[*i][k];
            rows[2 * n][k] += &add;
        }
    }
    frame.push("Z".to_string());
    FrameModel::from_chart(coords, frame, rows, (0..2 * n).collect(), vec![2 * n], vec![q(0); dim])
}

/// Frame `X = ∂x − ½y∂z`, `Y = ∂y + ½x∂z`, `Z = ∂z + φ₁X + φ₂Y` on ℝ³.
pub fn twisted_heisenberg(phi1: &str, phi2: &str) -> Result<FrameModel> {
    let c = names(&["x", "y", "z"]);
    let p1 = Poly::parse(phi1, &c)?;
    let p2 = Poly::parse(phi2, &c)?;
    let x_row = parse_rows(&[&["1", "0", "-1/2*y"]], &c)?.remove(0);
    let y_row = parse_rows(&[&["0", "1", "1/2*x"]], &c)?.remove(0);
    let mut z_row = vec![Poly::zero(), Poly::zero(), Poly::one()];
    for k in 0..3 {
        z_row[k] += &(&(&p1 * &x_row[k]) + &(&p2 * &y_row[k]));
    }
    FrameModel::from_chart(c, names(&["X", "Y", "Z"]), vec![x_row, y_row, z_row], vec![0, 1], vec![2], vec![q(0); 3])
}

/// The Heisenberg Lie algebra `[X, Y] = Z` as an abstract model.
pub fn heisenberg_algebra() -> FrameModel {
    FrameModel::abstract_algebra(names(&["X", "Y", "Z"]), &[(0, 1, 2, q(1))], vec![0, 1], vec![2])
        .expect("valid model")
}

/// `so(4)` in the basis `L12, L13, L23, L14, L24, L34` with
/// `[L_ij, L_kl] = δ_jk L_il − δ_ik L_jl − δ_jl L_ik + δ_il L_jk`,
/// `D = 𝔭 = span{L_i4}` and `V = 𝔨 = so(3)`.
pub fn so4() -> FrameModel {
    let pairs = [(1, 2), (1, 3), (2, 3), (1, 4), (2, 4), (3, 4)];
    let idx = |a: usize, b: usize| -> (usize, i64) {
        if a < b {
            (pairs.iter().position(|p| *p == (a, b)).unwrap(), 1)
        } else {
            (pairs.iter().position(|p| *p == (b, a)).unwrap(), -1)
        }
    };
    let d = |a: usize, b: usize| -> i64 { (a == b) as i64 };
    let mut consts = Vec::new();
    for (x, &(i, j)) in pairs.iter().enumerate() {
        for (y, &(k, l)) in pairs.iter().enumerate() {
            if x >= y {
                continue;
            }
            let mut acc = std::collections::BTreeMap::<usize, i64>::new();
            let mut push = |coef: i64, a: usize, b: usize| {
                if coef != 0 && a != b {
                    let (t, s) = idx(a, b);
                    *acc.entry(t).or_default() += coef * s;
                }
            };
            push(d(j, k), i, l);
            push(-d(i, k), j, l);
            push(-d(j, l), i, k);
            push(d(i, l), j, k);
            for (t, c) in acc {
                if c != 0 {
                    consts.push((x, y, t, q(c)));
                }
            }
        }
    }
    let frame = names(&["L12", "L13", "L23", "L14", "L24", "L34"]);
    FrameModel::abstract_algebra(frame, &consts, vec![3, 4, 5], vec![0, 1, 2]).expect("so(4) is a Lie algebra")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins_are_consistent() {
        for m in [heisenberg(), heisenberg_algebra(), so4()] {
            m.check_jacobi().unwrap();
            assert!(m.check_antisymmetry());
        }
        let c = contact(2, &[(0, "x1^2")]).unwrap();
        c.check_jacobi().unwrap();
        let t = twisted_heisenberg("y", "x*z").unwrap();
        assert_eq!(t.structure_coeff(0, 1, 2), Poly::one());
    }

    #[test]
    fn so4_brackets() {
        let m = so4();
        // [L14, L24] = −L12 ... in this sign convention [L_i4, L_j4] = −L_ij.
        assert_eq!(m.structure_coeff(3, 4, 0), -Poly::one());
        // [L12, L23] = L13
        assert_eq!(m.structure_coeff(0, 2, 1), Poly::one());
    }
}
