//! Closed-form 2x2 eigen-decomposition.

use nalgebra::{Matrix2, Vector2};

/// Eigenvalues `l1 <= l2` with unit eigenvectors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Eigen2 {
    pub values: [f64; 2],
    pub vectors: [Vector2<f64>; 2],
    /// Set when the eigenvalues coincide within the caller's tolerance; the
    /// vectors are then an arbitrary orthonormal pair.
    pub degenerate: bool,
}

/// Eigen-decomposition of a real 2x2 matrix with real spectrum, from its
/// trace and determinant. Returns `None` when the discriminant is negative
/// beyond `tol` (complex eigenvalues).
pub fn eigen2(m: &Matrix2<f64>, tol: f64) -> Option<Eigen2> {
    let (a, b, c, d) = (m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]);
    let half_tr = 0.5 * (a + d);
    let half_diff = 0.5 * (a - d);
    let disc = half_diff * half_diff + b * c;
    let scale = 1.0 + half_tr.abs() + half_diff.abs() + b.abs() + c.abs();
    if disc < -tol * scale * scale {
        return None;
    }
    let root = disc.max(0.0).sqrt();
    let l1 = half_tr - root;
    let l2 = half_tr + root;
    if root <= tol * scale {
        return Some(Eigen2 {
            values: [l1, l2],
            vectors: [Vector2::new(1.0, 0.0), Vector2::new(0.0, 1.0)],
            degenerate: true,
        });
    }
    let vec_for = |l: f64| {
        // pick the better-conditioned of the two null-space candidates
        let v1 = Vector2::new(b, l - a);
        let v2 = Vector2::new(l - d, c);
        let v = if v1.norm_squared() >= v2.norm_squared() { v1 } else { v2 };
        v / v.norm()
    };
    Some(Eigen2 { values: [l1, l2], vectors: [vec_for(l1), vec_for(l2)], degenerate: false })
}

/// Symmetric specialization; always succeeds.
pub fn sym_eigen2(m: &Matrix2<f64>, tol: f64) -> Eigen2 {
    let s = 0.5 * (m + m.transpose());
    eigen2(&s, tol).expect("symmetric 2x2 has real spectrum")
}

pub fn is_symmetric(m: &Matrix2<f64>, tol: f64) -> bool {
    (m[(0, 1)] - m[(1, 0)]).abs() <= tol * (1.0 + m.abs().max())
}
