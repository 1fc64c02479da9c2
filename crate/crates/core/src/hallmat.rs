//! Pointwise algebra of the Hall matrix `A(b)` with `A(b) xi = xi + xi x b`
//! and its closed-form inverse with prefactor `1/(1+|b|^2)`.
//!
//! `det A(b) = 1 + |b|^2 >= 1`, so no conditioning precautions are needed and
//! `|b|` is never clamped.

use crate::error::Result;
use crate::grid::{edge_to_face, face_to_face_full, EdgeField, Face, FaceField};

pub type Vec3 = [f64; 3];

#[inline]
pub fn dot3(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
pub fn cross(a: Vec3, b: Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

#[inline]
pub fn norm3(a: Vec3) -> f64 {
    dot3(a, a).sqrt()
}

/// `A(b) xi = xi + xi x b`, evaluated in cross-product form.
#[inline]
pub fn apply_a(b: Vec3, xi: Vec3) -> Vec3 {
    let c = cross(xi, b);
    [xi[0] + c[0], xi[1] + c[1], xi[2] + c[2]]
}

/// Closed-form inverse: `A^{-1}(b) = (I + b b^T - [. x b]) / (1 + |b|^2)`.
#[inline]
pub fn apply_a_inv(b: Vec3, xi: Vec3) -> Vec3 {
    let denom = 1.0 + dot3(b, b);
    let bx = dot3(b, xi);
    let c = cross(xi, b);
    [
        (xi[0] + b[0] * bx - c[0]) / denom,
        (xi[1] + b[1] * bx - c[1]) / denom,
        (xi[2] + b[2] * bx - c[2]) / denom,
    ]
}

/// Assembled inverse matrix, row-major; used when entry bounds are inspected.
pub fn a_inv_matrix(b: Vec3) -> [[f64; 3]; 3] {
    let d = 1.0 + dot3(b, b);
    [
        [
            (1.0 + b[0] * b[0]) / d,
            (b[0] * b[1] - b[2]) / d,
            (b[0] * b[2] + b[1]) / d,
        ],
        [
            (b[0] * b[1] + b[2]) / d,
            (1.0 + b[1] * b[1]) / d,
            (b[1] * b[2] - b[0]) / d,
        ],
        [
            (b[0] * b[2] - b[1]) / d,
            (b[1] * b[2] + b[0]) / d,
            (1.0 + b[2] * b[2]) / d,
        ],
    ]
}

/// Pointwise `A` at faces: H interpolated edge-to-face, F collocated to a
/// full vector per face, `xi + mu (xi x b)` applied, normal component kept.
pub fn apply_a_field(h: &EdgeField, f: &FaceField, mu: f64) -> Result<FaceField> {
    h.grid.same(&f.grid)?;
    let mut out = FaceField::zeros(&f.grid);
    for face in Face::ALL {
        let hv = edge_to_face(h, face);
        let fv = face_to_face_full(f, face);
        let comp = face.index();
        let dst = out.component_mut(face);
        for idx in 0..dst.data.len() {
            let b = [
                mu * hv[0].data[idx],
                mu * hv[1].data[idx],
                mu * hv[2].data[idx],
            ];
            let xi = [fv[0].data[idx], fv[1].data[idx], fv[2].data[idx]];
            dst.data[idx] = apply_a(b, xi)[comp];
        }
    }
    Ok(out)
}

/// Pointwise `A^{-1}` at faces: H is interpolated edge-to-face, F is
/// collocated to a full vector per face, the inverse is applied, and the
/// face-normal component is kept.
pub fn apply_a_inv_field(h: &EdgeField, f: &FaceField) -> Result<FaceField> {
    h.grid.same(&f.grid)?;
    let mut out = FaceField::zeros(&f.grid);
    for face in Face::ALL {
        let hv = edge_to_face(h, face);
        let fv = face_to_face_full(f, face);
        let comp = face.index();
        let dst = out.component_mut(face);
        for idx in 0..dst.data.len() {
            let b = [hv[0].data[idx], hv[1].data[idx], hv[2].data[idx]];
            let xi = [fv[0].data[idx], fv[1].data[idx], fv[2].data[idx]];
            let y = apply_a_inv(b, xi);
            #[cfg(debug_assertions)]
            {
                // Ellipticity sandwich of the pointwise quadratic form.
                let quad = dot3(y, xi);
                let nxi = dot3(xi, xi);
                let lo = nxi / (1.0 + dot3(b, b));
                debug_assert!(
                    quad >= lo - 1e-12 * nxi.max(1.0) && quad <= nxi + 1e-12 * nxi.max(1.0),
                    "A^-1 sandwich violated"
                );
            }
            dst.data[idx] = y[comp];
        }
    }
    Ok(out)
}
