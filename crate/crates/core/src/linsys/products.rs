//! The shared collocated cross products.
//!
//! Every occurrence of `curl B x H` and `u x H` goes through the same path:
//! collocate both factors to cell centers, take the pointwise cross product,
//! distribute back to faces with the exact adjoint of the collocation, and
//! restrict to interior faces. Because the two inner products then reduce to
//! sums of pointwise triple products at the same centers, the cancellation
//! `<curl B x H, u> + <u x H, curl B> = 0` and the annihilation
//! `<curl B x H, curl B> = 0` hold to round-off, which is what makes the
//! discrete coupled bilinear form coercive and the Maxwell energy inequality
//! exact.

use crate::grid::{
    edge_to_center, face_to_center, spread_center_to_face, EdgeField, FaceField, Field3,
};

/// `(a x h)` distributed to faces, with `a` face-based and `h` edge-based.
pub fn cross_face_edge(a: &FaceField, h: &EdgeField) -> FaceField {
    let ac = face_to_center(a);
    let hc = edge_to_center(h);
    cross_spread(&ac, &hc, a)
}

fn cross_spread(ac: &[Field3; 3], hc: &[Field3; 3], like: &FaceField) -> FaceField {
    let mut px = Field3::zeros(ac[0].nx, ac[0].ny, ac[0].nz);
    let mut py = px.clone();
    let mut pz = px.clone();
    for idx in 0..px.len() {
        let a = [ac[0].data[idx], ac[1].data[idx], ac[2].data[idx]];
        let b = [hc[0].data[idx], hc[1].data[idx], hc[2].data[idx]];
        px.data[idx] = a[1] * b[2] - a[2] * b[1];
        py.data[idx] = a[2] * b[0] - a[0] * b[2];
        pz.data[idx] = a[0] * b[1] - a[1] * b[0];
    }
    let mut out = spread_center_to_face(&[px, py, pz], &like.grid);
    out.enforce_no_slip();
    out
}

/// Lorentz force density `curl B x H` on faces (callers pass `curl_e2f(B)`).
pub fn lorentz_force(curl_b: &FaceField, h: &EdgeField) -> FaceField {
    cross_face_edge(curl_b, h)
}

/// Electromotive source `u x H` on faces.
pub fn emf_source(u: &FaceField, h: &EdgeField) -> FaceField {
    cross_face_edge(u, h)
}
