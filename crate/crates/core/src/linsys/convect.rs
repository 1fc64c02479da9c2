//! Skew-symmetric convection `(w . grad) u` on the MAC grid.
//!
//! Divergence form with centered flux averages, plus the compensation
//! `-(1/2) u (div w averaged to faces)`; the telescoping of the centered
//! fluxes then gives `<N(w) u, u> = 0` exactly for every w, no-slip u, with
//! wall fluxes vanishing through the pinned normal velocities.

use crate::grid::{div, Face, FaceField, Field3, ScalarField};

/// `N(w) u` on interior faces (boundary rows zero). `div_w` must be the cell
/// divergence of `w` (computed once per frozen w).
pub fn apply_convection(w: &FaceField, div_w: &ScalarField, u: &FaceField) -> FaceField {
    let mut out = FaceField::zeros(&u.grid);
    for comp in Face::ALL {
        convect_component(w, div_w, u, comp, &mut out);
    }
    out
}

pub fn cell_divergence(w: &FaceField) -> ScalarField {
    div(w)
}

/// Cyclic axis roles: alpha = component axis, then beta, gamma.
#[inline(always)]
fn roles(comp: Face) -> [usize; 3] {
    match comp {
        Face::X => [0, 1, 2],
        Face::Y => [1, 2, 0],
        Face::Z => [2, 0, 1],
    }
}

#[inline(always)]
fn pos(alpha_axes: [usize; 3], a: usize, b: usize, c: usize) -> [usize; 3] {
    let mut p = [0usize; 3];
    p[alpha_axes[0]] = a;
    p[alpha_axes[1]] = b;
    p[alpha_axes[2]] = c;
    p
}

#[inline(always)]
fn get3(f: &Field3, p: [usize; 3]) -> f64 {
    f.get(p[0], p[1], p[2])
}

fn convect_component(
    w: &FaceField,
    div_w: &ScalarField,
    u: &FaceField,
    comp: Face,
    out: &mut FaceField,
) {
    let grid = u.grid;
    let n = grid.n();
    let inv_h = 1.0 / grid.h();
    let axes = roles(comp);
    let uc = u.component(comp);
    let w_alpha = w.component(comp);
    let w_beta = w.component(match axes[1] {
        0 => Face::X,
        1 => Face::Y,
        _ => Face::Z,
    });
    let w_gamma = w.component(match axes[2] {
        0 => Face::X,
        1 => Face::Y,
        _ => Face::Z,
    });

    // Fluxes along alpha live at cells of the component's control volume:
    // (a_cell in 0..n, b, c): F = avg_alpha(w_alpha) * avg_alpha(u).
    let mut flux_a = Field3::zeros(n, n, n);
    for c in 0..n {
        for b in 0..n {
            for a in 0..n {
                let wbar = 0.5
                    * (get3(w_alpha, pos(axes, a, b, c)) + get3(w_alpha, pos(axes, a + 1, b, c)));
                let ubar = 0.5 * (get3(uc, pos(axes, a, b, c)) + get3(uc, pos(axes, a + 1, b, c)));
                flux_a.set(a, b, c, wbar * ubar);
            }
        }
    }
    // Transverse fluxes along beta at (a_face, b_node, c_cell); wall values
    // (b in {0, n}) vanish because the normal velocity is pinned there.
    let mut flux_b = Field3::zeros(n + 1, n + 1, n);
    for c in 0..n {
        for b in 1..n {
            for a in 1..n {
                let wbar =
                    0.5 * (get3(w_beta, pos(axes, a - 1, b, c)) + get3(w_beta, pos(axes, a, b, c)));
                let ubar = 0.5 * (get3(uc, pos(axes, a, b - 1, c)) + get3(uc, pos(axes, a, b, c)));
                flux_b.set(a, b, c, wbar * ubar);
            }
        }
    }
    let mut flux_c = Field3::zeros(n + 1, n, n + 1);
    for c in 1..n {
        for b in 0..n {
            for a in 1..n {
                let wbar = 0.5
                    * (get3(w_gamma, pos(axes, a - 1, b, c)) + get3(w_gamma, pos(axes, a, b, c)));
                let ubar = 0.5 * (get3(uc, pos(axes, a, b, c - 1)) + get3(uc, pos(axes, a, b, c)));
                flux_c.set(a, b, c, wbar * ubar);
            }
        }
    }

    let dst = out.component_mut(comp);
    for c in 0..n {
        for b in 0..n {
            for a in 1..n {
                let divergence = (flux_a.get(a, b, c) - flux_a.get(a - 1, b, c)) * inv_h
                    + (flux_b.get(a, b + 1, c) - flux_b.get(a, b, c)) * inv_h
                    + (flux_c.get(a, b, c + 1) - flux_c.get(a, b, c)) * inv_h;
                let dw = 0.5
                    * (get3(&div_w.values, pos(axes, a - 1, b, c))
                        + get3(&div_w.values, pos(axes, a, b, c)));
                let uval = get3(uc, pos(axes, a, b, c));
                let p = pos(axes, a, b, c);
                let cur = dst.get(p[0], p[1], p[2]);
                dst.set(p[0], p[1], p[2], cur + divergence - 0.5 * uval * dw);
            }
        }
    }
}
