//! Tensor-product direct solver for the constant-coefficient Laplacians.
//!
//! Every per-component operator in this solver is a sum of three 1D second
//! differences whose boundary closure is one of:
//!
//! * `NeumannCell`   — cell-centered points, mirror ghost (`u_{-1} = u_0`)
//! * `DirichletNode` — node points with the end nodes pinned to zero
//! * `DirichletCell` — cell-centered points, negated mirror ghost
//!   (`u_{-1} = -u_0`), the half-cell wall of the MAC no-slip condition
//!
//! All three diagonalize in cosine/sine bases with eigenvalues
//! `(4/h^2) sin^2(pi m / 2n)`, so `(-Laplacian) u = f` is solved exactly by
//! transform, diagonal scale, inverse transform.

use rayon::prelude::*;

use crate::grid::Field3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bc1d {
    NeumannCell,
    DirichletNode,
    DirichletCell,
}

/// Orthonormal eigenbasis of one 1D operator.
#[derive(Debug, Clone)]
pub struct Transform1d {
    pub bc: Bc1d,
    /// cells per axis of the parent grid
    pub n: usize,
    /// number of unknowns along the axis
    pub len: usize,
    /// index of the first unknown within the component array axis
    pub offset: usize,
    /// len x len, column-major; column m is the m-th eigenvector
    q: Vec<f64>,
    /// row-major copy (rows contiguous) for the pencil kernels
    qt: Vec<f64>,
    /// eigenvalues of -d^2/dx^2 including the 1/h^2 scale
    pub lambda: Vec<f64>,
}

impl Transform1d {
    pub fn new(bc: Bc1d, n: usize) -> Self {
        let h = 1.0 / n as f64;
        let (len, offset) = match bc {
            Bc1d::NeumannCell => (n, 0),
            Bc1d::DirichletNode => (n - 1, 1),
            Bc1d::DirichletCell => (n, 0),
        };
        let mut q = vec![0.0; len * len];
        let mut lambda = vec![0.0; len];
        let nf = n as f64;
        for m in 0..len {
            let (mode, col): (f64, Vec<f64>) = match bc {
                Bc1d::NeumannCell => {
                    let mode = m as f64;
                    let c = if m == 0 {
                        (1.0 / nf).sqrt()
                    } else {
                        (2.0 / nf).sqrt()
                    };
                    (
                        mode,
                        (0..len)
                            .map(|i| {
                                c * (std::f64::consts::PI * mode * (i as f64 + 0.5) / nf).cos()
                            })
                            .collect(),
                    )
                }
                Bc1d::DirichletNode => {
                    let mode = (m + 1) as f64;
                    let c = (2.0 / nf).sqrt();
                    (
                        mode,
                        (0..len)
                            .map(|i| {
                                c * (std::f64::consts::PI * mode * (i as f64 + 1.0) / nf).sin()
                            })
                            .collect(),
                    )
                }
                Bc1d::DirichletCell => {
                    let mode = (m + 1) as f64;
                    let c = if m + 1 == n {
                        (1.0 / nf).sqrt()
                    } else {
                        (2.0 / nf).sqrt()
                    };
                    (
                        mode,
                        (0..len)
                            .map(|i| {
                                c * (std::f64::consts::PI * mode * (i as f64 + 0.5) / nf).sin()
                            })
                            .collect(),
                    )
                }
            };
            let s = (std::f64::consts::PI * mode / (2.0 * nf)).sin();
            lambda[m] = 4.0 / (h * h) * s * s;
            for i in 0..len {
                q[i + len * m] = col[i];
            }
        }
        let mut qt = vec![0.0; len * len];
        for m in 0..len {
            for i in 0..len {
                qt[m + len * i] = q[i + len * m];
            }
        }
        Transform1d {
            bc,
            n,
            len,
            offset,
            q,
            qt,
            lambda,
        }
    }

    #[cfg(test)]
    fn coeff(&self, row: usize, col: usize) -> f64 {
        self.q[row + self.len * col]
    }

    /// Row `a` of the matrix the given direction applies: Q^T rows are Q
    /// columns (contiguous in `q`), Q rows are contiguous in `qt`.
    #[inline]
    fn matrix_row(&self, a: usize, forward: bool) -> &[f64] {
        if forward {
            &self.q[a * self.len..(a + 1) * self.len]
        } else {
            &self.qt[a * self.len..(a + 1) * self.len]
        }
    }
}

/// Contiguous dot product with four accumulators (auto-vectorizes).
#[inline]
fn dot_row(row: &[f64], v: &[f64]) -> f64 {
    let mut acc = [0.0f64; 4];
    let chunks = row.len() / 4;
    for c in 0..chunks {
        let i = 4 * c;
        acc[0] += row[i] * v[i];
        acc[1] += row[i + 1] * v[i + 1];
        acc[2] += row[i + 2] * v[i + 2];
        acc[3] += row[i + 3] * v[i + 3];
    }
    let mut tail = 0.0;
    for i in 4 * chunks..row.len() {
        tail += row[i] * v[i];
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

/// Apply the axis transform of `t` along `axis` (0 = x, 1 = y, 2 = z).
/// `forward` applies Q^T (analysis), otherwise Q (synthesis). Entries outside
/// the transform window are copied through unchanged (they are pinned zeros).
pub fn apply_axis(t: &Transform1d, axis: usize, src: &Field3, dst: &mut Field3, forward: bool) {
    debug_assert_eq!(src.nx, dst.nx);
    debug_assert_eq!(src.ny, dst.ny);
    debug_assert_eq!(src.nz, dst.nz);
    dst.data.copy_from_slice(&src.data);
    let len = t.len;
    let off = t.offset;
    match axis {
        0 => {
            let pencil = src.nx;
            let src_data = &src.data;
            dst.data
                .par_chunks_mut(pencil)
                .zip(src_data.par_chunks(pencil))
                .with_min_len(512 / pencil.max(1) + 1)
                .for_each(|(out_row, in_row)| {
                    let input = &in_row[off..off + len];
                    for a in 0..len {
                        out_row[off + a] = dot_row(t.matrix_row(a, forward), input);
                    }
                });
        }
        1 => {
            let nx = src.nx;
            let ny = src.ny;
            let slab = nx * ny;
            dst.data
                .par_chunks_mut(slab)
                .zip(src.data.par_chunks(slab))
                .for_each(|(out_slab, in_slab)| {
                    for a in 0..len {
                        let row = t.matrix_row(a, forward);
                        let dst_row = &mut out_slab[(off + a) * nx..(off + a + 1) * nx];
                        dst_row.iter_mut().for_each(|v| *v = 0.0);
                        for (b, &c) in row.iter().enumerate() {
                            let src_row = &in_slab[(off + b) * nx..(off + b + 1) * nx];
                            for (o, s) in dst_row.iter_mut().zip(src_row) {
                                *o += c * s;
                            }
                        }
                    }
                });
        }
        2 => {
            let plane = src.nx * src.ny;
            let src_data = &src.data;
            // Each task owns one destination plane.
            dst.data
                .par_chunks_mut(plane)
                .enumerate()
                .for_each(|(kdst, out_plane)| {
                    if kdst < off || kdst >= off + len {
                        return;
                    }
                    let a = kdst - off;
                    out_plane.iter_mut().for_each(|v| *v = 0.0);
                    let row = t.matrix_row(a, forward);
                    for (b, &c) in row.iter().enumerate() {
                        let src_plane = &src_data[(off + b) * plane..(off + b + 1) * plane];
                        for (o, s) in out_plane.iter_mut().zip(src_plane) {
                            *o += c * s;
                        }
                    }
                });
        }
        _ => unreachable!(),
    }
}

/// Exact solver for `(-Laplacian) u = rhs` with the given per-axis closures.
pub struct TensorPoisson<'a> {
    pub tx: &'a Transform1d,
    pub ty: &'a Transform1d,
    pub tz: &'a Transform1d,
}

impl TensorPoisson<'_> {
    /// Returns the solution and the magnitude of the zero-mode coefficient
    /// (nonzero only for the all-Neumann case; it is projected out, which
    /// selects the zero-mean solution).
    pub fn solve(&self, rhs: &Field3) -> (Field3, f64) {
        let mut a = Field3::zeros(rhs.nx, rhs.ny, rhs.nz);
        let mut b = Field3::zeros(rhs.nx, rhs.ny, rhs.nz);
        apply_axis(self.tx, 0, rhs, &mut a, true);
        apply_axis(self.ty, 1, &a, &mut b, true);
        apply_axis(self.tz, 2, &b, &mut a, true);

        let mut zero_mode = 0.0;
        let (lx, ly, lz) = (&self.tx.lambda, &self.ty.lambda, &self.tz.lambda);
        let (ox, oy, oz) = (self.tx.offset, self.ty.offset, self.tz.offset);
        for mk in 0..self.tz.len {
            for mj in 0..self.ty.len {
                for mi in 0..self.tx.len {
                    let lam = lx[mi] + ly[mj] + lz[mk];
                    let idx = a.idx(ox + mi, oy + mj, oz + mk);
                    if lam == 0.0 {
                        zero_mode = a.data[idx].abs();
                        a.data[idx] = 0.0;
                    } else {
                        a.data[idx] /= lam;
                    }
                }
            }
        }

        apply_axis(self.tx, 0, &a, &mut b, false);
        apply_axis(self.ty, 1, &b, &mut a, false);
        apply_axis(self.tz, 2, &a, &mut b, false);
        (b, zero_mode)
    }
}

/// Zero every entry outside the unknown windows of the given closures.
/// Entries outside the windows are not degrees of freedom (they are pinned
/// boundary values), so right-hand sides must be masked before a solve.
pub fn mask_window(bcs: [Bc1d; 3], n: usize, f: &mut Field3) {
    let window = |bc: Bc1d| match bc {
        Bc1d::NeumannCell => (0usize, n),
        Bc1d::DirichletNode => (1usize, n - 1),
        Bc1d::DirichletCell => (0usize, n),
    };
    let (w0, w1, w2) = (window(bcs[0]), window(bcs[1]), window(bcs[2]));
    let (nx, ny) = (f.nx, f.ny);
    for (idx, v) in f.data.iter_mut().enumerate() {
        let i = idx % nx;
        let j = (idx / nx) % ny;
        let k = idx / (nx * ny);
        let inside = i >= w0.0
            && i < w0.0 + w0.1
            && j >= w1.0
            && j < w1.0 + w1.1
            && k >= w2.0
            && k < w2.0 + w2.1;
        if !inside {
            *v = 0.0;
        }
    }
}

/// Matrix-free `(-Laplacian)` with the same closures, for residual
/// certification independent of the transform path.
pub fn apply_neg_laplacian(bcs: [Bc1d; 3], n: usize, src: &Field3, dst: &mut Field3) {
    let h = 1.0 / n as f64;
    let inv_h2 = 1.0 / (h * h);
    let windows: Vec<(usize, usize)> = bcs
        .iter()
        .map(|bc| match bc {
            Bc1d::NeumannCell => (0usize, n),
            Bc1d::DirichletNode => (1usize, n - 1),
            Bc1d::DirichletCell => (0usize, n),
        })
        .collect();
    for v in dst.data.iter_mut() {
        *v = 0.0;
    }
    let (w0, w1, w2) = (windows[0], windows[1], windows[2]);
    for k in w2.0..w2.0 + w2.1 {
        for j in w1.0..w1.0 + w1.1 {
            for i in w0.0..w0.0 + w0.1 {
                let u = src.get(i, j, k);
                let mut acc = 0.0;
                for (axis, (bc, w)) in bcs.iter().zip(&windows).enumerate() {
                    let pos = match axis {
                        0 => i,
                        1 => j,
                        _ => k,
                    };
                    let lo_edge = pos == w.0;
                    let hi_edge = pos == w.0 + w.1 - 1;
                    let neighbor = |p: usize| -> f64 {
                        match axis {
                            0 => src.get(p, j, k),
                            1 => src.get(i, p, k),
                            _ => src.get(i, j, p),
                        }
                    };
                    let lo = if lo_edge {
                        match bc {
                            Bc1d::NeumannCell => u,
                            Bc1d::DirichletCell => -u,
                            Bc1d::DirichletNode => 0.0,
                        }
                    } else {
                        neighbor(pos - 1)
                    };
                    let hi = if hi_edge {
                        match bc {
                            Bc1d::NeumannCell => u,
                            Bc1d::DirichletCell => -u,
                            Bc1d::DirichletNode => 0.0,
                        }
                    } else {
                        neighbor(pos + 1)
                    };
                    acc += 2.0 * u - lo - hi;
                }
                dst.set(i, j, k, acc * inv_h2);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::random_scalar_field;
    use crate::grid::Grid;

    #[test]
    fn columns_are_orthonormal() {
        for bc in [Bc1d::NeumannCell, Bc1d::DirichletNode, Bc1d::DirichletCell] {
            let t = Transform1d::new(bc, 12);
            for a in 0..t.len {
                for b in 0..t.len {
                    let dot: f64 = (0..t.len).map(|i| t.coeff(i, a) * t.coeff(i, b)).sum();
                    let want = if a == b { 1.0 } else { 0.0 };
                    assert!((dot - want).abs() < 1e-13, "{bc:?} ({a},{b}): {dot}");
                }
            }
        }
    }

    #[test]
    fn transform_diagonalizes_stencil() {
        // Q Lambda Q^T u must equal the stencil applied to u for each closure mix.
        let n = 8;
        let grid = Grid::new(n).unwrap();
        let combos = [
            (
                [Bc1d::NeumannCell, Bc1d::NeumannCell, Bc1d::NeumannCell],
                (n, n, n),
            ),
            (
                [Bc1d::NeumannCell, Bc1d::DirichletNode, Bc1d::DirichletNode],
                (n, n + 1, n + 1),
            ),
            (
                [
                    Bc1d::DirichletNode,
                    Bc1d::DirichletCell,
                    Bc1d::DirichletCell,
                ],
                (n + 1, n, n),
            ),
        ];
        for (bcs, (nx, ny, nz)) in combos {
            let tx = Transform1d::new(bcs[0], n);
            let ty = Transform1d::new(bcs[1], n);
            let tz = Transform1d::new(bcs[2], n);
            let mut u = Field3::zeros(nx, ny, nz);
            let r = random_scalar_field(&grid, 7);
            u.fill_with(|i, j, k| {
                // Any values; pinned entries must be zero for the comparison.
                let inside = |bc: Bc1d, p: usize, w: usize| match bc {
                    Bc1d::DirichletNode => p >= 1 && p < w,
                    _ => true,
                };
                if inside(bcs[0], i, n) && inside(bcs[1], j, n) && inside(bcs[2], k, n) {
                    r.values.get(i % n, j % n, k % n)
                } else {
                    0.0
                }
            });
            let mut want = Field3::zeros(nx, ny, nz);
            apply_neg_laplacian(bcs, n, &u, &mut want);

            let mut a = Field3::zeros(nx, ny, nz);
            let mut b = Field3::zeros(nx, ny, nz);
            apply_axis(&tx, 0, &u, &mut a, true);
            apply_axis(&ty, 1, &a, &mut b, true);
            apply_axis(&tz, 2, &b, &mut a, true);
            for mk in 0..tz.len {
                for mj in 0..ty.len {
                    for mi in 0..tx.len {
                        let lam = tx.lambda[mi] + ty.lambda[mj] + tz.lambda[mk];
                        let idx = a.idx(tx.offset + mi, ty.offset + mj, tz.offset + mk);
                        a.data[idx] *= lam;
                    }
                }
            }
            apply_axis(&tx, 0, &a, &mut b, false);
            apply_axis(&ty, 1, &b, &mut a, false);
            apply_axis(&tz, 2, &a, &mut b, false);

            let scale = want.max_abs().max(1.0);
            for idx in 0..b.data.len() {
                assert!(
                    (b.data[idx] - want.data[idx]).abs() <= 1e-9 * scale,
                    "{bcs:?} mismatch at {idx}"
                );
            }
        }
    }

    #[test]
    fn direct_solver_inverts_stencil() {
        let n = 8;
        let grid = Grid::new(n).unwrap();
        let r = random_scalar_field(&grid, 3);
        let tx = Transform1d::new(Bc1d::DirichletNode, n);
        let ty = Transform1d::new(Bc1d::DirichletCell, n);
        let tz = Transform1d::new(Bc1d::DirichletCell, n);
        let mut rhs = Field3::zeros(n + 1, n, n);
        rhs.fill_with(|i, j, k| {
            if i >= 1 && i < n {
                r.values.get(i - 1, j, k)
            } else {
                0.0
            }
        });
        let solver = TensorPoisson {
            tx: &tx,
            ty: &ty,
            tz: &tz,
        };
        let (u, zero_mode) = solver.solve(&rhs);
        assert_eq!(zero_mode, 0.0);
        let mut back = Field3::zeros(n + 1, n, n);
        apply_neg_laplacian(
            [
                Bc1d::DirichletNode,
                Bc1d::DirichletCell,
                Bc1d::DirichletCell,
            ],
            n,
            &u,
            &mut back,
        );
        let scale = rhs.max_abs();
        for idx in 0..rhs.data.len() {
            assert!((back.data[idx] - rhs.data[idx]).abs() <= 1e-9 * scale);
        }
    }
}
