use super::*;
use std::f64::consts::PI;

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(1.0)
}

#[test]
fn grid_rejects_small_n() {
    assert!(Grid::new(3).is_err());
    assert!(Grid::new(4).is_ok());
}

#[test]
fn grad_of_constant_is_zero_on_interior_faces() {
    let grid = Grid::new(8).unwrap();
    let p = ScalarField::from_fn(&grid, |_, _, _| 3.25);
    let g = grad(&p);
    let n = grid.n();
    for k in 0..n {
        for j in 0..n {
            for i in 1..n {
                assert_eq!(g.fx.get(i, j, k), 0.0);
            }
        }
    }
}

#[test]
fn grad_of_linear_is_exact() {
    let grid = Grid::new(8).unwrap();
    let p = ScalarField::from_fn(&grid, |x, _, _| x);
    let g = grad(&p);
    let n = grid.n();
    for k in 0..n {
        for j in 0..n {
            for i in 1..n {
                assert!((g.fx.get(i, j, k) - 1.0).abs() < 1e-13);
            }
        }
    }
}

#[test]
fn div_of_constant_is_zero() {
    let grid = Grid::new(8).unwrap();
    let f = FaceField::from_fn(&grid, |_, _, _| 1.0, |_, _, _| -2.0, |_, _, _| 0.5);
    let d = div(&f);
    assert_eq!(norm(&d, NormKind::Linf, 2.0), 0.0);
}

#[test]
fn curl_of_zero_edges_is_zero() {
    let grid = Grid::new(8).unwrap();
    let e = EdgeField::zeros(&grid);
    assert_eq!(norm(&curl_e2f(&e), NormKind::Linf, 2.0), 0.0);
    let f = FaceField::zeros(&grid);
    assert_eq!(norm(&curl_f2e(&f), NormKind::Linf, 2.0), 0.0);
}

#[test]
fn mimetic_div_of_curl_vanishes() {
    // max |div curl E| <= 1e-13 ||E||_inf / h^2 for random edge fields,
    // at every cell, tangential-zero or not.
    for n in [4, 8, 16] {
        let grid = Grid::new(n).unwrap();
        for seed in 0..10 {
            let e = random_edge_field(&grid, seed, seed % 2 == 0);
            let d = div(&curl_e2f(&e));
            let bound = 1e-13 * e.max_abs() / (grid.h() * grid.h());
            assert!(
                norm(&d, NormKind::Linf, 2.0) <= bound,
                "n={n} seed={seed}: {} > {}",
                norm(&d, NormKind::Linf, 2.0),
                bound
            );
        }
    }
}

#[test]
fn mimetic_curl_of_grad_vanishes() {
    // ||curl_f2e(grad psi)||_inf <= 1e-13 ||psi||_inf / h^2, boundary edges
    // included (grad is the exact adjoint so the identity is structural).
    for n in [4, 8, 16] {
        let grid = Grid::new(n).unwrap();
        for seed in 0..10 {
            let p = random_scalar_field(&grid, 100 + seed);
            let c = curl_f2e(&grad(&p));
            let bound = 1e-13 * norm(&p, NormKind::Linf, 2.0) / (grid.h() * grid.h());
            assert!(norm(&c, NormKind::Linf, 2.0) <= bound);
        }
    }
}

#[test]
fn summation_by_parts_div_grad() {
    // <div F, psi> + <F, grad psi> = 0 for arbitrary F (exact adjoint pair).
    let grid = Grid::new(8).unwrap();
    for seed in 0..5 {
        let f = random_face_field(&grid, seed, false);
        let p = random_scalar_field(&grid, 50 + seed);
        let lhs = dot(&div(&f), &p) + dot(&f, &grad(&p));
        let scale = norm(&f, NormKind::L2, 2.0) * norm(&p, NormKind::L2, 2.0) / grid.h();
        assert!(lhs.abs() <= 1e-13 * scale);
    }
}

#[test]
fn curl_adjointness() {
    // <curl_e2f E, F> = <E, curl_f2e F> for tangential-zero E, no-slip F.
    let grid = Grid::new(8).unwrap();
    for seed in 0..5 {
        let e = random_edge_field(&grid, seed, true);
        let f = random_face_field(&grid, 70 + seed, true);
        let a = dot(&curl_e2f(&e), &f);
        let b = dot(&e, &curl_f2e(&f));
        let scale = (norm(&e, NormKind::L2, 2.0) * norm(&f, NormKind::L2, 2.0) / grid.h())
            .max(f64::MIN_POSITIVE);
        assert!((a - b).abs() <= 1e-13 * scale, "a={a} b={b}");
    }
}

#[test]
fn operators_are_linear() {
    let grid = Grid::new(6).unwrap();
    let e1 = random_edge_field(&grid, 1, false);
    let e2 = random_edge_field(&grid, 2, false);
    let (a, b) = (1.7, -0.3);
    let mut combo = e1.clone();
    combo.scale(a);
    combo.axpy(b, &e2);
    let mut want = curl_e2f(&e1);
    want.scale(a);
    want.axpy(b, &curl_e2f(&e2));
    let got = curl_e2f(&combo);
    let mut diff = got.clone();
    diff.axpy(-1.0, &want);
    assert!(diff.max_abs() <= 1e-12 * want.max_abs().max(1.0));
}

#[test]
fn grad_converges_second_order() {
    // phi = cos(pi x): x-gradient at interior faces approximates
    // -pi sin(pi x) with observed order >= 1.9 between n=16 and n=32.
    let mut errs = Vec::new();
    for n in [16usize, 32] {
        let grid = Grid::new(n).unwrap();
        let p = ScalarField::from_fn(&grid, |x, _, _| (PI * x).cos());
        let g = grad(&p);
        let h = grid.h();
        let mut emax = 0.0_f64;
        for k in 0..n {
            for j in 0..n {
                for i in 1..n {
                    let x = i as f64 * h;
                    let want = -PI * (PI * x).sin();
                    emax = emax.max((g.fx.get(i, j, k) - want).abs());
                }
            }
        }
        errs.push(emax);
    }
    let order = (errs[0] / errs[1]).log2();
    assert!(order >= 1.9, "observed order {order}");
}

#[test]
fn div_converges_second_order() {
    let mut errs = Vec::new();
    for n in [16usize, 32] {
        let grid = Grid::new(n).unwrap();
        let f = FaceField::from_fn(
            &grid,
            |x, y, _| (PI * x).sin() * (PI * y).cos(),
            |_, _, _| 0.0,
            |_, _, _| 0.0,
        );
        let d = div(&f);
        let exact = ScalarField::from_fn(&grid, |x, y, _| PI * (PI * x).cos() * (PI * y).cos());
        let mut diff = d.clone();
        diff.axpy(-1.0, &exact);
        errs.push(norm(&diff, NormKind::Linf, 2.0));
    }
    let order = (errs[0] / errs[1]).log2();
    assert!(order >= 1.9, "observed order {order}");
}

#[test]
fn curl_f2e_converges_second_order() {
    // F = (0, 0, sin(pi x) sin(pi y)): curl = (pi sin x cos y, -pi cos x sin y, 0).
    let mut errs = Vec::new();
    for n in [16usize, 32] {
        let grid = Grid::new(n).unwrap();
        let f = FaceField::from_fn(
            &grid,
            |_, _, _| 0.0,
            |_, _, _| 0.0,
            |x, y, _| (PI * x).sin() * (PI * y).sin(),
        );
        let c = curl_f2e(&f);
        let h = grid.h();
        let mut emax = 0.0_f64;
        // Interior x-edges only: boundary edges are one-sided by construction.
        for k in 1..n {
            for j in 1..n {
                for i in 0..n {
                    let (x, y) = ((i as f64 + 0.5) * h, j as f64 * h);
                    let want = PI * (PI * x).sin() * (PI * y).cos();
                    emax = emax.max((c.ex.get(i, j, k) - want).abs());
                }
            }
        }
        errs.push(emax);
    }
    let order = (errs[0] / errs[1]).log2();
    assert!(order >= 1.9, "observed order {order}");
}

#[test]
fn interp_preserves_constants_and_is_linear() {
    let grid = Grid::new(6).unwrap();
    let f = FaceField::from_fn(&grid, |_, _, _| 2.0, |_, _, _| -1.0, |_, _, _| 0.25);
    let c = face_to_center(&f);
    for (comp, want) in c.iter().zip([2.0, -1.0, 0.25]) {
        for v in &comp.data {
            assert!((v - want).abs() < 1e-15);
        }
    }
    let e = EdgeField::from_fn(&grid, |_, _, _| 1.5, |_, _, _| 0.5, |_, _, _| -2.0);
    for face in Face::ALL {
        let ef = edge_to_face(&e, face);
        for (comp, want) in ef.iter().zip([1.5, 0.5, -2.0]) {
            for v in &comp.data {
                assert!((v - want).abs() < 1e-15, "{face:?}");
            }
        }
    }
    // Linearity of interpolation.
    let f1 = random_face_field(&grid, 4, false);
    let f2 = random_face_field(&grid, 5, false);
    let (a, b) = (0.7, -2.2);
    let mut combo = f1.clone();
    combo.scale(a);
    combo.axpy(b, &f2);
    let c1 = face_to_center(&f1);
    let c2 = face_to_center(&f2);
    let cc = face_to_center(&combo);
    for comp in 0..3 {
        for idx in 0..cc[comp].len() {
            let want = a * c1[comp].data[idx] + b * c2[comp].data[idx];
            assert!((cc[comp].data[idx] - want).abs() <= 1e-13);
        }
    }
}

#[test]
fn interp_trig_second_order() {
    let mut errs = Vec::new();
    for n in [16usize, 32] {
        let grid = Grid::new(n).unwrap();
        let f = FaceField::from_fn(
            &grid,
            |x, y, z| (PI * x).sin() * (PI * y).cos() * (PI * z).cos(),
            |_, _, _| 0.0,
            |_, _, _| 0.0,
        );
        let c = face_to_center(&f);
        let h = grid.h();
        let mut emax = 0.0_f64;
        for k in 0..n {
            for j in 0..n {
                for i in 0..n {
                    let (x, y, z) = (
                        (i as f64 + 0.5) * h,
                        (j as f64 + 0.5) * h,
                        (k as f64 + 0.5) * h,
                    );
                    let want = (PI * x).sin() * (PI * y).cos() * (PI * z).cos();
                    emax = emax.max((c[0].get(i, j, k) - want).abs());
                }
            }
        }
        errs.push(emax);
    }
    let order = (errs[0] / errs[1]).log2();
    assert!(order >= 1.9, "observed order {order}");
}

#[test]
fn spread_is_exact_adjoint_of_collocation() {
    let grid = Grid::new(6).unwrap();
    let f = random_face_field(&grid, 8, false);
    let n = grid.n();
    let mut vx = Field3::zeros(n, n, n);
    let mut vy = Field3::zeros(n, n, n);
    let mut vz = Field3::zeros(n, n, n);
    let r = random_scalar_field(&grid, 9);
    vx.fill_with(|i, j, k| r.values.get(i, j, k));
    vy.fill_with(|i, j, k| r.values.get(j, k, i));
    vz.fill_with(|i, j, k| r.values.get(k, i, j));
    let v = [vx, vy, vz];
    let cf = face_to_center(&f);
    let sf = spread_center_to_face(&v, &grid);
    let lhs: f64 = (0..3)
        .map(|c| {
            cf[c]
                .data
                .iter()
                .zip(&v[c].data)
                .map(|(a, b)| a * b)
                .sum::<f64>()
        })
        .sum();
    let rhs =
        f.fx.data
            .iter()
            .zip(&sf.fx.data)
            .map(|(a, b)| a * b)
            .sum::<f64>()
            + f.fy
                .data
                .iter()
                .zip(&sf.fy.data)
                .map(|(a, b)| a * b)
                .sum::<f64>()
            + f.fz
                .data
                .iter()
                .zip(&sf.fz.data)
                .map(|(a, b)| a * b)
                .sum::<f64>();
    assert!(rel_close(lhs, rhs, 1e-13), "lhs={lhs} rhs={rhs}");

    // Edge side.
    let e = random_edge_field(&grid, 10, false);
    let ce = edge_to_center(&e);
    let se = spread_center_to_edge(&v, &grid);
    let lhs: f64 = (0..3)
        .map(|c| {
            ce[c]
                .data
                .iter()
                .zip(&v[c].data)
                .map(|(a, b)| a * b)
                .sum::<f64>()
        })
        .sum();
    let rhs =
        e.ex.data
            .iter()
            .zip(&se.ex.data)
            .map(|(a, b)| a * b)
            .sum::<f64>()
            + e.ey
                .data
                .iter()
                .zip(&se.ey.data)
                .map(|(a, b)| a * b)
                .sum::<f64>()
            + e.ez
                .data
                .iter()
                .zip(&se.ez.data)
                .map(|(a, b)| a * b)
                .sum::<f64>();
    assert!(rel_close(lhs, rhs, 1e-13), "lhs={lhs} rhs={rhs}");
}

#[test]
fn norms_basics() {
    let grid = Grid::new(64).unwrap();
    let zero = ScalarField::zeros(&grid);
    for kind in [
        NormKind::L2,
        NormKind::Lq,
        NormKind::Linf,
        NormKind::H1Semi,
        NormKind::H1,
        NormKind::W1q,
    ] {
        assert_eq!(norm(&zero, kind, 4.0), 0.0);
    }
    let c = ScalarField::from_fn(&grid, |_, _, _| -2.5);
    assert!((norm(&c, NormKind::L2, 2.0) - 2.5).abs() < 1e-12);
    // sin(pi x): L2 norm sqrt(1/2) with midpoint quadrature at n = 64.
    let s = ScalarField::from_fn(&grid, |x, _, _| (PI * x).sin());
    assert!((norm(&s, NormKind::L2, 2.0) - 0.5_f64.sqrt()).abs() <= 1e-3);
}

#[test]
fn norm_homogeneity_and_triangle() {
    let grid = Grid::new(6).unwrap();
    let a = random_face_field(&grid, 11, false);
    let b = random_face_field(&grid, 12, false);
    for kind in [
        NormKind::L2,
        NormKind::Lq,
        NormKind::Linf,
        NormKind::H1,
        NormKind::W1q,
    ] {
        let na = norm(&a, kind, 4.0);
        let mut scaled = a.clone();
        scaled.scale(-3.0);
        assert!(rel_close(norm(&scaled, kind, 4.0), 3.0 * na, 1e-12));
        let mut sum = a.clone();
        sum.axpy(1.0, &b);
        assert!(norm(&sum, kind, 4.0) <= na + norm(&b, kind, 4.0) + 1e-12);
    }
}

#[test]
fn boundary_flags_are_enforced() {
    let grid = Grid::new(6).unwrap();
    let f = random_face_field(&grid, 13, true);
    assert!(f.is_no_slip());
    let e = random_edge_field(&grid, 14, true);
    assert!(e.is_tangential_zero());
    let mut raw = random_face_field(&grid, 15, false);
    assert!(!raw.is_no_slip());
    raw.enforce_no_slip();
    assert!(raw.is_no_slip());
}

#[test]
fn curl_of_node_difference_gradient_vanishes() {
    // E sampled by exact edge-midpoint differences of a smooth psi at nodes:
    // every face circulation telescopes to zero regardless of boundaries.
    let grid = Grid::new(8).unwrap();
    let n = grid.n();
    let h = grid.h();
    let psi =
        |x: f64, y: f64, z: f64| (1.3 * x + 0.2).sin() * (0.7 * y - 1.0).cos() * (z + 0.5).sin();
    let mut e = EdgeField::zeros(&grid);
    e.ex.fill_with(|i, j, k| {
        (psi((i + 1) as f64 * h, j as f64 * h, k as f64 * h)
            - psi(i as f64 * h, j as f64 * h, k as f64 * h))
            / h
    });
    e.ey.fill_with(|i, j, k| {
        (psi(i as f64 * h, (j + 1) as f64 * h, k as f64 * h)
            - psi(i as f64 * h, j as f64 * h, k as f64 * h))
            / h
    });
    e.ez.fill_with(|i, j, k| {
        (psi(i as f64 * h, j as f64 * h, (k + 1) as f64 * h)
            - psi(i as f64 * h, j as f64 * h, k as f64 * h))
            / h
    });
    let c = curl_e2f(&e);
    let bound = 1e-13 / (h * h);
    assert!(
        norm(&c, NormKind::Linf, 2.0) <= bound,
        "{} > {bound}",
        norm(&c, NormKind::Linf, 2.0)
    );
    let _ = n;
}
