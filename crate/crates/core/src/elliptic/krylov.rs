//! Matrix-free Krylov kernels: conjugate gradients for the symmetric positive
//! (semi-)definite solves, BiCGStab for the nonsymmetric ones. Both take an
//! optional right preconditioner and an optional per-iteration projection
//! (used for zero-mean pinning of semidefinite problems).

use crate::error::{Error, Result};
use crate::grid::norms::neumaier_sum;
use crate::grid::{EdgeField, FaceField, Field3, ScalarField};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KrylovMethod {
    ConjugateGradient,
    BiCgStab,
}

#[derive(Debug, Clone, Copy)]
pub struct KrylovSpec {
    pub method: KrylovMethod,
    pub rtol: f64,
    pub maxiter: usize,
}

impl KrylovSpec {
    pub fn cg(rtol: f64, maxiter: usize) -> Self {
        KrylovSpec {
            method: KrylovMethod::ConjugateGradient,
            rtol,
            maxiter,
        }
    }

    pub fn bicgstab(rtol: f64, maxiter: usize) -> Self {
        KrylovSpec {
            method: KrylovMethod::BiCgStab,
            rtol,
            maxiter,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rtol > 0.0 && self.rtol < 1.0) {
            return Err(Error::Config(format!("rtol = {} not in (0,1)", self.rtol)));
        }
        if self.maxiter < 1 {
            return Err(Error::Config("maxiter must be >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct KrylovStats {
    pub iters: usize,
    /// Residual from the iteration recurrence.
    pub residual: f64,
    /// Residual recomputed from scratch at exit.
    pub recomputed_residual: f64,
    pub residual_history: Vec<f64>,
}

/// Minimal vector interface; dots are compensated serial sums so results are
/// bitwise deterministic regardless of worker count.
pub trait KrylovVec: Clone {
    fn kdot(&self, other: &Self) -> f64;
    fn kaxpy(&mut self, a: f64, x: &Self);
    fn kscale(&mut self, a: f64);
    fn kzero(&mut self);
    fn knorm(&self) -> f64 {
        self.kdot(self).sqrt()
    }
}

impl KrylovVec for Field3 {
    fn kdot(&self, other: &Self) -> f64 {
        neumaier_sum(self.data.iter().zip(&other.data).map(|(a, b)| a * b))
    }
    fn kaxpy(&mut self, a: f64, x: &Self) {
        self.axpy(a, x);
    }
    fn kscale(&mut self, a: f64) {
        self.scale(a);
    }
    fn kzero(&mut self) {
        self.data.iter_mut().for_each(|v| *v = 0.0);
    }
}

impl KrylovVec for ScalarField {
    fn kdot(&self, other: &Self) -> f64 {
        self.values.kdot(&other.values)
    }
    fn kaxpy(&mut self, a: f64, x: &Self) {
        self.values.axpy(a, &x.values);
    }
    fn kscale(&mut self, a: f64) {
        self.values.scale(a);
    }
    fn kzero(&mut self) {
        self.values.kzero();
    }
}

impl KrylovVec for FaceField {
    fn kdot(&self, other: &Self) -> f64 {
        self.fx.kdot(&other.fx) + self.fy.kdot(&other.fy) + self.fz.kdot(&other.fz)
    }
    fn kaxpy(&mut self, a: f64, x: &Self) {
        self.axpy(a, x);
    }
    fn kscale(&mut self, a: f64) {
        self.scale(a);
    }
    fn kzero(&mut self) {
        self.fx.kzero();
        self.fy.kzero();
        self.fz.kzero();
    }
}

impl KrylovVec for EdgeField {
    fn kdot(&self, other: &Self) -> f64 {
        self.ex.kdot(&other.ex) + self.ey.kdot(&other.ey) + self.ez.kdot(&other.ez)
    }
    fn kaxpy(&mut self, a: f64, x: &Self) {
        self.axpy(a, x);
    }
    fn kscale(&mut self, a: f64) {
        self.scale(a);
    }
    fn kzero(&mut self) {
        self.ex.kzero();
        self.ey.kzero();
        self.ez.kzero();
    }
}

pub struct KrylovProblem<'a, V> {
    pub apply: &'a dyn Fn(&V) -> V,
    /// Right preconditioner approximating A^{-1}.
    pub precond: Option<&'a dyn Fn(&V) -> V>,
    /// Projection applied to iterates and residuals every iteration
    /// (zero-mean pinning for semidefinite solves).
    pub project: Option<&'a dyn Fn(&mut V)>,
    pub name: &'static str,
}

fn target_norm(b_norm: f64, rtol: f64, target_abs: Option<f64>) -> f64 {
    match target_abs {
        Some(t) => t.min(rtol * b_norm).max(f64::MIN_POSITIVE),
        None => (rtol * b_norm).max(f64::MIN_POSITIVE),
    }
}

/// Preconditioned conjugate gradients. Returns the best iterate seen (by
/// residual norm), so the reported residual history is non-increasing at the
/// returned point. An optional warm-start iterate may be supplied.
pub fn cg<V: KrylovVec>(
    prob: &KrylovProblem<V>,
    b: &V,
    rtol: f64,
    target_abs: Option<f64>,
    maxiter: usize,
) -> Result<(V, KrylovStats)> {
    cg_from(prob, b, None, rtol, target_abs, maxiter)
}

pub fn cg_from<V: KrylovVec>(
    prob: &KrylovProblem<V>,
    b: &V,
    x0: Option<&V>,
    rtol: f64,
    target_abs: Option<f64>,
    maxiter: usize,
) -> Result<(V, KrylovStats)> {
    let mut b = b.clone();
    if let Some(p) = prob.project {
        p(&mut b);
    }
    let b_norm = b.knorm();
    let mut x = b.clone();
    x.kzero();
    if b_norm == 0.0 {
        // Zero is the exact solution; any warm start is discarded.
        return Ok((
            x,
            KrylovStats {
                iters: 0,
                residual: 0.0,
                recomputed_residual: 0.0,
                residual_history: vec![0.0],
            },
        ));
    }
    if let Some(x0) = x0 {
        x = x0.clone();
        if let Some(p) = prob.project {
            p(&mut x);
        }
    }
    let target = target_norm(b_norm, rtol, target_abs);

    let mut r = b.clone();
    if x0.is_some() {
        let ax = (prob.apply)(&x);
        r.kaxpy(-1.0, &ax);
        if let Some(p) = prob.project {
            p(&mut r);
        }
    }
    if r.knorm() <= target {
        let res = r.knorm();
        return Ok((
            x,
            KrylovStats {
                iters: 0,
                residual: res,
                recomputed_residual: res,
                residual_history: vec![res],
            },
        ));
    }
    let mut z0 = match prob.precond {
        Some(m) => m(&r),
        None => r.clone(),
    };
    if let Some(p) = prob.project {
        p(&mut z0);
    }
    let mut p_dir = z0.clone();
    let mut rz = r.kdot(&z0);
    drop(z0);
    let mut history = vec![r.knorm()];
    let mut best_x = x.clone();
    let mut best_res = r.knorm();

    let mut iters = 0;
    while iters < maxiter {
        iters += 1;
        let ap = (prob.apply)(&p_dir);
        let pap = p_dir.kdot(&ap);
        if pap <= 0.0 || !pap.is_finite() {
            return Err(Error::KrylovStall {
                solver: prob.name,
                iters,
                residual: r.knorm(),
                target,
            });
        }
        let alpha = rz / pap;
        x.kaxpy(alpha, &p_dir);
        r.kaxpy(-alpha, &ap);
        if let Some(pr) = prob.project {
            pr(&mut x);
            pr(&mut r);
        }
        let rn = r.knorm();
        history.push(rn);
        if rn < best_res {
            best_res = rn;
            best_x = x.clone();
        }
        if rn <= target {
            break;
        }
        let mut z_new = match prob.precond {
            Some(m) => m(&r),
            None => r.clone(),
        };
        if let Some(pr) = prob.project {
            pr(&mut z_new);
        }
        let rz_new = r.kdot(&z_new);
        let beta = rz_new / rz;
        rz = rz_new;
        // p = z + beta p
        p_dir.kscale(beta);
        p_dir.kaxpy(1.0, &z_new);
    }

    // Independent residual recomputation at the returned iterate.
    let mut check = (prob.apply)(&best_x);
    check.kscale(-1.0);
    check.kaxpy(1.0, &b);
    if let Some(pr) = prob.project {
        pr(&mut check);
    }
    let recomputed = check.knorm();
    if best_res > target {
        return Err(Error::KrylovStall {
            solver: prob.name,
            iters,
            residual: best_res,
            target,
        });
    }
    Ok((
        best_x,
        KrylovStats {
            iters,
            residual: best_res,
            recomputed_residual: recomputed,
            residual_history: history,
        },
    ))
}

/// Right-preconditioned BiCGStab.
pub fn bicgstab<V: KrylovVec>(
    prob: &KrylovProblem<V>,
    b: &V,
    rtol: f64,
    target_abs: Option<f64>,
    maxiter: usize,
) -> Result<(V, KrylovStats)> {
    bicgstab_from(prob, b, None, rtol, target_abs, maxiter)
}

pub fn bicgstab_from<V: KrylovVec>(
    prob: &KrylovProblem<V>,
    b: &V,
    x0: Option<&V>,
    rtol: f64,
    target_abs: Option<f64>,
    maxiter: usize,
) -> Result<(V, KrylovStats)> {
    let mut b = b.clone();
    if let Some(p) = prob.project {
        p(&mut b);
    }
    let b_norm = b.knorm();
    let mut x = b.clone();
    x.kzero();
    if b_norm == 0.0 {
        return Ok((
            x,
            KrylovStats {
                iters: 0,
                residual: 0.0,
                recomputed_residual: 0.0,
                residual_history: vec![0.0],
            },
        ));
    }
    if let Some(x0) = x0 {
        x = x0.clone();
        if let Some(p) = prob.project {
            p(&mut x);
        }
    }
    let target = target_norm(b_norm, rtol, target_abs);

    let apply_pc = |v: &V| -> V {
        match prob.precond {
            Some(m) => m(v),
            None => v.clone(),
        }
    };

    let mut r = b.clone();
    if x0.is_some() {
        let ax = (prob.apply)(&x);
        r.kaxpy(-1.0, &ax);
        if let Some(p) = prob.project {
            p(&mut r);
        }
        if r.knorm() <= target {
            let res = r.knorm();
            return Ok((
                x,
                KrylovStats {
                    iters: 0,
                    residual: res,
                    recomputed_residual: res,
                    residual_history: vec![res],
                },
            ));
        }
    }
    let r_hat = r.clone();
    let mut rho = 1.0;
    let mut alpha = 1.0;
    let mut omega = 1.0;
    let mut v = r.clone();
    v.kzero();
    let mut p = v.clone();
    let mut history = vec![r.knorm()];
    let mut iters = 0;

    while iters < maxiter {
        iters += 1;
        let rho_new = r_hat.kdot(&r);
        if rho_new.abs() < f64::MIN_POSITIVE || !rho_new.is_finite() {
            break;
        }
        let beta = (rho_new / rho) * (alpha / omega);
        // p = r + beta (p - omega v)
        p.kaxpy(-omega, &v);
        p.kscale(beta);
        p.kaxpy(1.0, &r);
        let y = apply_pc(&p);
        v = (prob.apply)(&y);
        let denom = r_hat.kdot(&v);
        if denom.abs() < f64::MIN_POSITIVE || !denom.is_finite() {
            break;
        }
        alpha = rho_new / denom;
        // s = r - alpha v
        let mut s = r.clone();
        s.kaxpy(-alpha, &v);
        let sn = s.knorm();
        if sn <= target {
            x.kaxpy(alpha, &y);
            if let Some(pr) = prob.project {
                pr(&mut x);
            }
            history.push(sn);
            break;
        }
        let z = apply_pc(&s);
        let t = (prob.apply)(&z);
        let tt = t.kdot(&t);
        if tt <= 0.0 || !tt.is_finite() {
            break;
        }
        omega = t.kdot(&s) / tt;
        x.kaxpy(alpha, &y);
        x.kaxpy(omega, &z);
        // r = s - omega t
        r = s;
        r.kaxpy(-omega, &t);
        if let Some(pr) = prob.project {
            pr(&mut x);
            pr(&mut r);
        }
        let rn = r.knorm();
        history.push(rn);
        if rn <= target {
            break;
        }
        rho = rho_new;
    }

    // True residual at exit.
    let mut check = (prob.apply)(&x);
    check.kscale(-1.0);
    check.kaxpy(1.0, &b);
    if let Some(pr) = prob.project {
        pr(&mut check);
    }
    let recomputed = check.knorm();
    let final_res = recomputed;
    if final_res > target {
        return Err(Error::KrylovStall {
            solver: prob.name,
            iters,
            residual: final_res,
            target,
        });
    }
    Ok((
        x,
        KrylovStats {
            iters,
            residual: *history.last().unwrap(),
            recomputed_residual: recomputed,
            residual_history: history,
        },
    ))
}
