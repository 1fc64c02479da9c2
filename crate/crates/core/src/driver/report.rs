//! Machine-readable run reports.

#[derive(Debug, Clone)]
pub struct IterationRecord {
    pub iter: usize,
    pub norm_u_h1: f64,
    pub norm_b_h1: f64,
    /// W^{1,q1} norm with q1 = min(q, 6).
    pub norm_b_w1q: f64,
    pub du_h1: f64,
    pub db_h1: f64,
    /// Update contraction ratio; NaN on the first iteration.
    pub ratio: f64,
}

#[derive(Debug, Clone, Default)]
pub struct IterationReport {
    pub records: Vec<IterationRecord>,
    pub converged: bool,
    pub iterations: usize,
    /// Relative nonlinear residual of the returned state.
    pub final_residual: f64,
    pub momentum_residual: f64,
    pub induction_residual: f64,
    /// Some(all iterates stayed inside the kappa-ball) when kappa is set.
    pub dset_ok: Option<bool>,
    /// Set when the outer iteration stopped because an inner linear solve
    /// failed (large-data regime boundary); the best iterate is returned.
    pub inner_failure: Option<String>,
}

impl IterationReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, rec: IterationRecord) {
        self.records.push(rec);
    }

    pub fn record_dset(&mut self, inside: bool) {
        self.dset_ok = Some(self.dset_ok.unwrap_or(true) && inside);
    }

    /// Sanity of the contraction-ratio estimator: once updates have
    /// decreased by a factor <= 0.9 for three consecutive iterations, no
    /// later ratio may exceed the running maximum observed up to that point.
    pub fn ratio_sanity(&self) -> bool {
        let ratios: Vec<f64> = self
            .records
            .iter()
            .map(|r| r.ratio)
            .filter(|r| r.is_finite())
            .collect();
        let mut consecutive = 0;
        let mut settled_at = None;
        for (k, r) in ratios.iter().enumerate() {
            if *r <= 0.9 {
                consecutive += 1;
                if consecutive >= 3 {
                    settled_at = Some(k);
                    break;
                }
            } else {
                consecutive = 0;
            }
        }
        let Some(k0) = settled_at else { return true };
        let cap = ratios[..=k0].iter().copied().fold(0.0, f64::max);
        ratios[k0 + 1..].iter().all(|r| *r <= cap)
    }

    /// Largest observed update ratio (ignoring the undefined first entry).
    pub fn max_ratio(&self) -> f64 {
        self.records
            .iter()
            .map(|r| r.ratio)
            .filter(|r| r.is_finite())
            .fold(0.0, f64::max)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("iter,norm_u_H1,norm_B_H1,norm_B_W1q,du_H1,dB_H1,ratio\n");
        for r in &self.records {
            let ratio = if r.ratio.is_finite() {
                format!("{:.17e}", r.ratio)
            } else {
                String::new()
            };
            out.push_str(&format!(
                "{},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{}\n",
                r.iter, r.norm_u_h1, r.norm_b_h1, r.norm_b_w1q, r.du_h1, r.db_h1, ratio
            ));
        }
        out
    }

    pub fn to_key_values(&self) -> Vec<(String, String)> {
        vec![
            ("converged".into(), self.converged.to_string()),
            ("iterations".into(), self.iterations.to_string()),
            (
                "final_residual".into(),
                format!("{:.17e}", self.final_residual),
            ),
            (
                "momentum_residual".into(),
                format!("{:.17e}", self.momentum_residual),
            ),
            (
                "induction_residual".into(),
                format!("{:.17e}", self.induction_residual),
            ),
            (
                "dset_ok".into(),
                match self.dset_ok {
                    Some(v) => v.to_string(),
                    None => "unchecked".into(),
                },
            ),
            (
                "inner_failure".into(),
                self.inner_failure.clone().unwrap_or_else(|| "none".into()),
            ),
        ]
    }
}

/// Input norms, empirical constants, and uniqueness diagnostics.
#[derive(Debug, Clone)]
pub struct Diagnostics {
    /// L2 norm of f, reported as the H^{-1} surrogate (upper bound).
    pub norm_f_l2: f64,
    pub norm_g_lq: f64,
    pub c_poincare_velocity: f64,
    pub c_divcurl_h1: f64,
    pub c_divcurl_l2: f64,
    pub c_energy: f64,
    pub rho_hat: Option<f64>,
    pub uniqueness_margin: Option<bool>,
    pub kappa: Option<f64>,
    pub dset_ok: Option<bool>,
}

impl Diagnostics {
    pub fn to_key_values(&self) -> Vec<(String, String)> {
        let opt = |v: Option<f64>| match v {
            Some(x) => format!("{x:.17e}"),
            None => "unset".into(),
        };
        let optb = |v: Option<bool>| match v {
            Some(x) => x.to_string(),
            None => "unchecked".into(),
        };
        vec![
            (
                "norm_f_L2_hminus1_surrogate".into(),
                format!("{:.17e}", self.norm_f_l2),
            ),
            ("norm_g_Lq".into(), format!("{:.17e}", self.norm_g_lq)),
            (
                "c_poincare_velocity".into(),
                format!("{:.17e}", self.c_poincare_velocity),
            ),
            ("c_divcurl_H1".into(), format!("{:.17e}", self.c_divcurl_h1)),
            ("c_divcurl_L2".into(), format!("{:.17e}", self.c_divcurl_l2)),
            ("c_energy".into(), format!("{:.17e}", self.c_energy)),
            ("rho_hat".into(), opt(self.rho_hat)),
            ("uniqueness_margin".into(), optb(self.uniqueness_margin)),
            ("kappa".into(), opt(self.kappa)),
            ("dset_ok".into(), optb(self.dset_ok)),
        ]
    }
}
