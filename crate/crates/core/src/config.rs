//! Run configuration: a flat key = value text format, one key per line,
//! `#` comments allowed. Diff-friendly and trivially parseable from any
//! language.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ForcingFamily {
    Zero,
    Mms,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProblemKind {
    Coupled,
    StokesOnly,
    MaxwellOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ForcingMode {
    Analytic,
    Discrete,
}

#[derive(Debug, Clone, Copy)]
pub struct ForcingSpec {
    pub family: ForcingFamily,
    pub problem: ProblemKind,
    pub mode: ForcingMode,
    pub amplitude: f64,
    pub modes: [u32; 3],
    pub coefficients: [f64; 3],
}

impl Default for ForcingSpec {
    fn default() -> Self {
        ForcingSpec {
            family: ForcingFamily::Mms,
            problem: ProblemKind::Coupled,
            mode: ForcingMode::Analytic,
            amplitude: 1e-2,
            modes: [1, 1, 1],
            coefficients: [1.0, -1.0, 0.0],
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SolverConfig {
    pub n: usize,
    /// Integrability exponent of g; any q > 3 is admissible.
    pub q: f64,
    /// Hall-term strength.
    pub mu: f64,
    /// Optional bound for the invariant-set check on ||B_k||_{W^{1,q1}}.
    pub kappa: Option<f64>,
    pub outer_tol: f64,
    pub inner_rtol: f64,
    pub max_outer: usize,
    pub max_inner: usize,
    pub forcing: ForcingSpec,
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            n: 16,
            q: 4.0,
            mu: 1.0,
            kappa: None,
            outer_tol: 1e-8,
            inner_rtol: 1e-10,
            max_outer: 200,
            max_inner: 500,
            forcing: ForcingSpec::default(),
            seed: 0,
        }
    }
}

impl SolverConfig {
    /// `q_1 = min(q, 6)`, the exponent the magnetic W^{1,q} bookkeeping uses.
    pub fn q1(&self) -> f64 {
        self.q.min(6.0)
    }

    pub fn validate(&self) -> Result<()> {
        if self.q <= 3.0 {
            return Err(Error::Config(format!("q = {} must be > 3", self.q)));
        }
        for (name, v) in [
            ("outer_tol", self.outer_tol),
            ("inner_rtol", self.inner_rtol),
        ] {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::Config(format!("{name} = {v} not in (0,1)")));
            }
        }
        if self.max_outer < 1 || self.max_inner < 1 {
            return Err(Error::Config("iteration caps must be >= 1".into()));
        }
        if self.mu < 0.0 || !self.mu.is_finite() {
            return Err(Error::Config(format!(
                "mu = {} must be finite and >= 0",
                self.mu
            )));
        }
        if !(self.forcing.amplitude.is_finite()) {
            return Err(Error::Config("forcing.amplitude must be finite".into()));
        }
        Ok(())
    }

    /// Solve runs additionally require n >= 8.
    pub fn validate_for_solve(&self) -> Result<()> {
        self.validate()?;
        if self.n < 8 {
            return Err(Error::Config(format!(
                "n = {} must be >= 8 for solve runs",
                self.n
            )));
        }
        Ok(())
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = SolverConfig::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!(
                    "line {}: expected key = value, got {raw:?}",
                    lineno + 1
                ))
            })?;
            let key = key.trim();
            let value = value.trim();
            let bad =
                |what: &str| Error::Config(format!("line {}: bad {what}: {value:?}", lineno + 1));
            match key {
                "n" => cfg.n = value.parse().map_err(|_| bad("n"))?,
                "q" => cfg.q = value.parse().map_err(|_| bad("q"))?,
                "mu" => cfg.mu = value.parse().map_err(|_| bad("mu"))?,
                "kappa" => {
                    cfg.kappa = if value.eq_ignore_ascii_case("disabled") || value.is_empty() {
                        None
                    } else {
                        Some(value.parse().map_err(|_| bad("kappa"))?)
                    }
                }
                "outer_tol" => cfg.outer_tol = value.parse().map_err(|_| bad("outer_tol"))?,
                "inner_rtol" => cfg.inner_rtol = value.parse().map_err(|_| bad("inner_rtol"))?,
                "max_outer" => cfg.max_outer = value.parse().map_err(|_| bad("max_outer"))?,
                "max_inner" => cfg.max_inner = value.parse().map_err(|_| bad("max_inner"))?,
                "seed" => cfg.seed = value.parse().map_err(|_| bad("seed"))?,
                "forcing.family" => {
                    cfg.forcing.family = match value {
                        "zero" => ForcingFamily::Zero,
                        "mms" => ForcingFamily::Mms,
                        _ => return Err(bad("forcing.family (zero|mms)")),
                    }
                }
                "forcing.problem" => {
                    cfg.forcing.problem = match value {
                        "coupled" => ProblemKind::Coupled,
                        "stokes-only" => ProblemKind::StokesOnly,
                        "maxwell-only" => ProblemKind::MaxwellOnly,
                        _ => return Err(bad("forcing.problem (coupled|stokes-only|maxwell-only)")),
                    }
                }
                "forcing.mode" => {
                    cfg.forcing.mode = match value {
                        "analytic" => ForcingMode::Analytic,
                        "discrete" => ForcingMode::Discrete,
                        _ => return Err(bad("forcing.mode (analytic|discrete)")),
                    }
                }
                "forcing.amplitude" => {
                    cfg.forcing.amplitude = value.parse().map_err(|_| bad("forcing.amplitude"))?
                }
                "forcing.modes" => {
                    let parts: Vec<_> = value.split(',').map(str::trim).collect();
                    if parts.len() != 3 {
                        return Err(bad("forcing.modes (three comma-separated integers)"));
                    }
                    for (slot, p) in cfg.forcing.modes.iter_mut().zip(parts) {
                        *slot = p.parse().map_err(|_| bad("forcing.modes"))?;
                    }
                }
                "forcing.coefficients" => {
                    let parts: Vec<_> = value.split(',').map(str::trim).collect();
                    if parts.len() != 3 {
                        return Err(bad("forcing.coefficients (three comma-separated reals)"));
                    }
                    for (slot, p) in cfg.forcing.coefficients.iter_mut().zip(parts) {
                        *slot = p.parse().map_err(|_| bad("forcing.coefficients"))?;
                    }
                }
                other => {
                    return Err(Error::Config(format!(
                        "line {}: unknown key {other:?}",
                        lineno + 1
                    )))
                }
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_text(&self) -> String {
        let kappa = match self.kappa {
            Some(k) => format!("{k:.17e}"),
            None => "disabled".into(),
        };
        let family = match self.forcing.family {
            ForcingFamily::Zero => "zero",
            ForcingFamily::Mms => "mms",
        };
        let problem = match self.forcing.problem {
            ProblemKind::Coupled => "coupled",
            ProblemKind::StokesOnly => "stokes-only",
            ProblemKind::MaxwellOnly => "maxwell-only",
        };
        let mode = match self.forcing.mode {
            ForcingMode::Analytic => "analytic",
            ForcingMode::Discrete => "discrete",
        };
        format!(
            "n = {}\nq = {:.17e}\nmu = {:.17e}\nkappa = {}\nouter_tol = {:.17e}\ninner_rtol = {:.17e}\nmax_outer = {}\nmax_inner = {}\nseed = {}\nforcing.family = {}\nforcing.problem = {}\nforcing.mode = {}\nforcing.amplitude = {:.17e}\nforcing.modes = {},{},{}\nforcing.coefficients = {:.17e},{:.17e},{:.17e}\n",
            self.n,
            self.q,
            self.mu,
            kappa,
            self.outer_tol,
            self.inner_rtol,
            self.max_outer,
            self.max_inner,
            self.seed,
            family,
            problem,
            mode,
            self.forcing.amplitude,
            self.forcing.modes[0],
            self.forcing.modes[1],
            self.forcing.modes[2],
            self.forcing.coefficients[0],
            self.forcing.coefficients[1],
            self.forcing.coefficients[2],
        )
    }
}
