use crate::error::{Error, Result};

/// Implicit one-step or multistep rule used by both solvers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Integrator {
    #[default]
    ImplicitTrapezoid,
    /// Second-order backward differentiation, started by one trapezoid step.
    Bdf2,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub kappa: f64,
    pub gamma: f64,
    /// Sine modes of the Galerkin solver.
    pub n_modes: usize,
    /// Polynomial degree of the collocation solver and of stored states.
    pub collocation_degree: usize,
    pub dt: f64,
    pub t_final: f64,
    pub picard_tol: f64,
    pub picard_max_iter: usize,
    pub time_integrator: Integrator,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            kappa: 0.0,
            gamma: 2.0,
            n_modes: 64,
            collocation_degree: 64,
            dt: 1e-4,
            t_final: 0.1,
            picard_tol: 1e-10,
            picard_max_iter: 50,
            time_integrator: Integrator::ImplicitTrapezoid,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.kappa >= 0.0) || !self.kappa.is_finite() {
            return Err(Error::config("kappa", "must be a finite non-negative number"));
        }
        if !(self.gamma > 1.0) || !self.gamma.is_finite() {
            return Err(Error::config("gamma", "must exceed 1"));
        }
        if self.n_modes == 0 {
            return Err(Error::config("n_modes", "must be positive"));
        }
        if self.collocation_degree < 4 {
            return Err(Error::config("collocation_degree", "must be at least 4"));
        }
        if !(self.dt > 0.0) {
            return Err(Error::config("dt", "must be positive"));
        }
        if !(self.t_final > 0.0) || !self.t_final.is_finite() {
            return Err(Error::config("t_final", "must be positive"));
        }
        if self.dt >= self.t_final {
            return Err(Error::config("dt", "must be smaller than t_final"));
        }
        if !(self.picard_tol > 0.0) {
            return Err(Error::config("picard_tol", "must be positive"));
        }
        if self.picard_max_iter == 0 {
            return Err(Error::config("picard_max_iter", "must be positive"));
        }
        Ok(())
    }

    /// Number of steps and the step actually used (`t_final / steps`).
    pub fn steps(&self) -> (usize, f64) {
        let n = (self.t_final / self.dt).round().max(1.0) as usize;
        (n, self.t_final / n as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_is_valid_and_step_count_is_exact() {
        let c = SolverConfig::default();
        c.validate().unwrap();
        assert_eq!(c.steps().0, 1000);
    }

    #[test]
    fn invalid_fields_are_named() {
        let c = SolverConfig {
            dt: 1.0,
            t_final: 0.5,
            ..SolverConfig::default()
        };
        match c.validate().unwrap_err() {
            Error::ConfigInvalid { field, .. } => assert_eq!(field, "dt"),
            e => panic!("{e:?}"),
        }
    }
}
