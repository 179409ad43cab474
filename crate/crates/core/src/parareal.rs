//! The parareal iteration.
//!
//! With coarse propagator `G` and fine propagator `F` on the uniform grid
//! `T_n = n dT`, each iteration computes
//!
//! ```text
//! u_{n+1}^{k+1} = G(T_n, u_n^{k+1}) + F(T_n, u_n^k) - G(T_n, u_n^k)
//! ```
//!
//! The `N` fine solves only read the previous iterate and run concurrently;
//! the correction is a sequential sweep in `n`. Fine results are stored by
//! subinterval index, so the outcome does not depend on the worker count.

use nalgebra::DVector;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::problems::IvpProblem;
use crate::propagators::{Propagator, PropagatorSpec};

/// How the zeroth iterate is produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Initialization {
    /// Sequential coarse propagation from `u0`.
    #[default]
    CoarseSweep,
    /// Components drawn uniformly from `[-1, 1]` with the given seed.
    Random(u64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParealConfig {
    pub t_final: f64,
    /// Number of coarse subintervals.
    pub n: usize,
    pub coarse: PropagatorSpec,
    pub fine: PropagatorSpec,
    /// Stop once the iteration error is at most `tol`.
    pub tol: f64,
    pub max_k: usize,
    pub init: Initialization,
    /// Fine-sweep worker threads; 0 uses the global rayon pool.
    pub workers: usize,
    /// Recompute `G(T_n, u_n^k)` instead of reusing the previous sweep.
    pub recompute_coarse: bool,
}

impl ParealConfig {
    pub fn new(t_final: f64, n: usize, coarse: PropagatorSpec, fine: PropagatorSpec) -> Self {
        Self {
            t_final,
            n,
            coarse,
            fine,
            tol: 1e-10,
            max_k: 50,
            init: Initialization::CoarseSweep,
            workers: 0,
            recompute_coarse: false,
        }
    }

    pub fn dt(&self) -> f64 {
        self.t_final / self.n as f64
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidParams("need at least one coarse subinterval".into()));
        }
        if !(self.dt() > 0.0) || !self.t_final.is_finite() {
            return Err(Error::InvalidParams(format!(
                "coarse step must be positive, got T = {}",
                self.t_final
            )));
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidParams("tolerance must be positive".into()));
        }
        if self.max_k == 0 {
            return Err(Error::InvalidParams("max_k must be >= 1".into()));
        }
        self.coarse.validate()?;
        self.fine.validate()
    }
}

/// Errors of the iterate `u^{k+1}`.
///
/// Records start at `k = 1`: the step away from the initial guess `u^0`
/// says nothing about convergence and is not recorded.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRecord {
    pub k: usize,
    /// `max_n |u_n^{k+1} - u_n^k|_inf`.
    pub iter_error: f64,
    /// `max_n |u_n^{k+1} - u(T_n)|_inf` when a reference is available.
    pub abs_error: Option<f64>,
    /// Per-component `max_n |u_{n,i}^{k+1} - u_i(T_n)|`.
    pub abs_error_components: Option<Vec<f64>>,
    /// Fine solves of this iteration that returned an unconverged (accepted)
    /// iterate.
    pub unconverged_fine: usize,
}

/// Iterate table and the coarse values cached for the next correction.
#[derive(Debug, Clone, PartialEq)]
pub struct ParealState {
    /// Index of the newest iterate.
    pub k: usize,
    /// `u_n^k`, `n = 0..=N`.
    pub u: Vec<DVector<f64>>,
    /// `u_n^{k-1}`; empty before the first iteration.
    pub u_prev: Vec<DVector<f64>>,
    /// `G(T_n, u_n^k)`, `n = 0..N`.
    pub g_prev: Vec<DVector<f64>>,
    pub history: Vec<ConvergenceRecord>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    /// Final states at `T_0, ..., T_N`.
    pub states: Vec<DVector<f64>>,
    pub history: Vec<ConvergenceRecord>,
}

impl RunOutcome {
    /// Index `k` of the last record; the run computed `k + 1` iterates.
    pub fn iterations(&self) -> usize {
        self.history.len()
    }
}

/// A configured parareal solver.
#[derive(Debug)]
pub struct Parareal {
    cfg: ParealConfig,
    coarse: Propagator,
    fine: Propagator,
    pool: Option<rayon::ThreadPool>,
}

fn max_diff(a: &[DVector<f64>], b: &[DVector<f64>]) -> f64 {
    a.iter()
        .zip(b)
        .skip(1)
        .map(|(x, y)| (x - y).amax())
        .fold(0.0, f64::max)
}

impl Parareal {
    pub fn new(cfg: ParealConfig) -> Result<Self> {
        cfg.validate()?;
        let coarse = Propagator::new(cfg.coarse.clone())?;
        let fine = Propagator::new(cfg.fine.clone())?;
        let pool = if cfg.workers > 0 {
            Some(
                rayon::ThreadPoolBuilder::new()
                    .num_threads(cfg.workers)
                    .build()
                    .map_err(|e| Error::InvalidParams(format!("thread pool: {e}")))?,
            )
        } else {
            None
        };
        Ok(Self {
            cfg,
            coarse,
            fine,
            pool,
        })
    }

    pub fn config(&self) -> &ParealConfig {
        &self.cfg
    }

    fn t(&self, n: usize) -> f64 {
        n as f64 * self.cfg.dt()
    }

    fn in_pool<T: Send>(&self, job: impl FnOnce() -> T + Send) -> T {
        match &self.pool {
            Some(pool) => pool.install(job),
            None => job(),
        }
    }

    fn coarse_step(&self, problem: &IvpProblem, n: usize, u: &DVector<f64>) -> Result<DVector<f64>> {
        self.coarse
            .advance(problem, self.t(n), u, self.cfg.dt())
            .map_err(|e| Error::Subinterval {
                index: n,
                source: Box::new(e),
            })
    }

    fn check_problem(&self, problem: &IvpProblem) -> Result<()> {
        if problem.u0.len() != problem.dim {
            return Err(Error::DimensionMismatch {
                expected: problem.dim,
                got: problem.u0.len(),
            });
        }
        Ok(())
    }

    /// Zeroth iterate and the coarse values `G(T_n, u_n^0)`.
    pub fn initialize(&self, problem: &IvpProblem) -> Result<ParealState> {
        self.check_problem(problem)?;
        let n = self.cfg.n;
        let mut u = Vec::with_capacity(n + 1);
        u.push(problem.u0.clone());
        let g_prev = match self.cfg.init {
            Initialization::CoarseSweep => {
                let mut g = Vec::with_capacity(n);
                for i in 0..n {
                    let next = self.coarse_step(problem, i, &u[i])?;
                    g.push(next.clone());
                    u.push(next);
                }
                g
            }
            Initialization::Random(seed) => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                for _ in 0..n {
                    u.push(DVector::from_fn(problem.dim, |_, _| rng.random_range(-1.0..=1.0)));
                }
                let mut g = Vec::with_capacity(n);
                for i in 0..n {
                    g.push(self.coarse_step(problem, i, &u[i])?);
                }
                g
            }
        };
        Ok(ParealState {
            k: 0,
            u,
            u_prev: Vec::new(),
            g_prev,
            history: Vec::new(),
        })
    }

    /// Concurrent fine solves `F(T_n, u_n^k)`, indexed by `n`.
    fn fine_sweep(&self, problem: &IvpProblem, u: &[DVector<f64>]) -> Result<(Vec<DVector<f64>>, usize)> {
        let dt = self.cfg.dt();
        let results: Vec<Result<(DVector<f64>, bool)>> = self.in_pool(|| {
            (0..self.cfg.n)
                .into_par_iter()
                .map(|i| self.fine.advance_with_status(problem, self.t(i), &u[i], dt))
                .collect()
        });
        let mut values = Vec::with_capacity(results.len());
        let mut failures = Vec::new();
        let mut unconverged = 0;
        for (i, r) in results.into_iter().enumerate() {
            match r {
                Ok((v, converged)) => {
                    unconverged += usize::from(!converged);
                    values.push(v);
                }
                Err(e) => failures.push(Error::Subinterval {
                    index: i,
                    source: Box::new(e),
                }),
            }
        }
        if !failures.is_empty() {
            return Err(Error::FineSweep(failures));
        }
        Ok((values, unconverged))
    }

    /// One parareal iteration: fine sweep, then sequential correction.
    pub fn iterate(&self, state: ParealState, problem: &IvpProblem) -> Result<ParealState> {
        let n = self.cfg.n;
        if state.u.len() != n + 1 || state.g_prev.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n + 1,
                got: state.u.len(),
            });
        }
        let (fine, unconverged_fine) = self.fine_sweep(problem, &state.u)?;

        let mut next = Vec::with_capacity(n + 1);
        next.push(problem.u0.clone());
        let mut g_new = Vec::with_capacity(n);
        for i in 0..n {
            let g_old = if self.cfg.recompute_coarse {
                self.coarse_step(problem, i, &state.u[i])?
            } else {
                state.g_prev[i].clone()
            };
            let g = self.coarse_step(problem, i, &next[i])?;
            next.push(&fine[i] + (&g - g_old));
            g_new.push(g);
        }

        let iter_error = max_diff(&next, &state.u);
        let (abs_error, abs_error_components) = match &problem.reference {
            Some(reference) => {
                let mut comp = vec![0.0f64; problem.dim];
                for (i, u) in next.iter().enumerate().skip(1) {
                    let diff = u - reference(self.t(i));
                    for (c, d) in comp.iter_mut().zip(diff.iter()) {
                        *c = c.max(d.abs());
                    }
                }
                let max = comp.iter().copied().fold(0.0, f64::max);
                (Some(max), Some(comp))
            }
            None => (None, None),
        };

        let mut history = state.history;
        if state.k > 0 {
            history.push(ConvergenceRecord {
                k: state.k,
                iter_error,
                abs_error,
                abs_error_components,
                unconverged_fine,
            });
        }
        Ok(ParealState {
            k: state.k + 1,
            u: next,
            u_prev: state.u,
            g_prev: g_new,
            history,
        })
    }

    /// Iterates until the iteration error reaches the tolerance.
    pub fn run(&self, problem: &IvpProblem) -> Result<RunOutcome> {
        let mut state = self.initialize(problem)?;
        loop {
            state = self.iterate(state, problem)?;
            let Some(last) = state.history.last().map(|r| r.iter_error) else {
                continue;
            };
            if !last.is_finite() {
                return Err(Error::MaxIterationsExceeded {
                    max_k: state.history.len(),
                    last,
                    history: state.history,
                });
            }
            if last <= self.cfg.tol {
                return Ok(RunOutcome {
                    states: state.u,
                    history: state.history,
                });
            }
            if state.history.len() >= self.cfg.max_k {
                return Err(Error::MaxIterationsExceeded {
                    max_k: self.cfg.max_k,
                    last,
                    history: state.history,
                });
            }
        }
    }

    /// Serial fine trajectory `F^n(u0)` at every coarse point.
    pub fn serial_fine(&self, problem: &IvpProblem) -> Result<Vec<DVector<f64>>> {
        let mut out = vec![problem.u0.clone()];
        for i in 0..self.cfg.n {
            let next = self.fine.advance(problem, self.t(i), &out[i], self.cfg.dt())?;
            out.push(next);
        }
        Ok(out)
    }
}

pub fn initialize(cfg: &ParealConfig, problem: &IvpProblem) -> Result<ParealState> {
    Parareal::new(cfg.clone())?.initialize(problem)
}

pub fn iterate(state: ParealState, cfg: &ParealConfig, problem: &IvpProblem) -> Result<ParealState> {
    Parareal::new(cfg.clone())?.iterate(state, problem)
}

pub fn run(cfg: &ParealConfig, problem: &IvpProblem) -> Result<RunOutcome> {
    Parareal::new(cfg.clone())?.run(problem)
}
