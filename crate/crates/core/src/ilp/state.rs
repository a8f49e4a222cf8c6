use super::{EnergyParams, FeasTolerance, IlpInstance};
use crate::error::{Error, Result};

/// Committed flips between full recomputations of the caches.
pub const CACHE_REFRESH_INTERVAL: usize = 100_000;

/// One replica: a binary assignment plus incrementally maintained caches.
///
/// Besides the objective, row activities, total violation and energy, the
/// state keeps `pen_delta[j]`, the change in total violation caused by
/// flipping variable `j`. That vector is independent of λ, so a state can
/// move between chains with different penalty weights and only its energy
/// needs re-evaluating.
#[derive(Debug, Clone)]
pub struct ChainState {
    x: Vec<bool>,
    obj: f64,
    act: Vec<f64>,
    viol: f64,
    energy: f64,
    params: EnergyParams,
    tol: FeasTolerance,
    pen_delta: Vec<f64>,
    /// Rows with activity strictly above rhs.
    violated_rows: usize,
    /// Rows with activity above rhs + eps.
    infeasible_rows: usize,
    commits: usize,
    scratch: Scratch,
}

#[derive(Debug, Clone, Default)]
struct Scratch {
    row_stamp: Vec<u32>,
    stamp: u32,
    in_flip: Vec<bool>,
    touched: Vec<usize>,
}

/// Everything needed to restore a state bit-for-bit after a rejected move.
#[derive(Debug, Clone, Default)]
pub struct FlipLog {
    flips: Vec<usize>,
    obj: f64,
    viol: f64,
    energy: f64,
    violated_rows: usize,
    infeasible_rows: usize,
    act: Vec<(usize, f64)>,
    pen: Vec<(usize, f64)>,
}

impl FlipLog {
    pub fn flips(&self) -> &[usize] {
        &self.flips
    }
}

impl ChainState {
    pub fn new(inst: &IlpInstance, x0: &[bool], params: EnergyParams) -> Result<Self> {
        Self::with_tolerance(inst, x0, params, FeasTolerance::default())
    }

    pub fn with_tolerance(
        inst: &IlpInstance,
        x0: &[bool],
        params: EnergyParams,
        tol: FeasTolerance,
    ) -> Result<Self> {
        inst.check_len(x0)?;
        let mut state = ChainState {
            x: x0.to_vec(),
            obj: 0.0,
            act: Vec::new(),
            viol: 0.0,
            energy: 0.0,
            params,
            tol,
            pen_delta: Vec::new(),
            violated_rows: 0,
            infeasible_rows: 0,
            commits: 0,
            scratch: Scratch {
                row_stamp: vec![0; inst.m()],
                stamp: 0,
                in_flip: vec![false; inst.n()],
                touched: Vec::new(),
            },
        };
        state.refresh(inst);
        Ok(state)
    }

    /// Recomputes every cache from the assignment alone.
    pub fn refresh(&mut self, inst: &IlpInstance) {
        let p = self.params.exponent();
        let eps = self.tol.eps();
        self.obj = inst.objective_unchecked(&self.x);
        self.act = inst.activities_unchecked(&self.x);
        self.viol = 0.0;
        self.violated_rows = 0;
        self.infeasible_rows = 0;
        for (a, b) in self.act.iter().zip(inst.rhs()) {
            self.viol += p.penalty(a - b);
            self.violated_rows += usize::from(*a > *b);
            self.infeasible_rows += usize::from(*a > b + eps);
        }
        self.pen_delta = (0..inst.n()).map(|j| self.column_pen_delta(inst, j)).collect();
        self.energy = self.obj + self.params.lambda() * self.viol;
        self.commits = 0;
    }

    pub fn x(&self) -> &[bool] {
        &self.x
    }

    pub fn objective(&self) -> f64 {
        self.obj
    }

    pub fn activities(&self) -> &[f64] {
        &self.act
    }

    pub fn violation(&self) -> f64 {
        self.viol
    }

    pub fn energy(&self) -> f64 {
        self.energy
    }

    pub fn params(&self) -> EnergyParams {
        self.params
    }

    pub fn tolerance(&self) -> FeasTolerance {
        self.tol
    }

    /// Feasibility under the state's tolerance, from the cached row counts.
    pub fn is_feasible(&self) -> bool {
        self.infeasible_rows == 0
    }

    /// Re-targets the state to a new penalty weight; only the energy changes.
    pub fn set_lambda(&mut self, lambda: f64) -> Result<()> {
        self.params = self.params.with_lambda(lambda)?;
        self.energy = self.obj + lambda * self.viol;
        Ok(())
    }

    #[inline]
    fn sign(&self, j: usize) -> f64 {
        if self.x[j] {
            -1.0
        } else {
            1.0
        }
    }

    fn column_pen_delta(&self, inst: &IlpInstance, j: usize) -> f64 {
        let p = self.params.exponent();
        let s = self.sign(j);
        let b = inst.rhs();
        inst.col(j)
            .map(|(r, a)| {
                let excess = self.act[r] - b[r];
                p.penalty(excess + s * a) - p.penalty(excess)
            })
            .sum()
    }

    /// `E(x^{-j}) − E(x)` for a single `j`, touching only column `j`.
    pub fn flip_delta(&self, inst: &IlpInstance, j: usize) -> f64 {
        let dobj = inst.objective_coeffs()[j] * self.sign(j);
        dobj + self.params.lambda() * self.column_pen_delta(inst, j)
    }

    /// `E(x^{-j}) − E(x)` for every `j` by a sweep over the column-major
    /// layout: `O(n + nnz)`.
    pub fn flip_deltas(&self, inst: &IlpInstance) -> Vec<f64> {
        (0..inst.n()).map(|j| self.flip_delta(inst, j)).collect()
    }

    /// Same quantities as [`flip_deltas`](Self::flip_deltas) from the cached
    /// per-variable violation deltas, in `O(n)`.
    pub fn cached_flip_deltas(&self, inst: &IlpInstance, out: &mut Vec<f64>) {
        let lambda = self.params.lambda();
        out.clear();
        out.extend(
            inst.objective_coeffs()
                .iter()
                .zip(&self.x)
                .zip(&self.pen_delta)
                .map(|((&c, &on), &dp)| {
                    let s = if on { -1.0 } else { 1.0 };
                    c * s + lambda * dp
                }),
        );
    }

    /// Toggles every index in `flips` and commits the move.
    pub fn apply_flips(&mut self, inst: &IlpInstance, flips: &[usize]) -> Result<()> {
        let mut log = FlipLog::default();
        self.apply_flips_logged(inst, flips, &mut log)?;
        self.commit(inst);
        Ok(())
    }

    /// Counts a committed move and recomputes caches every
    /// [`CACHE_REFRESH_INTERVAL`] commits to bound floating-point drift.
    pub fn commit(&mut self, inst: &IlpInstance) {
        self.commits += 1;
        if self.commits >= CACHE_REFRESH_INTERVAL {
            self.refresh(inst);
        }
    }

    /// Toggles `flips`, updating every cache incrementally, and records what
    /// is needed to [`undo`](Self::undo) the move exactly.
    pub fn apply_flips_logged(
        &mut self,
        inst: &IlpInstance,
        flips: &[usize],
        log: &mut FlipLog,
    ) -> Result<()> {
        let n = inst.n();
        for (pos, &j) in flips.iter().enumerate() {
            let err = if j >= n {
                Some(Error::IndexOutOfRange { index: j, limit: n })
            } else if self.scratch.in_flip[j] {
                Some(Error::DuplicateIndex(j))
            } else {
                None
            };
            if let Some(err) = err {
                for &k in &flips[..pos] {
                    self.scratch.in_flip[k] = false;
                }
                return Err(err);
            }
            self.scratch.in_flip[j] = true;
        }

        log.flips.clear();
        log.flips.extend_from_slice(flips);
        log.obj = self.obj;
        log.viol = self.viol;
        log.energy = self.energy;
        log.violated_rows = self.violated_rows;
        log.infeasible_rows = self.infeasible_rows;
        log.act.clear();
        log.pen.clear();

        if self.scratch.stamp == u32::MAX {
            self.scratch.row_stamp.iter_mut().for_each(|s| *s = 0);
            self.scratch.stamp = 0;
        }
        self.scratch.stamp += 1;
        let stamp = self.scratch.stamp;
        self.scratch.touched.clear();

        let c = inst.objective_coeffs();
        for &j in flips {
            let s = self.sign(j);
            self.obj += c[j] * s;
            for (r, a) in inst.col(j) {
                if self.scratch.row_stamp[r] != stamp {
                    self.scratch.row_stamp[r] = stamp;
                    self.scratch.touched.push(r);
                    log.act.push((r, self.act[r]));
                }
                self.act[r] += s * a;
            }
        }

        let p = self.params.exponent();
        let eps = self.tol.eps();
        let b = inst.rhs();
        for &(r, old) in &log.act {
            let new = self.act[r];
            let ex_old = old - b[r];
            let ex_new = new - b[r];
            self.viol += p.penalty(ex_new) - p.penalty(ex_old);
            self.violated_rows = self.violated_rows + usize::from(new > b[r]) - usize::from(old > b[r]);
            self.infeasible_rows =
                self.infeasible_rows + usize::from(new > b[r] + eps) - usize::from(old > b[r] + eps);
            for (k, a) in inst.row(r) {
                if self.scratch.in_flip[k] {
                    continue;
                }
                let sa = self.sign(k) * a;
                let d = (p.penalty(ex_new + sa) - p.penalty(ex_new))
                    - (p.penalty(ex_old + sa) - p.penalty(ex_old));
                if d != 0.0 {
                    log.pen.push((k, self.pen_delta[k]));
                    self.pen_delta[k] += d;
                }
            }
        }
        if self.violated_rows == 0 {
            self.viol = 0.0;
        }

        for &j in flips {
            self.x[j] = !self.x[j];
            self.scratch.in_flip[j] = false;
        }
        for &j in flips {
            log.pen.push((j, self.pen_delta[j]));
            self.pen_delta[j] = self.column_pen_delta(inst, j);
        }
        self.energy = self.obj + self.params.lambda() * self.viol;
        Ok(())
    }

    /// Restores the state recorded in `log`, bit-for-bit.
    pub fn undo(&mut self, log: &FlipLog) {
        for &(k, v) in log.pen.iter().rev() {
            self.pen_delta[k] = v;
        }
        for &(r, v) in log.act.iter().rev() {
            self.act[r] = v;
        }
        for &j in &log.flips {
            self.x[j] = !self.x[j];
        }
        self.obj = log.obj;
        self.viol = log.viol;
        self.energy = log.energy;
        self.violated_rows = log.violated_rows;
        self.infeasible_rows = log.infeasible_rows;
    }
}
