//! Convex-roof engine.
//!
//! Every size-`r` pure-state decomposition of a density operator is reached
//! from its spectral root vectors `|psi~_j> = sqrt(e_j) |v_j>` by an `r x r`
//! unitary: `|phi~_k> = sum_j U_kj |psi~_j>`, `p_k = <phi~_k|phi~_k>`. The
//! optimizer searches this unitary chart by cyclic sweeps of two-level
//! complex rotations, each followed by a bracketed golden-section line search
//! over the rotation angle and then its phase. A move is applied only when it
//! strictly improves the objective, so the per-sweep trace is monotone.

use std::f64::consts::PI;

use nalgebra::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::measures::{clamp_nonneg, negativity_mixed, BoundKind, PureMeasure};
use crate::qlinalg::{
    hermitian_eigenvalues, max_abs, spectral_decomposition, Bipartition, CMatrix, CVector,
    DensityOperator, DimensionProfile, PureState, Split, TOL_RANK,
};
use crate::scalar::{lit, re, tol, Real, C};

/// Minimization starts are first relaxed on smoothed objectives
/// `sqrt(g + eps w^2)`, one stage per entry: coordinate moves stall at the
/// kinks where members become product states.
const SMOOTHING: [f64; 5] = [1e-2, 1e-3, 1e-4, 1e-5, 1e-6];
const SMOOTHING_SWEEPS: usize = 40;
const SMOOTHING_TOL: f64 = 1e-8;

/// Members lighter than this are dropped from decompositions.
pub const TOL_PRUNE: f64 = 1e-14;
/// Root-set reconstruction tolerance.
pub const TOL_ROOTS: f64 = 1e-9;
/// Decomposition reconstruction tolerance (Frobenius).
pub const TOL_RECONSTRUCT: f64 = 1e-8;
/// Unitarity tolerance for [`decomposition_from_unitary`].
pub const TOL_UNITARY: f64 = 1e-10;
/// Largest default decomposition size.
pub const MAX_DEFAULT_SIZE: usize = 16;

const GRID_POINTS: usize = 12;
const GOLDEN_WIDTH: f64 = 1e-7;

/// Unnormalized spectral root vectors of a density operator.
#[derive(Debug, Clone)]
pub struct RootSet<T: Real> {
    profile: DimensionProfile,
    roots: Vec<CVector<T>>,
}

impl<T: Real> RootSet<T> {
    pub fn from_density(rho: &DensityOperator<T>) -> Result<Self> {
        let spec = spectral_decomposition(rho);
        let roots: Vec<CVector<T>> = spec
            .pairs
            .iter()
            .take(spec.rank)
            .map(|(e, v)| v * re(e.sqrt()))
            .collect();
        let set = Self {
            profile: rho.profile().clone(),
            roots,
        };
        let err = max_abs(&(set.reconstruct() - rho.matrix()));
        if err > tol::<T>(TOL_ROOTS) {
            return Err(Error::Numerical(format!(
                "spectral roots rebuild the state only to {:.3e}",
                err.to_f64()
            )));
        }
        Ok(set)
    }

    pub fn profile(&self) -> &DimensionProfile {
        &self.profile
    }

    pub fn roots(&self) -> &[CVector<T>] {
        &self.roots
    }

    pub fn rank(&self) -> usize {
        self.roots.len()
    }

    /// `sum_j |psi~_j><psi~_j|`.
    pub fn reconstruct(&self) -> CMatrix<T> {
        let n = self.profile.total();
        let mut m = CMatrix::zeros(n, n);
        for v in &self.roots {
            m += v * v.adjoint();
        }
        m
    }

    /// Rows `sum_j U_kj |psi~_j>`, with the roots padded by zero vectors to
    /// the size of `u`.
    fn mix(&self, u: &CMatrix<T>) -> Vec<CVector<T>> {
        let n = self.profile.total();
        (0..u.nrows())
            .map(|k| {
                let mut row = CVector::zeros(n);
                for (j, root) in self.roots.iter().enumerate() {
                    row += root * u[(k, j)];
                }
                row
            })
            .collect()
    }
}

/// Weights and normalized pure states reconstructing a density operator.
#[derive(Debug, Clone)]
pub struct Decomposition<T: Real> {
    weights: Vec<T>,
    states: Vec<PureState<T>>,
}

impl<T: Real> Decomposition<T> {
    /// From unnormalized members; members below [`TOL_PRUNE`] are dropped.
    fn from_unnormalized(profile: &DimensionProfile, rows: &[CVector<T>]) -> Self {
        let mut weights = Vec::new();
        let mut states = Vec::new();
        for row in rows {
            let w = row.norm_squared();
            if w < tol::<T>(TOL_PRUNE) {
                continue;
            }
            weights.push(w);
            states.push(PureState::from_parts_unchecked(
                profile.clone(),
                row.unscale(w.sqrt()),
            ));
        }
        Self { weights, states }
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn states(&self) -> &[PureState<T>] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// `sum_k p_k |phi_k><phi_k|`.
    pub fn reconstruct(&self) -> CMatrix<T> {
        let n = self.states.first().map_or(0, |s| s.profile().total());
        let mut m = CMatrix::zeros(n, n);
        for (w, s) in self.weights.iter().zip(&self.states) {
            let v = s.amplitudes();
            m += (v * v.adjoint()) * re(*w);
        }
        m
    }

    /// Frobenius distance between the reconstruction and `rho`.
    pub fn reconstruction_error(&self, rho: &DensityOperator<T>) -> T {
        (self.reconstruct() - rho.matrix()).norm()
    }
}

/// Largest elementwise deviation of `U^dagger U` from the identity.
pub fn unitarity_error<T: Real>(u: &CMatrix<T>) -> T {
    if u.nrows() != u.ncols() {
        return T::max_value().unwrap_or_else(T::one);
    }
    let n = u.nrows();
    max_abs(&(u.adjoint() * u - CMatrix::identity(n, n)))
}

/// The decomposition `|phi~_k> = sum_j U_kj |psi~_j>` selected by `u`.
pub fn decomposition_from_unitary<T: Real>(
    roots: &RootSet<T>,
    u: &CMatrix<T>,
) -> Result<Decomposition<T>> {
    let err = unitarity_error(u);
    if err > tol::<T>(TOL_UNITARY) {
        return Err(Error::domain(format!(
            "mixing matrix is not unitary (deviation {:.3e})",
            err.to_f64()
        )));
    }
    if u.nrows() < roots.rank() {
        return Err(Error::domain(format!(
            "a {0}x{0} unitary cannot mix {1} roots",
            u.nrows(),
            roots.rank()
        )));
    }
    Ok(Decomposition::from_unnormalized(
        roots.profile(),
        &roots.mix(u),
    ))
}

/// `sum_k p_k f(|phi_k>)` for a pure-state measure `f`.
pub fn average_measure<T: Real>(
    dec: &Decomposition<T>,
    cut: &Bipartition,
    measure: PureMeasure,
) -> Result<T> {
    let mut acc = T::zero();
    for (w, s) in dec.weights.iter().zip(&dec.states) {
        acc += *w * measure.pure_value(s, cut)?;
    }
    Ok(acc)
}

/// `sum_k p_k N(|phi_k>)`.
pub fn average_negativity<T: Real>(dec: &Decomposition<T>, cut: &Bipartition) -> Result<T> {
    average_measure(dec, cut, PureMeasure::Negativity)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Min,
    Max,
}

impl Direction {
    pub fn bound_kind(self) -> BoundKind {
        match self {
            Direction::Min => BoundKind::UpperBound,
            Direction::Max => BoundKind::LowerBound,
        }
    }
}

/// Optimizer settings.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptConfig {
    /// Decomposition cardinality; `None` picks `rank^2` capped at 16 (and
    /// never below the rank).
    pub size: Option<usize>,
    pub starts: usize,
    pub max_sweeps: usize,
    pub tol_rel: f64,
    pub seed: u64,
}

impl Default for OptConfig {
    fn default() -> Self {
        Self {
            size: None,
            starts: 8,
            max_sweeps: 200,
            tol_rel: 1e-10,
            seed: 0,
        }
    }
}

impl OptConfig {
    pub fn resolved_size(&self, rank: usize) -> Result<usize> {
        let size = self.size.unwrap_or_else(|| default_size(rank));
        if size < rank {
            return Err(Error::domain(format!(
                "decomposition size {size} is below the rank {rank}"
            )));
        }
        Ok(size)
    }

    fn validate(&self) -> Result<()> {
        if self.starts == 0 {
            return Err(Error::domain("optimizer needs at least one start"));
        }
        if self.tol_rel.is_nan() || self.tol_rel <= 0.0 {
            return Err(Error::domain("tol_rel must be positive"));
        }
        Ok(())
    }
}

pub fn default_size(rank: usize) -> usize {
    (rank * rank).min(MAX_DEFAULT_SIZE).max(rank)
}

#[derive(Debug, Clone)]
pub struct OptResult<T: Real> {
    pub value: T,
    pub decomposition: Decomposition<T>,
    pub direction: Direction,
    pub measure: PureMeasure,
    /// Objective after the initial point and after every sweep of the
    /// winning start.
    pub trace: Vec<T>,
    pub bound_kind: BoundKind,
    /// False when the winning start hit `max_sweeps` before `tol_rel`.
    pub converged: bool,
    pub size: usize,
    pub best_start: usize,
}

/// Convex-roof extended negativity (`Min`) or its assistance dual (`Max`).
pub fn optimize<T: Real>(
    rho: &DensityOperator<T>,
    cut: &Bipartition,
    direction: Direction,
    cfg: &OptConfig,
) -> Result<OptResult<T>> {
    optimize_roof(rho, cut, PureMeasure::Negativity, direction, cfg)
}

/// Minimizes or maximizes the average of `measure` over decompositions of
/// `rho`.
pub fn optimize_roof<T: Real>(
    rho: &DensityOperator<T>,
    cut: &Bipartition,
    measure: PureMeasure,
    direction: Direction,
    cfg: &OptConfig,
) -> Result<OptResult<T>> {
    cfg.validate()?;
    cut.check(rho.profile())?;
    let roots = RootSet::from_density(rho)?;
    let rank = roots.rank();
    if rank == 0 {
        return Err(Error::domain("density operator has rank zero"));
    }
    let size = cfg.resolved_size(rank)?;
    let split = Split::for_cut(rho.profile(), cut);

    if rank == 1 {
        let dec = Decomposition::from_unnormalized(rho.profile(), roots.roots());
        let value = average_measure(&dec, cut, measure)?;
        return Ok(OptResult {
            value,
            decomposition: dec,
            direction,
            measure,
            trace: vec![value],
            bound_kind: BoundKind::Exact,
            converged: true,
            size: 1,
            best_start: 0,
        });
    }

    let table = SmallSide::new(&split);
    let landscape = Landscape {
        side: &table,
        measure,
        sign: match direction {
            Direction::Min => T::one(),
            Direction::Max => -T::one(),
        },
        eps: T::zero(),
    };
    let runs: Vec<Run<T>> = (0..cfg.starts)
        .into_par_iter()
        .map(|start| {
            let u = if start == 0 {
                CMatrix::identity(size, size)
            } else {
                let mut rng = start_rng(cfg.seed, start as u64);
                haar_unitary(size, &mut rng)
            };
            let mut rows = roots.mix(&u);
            if direction == Direction::Min {
                for &eps in &SMOOTHING {
                    let smooth = Landscape {
                        eps: lit(eps),
                        ..landscape
                    };
                    rows = smooth.descend(rows, SMOOTHING_SWEEPS, SMOOTHING_TOL).rows;
                }
            }
            landscape.descend(rows, cfg.max_sweeps, cfg.tol_rel)
        })
        .collect();

    let (best_start, best) = runs
        .into_iter()
        .enumerate()
        .reduce(|acc, cur| if cur.1.cost < acc.1.cost { cur } else { acc })
        .expect("at least one start");

    let dec = Decomposition::from_unnormalized(rho.profile(), &best.rows);
    let err = dec.reconstruction_error(rho);
    if err > tol::<T>(TOL_RECONSTRUCT) {
        return Err(Error::Numerical(format!(
            "optimized decomposition rebuilds the state only to {:.3e}",
            err.to_f64()
        )));
    }
    let value = best
        .rows
        .iter()
        .fold(T::zero(), |acc, r| acc + measure.weighted(r, &split));
    Ok(OptResult {
        value,
        decomposition: dec,
        direction,
        measure,
        trace: best.trace.iter().map(|&c| c * landscape.sign).collect(),
        bound_kind: direction.bound_kind(),
        converged: best.converged,
        size,
        best_start,
    })
}

fn start_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

struct Run<T: Real> {
    rows: Vec<CVector<T>>,
    cost: T,
    trace: Vec<T>,
    converged: bool,
}

/// Index table laying a vector out as its coefficient matrix with the
/// smaller side of the cut as rows: entry `(i, x)` sits at `idx[i * m + x]`.
struct SmallSide {
    idx: Vec<usize>,
    k: usize,
    m: usize,
}

impl SmallSide {
    fn new(split: &Split) -> Self {
        let (rows, cols) = (split.rows(), split.cols());
        let (k, m) = (rows.min(cols), rows.max(cols));
        let idx = (0..k * m)
            .map(|n| {
                let (i, x) = (n / m, n % m);
                if rows <= cols {
                    split.full(i, x)
                } else {
                    split.full(x, i)
                }
            })
            .collect();
        Self { idx, k, m }
    }

    /// `A B'` for the coefficient matrices of `a` and `b`, row-major k x k.
    fn gram<T: Real>(&self, a: &CVector<T>, b: &CVector<T>) -> Vec<C<T>> {
        let (k, m) = (self.k, self.m);
        let mut out = vec![C::new(T::zero(), T::zero()); k * k];
        for i in 0..k {
            for j in 0..k {
                let mut acc = C::new(T::zero(), T::zero());
                for x in 0..m {
                    acc += a[self.idx[i * m + x]] * b[self.idx[j * m + x]].conj();
                }
                out[i * k + j] = acc;
            }
        }
        out
    }
}

/// `tr(X Y)` for row-major k x k matrices.
fn trace_prod<T: Real>(x: &[C<T>], y: &[C<T>], k: usize) -> C<T> {
    let mut acc = C::new(T::zero(), T::zero());
    for i in 0..k {
        for j in 0..k {
            acc += x[i * k + j] * y[j * k + i];
        }
    }
    acc
}

fn real_trace<T: Real>(x: &[C<T>], k: usize) -> T {
    (0..k).fold(T::zero(), |acc, i| acc + x[i * k + i].re)
}

fn frob_sq<T: Real>(x: &[C<T>]) -> T {
    x.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr())
}

#[derive(Clone, Copy)]
struct Landscape<'a, T: Real> {
    side: &'a SmallSide,
    measure: PureMeasure,
    /// `+1` minimizes the measure, `-1` maximizes it.
    sign: T,
    /// Smoothing of the measure; zero for the exact objective.
    eps: T,
}

impl<T: Real> Landscape<'_, T> {
    /// True when the measure depends on the reduced operator only through
    /// `tr R` and `tr R^2`.
    fn quadratic(&self) -> bool {
        self.measure == PureMeasure::Concurrence || self.side.k == 2
    }

    fn cost(&self, row: &CVector<T>) -> T {
        let k = self.side.k;
        let p = self.side.gram(row, row);
        let value = if self.quadratic() {
            let w = real_trace(&p, k);
            self.measure.of_invariants(w, w * w - frob_sq(&p), self.eps)
        } else {
            self.measure
                .smoothed(&CMatrix::from_row_slice(k, k, &p), self.eps)
        };
        self.sign * value
    }

    fn descend(&self, mut rows: Vec<CVector<T>>, max_sweeps: usize, tol_rel: f64) -> Run<T> {
        let r = rows.len();
        let mut costs: Vec<T> = rows.iter().map(|row| self.cost(row)).collect();
        let total = |costs: &[T]| costs.iter().fold(T::zero(), |a, &b| a + b);
        let mut current = total(&costs);
        let mut trace = vec![current];
        let mut converged = false;
        let tol_rel: T = lit(tol_rel);
        let floor: T = lit(1e-300);

        for _ in 0..max_sweeps {
            for k in 0..r {
                for l in k + 1..r {
                    if let Some((rk, rl, ck, cl)) =
                        self.improve_pair(&rows[k], &rows[l], costs[k] + costs[l])
                    {
                        rows[k] = rk;
                        rows[l] = rl;
                        costs[k] = ck;
                        costs[l] = cl;
                    }
                }
            }
            // Recompute from scratch so rounding in the running sum cannot
            // break monotonicity.
            costs = rows.iter().map(|row| self.cost(row)).collect();
            let next = total(&costs).min(current);
            let gain = current - next;
            trace.push(next);
            current = next;
            if gain <= tol_rel * next.abs().max(floor) {
                converged = true;
                break;
            }
        }
        Run {
            rows,
            cost: current,
            trace,
            converged,
        }
    }

    /// Best two-level rotation of rows `(a, b)`; `None` when no strict
    /// improvement over `base` was found.
    fn improve_pair(
        &self,
        a: &CVector<T>,
        b: &CVector<T>,
        base: T,
    ) -> Option<(CVector<T>, CVector<T>, T, T)> {
        let rotate = |theta: T, phi: T| {
            let (s, c) = (theta.sin(), theta.cos());
            let e = Complex::new(phi.cos(), phi.sin());
            let ra = a * re(c) + b * (e * s);
            let rb = b * re(c) - a * (e.conj() * s);
            (ra, rb)
        };
        // With A, B the coefficient matrices of the two rows (smaller side
        // first), the rotated reduced operators are
        //   R_a = c^2 AA' + s^2 BB' + cs X,  R_b = c^2 BB' + s^2 AA' - cs X,
        // X = e* AB' + e BA'.
        let k = self.side.k;
        let gaa = self.side.gram(a, a);
        let gbb = self.side.gram(b, b);
        let gab = self.side.gram(a, b);
        let form = self.quadratic().then(|| PairForm::new(&gaa, &gbb, &gab, k));
        let form = form.as_ref();
        let general = |c: T, s: T, phi: T| {
            let e = Complex::new(phi.cos(), phi.sin());
            let (cc, ss, cs) = (re(c * c), re(s * s), re(c * s));
            let x =
                |i: usize, j: usize| (e.conj() * gab[i * k + j] + e * gab[j * k + i].conj()) * cs;
            let ra = CMatrix::from_fn(k, k, |i, j| {
                gaa[i * k + j] * cc + gbb[i * k + j] * ss + x(i, j)
            });
            let rb = CMatrix::from_fn(k, k, |i, j| {
                gbb[i * k + j] * cc + gaa[i * k + j] * ss - x(i, j)
            });
            self.sign
                * (self.measure.smoothed(&ra, self.eps) + self.measure.smoothed(&rb, self.eps))
        };
        let quartic = |f: &PairForm<T>, ph: &PhaseTerms<T>, c: T, s: T| {
            let ((wa, ga), (wb, gb)) = f.eval(ph, c, s);
            self.sign
                * (self.measure.of_invariants(wa, ga, self.eps)
                    + self.measure.of_invariants(wb, gb, self.eps))
        };
        // Angle search at fixed phase, then phase search at fixed angle.
        let along_theta = |phi: T| {
            let ph = form.map(|f| f.phase(phi));
            move |theta: T| {
                let (s, c) = theta.sin_cos();
                match (form, &ph) {
                    (Some(f), Some(ph)) => quartic(f, ph, c, s),
                    _ => general(c, s, phi),
                }
            }
        };
        let along_phi = |theta: T| {
            let (s, c) = theta.sin_cos();
            move |phi: T| match form {
                Some(f) => quartic(f, &f.phase(phi), c, s),
                None => general(c, s, phi),
            }
        };
        let half_pi: T = lit(PI / 2.0);
        let mut best = (T::zero(), T::zero(), base);
        for phi in [T::zero(), half_pi] {
            let (theta, val) = line_search(along_theta(phi), -half_pi, half_pi);
            if val < best.2 {
                best = (theta, phi, val);
            }
        }
        if best.0 != T::zero() {
            let theta = best.0;
            let (phi, val) = line_search(along_phi(theta), T::zero(), lit(2.0 * PI));
            if val < best.2 {
                best = (theta, phi, val);
            }
        }
        if best.2 < base {
            let (ra, rb) = rotate(best.0, best.1);
            let (ca, cb) = (self.cost(&ra), self.cost(&rb));
            if ca + cb < base {
                return Some((ra, rb, ca, cb));
            }
        }
        None
    }
}

/// `tr R` and `w^2 - tr R^2` of both rotated reduced operators as
/// polynomials in `cos`/`sin` of the rotation angle. With `P = AA'`,
/// `Q = BB'`, `G = AB'`, every trace needed reduces to the scalars below.
struct PairForm<T: Real> {
    tp: T,
    tq: T,
    pp: T,
    qq: T,
    pq: T,
    gg: T,
    tg: C<T>,
    pg: C<T>,
    qg: C<T>,
    g2: C<T>,
}

impl<T: Real> PairForm<T> {
    fn new(p: &[C<T>], q: &[C<T>], g: &[C<T>], k: usize) -> Self {
        Self {
            tp: real_trace(p, k),
            tq: real_trace(q, k),
            pp: frob_sq(p),
            qq: frob_sq(q),
            pq: trace_prod(p, q, k).re,
            gg: frob_sq(g),
            tg: (0..k).fold(C::new(T::zero(), T::zero()), |acc, i| acc + g[i * k + i]),
            pg: trace_prod(p, g, k),
            qg: trace_prod(q, g, k),
            g2: trace_prod(g, g, k),
        }
    }

    /// `tr X`, `tr PX`, `tr QX`, `tr X^2` for `X = e* G + e G'`.
    fn phase(&self, phi: T) -> PhaseTerms<T> {
        let two: T = lit(2.0);
        let (sin, cos) = phi.sin_cos();
        let ec = Complex::new(cos, -sin);
        PhaseTerms {
            tx: two * (ec * self.tg).re,
            px: two * (ec * self.pg).re,
            qx: two * (ec * self.qg).re,
            xx: two * (ec * ec * self.g2).re + two * self.gg,
        }
    }

    fn eval(&self, ph: &PhaseTerms<T>, c: T, s: T) -> ((T, T), (T, T)) {
        let two: T = lit(2.0);
        let (c2, s2, cs) = (c * c, s * s, c * s);
        let wa = c2 * self.tp + s2 * self.tq + cs * ph.tx;
        let wb = c2 * self.tq + s2 * self.tp - cs * ph.tx;
        let mixed = c2 * s2 * (ph.xx + two * self.pq);
        let ra2 =
            c2 * c2 * self.pp + s2 * s2 * self.qq + mixed + two * cs * (c2 * ph.px + s2 * ph.qx);
        let rb2 =
            c2 * c2 * self.qq + s2 * s2 * self.pp + mixed - two * cs * (c2 * ph.qx + s2 * ph.px);
        ((wa, wa * wa - ra2), (wb, wb * wb - rb2))
    }
}

struct PhaseTerms<T: Real> {
    tx: T,
    px: T,
    qx: T,
    xx: T,
}

/// Minimizes a periodic function over `[lo, hi)`: a uniform grid brackets
/// the best cell, then golden-section search with parabolic steps (Brent)
/// refines inside it down to a bracket of width `GOLDEN_WIDTH`.
fn line_search<T: Real>(f: impl Fn(T) -> T, lo: T, hi: T) -> (T, T) {
    let width = hi - lo;
    let step = width / lit(GRID_POINTS as f64);
    let mut best_j = 0;
    let mut best_v = f(lo);
    for j in 1..GRID_POINTS {
        let v = f(lo + step * lit(j as f64));
        if v < best_v {
            best_j = j;
            best_v = v;
        }
    }
    let center = lo + step * lit(best_j as f64);
    let (mut x, mut v) = brent(&f, center - step, center + step, center, best_v);
    if best_v <= v {
        x = center;
        v = best_v;
    }
    // Wrap into [lo, hi) so the identity stays representable as `lo`.
    if x < lo {
        x += width;
    } else if x >= hi {
        x -= width;
    }
    (x, v)
}

/// Brent's minimizer on the bracket `a < x < b` with `f(x) = fx` no larger
/// than the values at the ends.
fn brent<T: Real>(f: &impl Fn(T) -> T, mut a: T, mut b: T, mut x: T, mut fx: T) -> (T, T) {
    let cgold: T = lit(0.381_966_011_250_105_1);
    let half: T = lit(0.5);
    let two: T = lit(2.0);
    let tol1: T = lit(GOLDEN_WIDTH / 4.0);
    let tol2 = two * tol1;
    let (mut w, mut v) = (x, x);
    let (mut fw, mut fv) = (fx, fx);
    let (mut d, mut e) = (T::zero(), T::zero());
    for _ in 0..200 {
        let xm = half * (a + b);
        if (x - xm).abs() <= tol2 - half * (b - a) {
            break;
        }
        let golden = |x: T| if x >= xm { a - x } else { b - x };
        if e.abs() > tol1 {
            let r = (x - w) * (fx - fv);
            let mut q = (x - v) * (fx - fw);
            let mut p = (x - v) * q - (x - w) * r;
            q = two * (q - r);
            if q > T::zero() {
                p = -p;
            }
            q = q.abs();
            let e_prev = e;
            e = d;
            if p.abs() >= (half * q * e_prev).abs() || p <= q * (a - x) || p >= q * (b - x) {
                e = golden(x);
                d = cgold * e;
            } else {
                d = p / q;
                let u = x + d;
                if u - a < tol2 || b - u < tol2 {
                    d = if xm >= x { tol1 } else { -tol1 };
                }
            }
        } else {
            e = golden(x);
            d = cgold * e;
        }
        let u = if d.abs() >= tol1 {
            x + d
        } else if d >= T::zero() {
            x + tol1
        } else {
            x - tol1
        };
        let fu = f(u);
        if fu <= fx {
            if u >= x {
                a = x;
            } else {
                b = x;
            }
            v = w;
            fv = fw;
            w = x;
            fw = fx;
            x = u;
            fx = fu;
        } else {
            if u < x {
                a = u;
            } else {
                b = u;
            }
            if fu <= fw || w == x {
                v = w;
                fv = fw;
                w = u;
                fw = fu;
            } else if fu <= fv || v == x || v == w {
                v = u;
                fv = fu;
            }
        }
    }
    (x, fx)
}

/// Haar-distributed unitary: QR of a complex Ginibre matrix with the phases
/// of `R`'s diagonal moved into `Q`.
pub fn haar_unitary<T: Real, R: Rng + ?Sized>(r: usize, rng: &mut R) -> CMatrix<T> {
    let g = CMatrix::<T>::from_fn(r, r, |_, _| {
        let a: f64 = rng.sample(StandardNormal);
        let b: f64 = rng.sample(StandardNormal);
        Complex::new(lit(a), lit(b))
    });
    let qr = g.qr();
    let mut q = qr.q();
    let rm = qr.r();
    for j in 0..r {
        let d = rm[(j, j)];
        let m = d.norm_sqr().sqrt();
        if m > T::zero() {
            let phase = d / re(m);
            for i in 0..r {
                q[(i, j)] *= phase;
            }
        }
    }
    q
}

/// Average negativity over randomly drawn decompositions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlatnessScan<T: Real> {
    pub mean: T,
    pub max_abs_dev: T,
    pub values: Vec<T>,
    pub size: usize,
}

/// Draws `samples` Haar unitaries of the default size and evaluates the
/// average negativity of each induced decomposition.
pub fn flatness_scan<T: Real>(
    rho: &DensityOperator<T>,
    cut: &Bipartition,
    samples: usize,
    seed: u64,
) -> Result<FlatnessScan<T>> {
    flatness_scan_sized(rho, cut, samples, seed, None)
}

pub fn flatness_scan_sized<T: Real>(
    rho: &DensityOperator<T>,
    cut: &Bipartition,
    samples: usize,
    seed: u64,
    size: Option<usize>,
) -> Result<FlatnessScan<T>> {
    if samples < 2 {
        return Err(Error::domain("flatness scan needs at least two samples"));
    }
    cut.check(rho.profile())?;
    let roots = RootSet::from_density(rho)?;
    let size = size.unwrap_or_else(|| default_size(roots.rank()));
    if size < roots.rank() {
        return Err(Error::domain("scan size below the rank"));
    }
    let split = Split::for_cut(rho.profile(), cut);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values: Vec<T> = (0..samples)
        .map(|_| {
            let u = haar_unitary::<T, _>(size, &mut rng);
            roots.mix(&u).iter().fold(T::zero(), |acc, row| {
                acc + PureMeasure::Negativity.weighted(row, &split)
            })
        })
        .collect();
    let mean = values.iter().fold(T::zero(), |a, &b| a + b) / lit(samples as f64);
    let max_abs_dev = values
        .iter()
        .fold(T::zero(), |acc, &v| acc.max((v - mean).abs()));
    Ok(FlatnessScan {
        mean,
        max_abs_dev,
        values,
        size,
    })
}

/// Certified lower bound on the concurrence roof from the range of `rho`.
///
/// Every member of every decomposition lies in the range, so the roof is at
/// least the smallest pure-state concurrence there. Writing a unit vector of
/// the range as `sum_i c_i |v_i>`, the marginal purity is the quartic form
/// `<c (x) c| M |c (x) c>` with `M_{(jl),(ik)} = tr(K_ij K_kl)`,
/// `K_ij = tr_B |v_i><v_j|`. Since `c (x) c` is a unit vector of the
/// symmetric subspace, purity never exceeds the top eigenvalue of `M`
/// compressed to that subspace, which gives
/// `C(rho) >= sqrt(2 (1 - lambda_max))`.
///
/// Returns zero (a trivial bound) when the rank exceeds 16.
pub fn concurrence_floor<T: Real>(rho: &DensityOperator<T>, cut: &Bipartition) -> Result<T> {
    cut.check(rho.profile())?;
    let spec = spectral_decomposition(rho);
    let r = spec.rank;
    if r == 0 || r > MAX_DEFAULT_SIZE {
        return Ok(T::zero());
    }
    let split = Split::for_cut(rho.profile(), cut);
    let mats: Vec<CMatrix<T>> = spec.pairs[..r]
        .iter()
        .map(|(_, v)| {
            let m = split.reshape(v);
            if split.rows() <= split.cols() {
                m
            } else {
                m.transpose()
            }
        })
        .collect();
    // With rows on the smaller side, K_ij = M_i M_j^dagger.
    let mut k = vec![vec![CMatrix::<T>::zeros(0, 0); r]; r];
    for i in 0..r {
        for j in 0..r {
            k[i][j] = &mats[i] * mats[j].adjoint();
        }
    }
    let dim = r * r;
    let mut h = CMatrix::<T>::zeros(dim, dim);
    for j in 0..r {
        for l in 0..r {
            for i in 0..r {
                for kk in 0..r {
                    h[(j * r + l, i * r + kk)] = (&k[i][j] * &k[kk][l]).trace();
                }
            }
        }
    }
    let half = re(lit::<T>(0.5));
    let mut sym = CMatrix::<T>::zeros(dim, dim);
    for a in 0..r {
        for b in 0..r {
            let row = a * r + b;
            sym[(row, row)] += half;
            sym[(b * r + a, row)] += half;
        }
    }
    let compressed = &sym * h * &sym;
    let compressed = (&compressed + compressed.adjoint()) * half;
    let top = hermitian_eigenvalues(&compressed)
        .first()
        .copied()
        .unwrap_or_else(T::one);
    let slack = tol::<T>(TOL_RANK);
    Ok(clamp_nonneg(lit::<T>(2.0) * (T::one() - top - slack)).sqrt())
}

/// Lower bound `N(rho) sqrt(2 / (k (k-1)))` on the concurrence roof, with
/// `k` the smaller local dimension of the cut.
pub fn concurrence_ppt_floor<T: Real>(rho: &DensityOperator<T>, cut: &Bipartition) -> Result<T> {
    let split = Split::for_cut(rho.profile(), cut);
    let k = split.rows().min(split.cols()) as f64;
    let scale: T = lit((2.0 / (k * (k - 1.0))).sqrt());
    Ok(negativity_mixed(rho, cut)? * scale)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::{negativity_pure, wootters_concurrence_2q};
    use crate::states::{maximally_entangled, ou_state};

    fn c(re_part: f64, im_part: f64) -> C<f64> {
        Complex::new(re_part, im_part)
    }

    fn ou_ab() -> DensityOperator<f64> {
        ou_state::<f64>().marginal(&[0, 1]).unwrap()
    }

    #[test]
    fn haar_unitary_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for r in [1, 2, 5, 16] {
            let u = haar_unitary::<f64, _>(r, &mut rng);
            assert!(unitarity_error(&u) < 1e-12);
        }
    }

    #[test]
    fn identity_recovers_spectral_decomposition() {
        let rho = ou_ab();
        let roots = RootSet::from_density(&rho).unwrap();
        assert_eq!(roots.rank(), 3);
        let dec = decomposition_from_unitary(&roots, &CMatrix::identity(3, 3)).unwrap();
        assert_eq!(dec.len(), 3);
        for w in dec.weights() {
            assert!((w - 1.0 / 3.0).abs() < 1e-12);
        }
        assert!(dec.reconstruction_error(&rho) < 1e-12);
    }

    #[test]
    fn rotation_gives_equal_weights() {
        // rho = 0.7 |00><00| + 0.3 |11><11|
        let p = DimensionProfile::new([2, 2]).unwrap();
        let a = PureState::<f64>::basis(p.clone(), &[0, 0])
            .unwrap()
            .density();
        let b = PureState::<f64>::basis(p, &[1, 1]).unwrap().density();
        let rho = DensityOperator::mixture(&[(0.7, &a), (0.3, &b)]).unwrap();
        let roots = RootSet::from_density(&rho).unwrap();
        let s = 0.5f64.sqrt();
        let u = CMatrix::from_row_slice(2, 2, &[c(s, 0.0), c(s, 0.0), c(-s, 0.0), c(s, 0.0)]);
        let dec = decomposition_from_unitary(&roots, &u).unwrap();
        assert_eq!(dec.len(), 2);
        // |phi~_k> = (sqrt(.7)|00> +- sqrt(.3)|11>)/sqrt2, weight 1/2 each.
        for w in dec.weights() {
            assert!((w - 0.5).abs() < 1e-12);
        }
        assert!(dec.reconstruction_error(&rho) < 1e-12);
        let bad =
            CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.1, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        assert!(decomposition_from_unitary(&roots, &bad).is_err());
        assert!(decomposition_from_unitary(&roots, &CMatrix::identity(1, 1)).is_err());
    }

    #[test]
    fn padded_roots_drop_zero_members() {
        let rho = ou_ab();
        let roots = RootSet::from_density(&rho).unwrap();
        let dec = decomposition_from_unitary(&roots, &CMatrix::identity(5, 5)).unwrap();
        assert_eq!(dec.len(), 3);
    }

    #[test]
    fn ou_spectral_average_is_one() {
        let rho = ou_ab();
        let roots = RootSet::from_density(&rho).unwrap();
        let dec = decomposition_from_unitary(&roots, &CMatrix::identity(3, 3)).unwrap();
        let cut = Bipartition::single(2, 0).unwrap();
        assert!((average_negativity(&dec, &cut).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pure_input_short_circuits() {
        let phi = maximally_entangled::<f64>(3).unwrap();
        let cut = Bipartition::single(2, 0).unwrap();
        let res = optimize(&phi.density(), &cut, Direction::Min, &OptConfig::default()).unwrap();
        assert_eq!(res.bound_kind, BoundKind::Exact);
        assert!((res.value - negativity_pure(&phi, &cut).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_config() {
        let rho = ou_ab();
        let cut = Bipartition::single(2, 0).unwrap();
        let cfg = OptConfig {
            size: Some(2),
            ..OptConfig::default()
        };
        assert!(optimize(&rho, &cut, Direction::Min, &cfg).is_err());
        let cfg = OptConfig {
            starts: 0,
            ..OptConfig::default()
        };
        assert!(optimize(&rho, &cut, Direction::Min, &cfg).is_err());
    }

    #[test]
    fn two_qubit_minimum_matches_wootters() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let p = DimensionProfile::new([2, 2]).unwrap();
        let cut = Bipartition::single(2, 0).unwrap();
        for _ in 0..3 {
            let g = CMatrix::<f64>::from_fn(4, 2, |_, _| {
                Complex::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
            });
            let m = &g * g.adjoint();
            let tr = m.trace().re;
            let rho = DensityOperator::new(p.clone(), m.unscale(tr)).unwrap();
            let res = optimize(&rho, &cut, Direction::Min, &OptConfig::default()).unwrap();
            let exact = wootters_concurrence_2q(&rho).unwrap();
            assert!(
                (res.value - exact).abs() < 1e-3,
                "{} vs {}",
                res.value,
                exact
            );
            assert!(res.trace.windows(2).all(|w| w[1] <= w[0]));
        }
    }

    #[test]
    fn max_direction_trace_is_nondecreasing() {
        let rho = ou_state::<f64>().marginal(&[0, 2]).unwrap();
        let cut = Bipartition::single(2, 0).unwrap();
        let cfg = OptConfig {
            starts: 2,
            ..OptConfig::default()
        };
        let res = optimize(&rho, &cut, Direction::Max, &cfg).unwrap();
        assert!(res.trace.windows(2).all(|w| w[1] >= w[0]));
        assert_eq!(res.bound_kind, BoundKind::LowerBound);
    }

    #[test]
    fn line_search_finds_interior_minimum() {
        let (x, v) = line_search(|t: f64| (t - 0.3).powi(2), -1.5, 1.5);
        assert!((x - 0.3).abs() < 1e-6);
        assert!(v < 1e-12);
    }

    #[test]
    fn concurrence_floor_is_exact_on_pure_states() {
        let phi = PureState::normalized(
            DimensionProfile::new([2, 3]).unwrap(),
            CVector::from_vec(vec![
                c(0.3, 0.1),
                c(-0.2, 0.5),
                c(0.7, 0.0),
                c(0.1, -0.4),
                c(0.0, 0.2),
                c(0.5, 0.5),
            ]),
        )
        .unwrap();
        let cut = Bipartition::single(2, 0).unwrap();
        let floor = concurrence_floor(&phi.density(), &cut).unwrap();
        let exact = crate::measures::concurrence_pure(&phi, &cut).unwrap();
        assert!((floor - exact).abs() < 1e-6);
    }

    #[test]
    fn concurrence_floor_is_tight_on_ou_marginal() {
        let cut = Bipartition::single(2, 0).unwrap();
        let floor = concurrence_floor(&ou_ab(), &cut).unwrap();
        assert!((floor - 1.0).abs() < 1e-6, "{floor}");
    }
}
