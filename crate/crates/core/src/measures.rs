//! Closed-form pure-state measures, the PPT negativity of mixed states, and
//! the two-qubit spin-flip concurrence.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::qlinalg::{
    hermitian_eigen, hermitian_eigenvalues, partial_transpose, schmidt, trace_norm, Bipartition,
    CMatrix, CVector, DensityOperator, PureState, Split, TOL_RANK,
};
use crate::scalar::{lit, re, tol, Real, C};

/// Values in `(-CLAMP, 0)` produced by rounding are reported as zero.
pub const NEGATIVE_CLAMP: f64 = 1e-10;
/// Maximum disagreement between the three pure-state negativity routes.
pub const TOL_PATHS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasureKind {
    Concurrence,
    Negativity,
    Cren,
    Crenoa,
    Coa,
}

impl MeasureKind {
    pub fn name(self) -> &'static str {
        match self {
            MeasureKind::Concurrence => "concurrence",
            MeasureKind::Negativity => "negativity",
            MeasureKind::Cren => "cren",
            MeasureKind::Crenoa => "crenoa",
            MeasureKind::Coa => "coa",
        }
    }
}

impl std::str::FromStr for MeasureKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "concurrence" => Ok(MeasureKind::Concurrence),
            "negativity" => Ok(MeasureKind::Negativity),
            "cren" => Ok(MeasureKind::Cren),
            "crenoa" => Ok(MeasureKind::Crenoa),
            "coa" => Ok(MeasureKind::Coa),
            other => Err(Error::domain(format!("unknown measure `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    TraceNorm,
    Optimizer,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::ClosedForm => "closed_form",
            Method::TraceNorm => "trace_norm",
            Method::Optimizer => "optimizer",
        }
    }
}

/// How a reported number relates to the quantity it stands for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    Exact,
    UpperBound,
    LowerBound,
}

impl BoundKind {
    pub fn name(self) -> &'static str {
        match self {
            BoundKind::Exact => "exact",
            BoundKind::UpperBound => "upper",
            BoundKind::LowerBound => "lower",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeasureValue<T: Real> {
    pub kind: MeasureKind,
    pub value: T,
    pub cut: Bipartition,
    pub method: Method,
    pub bound: BoundKind,
}

pub(crate) fn clamp_nonneg<T: Real>(x: T) -> T {
    if x < T::zero() {
        T::zero()
    } else {
        x
    }
}

/// `sqrt(2 (1 - tr rho_A^2))` for the marginal on `cut.side_a()`.
pub fn concurrence_pure<T: Real>(phi: &PureState<T>, cut: &Bipartition) -> Result<T> {
    let m = phi.reshape(cut)?;
    let r = reduced_small(&m);
    let purity = frobenius_sq(&r);
    Ok(clamp_nonneg(lit::<T>(2.0) * (T::one() - purity)).sqrt())
}

/// `2 sum_{i<j} sqrt(lambda_i lambda_j)` from the Schmidt coefficients.
pub fn negativity_pure<T: Real>(phi: &PureState<T>, cut: &Bipartition) -> Result<T> {
    let s = schmidt(phi, cut)?;
    Ok(negativity_from_schmidt(&s.coefficients))
}

fn negativity_from_schmidt<T: Real>(lams: &[T]) -> T {
    let mut acc = T::zero();
    for i in 0..lams.len() {
        for j in i + 1..lams.len() {
            acc += (lams[i] * lams[j]).sqrt();
        }
    }
    lit::<T>(2.0) * acc
}

/// The three routes to a pure-state negativity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NegativityPaths<T: Real> {
    /// `2 sum_{i<j} sqrt(lambda_i lambda_j)`.
    pub schmidt: T,
    /// `(tr sqrt(rho_A))^2 - 1`.
    pub marginal_root: T,
    /// `||rho^{T_B}||_1 - 1`.
    pub trace_norm: T,
}

impl<T: Real> NegativityPaths<T> {
    pub fn max_deviation(&self) -> T {
        let a = (self.schmidt - self.marginal_root).abs();
        let b = (self.schmidt - self.trace_norm).abs();
        let c = (self.marginal_root - self.trace_norm).abs();
        a.max(b).max(c)
    }
}

pub fn negativity_pure_paths<T: Real>(
    phi: &PureState<T>,
    cut: &Bipartition,
) -> Result<NegativityPaths<T>> {
    let schmidt_value = negativity_pure(phi, cut)?;
    let marginal = phi.marginal(cut.side_a())?;
    // Eigenvalues at rounding level are zeros (the Schmidt route drops them
    // too); their square roots would otherwise add ~1e-8 noise.
    let cutoff = tol::<T>(TOL_RANK);
    let root_sum = hermitian_eigenvalues(marginal.matrix())
        .into_iter()
        .filter(|&v| v > cutoff)
        .fold(T::zero(), |acc, v| acc + v.sqrt());
    let marginal_root = root_sum * root_sum - T::one();
    let pt = partial_transpose(&phi.density(), &cut.side_b())?;
    let tn = trace_norm(&pt)? - T::one();
    Ok(NegativityPaths {
        schmidt: schmidt_value,
        marginal_root,
        trace_norm: tn,
    })
}

/// [`negativity_pure`] with all three routes computed; disagreement beyond
/// `1e-9` is a numerical failure.
pub fn negativity_pure_checked<T: Real>(phi: &PureState<T>, cut: &Bipartition) -> Result<T> {
    let paths = negativity_pure_paths(phi, cut)?;
    let dev = paths.max_deviation();
    if dev > tol::<T>(TOL_PATHS) {
        return Err(Error::Numerical(format!(
            "negativity routes disagree by {:.3e}",
            dev.to_f64()
        )));
    }
    Ok(paths.schmidt)
}

/// `||rho^{T_B}||_1 - 1`, clamped at zero.
pub fn negativity_mixed<T: Real>(rho: &DensityOperator<T>, cut: &Bipartition) -> Result<T> {
    cut.check(rho.profile())?;
    let pt = partial_transpose(rho, &cut.side_b())?;
    let v = trace_norm(&pt)? - T::one();
    if v < T::zero() && v > -tol::<T>(NEGATIVE_CLAMP) {
        return Ok(T::zero());
    }
    Ok(clamp_nonneg(v))
}

/// Square root of a Hermitian positive semidefinite matrix.
pub(crate) fn psd_sqrt<T: Real>(m: &CMatrix<T>) -> CMatrix<T> {
    let (vals, vecs) = hermitian_eigen(m);
    let n = m.nrows();
    let mut out = CMatrix::zeros(n, n);
    for (i, v) in vals.into_iter().enumerate() {
        let col = vecs.column(i);
        out += (col * col.adjoint()) * re(clamp_nonneg(v).sqrt());
    }
    out
}

/// Two-qubit concurrence `max(0, l1 - l2 - l3 - l4)` with `l_i` the
/// descending square roots of the eigenvalues of
/// `sqrt(rho) (sy x sy) rho* (sy x sy) sqrt(rho)`.
pub fn wootters_concurrence_2q<T: Real>(rho: &DensityOperator<T>) -> Result<T> {
    if rho.profile().dims() != [2, 2] {
        return Err(Error::domain(format!(
            "two-qubit concurrence needs profile (2, 2), got {:?}",
            rho.profile().dims()
        )));
    }
    let zero = C::new(T::zero(), T::zero());
    let one = re(T::one());
    let mut flip = CMatrix::from_element(4, 4, zero);
    flip[(0, 3)] = -one;
    flip[(1, 2)] = one;
    flip[(2, 1)] = one;
    flip[(3, 0)] = -one;
    let tilde = &flip * rho.matrix().map(|z| z.conj()) * &flip;
    let root = psd_sqrt(rho.matrix());
    let r = &root * tilde * &root;
    let r = (&r + r.adjoint()) * re(lit::<T>(0.5));
    let l: Vec<T> = hermitian_eigenvalues(&r)
        .into_iter()
        .map(|v| clamp_nonneg(v).sqrt())
        .collect();
    Ok(clamp_nonneg(l[0] - l[1] - l[2] - l[3]))
}

/// Reduced matrix on the smaller side of a coefficient matrix.
pub(crate) fn reduced_small<T: Real>(m: &CMatrix<T>) -> CMatrix<T> {
    if m.nrows() <= m.ncols() {
        m * m.adjoint()
    } else {
        m.adjoint() * m
    }
}

fn frobenius_sq<T: Real>(m: &CMatrix<T>) -> T {
    m.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr())
}

/// Pure-state functionals evaluated on unnormalized vectors `|phi~> =
/// sqrt(w) |phi>`, returning `w * f(|phi>)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PureMeasure {
    Negativity,
    Concurrence,
}

impl PureMeasure {
    pub fn name(self) -> &'static str {
        match self {
            PureMeasure::Negativity => "negativity",
            PureMeasure::Concurrence => "concurrence",
        }
    }

    /// Value on a normalized state.
    pub fn pure_value<T: Real>(self, phi: &PureState<T>, cut: &Bipartition) -> Result<T> {
        match self {
            PureMeasure::Negativity => negativity_pure(phi, cut),
            PureMeasure::Concurrence => concurrence_pure(phi, cut),
        }
    }

    /// `w * f(phi)` for `v = sqrt(w) phi`; zero for `w` below `1e-14`.
    pub fn weighted<T: Real>(self, v: &CVector<T>, split: &Split) -> T {
        let m = split.reshape(v);
        if self == PureMeasure::Negativity && m.nrows().min(m.ncols()) > 2 {
            // Singular values directly: eigenvalues of the Gram matrix carry
            // O(eps) noise, whose square roots would bias the sum.
            let w = m.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr());
            if w < tol::<T>(1e-14) {
                return T::zero();
            }
            let s = m
                .singular_values()
                .iter()
                .fold(T::zero(), |acc, &x| acc + x);
            return clamp_nonneg(s * s - w);
        }
        self.of_reduced(&reduced_small(&m))
    }

    /// `w * f(phi)` from the unnormalized reduced operator `R` of `v` on
    /// either side of the cut (`w = tr R`).
    pub(crate) fn of_reduced<T: Real>(self, r: &CMatrix<T>) -> T {
        self.smoothed(r, T::zero())
    }

    /// [`Self::of_reduced`] with the kink at product states rounded off by
    /// `eps`; exact at `eps = 0`.
    pub(crate) fn smoothed<T: Real>(self, r: &CMatrix<T>, eps: T) -> T {
        let w = (0..r.nrows()).fold(T::zero(), |acc, i| acc + r[(i, i)].re);
        match (self, r.nrows()) {
            (_, 1) => T::zero(),
            (PureMeasure::Concurrence, _) | (PureMeasure::Negativity, 2) => {
                self.of_invariants(w, w * w - frobenius_sq(r), eps)
            }
            (PureMeasure::Negativity, _) => {
                if w < tol::<T>(1e-14) {
                    return T::zero();
                }
                let s = hermitian_eigenvalues(r)
                    .into_iter()
                    .fold(T::zero(), |acc, x| acc + (clamp_nonneg(x) + eps * w).sqrt());
                clamp_nonneg(s * s - w)
            }
        }
    }

    /// Value from `w = tr R` and `g = w^2 - tr R^2`. Exact for concurrence,
    /// and for negativity when `R` is 2 x 2 (`g = 2 det R`).
    pub(crate) fn of_invariants<T: Real>(self, w: T, g: T, eps: T) -> T {
        if w < tol::<T>(1e-14) {
            return T::zero();
        }
        (clamp_nonneg(lit::<T>(2.0) * g) + eps * w * w).sqrt()
    }
}
