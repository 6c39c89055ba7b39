//! Dense complex tensor kernel for multipartite qudit systems.
//!
//! Flattening convention: party 0 is the slowest-varying index, so the basis
//! state with digits `(k_0, ..., k_{n-1})` sits at
//! `sum_p k_p * stride_p` with `stride_p = prod_{q > p} d_q`.
//!
//! Party indices in this crate are zero-based.

use nalgebra::{Complex, DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::{cabs, lit, re, tol, Real, C};

pub type CMatrix<T> = DMatrix<C<T>>;
pub type CVector<T> = DVector<C<T>>;

/// Largest total Hilbert-space dimension accepted by [`DimensionProfile`].
pub const MAX_TOTAL_DIM: usize = 4096;

/// Cutoff below which eigenvalues and Schmidt coefficients count as zero.
pub const TOL_RANK: f64 = 1e-12;
/// Accepted deviation of a state norm (or trace) from one.
pub const TOL_NORM: f64 = 1e-10;
/// Inputs off-normalized by at most this much are silently renormalized.
pub const TOL_RENORM: f64 = 1e-8;
/// Maximum elementwise deviation from Hermiticity for density operators.
pub const TOL_HERMITIAN: f64 = 1e-12;
/// Maximum elementwise deviation from Hermiticity accepted by [`trace_norm`].
pub const TOL_HERMITIAN_LOOSE: f64 = 1e-9;

/// Ordered local dimensions of the parties.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct DimensionProfile {
    dims: Vec<usize>,
}

impl DimensionProfile {
    pub fn new(dims: impl Into<Vec<usize>>) -> Result<Self> {
        let dims = dims.into();
        if dims.is_empty() {
            return Err(Error::domain("a profile needs at least one party"));
        }
        if let Some(d) = dims.iter().find(|&&d| d < 2) {
            return Err(Error::domain(format!("local dimension {d} is below 2")));
        }
        let mut total: usize = 1;
        for &d in &dims {
            total = total
                .checked_mul(d)
                .filter(|&t| t <= MAX_TOTAL_DIM)
                .ok_or_else(|| Error::domain(format!("total dimension exceeds {MAX_TOTAL_DIM}")))?;
        }
        Ok(Self { dims })
    }

    /// `n` parties of dimension `d` each.
    pub fn uniform(n: usize, d: usize) -> Result<Self> {
        Self::new(vec![d; n])
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn parties(&self) -> usize {
        self.dims.len()
    }

    pub fn total(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.dims.len()];
        for p in (0..self.dims.len().saturating_sub(1)).rev() {
            strides[p] = strides[p + 1] * self.dims[p + 1];
        }
        strides
    }

    /// Digits of a flattened basis index.
    pub fn digits(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.dims.len()];
        for p in (0..self.dims.len()).rev() {
            out[p] = index % self.dims[p];
            index /= self.dims[p];
        }
        out
    }

    /// Flattened index of a digit string.
    pub fn index(&self, digits: &[usize]) -> Result<usize> {
        if digits.len() != self.dims.len() {
            return Err(Error::domain(format!(
                "expected {} digits, got {}",
                self.dims.len(),
                digits.len()
            )));
        }
        let mut idx = 0;
        for (p, (&k, &d)) in digits.iter().zip(&self.dims).enumerate() {
            if k >= d {
                return Err(Error::domain(format!(
                    "digit {k} out of range for party {p} of dimension {d}"
                )));
            }
            idx = idx * d + k;
        }
        Ok(idx)
    }

    /// Profile of the listed parties, in the given order.
    pub fn restrict(&self, parties: &[usize]) -> Self {
        Self {
            dims: parties.iter().map(|&p| self.dims[p]).collect(),
        }
    }

    pub fn concat(&self, other: &Self) -> Result<Self> {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        Self::new(dims)
    }

    pub(crate) fn check_parties(&self, parties: &[usize], what: &str) -> Result<()> {
        let n = self.parties();
        for (i, &p) in parties.iter().enumerate() {
            if p >= n {
                return Err(Error::domain(format!(
                    "{what}: party {p} out of range for {n} parties"
                )));
            }
            if parties[..i].contains(&p) {
                return Err(Error::domain(format!("{what}: party {p} repeated")));
            }
        }
        Ok(())
    }
}

/// A nonempty proper subset of parties against its complement.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Bipartition {
    parties: usize,
    side_a: Vec<usize>,
}

impl Bipartition {
    pub fn new(parties: usize, side_a: impl Into<Vec<usize>>) -> Result<Self> {
        let mut side_a = side_a.into();
        side_a.sort_unstable();
        if side_a.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::domain("bipartition side lists a party twice"));
        }
        if side_a.is_empty() || side_a.len() >= parties {
            return Err(Error::domain(
                "bipartition side must be a nonempty proper subset of the parties",
            ));
        }
        if let Some(&p) = side_a.iter().find(|&&p| p >= parties) {
            return Err(Error::domain(format!(
                "party {p} out of range for {parties} parties"
            )));
        }
        Ok(Self { parties, side_a })
    }

    /// `party` against everyone else.
    pub fn single(parties: usize, party: usize) -> Result<Self> {
        Self::new(parties, vec![party])
    }

    pub fn parties(&self) -> usize {
        self.parties
    }

    pub fn side_a(&self) -> &[usize] {
        &self.side_a
    }

    pub fn side_b(&self) -> Vec<usize> {
        (0..self.parties)
            .filter(|p| !self.side_a.contains(p))
            .collect()
    }

    pub fn complement(&self) -> Self {
        Self {
            parties: self.parties,
            side_a: self.side_b(),
        }
    }

    pub(crate) fn check(&self, profile: &DimensionProfile) -> Result<()> {
        if self.parties != profile.parties() {
            return Err(Error::domain(format!(
                "bipartition of {} parties applied to a {}-party profile",
                self.parties,
                profile.parties()
            )));
        }
        Ok(())
    }
}

impl std::fmt::Display for Bipartition {
    /// One-based `A|B` notation, e.g. `1|23`.
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let sep = if self.parties > 9 { "," } else { "" };
        let join = |v: &[usize]| {
            v.iter()
                .map(|p| (p + 1).to_string())
                .collect::<Vec<_>>()
                .join(sep)
        };
        write!(f, "{}|{}", join(&self.side_a), join(&self.side_b()))
    }
}

/// Index table reshaping a flattened vector into a `rows x cols` matrix whose
/// row index runs over one group of parties and column index over the rest.
#[derive(Debug, Clone)]
pub struct Split {
    rows: usize,
    cols: usize,
    map: Vec<usize>,
}

impl Split {
    /// Rows enumerate the parties in `row_parties` (in ascending order),
    /// columns the complement.
    pub fn new(profile: &DimensionProfile, row_parties: &[usize]) -> Self {
        let strides = profile.strides();
        let mut a: Vec<usize> = row_parties.to_vec();
        a.sort_unstable();
        let b: Vec<usize> = (0..profile.parties()).filter(|p| !a.contains(p)).collect();
        let offsets = |group: &[usize]| -> Vec<usize> {
            let mut offs = vec![0usize];
            for &p in group {
                let mut next = Vec::with_capacity(offs.len() * profile.dims()[p]);
                for &o in &offs {
                    for k in 0..profile.dims()[p] {
                        next.push(o + k * strides[p]);
                    }
                }
                offs = next;
            }
            offs
        };
        let ra = offsets(&a);
        let cb = offsets(&b);
        let mut map = Vec::with_capacity(ra.len() * cb.len());
        for &x in &ra {
            for &y in &cb {
                map.push(x + y);
            }
        }
        Self {
            rows: ra.len(),
            cols: cb.len(),
            map,
        }
    }

    pub fn for_cut(profile: &DimensionProfile, cut: &Bipartition) -> Self {
        Self::new(profile, cut.side_a())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn full(&self, row: usize, col: usize) -> usize {
        self.map[row * self.cols + col]
    }

    pub fn reshape<T: Real>(&self, v: &CVector<T>) -> CMatrix<T> {
        CMatrix::from_fn(self.rows, self.cols, |a, b| v[self.full(a, b)])
    }

    /// Inverse of [`Split::reshape`].
    pub fn flatten<T: Real>(&self, m: &CMatrix<T>) -> CVector<T> {
        let mut v = CVector::zeros(self.rows * self.cols);
        for a in 0..self.rows {
            for b in 0..self.cols {
                v[self.full(a, b)] = m[(a, b)];
            }
        }
        v
    }
}

fn check_normalized<T: Real>(v: &mut CVector<T>, what: &str) -> Result<()> {
    let norm = v.norm();
    let dev = (norm - T::one()).abs();
    if dev > tol::<T>(TOL_RENORM) {
        return Err(Error::domain(format!(
            "{what} has norm {} (deviation {:.3e} exceeds {TOL_RENORM:e})",
            norm.to_f64(),
            dev.to_f64()
        )));
    }
    if dev > T::zero() {
        v.unscale_mut(norm);
    }
    Ok(())
}

/// Normalized amplitude vector over a profile.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState<T: Real> {
    profile: DimensionProfile,
    amplitudes: CVector<T>,
}

impl<T: Real> PureState<T> {
    /// Renormalizes deviations up to `1e-8`; larger deviations are errors.
    pub fn new(profile: DimensionProfile, amplitudes: CVector<T>) -> Result<Self> {
        if amplitudes.len() != profile.total() {
            return Err(Error::domain(format!(
                "amplitude vector of length {} does not match profile dimension {}",
                amplitudes.len(),
                profile.total()
            )));
        }
        let mut amplitudes = amplitudes;
        check_normalized(&mut amplitudes, "pure state")?;
        Ok(Self {
            profile,
            amplitudes,
        })
    }

    /// Normalizes an arbitrary nonzero vector.
    pub fn normalized(profile: DimensionProfile, amplitudes: CVector<T>) -> Result<Self> {
        let norm = amplitudes.norm();
        if norm <= T::zero() {
            return Err(Error::domain("cannot normalize the zero vector"));
        }
        Self::new(profile, amplitudes.unscale(norm))
    }

    /// Builds `sum_k c_k |digits_k>`; repeated digit strings accumulate.
    pub fn from_terms(profile: DimensionProfile, terms: &[(Vec<usize>, C<T>)]) -> Result<Self> {
        let mut amps = CVector::zeros(profile.total());
        for (digits, c) in terms {
            amps[profile.index(digits)?] += *c;
        }
        Self::new(profile, amps)
    }

    /// Computational basis state.
    pub fn basis(profile: DimensionProfile, digits: &[usize]) -> Result<Self> {
        let mut amps = CVector::zeros(profile.total());
        amps[profile.index(digits)?] = C::new(T::one(), T::zero());
        Ok(Self {
            profile,
            amplitudes: amps,
        })
    }

    pub(crate) fn from_parts_unchecked(profile: DimensionProfile, amplitudes: CVector<T>) -> Self {
        Self {
            profile,
            amplitudes,
        }
    }

    pub fn profile(&self) -> &DimensionProfile {
        &self.profile
    }

    pub fn amplitudes(&self) -> &CVector<T> {
        &self.amplitudes
    }

    pub fn amplitude(&self, digits: &[usize]) -> Result<C<T>> {
        Ok(self.amplitudes[self.profile.index(digits)?])
    }

    pub fn norm(&self) -> T {
        self.amplitudes.norm()
    }

    pub fn inner(&self, other: &Self) -> C<T> {
        self.amplitudes.dotc(&other.amplitudes)
    }

    /// `|<self|other>|^2`.
    pub fn fidelity(&self, other: &Self) -> T {
        self.inner(other).norm_sqr()
    }

    pub fn density(&self) -> DensityOperator<T> {
        DensityOperator {
            profile: self.profile.clone(),
            matrix: &self.amplitudes * self.amplitudes.adjoint(),
        }
    }

    /// Coefficient matrix with rows over `cut.side_a()`.
    pub fn reshape(&self, cut: &Bipartition) -> Result<CMatrix<T>> {
        cut.check(&self.profile)?;
        Ok(Split::for_cut(&self.profile, cut).reshape(&self.amplitudes))
    }

    /// Reduced density operator on `keep` (sorted ascending in the result).
    pub fn marginal(&self, keep: &[usize]) -> Result<DensityOperator<T>> {
        let keep = sorted_keep(&self.profile, keep)?;
        let split = Split::new(&self.profile, &keep);
        let m = split.reshape(&self.amplitudes);
        Ok(DensityOperator::from_matrix_unchecked(
            self.profile.restrict(&keep),
            &m * m.adjoint(),
        ))
    }
}

/// Hermitian, positive semidefinite, unit-trace operator over a profile.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator<T: Real> {
    profile: DimensionProfile,
    matrix: CMatrix<T>,
}

impl<T: Real> DensityOperator<T> {
    /// Validates Hermiticity (`1e-12`), unit trace (`1e-10`) and positivity
    /// (eigenvalues `>= -1e-10`).
    pub fn new(profile: DimensionProfile, matrix: CMatrix<T>) -> Result<Self> {
        let n = profile.total();
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::domain(format!(
                "matrix of shape {}x{} does not match profile dimension {n}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let herm = hermitian_deviation(&matrix);
        if herm > tol::<T>(TOL_HERMITIAN) {
            return Err(Error::domain(format!(
                "matrix is not Hermitian (deviation {:.3e})",
                herm.to_f64()
            )));
        }
        let rho = Self::from_matrix_unchecked(profile, matrix);
        let tr = rho.trace();
        if (tr - T::one()).abs() > tol::<T>(TOL_NORM) {
            return Err(Error::domain(format!("trace is {} not 1", tr.to_f64())));
        }
        let (vals, _) = hermitian_eigen(&rho.matrix);
        if let Some(&min) = vals.last() {
            if min < -tol::<T>(TOL_NORM) {
                return Err(Error::domain(format!(
                    "matrix is not positive semidefinite (eigenvalue {:.3e})",
                    min.to_f64()
                )));
            }
        }
        Ok(rho)
    }

    /// Hermitian-symmetrizes without further validation.
    pub(crate) fn from_matrix_unchecked(profile: DimensionProfile, matrix: CMatrix<T>) -> Self {
        let half: T = lit(0.5);
        let sym = (&matrix + matrix.adjoint()) * re(half);
        Self {
            profile,
            matrix: sym,
        }
    }

    pub fn from_pure(psi: &PureState<T>) -> Self {
        psi.density()
    }

    pub fn maximally_mixed(profile: DimensionProfile) -> Self {
        let n = profile.total();
        let w: T = T::one() / lit(n as f64);
        Self {
            profile,
            matrix: CMatrix::identity(n, n) * re(w),
        }
    }

    /// Convex combination `sum_k w_k rho_k`; weights must be nonnegative and
    /// sum to one.
    pub fn mixture(terms: &[(T, &DensityOperator<T>)]) -> Result<Self> {
        let first = terms
            .first()
            .ok_or_else(|| Error::domain("empty mixture"))?
            .1;
        let n = first.profile.total();
        let mut acc = CMatrix::zeros(n, n);
        let mut total = T::zero();
        for (w, rho) in terms {
            if rho.profile != first.profile {
                return Err(Error::domain("mixture components have different profiles"));
            }
            if *w < T::zero() {
                return Err(Error::domain("negative mixture weight"));
            }
            total += *w;
            acc += &rho.matrix * re(*w);
        }
        if (total - T::one()).abs() > tol::<T>(TOL_RENORM) {
            return Err(Error::domain(format!(
                "mixture weights sum to {}",
                total.to_f64()
            )));
        }
        Ok(Self::from_matrix_unchecked(first.profile.clone(), acc))
    }

    pub fn profile(&self) -> &DimensionProfile {
        &self.profile
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.matrix
    }

    pub fn trace(&self) -> T {
        self.matrix.trace().re
    }

    pub fn purity(&self) -> T {
        (&self.matrix * &self.matrix).trace().re
    }

    /// Number of eigenvalues above [`TOL_RANK`].
    pub fn rank(&self) -> usize {
        spectral_decomposition(self).rank
    }

    /// Largest elementwise modulus of `self - other`.
    pub fn max_deviation(&self, other: &Self) -> T {
        max_abs(&(&self.matrix - &other.matrix))
    }
}

pub(crate) fn max_abs<T: Real>(m: &CMatrix<T>) -> T {
    m.iter().fold(T::zero(), |acc, z| acc.max(cabs(*z)))
}

/// Largest elementwise modulus of `h - h^dagger`.
pub fn hermitian_deviation<T: Real>(h: &CMatrix<T>) -> T {
    if h.nrows() != h.ncols() {
        return T::max_value().unwrap_or_else(T::one);
    }
    let mut dev = T::zero();
    for i in 0..h.nrows() {
        for j in i..h.ncols() {
            dev = dev.max(cabs(h[(i, j)] - h[(j, i)].conj()));
        }
    }
    dev
}

/// Kronecker product in the fixed flattening order; the profile of the
/// result is the concatenation of the operand profiles.
pub trait TensorProduct: Sized {
    fn tensor(&self, other: &Self) -> Result<Self>;
}

impl<T: Real> TensorProduct for PureState<T> {
    fn tensor(&self, other: &Self) -> Result<Self> {
        Ok(Self {
            profile: self.profile.concat(&other.profile)?,
            amplitudes: self.amplitudes.kronecker(&other.amplitudes),
        })
    }
}

impl<T: Real> TensorProduct for DensityOperator<T> {
    fn tensor(&self, other: &Self) -> Result<Self> {
        Ok(Self {
            profile: self.profile.concat(&other.profile)?,
            matrix: self.matrix.kronecker(&other.matrix),
        })
    }
}

pub fn tensor_product<S: TensorProduct>(a: &S, b: &S) -> Result<S> {
    a.tensor(b)
}

fn sorted_keep(profile: &DimensionProfile, keep: &[usize]) -> Result<Vec<usize>> {
    if keep.is_empty() {
        return Err(Error::domain("partial trace must keep at least one party"));
    }
    profile.check_parties(keep, "partial trace")?;
    let mut keep = keep.to_vec();
    keep.sort_unstable();
    Ok(keep)
}

/// Traces out every party not in `keep`. The result lists the kept parties
/// in ascending order.
pub fn partial_trace<T: Real>(
    rho: &DensityOperator<T>,
    keep: &[usize],
) -> Result<DensityOperator<T>> {
    let keep = sorted_keep(&rho.profile, keep)?;
    if keep.len() == rho.profile.parties() {
        return Ok(rho.clone());
    }
    let split = Split::new(&rho.profile, &keep);
    let (k, e) = (split.rows(), split.cols());
    let m = &rho.matrix;
    let out = CMatrix::from_fn(k, k, |a, b| {
        let mut acc = C::new(T::zero(), T::zero());
        for x in 0..e {
            acc += m[(split.full(a, x), split.full(b, x))];
        }
        acc
    });
    Ok(DensityOperator::from_matrix_unchecked(
        rho.profile.restrict(&keep),
        out,
    ))
}

/// Transposes the digits of the parties in `transposed`.
pub fn partial_transpose<T: Real>(
    rho: &DensityOperator<T>,
    transposed: &[usize],
) -> Result<CMatrix<T>> {
    let profile = &rho.profile;
    profile.check_parties(transposed, "partial transpose")?;
    if transposed.is_empty() || transposed.len() == profile.parties() {
        return Err(Error::domain(
            "partial transpose needs a nonempty proper subset of parties",
        ));
    }
    let split = Split::new(profile, transposed);
    let (t, r) = (split.rows(), split.cols());
    let m = &rho.matrix;
    let mut out = CMatrix::zeros(m.nrows(), m.ncols());
    for a in 0..t {
        for b in 0..t {
            for x in 0..r {
                for y in 0..r {
                    out[(split.full(a, x), split.full(b, y))] =
                        m[(split.full(b, x), split.full(a, y))];
                }
            }
        }
    }
    Ok(out)
}

/// Eigenvalues (descending) and matching orthonormal eigenvector columns of a
/// Hermitian matrix. Only the lower triangle is read.
pub fn hermitian_eigen<T: Real>(h: &CMatrix<T>) -> (Vec<T>, CMatrix<T>) {
    let n = h.nrows();
    if n == 0 {
        return (Vec::new(), CMatrix::zeros(0, 0));
    }
    let eig = h.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        eig.eigenvalues[j]
            .partial_cmp(&eig.eigenvalues[i])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let vals = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vecs = CMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    (vals, vecs)
}

/// Eigenvalues only, descending.
pub fn hermitian_eigenvalues<T: Real>(h: &CMatrix<T>) -> Vec<T> {
    let mut vals: Vec<T> = h.clone().symmetric_eigenvalues().iter().copied().collect();
    vals.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    vals
}

/// Sum of absolute eigenvalues of a Hermitian matrix.
pub fn trace_norm<T: Real>(h: &CMatrix<T>) -> Result<T> {
    if h.nrows() != h.ncols() {
        return Err(Error::domain("trace norm of a non-square matrix"));
    }
    let dev = hermitian_deviation(h);
    if dev > tol::<T>(TOL_HERMITIAN_LOOSE) {
        return Err(Error::domain(format!(
            "trace norm input is not Hermitian (deviation {:.3e})",
            dev.to_f64()
        )));
    }
    Ok(hermitian_eigenvalues(h)
        .into_iter()
        .fold(T::zero(), |acc, v| acc + v.abs()))
}

/// Schmidt decomposition data of a pure state across a cut.
#[derive(Debug, Clone)]
pub struct SchmidtData<T: Real> {
    /// Squared Schmidt coefficients above [`TOL_RANK`], descending.
    pub coefficients: Vec<T>,
    /// Orthonormal vectors on `cut.side_a()`.
    pub left_basis: Vec<CVector<T>>,
    /// Orthonormal vectors on the complement.
    pub right_basis: Vec<CVector<T>>,
    pub rank: usize,
}

impl<T: Real> SchmidtData<T> {
    /// Rebuilds `sum_i sqrt(lambda_i) |l_i> (x) |r_i>` in the original
    /// flattening of `profile`.
    pub fn reconstruct(&self, profile: &DimensionProfile, cut: &Bipartition) -> CVector<T> {
        let split = Split::for_cut(profile, cut);
        let mut m = CMatrix::zeros(split.rows(), split.cols());
        for ((lam, l), r) in self
            .coefficients
            .iter()
            .zip(&self.left_basis)
            .zip(&self.right_basis)
        {
            m += (l * r.transpose()) * re(lam.sqrt());
        }
        split.flatten(&m)
    }
}

pub fn schmidt<T: Real>(phi: &PureState<T>, cut: &Bipartition) -> Result<SchmidtData<T>> {
    let m = phi.reshape(cut)?;
    let svd = m.svd(true, true);
    let u = svd.u.expect("left singular vectors requested");
    let v_t = svd.v_t.expect("right singular vectors requested");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&i, &j| {
        svd.singular_values[j]
            .partial_cmp(&svd.singular_values[i])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let cutoff = tol::<T>(TOL_RANK);
    let mut data = SchmidtData {
        coefficients: Vec::new(),
        left_basis: Vec::new(),
        right_basis: Vec::new(),
        rank: 0,
    };
    for i in order {
        let lam = svd.singular_values[i] * svd.singular_values[i];
        if lam <= cutoff {
            continue;
        }
        data.coefficients.push(lam);
        data.left_basis.push(u.column(i).into_owned());
        data.right_basis.push(v_t.row(i).transpose());
    }
    data.rank = data.coefficients.len();
    Ok(data)
}

/// Eigen-decomposition of a density operator.
#[derive(Debug, Clone)]
pub struct Spectrum<T: Real> {
    /// `(eigenvalue, eigenvector)` pairs, eigenvalues descending.
    pub pairs: Vec<(T, CVector<T>)>,
    /// Number of eigenvalues above [`TOL_RANK`].
    pub rank: usize,
}

impl<T: Real> Spectrum<T> {
    pub fn eigenvalues(&self) -> Vec<T> {
        self.pairs.iter().map(|(e, _)| *e).collect()
    }

    pub fn reconstruct(&self) -> CMatrix<T> {
        let n = self.pairs.first().map_or(0, |(_, v)| v.len());
        let mut m = CMatrix::zeros(n, n);
        for (e, v) in &self.pairs {
            m += (v * v.adjoint()) * re(*e);
        }
        m
    }
}

pub fn spectral_decomposition<T: Real>(rho: &DensityOperator<T>) -> Spectrum<T> {
    let (vals, vecs) = hermitian_eigen(&rho.matrix);
    let cutoff = tol::<T>(TOL_RANK);
    let rank = vals.iter().filter(|&&v| v > cutoff).count();
    let pairs = vals
        .into_iter()
        .enumerate()
        .map(|(i, v)| (v, vecs.column(i).into_owned()))
        .collect();
    Spectrum { pairs, rank }
}

/// Constructs `Complex::new(re, im)`; shorthand for tests and constructors.
#[inline]
pub fn c<T: Real>(re_part: f64, im_part: f64) -> C<T> {
    Complex::new(lit(re_part), lit(im_part))
}
