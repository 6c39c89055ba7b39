//! Constructors for the state families used throughout the crate:
//! generalized W-class states, their partially coherent superpositions with
//! the vacuum, phase damping, the two known CKW counterexamples, maximally
//! entangled states, and coarse-graining of W-class states over a partition
//! of the parties.

use nalgebra::Complex;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::qlinalg::{CMatrix, CVector, DensityOperator, DimensionProfile, PureState, TOL_RENORM};
use crate::scalar::{lit, re, tol, Real, C};

/// Coefficients `a[j][i-1]` of a generalized W-class state: party `j`
/// excited to level `i` (1..d) with every other party in `|0>`.
#[derive(Debug, Clone, PartialEq)]
pub struct WClassSpec<T: Real> {
    n: usize,
    d: usize,
    a: Vec<Vec<C<T>>>,
}

impl<T: Real> WClassSpec<T> {
    /// `a` has one row per party and `d - 1` columns. Off-normalization up to
    /// `1e-8` is renormalized away.
    pub fn new(d: usize, a: Vec<Vec<C<T>>>) -> Result<Self> {
        let n = a.len();
        if n < 2 {
            return Err(Error::domain("a W-class state needs at least two parties"));
        }
        if d < 2 {
            return Err(Error::domain("local dimension must be at least 2"));
        }
        if let Some(j) = a.iter().position(|row| row.len() != d - 1) {
            return Err(Error::domain(format!(
                "party {j} lists {} levels, expected {}",
                a[j].len(),
                d - 1
            )));
        }
        DimensionProfile::uniform(n, d)?;
        let total: T = a
            .iter()
            .flatten()
            .fold(T::zero(), |acc, z| acc + z.norm_sqr());
        if (total - T::one()).abs() > tol::<T>(TOL_RENORM) {
            return Err(Error::domain(format!(
                "W-class coefficients have squared norm {}, expected 1",
                total.to_f64()
            )));
        }
        let scale = re(T::one() / total.sqrt());
        let a = a
            .into_iter()
            .map(|row| row.into_iter().map(|z| z * scale).collect())
            .collect();
        Ok(Self { n, d, a })
    }

    /// `(|10..0> + |01..0> + ... + |0..01>) / sqrt(n)` on qubits.
    pub fn symmetric_qubit(n: usize) -> Result<Self> {
        let amp = re(T::one() / lit::<T>(n as f64).sqrt());
        Self::new(2, vec![vec![amp]; n])
    }

    pub fn parties(&self) -> usize {
        self.n
    }

    pub fn local_dim(&self) -> usize {
        self.d
    }

    pub fn profile(&self) -> DimensionProfile {
        DimensionProfile::uniform(self.n, self.d).expect("validated at construction")
    }

    /// Coefficient for party `j`, level `i` in `1..d`.
    pub fn coefficient(&self, j: usize, i: usize) -> C<T> {
        self.a[j][i - 1]
    }

    pub fn coefficients(&self) -> &[Vec<C<T>>] {
        &self.a
    }

    /// Total excitation weight `sum_i |a_{ji}|^2` of party `j`.
    pub fn party_weight(&self, j: usize) -> T {
        self.a[j]
            .iter()
            .fold(T::zero(), |acc, z| acc + z.norm_sqr())
    }

    /// Vacuum weight bookkeeping relative to party 0.
    pub fn script_a(&self) -> ScriptA<T> {
        let w0 = self.party_weight(0);
        let a = T::one() - w0;
        let a_i = (1..self.n)
            .map(|i| T::one() - w0 - self.party_weight(i))
            .collect();
        ScriptA { a, a_i }
    }
}

/// Partially coherent superposition of a W-class state with the vacuum.
#[derive(Debug, Clone, PartialEq)]
pub struct PcsSpec<T: Real> {
    pub w: WClassSpec<T>,
    p: T,
    lambda: T,
}

impl<T: Real> PcsSpec<T> {
    pub fn new(w: WClassSpec<T>, p: T, lambda: T) -> Result<Self> {
        let unit = |x: T| x >= T::zero() && x <= T::one();
        if !unit(p) {
            return Err(Error::domain(format!("p = {} outside [0, 1]", p.to_f64())));
        }
        if !unit(lambda) {
            return Err(Error::domain(format!(
                "lambda = {} outside [0, 1]",
                lambda.to_f64()
            )));
        }
        Ok(Self { w, p, lambda })
    }

    pub fn p(&self) -> T {
        self.p
    }

    pub fn lambda(&self) -> T {
        self.lambda
    }
}

/// `A = 1 - w_0` and `A_i = 1 - w_0 - w_i` for parties `i = 1..n`, where
/// `w_j` is the excitation weight of party `j`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScriptA<T: Real> {
    pub a: T,
    /// Entry `k` belongs to party `k + 1`.
    pub a_i: Vec<T>,
}

/// Ordered blocks of parties forming a partition of `0..n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct PartitionSpec {
    blocks: Vec<Vec<usize>>,
}

impl PartitionSpec {
    pub fn new(n: usize, blocks: Vec<Vec<usize>>) -> Result<Self> {
        let mut seen = vec![false; n];
        for block in &blocks {
            if block.is_empty() {
                return Err(Error::domain("partition has an empty block"));
            }
            for &p in block {
                if p >= n {
                    return Err(Error::domain(format!(
                        "partition names party {p} of a {n}-party system"
                    )));
                }
                if std::mem::replace(&mut seen[p], true) {
                    return Err(Error::domain(format!("party {p} appears in two blocks")));
                }
            }
        }
        if let Some(p) = seen.iter().position(|s| !s) {
            return Err(Error::domain(format!(
                "party {p} is not covered by the partition"
            )));
        }
        let blocks = blocks
            .into_iter()
            .map(|mut b| {
                b.sort_unstable();
                b
            })
            .collect();
        Ok(Self { blocks })
    }

    pub fn singletons(n: usize) -> Self {
        Self {
            blocks: (0..n).map(|p| vec![p]).collect(),
        }
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn parties(&self) -> usize {
        self.blocks.iter().map(Vec::len).sum()
    }

    /// Every set partition of `0..n` into exactly `m` blocks, blocks ordered
    /// by their smallest member.
    pub fn enumerate(n: usize, m: usize) -> Vec<Self> {
        fn rec(
            p: usize,
            n: usize,
            m: usize,
            cur: &mut Vec<Vec<usize>>,
            out: &mut Vec<PartitionSpec>,
        ) {
            if p == n {
                if cur.len() == m {
                    out.push(PartitionSpec {
                        blocks: cur.clone(),
                    });
                }
                return;
            }
            if cur.len() + (n - p) < m {
                return;
            }
            for b in 0..cur.len() {
                cur[b].push(p);
                rec(p + 1, n, m, cur, out);
                cur[b].pop();
            }
            if cur.len() < m {
                cur.push(vec![p]);
                rec(p + 1, n, m, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        rec(0, n, m, &mut Vec::new(), &mut out);
        out
    }
}

impl std::fmt::Display for PartitionSpec {
    /// One-based, e.g. `1|23`.
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let sep = if self.parties() > 9 { "," } else { "" };
        let parts: Vec<String> = self
            .blocks
            .iter()
            .map(|b| {
                b.iter()
                    .map(|p| (p + 1).to_string())
                    .collect::<Vec<_>>()
                    .join(sep)
            })
            .collect();
        write!(f, "{}", parts.join("|"))
    }
}

fn excitation_digits(n: usize, party: usize, level: usize) -> Vec<usize> {
    let mut digits = vec![0; n];
    digits[party] = level;
    digits
}

/// The generalized W-class state `sum_{j,i} a_{ji} |0..i_j..0>`.
pub fn build_w_state<T: Real>(spec: &WClassSpec<T>) -> PureState<T> {
    let profile = spec.profile();
    let mut amps = CVector::zeros(profile.total());
    for j in 0..spec.n {
        for i in 1..spec.d {
            let idx = profile
                .index(&excitation_digits(spec.n, j, i))
                .expect("digits in range");
            amps[idx] = spec.coefficient(j, i);
        }
    }
    PureState::new(profile, amps).expect("W-class spec is normalized")
}

/// `|0...0>` on the profile.
pub fn vacuum<T: Real>(profile: &DimensionProfile) -> PureState<T> {
    PureState::basis(profile.clone(), &vec![0; profile.parties()]).expect("vacuum digits")
}

/// `sqrt(p) |W> + sqrt(1-p) |0...0>`.
pub fn coherent_superposition<T: Real>(spec: &PcsSpec<T>) -> PureState<T> {
    let w = build_w_state(&spec.w);
    let mut amps = w.amplitudes() * re(spec.p.sqrt());
    amps[0] += re((T::one() - spec.p).sqrt());
    PureState::new(w.profile().clone(), amps).expect("superposition is normalized")
}

/// `p|W><W| + (1-p)|vac><vac| + lambda sqrt(p(1-p)) (|W><vac| + |vac><W|)`.
pub fn build_pcs_density<T: Real>(spec: &PcsSpec<T>) -> DensityOperator<T> {
    let w = build_w_state(&spec.w);
    let profile = w.profile().clone();
    let wv = w.amplitudes();
    let dim = profile.total();
    let (p, lam) = (spec.p, spec.lambda);
    let mut m: CMatrix<T> = (wv * wv.adjoint()) * re(p);
    m[(0, 0)] += re(T::one() - p);
    let coh = re(lam * (p * (T::one() - p)).sqrt());
    for k in 0..dim {
        m[(k, 0)] += wv[k] * coh;
        m[(0, k)] += wv[k].conj() * coh;
    }
    DensityOperator::from_matrix_unchecked(profile, m)
}

/// A channel given by its Kraus operators.
#[derive(Debug, Clone)]
pub struct KrausChannel<T: Real> {
    pub operators: Vec<CMatrix<T>>,
}

impl<T: Real> KrausChannel<T> {
    /// Phase damping relative to the vacuum: `E0 = sqrt(lam) I`,
    /// `E1 = sqrt(1-lam) (I - |vac><vac|)`, `E2 = sqrt(1-lam) |vac><vac|`,
    /// with `|vac> = |0...0>` on the full space.
    pub fn phase_damping(profile: &DimensionProfile, lam: T) -> Result<Self> {
        if !(lam >= T::zero() && lam <= T::one()) {
            return Err(Error::domain(format!(
                "damping parameter {} outside [0, 1]",
                lam.to_f64()
            )));
        }
        let dim = profile.total();
        let id = CMatrix::<T>::identity(dim, dim);
        let mut vac = CMatrix::<T>::zeros(dim, dim);
        vac[(0, 0)] = re(T::one());
        let keep = re(lam.sqrt());
        let damp = re((T::one() - lam).sqrt());
        Ok(Self {
            operators: vec![&id * keep, (&id - &vac) * damp, vac * damp],
        })
    }

    /// Largest elementwise deviation of `sum_k E_k^dagger E_k` from identity.
    pub fn completeness_error(&self) -> T {
        let dim = self.operators[0].nrows();
        let mut acc = CMatrix::<T>::zeros(dim, dim);
        for e in &self.operators {
            acc += e.adjoint() * e;
        }
        crate::qlinalg::max_abs(&(acc - CMatrix::identity(dim, dim)))
    }

    pub fn apply(&self, rho: &DensityOperator<T>) -> DensityOperator<T> {
        let mut out = CMatrix::<T>::zeros(rho.matrix().nrows(), rho.matrix().ncols());
        for e in &self.operators {
            out += e * rho.matrix() * e.adjoint();
        }
        DensityOperator::from_matrix_unchecked(rho.profile().clone(), out)
    }
}

/// Phase damping of a pure state.
pub fn apply_phase_damping<T: Real>(psi: &PureState<T>, lam: T) -> Result<DensityOperator<T>> {
    let channel = KrausChannel::phase_damping(psi.profile(), lam)?;
    Ok(channel.apply(&psi.density()))
}

/// The totally antisymmetric three-qutrit state, levels `1,2,3` written as
/// `0,1,2`.
pub fn ou_state<T: Real>() -> PureState<T> {
    let s = re(T::one() / lit::<T>(6.0).sqrt());
    let terms = [
        ([0, 1, 2], s),
        ([0, 2, 1], -s),
        ([1, 2, 0], s),
        ([1, 0, 2], -s),
        ([2, 0, 1], s),
        ([2, 1, 0], -s),
    ];
    let terms: Vec<(Vec<usize>, C<T>)> = terms.iter().map(|(d, a)| (d.to_vec(), *a)).collect();
    PureState::from_terms(DimensionProfile::new([3, 3, 3]).expect("valid"), &terms)
        .expect("normalized")
}

/// `(sqrt2|010> + sqrt2|101> + |200> + |211>)/sqrt6` on `3 x 2 x 2`.
pub fn kim_sanders_state<T: Real>() -> PureState<T> {
    let s6 = lit::<T>(6.0).sqrt();
    let a = re(lit::<T>(2.0).sqrt() / s6);
    let b = re(T::one() / s6);
    let terms = vec![
        (vec![0, 1, 0], a),
        (vec![1, 0, 1], a),
        (vec![2, 0, 0], b),
        (vec![2, 1, 1], b),
    ];
    PureState::from_terms(DimensionProfile::new([3, 2, 2]).expect("valid"), &terms)
        .expect("normalized")
}

/// `sum_i |ii> / sqrt(d)` on `d x d`.
pub fn maximally_entangled<T: Real>(d: usize) -> Result<PureState<T>> {
    if d < 2 {
        return Err(Error::domain("maximally entangled state needs d >= 2"));
    }
    let amp = re(T::one() / lit::<T>(d as f64).sqrt());
    let terms: Vec<(Vec<usize>, C<T>)> = (0..d).map(|i| (vec![i, i], amp)).collect();
    PureState::from_terms(DimensionProfile::uniform(2, d)?, &terms)
}

/// `(|0...0> + |1...1>)/sqrt2` on `n` qubits.
pub fn ghz_state<T: Real>(n: usize) -> Result<PureState<T>> {
    let s = re(lit::<T>(0.5).sqrt());
    PureState::from_terms(
        DimensionProfile::uniform(n, 2)?,
        &[(vec![0; n], s), (vec![1; n], s)],
    )
}

/// Regards the W-class state as an `m`-party W-class state over the blocks
/// of `partition`. Block `s`, level `i` gets the real coefficient
/// `sqrt(q_{si})`, `q_{si} = sum_{j in P_s} |a_{ji}|^2`; the phases live in
/// the block-local basis (see [`coarse_grain_isometry`]).
pub fn coarse_grain<T: Real>(
    spec: &WClassSpec<T>,
    partition: &PartitionSpec,
) -> Result<WClassSpec<T>> {
    if partition.parties() != spec.n {
        return Err(Error::domain(format!(
            "partition covers {} parties, spec has {}",
            partition.parties(),
            spec.n
        )));
    }
    if partition.len() < 2 {
        return Err(Error::domain("coarse-graining needs at least two blocks"));
    }
    let a = partition
        .blocks()
        .iter()
        .map(|block| {
            (1..spec.d)
                .map(|i| {
                    let q = block
                        .iter()
                        .fold(T::zero(), |acc, &j| acc + spec.coefficient(j, i).norm_sqr());
                    re(q.sqrt())
                })
                .collect()
        })
        .collect();
    WClassSpec::new(spec.d, a)
}

/// Block-local isometry mapping coarse level `i` of block `s` to the
/// normalized state `|x_{si}>` of that block (and `0` to `|0..0>`).
#[derive(Debug, Clone)]
pub struct BlockIsometry<T: Real> {
    profile: DimensionProfile,
    partition: PartitionSpec,
    /// `columns[s][i]`: image of coarse level `i` of block `s`, over the
    /// block's parties in ascending order.
    columns: Vec<Vec<CVector<T>>>,
}

pub fn coarse_grain_isometry<T: Real>(
    spec: &WClassSpec<T>,
    partition: &PartitionSpec,
) -> Result<BlockIsometry<T>> {
    if partition.parties() != spec.n {
        return Err(Error::domain("partition does not match the spec"));
    }
    let d = spec.d;
    let cutoff = tol::<T>(1e-15);
    let columns = partition
        .blocks()
        .iter()
        .map(|block| {
            let bp = DimensionProfile::uniform(block.len(), d).expect("block profile");
            let mut cols = Vec::with_capacity(d);
            let mut vac = CVector::zeros(bp.total());
            vac[0] = re(T::one());
            cols.push(vac);
            for i in 1..d {
                let mut x = CVector::zeros(bp.total());
                for (pos, &j) in block.iter().enumerate() {
                    let idx = bp
                        .index(&excitation_digits(block.len(), pos, i))
                        .expect("digits in range");
                    x[idx] = spec.coefficient(j, i);
                }
                let norm = x.norm();
                if norm > cutoff {
                    x.unscale_mut(norm);
                } else {
                    // Any unit vector in the level-i excitation sector works.
                    x.fill(Complex::new(T::zero(), T::zero()));
                    x[bp.index(&excitation_digits(block.len(), 0, i))
                        .expect("digits")] = re(T::one());
                }
                cols.push(x);
            }
            cols
        })
        .collect();
    Ok(BlockIsometry {
        profile: spec.profile(),
        partition: partition.clone(),
        columns,
    })
}

impl<T: Real> BlockIsometry<T> {
    /// Maps a state on the coarse profile into the original profile.
    pub fn embed(&self, coarse: &PureState<T>) -> Result<PureState<T>> {
        let m = self.partition.len();
        let d = self.profile.dims()[0];
        let coarse_profile = DimensionProfile::uniform(m, d)?;
        if coarse.profile() != &coarse_profile {
            return Err(Error::domain("state does not live on the coarse profile"));
        }
        let n = self.profile.parties();
        let strides = self.profile.strides();
        let zero = Complex::new(T::zero(), T::zero());
        let mut out = CVector::zeros(self.profile.total());
        for (cidx, amp) in coarse.amplitudes().iter().enumerate() {
            if *amp == zero {
                continue;
            }
            let levels = coarse_profile.digits(cidx);
            // Expand the product of block vectors into the full space.
            let mut acc: Vec<(usize, C<T>)> = vec![(0, *amp)];
            for (s, block) in self.partition.blocks().iter().enumerate() {
                let col = &self.columns[s][levels[s]];
                let bp = DimensionProfile::uniform(block.len(), d)?;
                let mut next = Vec::new();
                for (bidx, v) in col.iter().enumerate() {
                    if *v == zero {
                        continue;
                    }
                    let bd = bp.digits(bidx);
                    let off: usize = block
                        .iter()
                        .zip(&bd)
                        .map(|(&party, &k)| k * strides[party])
                        .sum();
                    for &(o, a) in &acc {
                        next.push((o + off, a * *v));
                    }
                }
                acc = next;
            }
            for (o, a) in acc {
                out[o] += a;
            }
        }
        debug_assert_eq!(n, self.profile.parties());
        PureState::new(self.profile.clone(), out)
    }
}

/// The two-party marginal on parties `0` and `i` of the partially coherent
/// state, written out directly. The vacuum weight is `p A_i + 1 - p`, the
/// value fixed by tracing out the other parties.
pub fn pair_marginal_analytic<T: Real>(spec: &PcsSpec<T>, i: usize) -> Result<DensityOperator<T>> {
    let w = &spec.w;
    if i == 0 || i >= w.n {
        return Err(Error::domain(format!(
            "pair partner {i} must be in 1..{}",
            w.n
        )));
    }
    let d = w.d;
    let profile = DimensionProfile::uniform(2, d)?;
    let (p, lam) = (spec.p, spec.lambda);
    // x = sum_k a_{0k} |k0> + a_{ik} |0k>
    let mut x = CVector::<T>::zeros(d * d);
    for k in 1..d {
        x[k * d] = w.coefficient(0, k);
        x[k] = w.coefficient(i, k);
    }
    let a_i = w.script_a().a_i[i - 1];
    let mut m: CMatrix<T> = (&x * x.adjoint()) * re(p);
    m[(0, 0)] += re(p * a_i + T::one() - p);
    let coh = re(lam * (p * (T::one() - p)).sqrt());
    for k in 0..d * d {
        m[(k, 0)] += x[k] * coh;
        m[(0, k)] += x[k].conj() * coh;
    }
    Ok(DensityOperator::from_matrix_unchecked(profile, m))
}
