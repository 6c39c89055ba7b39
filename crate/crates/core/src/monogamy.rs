//! Monogamy audits.
//!
//! Every audit compares the squared entanglement of a focus party with the
//! rest against the sum of squared pairwise terms. Pair terms carry their
//! bound semantics: an optimizer minimum is an upper bound on a convex roof,
//! so an apparent violation is only *certified* when it survives replacing
//! every non-exact term with a proven lower bound.

use nalgebra::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::convexroof::{
    concurrence_floor, concurrence_ppt_floor, flatness_scan, optimize_roof, Direction, OptConfig,
};
use crate::error::{Error, Result};
use crate::measures::{
    concurrence_pure, negativity_mixed, negativity_pure_checked, wootters_concurrence_2q,
    BoundKind, MeasureKind, Method, PureMeasure,
};
use crate::qlinalg::{Bipartition, CMatrix, CVector, DensityOperator, DimensionProfile, PureState};
use crate::scalar::{lit, tol, Real};
use crate::states::{build_pcs_density, coarse_grain, PartitionSpec, PcsSpec};

/// Verdict boundary: residuals within this distance of zero are saturated.
pub const TOL_SAT: f64 = 1e-7;
/// Agreement required between the analytic global value and the sampled
/// decomposition averages.
pub const TOL_CROSS_CHECK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Holds,
    Saturated,
    CandidateViolation,
    CertifiedViolation,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::Holds => "holds",
            Verdict::Saturated => "saturated",
            Verdict::CandidateViolation => "candidate_violation",
            Verdict::CertifiedViolation => "certified_violation",
        }
    }

    pub fn is_violation(self) -> bool {
        matches!(
            self,
            Verdict::CandidateViolation | Verdict::CertifiedViolation
        )
    }
}

/// Which inequality an audit checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Inequality {
    /// Concurrence (CKW-type).
    Ckw,
    /// Convex-roof extended negativity.
    Cren,
    /// Plain PPT negativity.
    Negativity,
    /// Concurrence of assistance.
    Coa,
    /// Convex-roof extended negativity of assistance.
    Crenoa,
}

impl Inequality {
    pub const ALL: [Inequality; 5] = [
        Inequality::Ckw,
        Inequality::Cren,
        Inequality::Negativity,
        Inequality::Coa,
        Inequality::Crenoa,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Inequality::Ckw => "ckw",
            Inequality::Cren => "cren",
            Inequality::Negativity => "negativity",
            Inequality::Coa => "coa",
            Inequality::Crenoa => "crenoa",
        }
    }

    /// The measure whose pair values enter the right-hand side.
    pub fn measure(self) -> MeasureKind {
        match self {
            Inequality::Ckw => MeasureKind::Concurrence,
            Inequality::Cren => MeasureKind::Cren,
            Inequality::Negativity => MeasureKind::Negativity,
            Inequality::Coa => MeasureKind::Coa,
            Inequality::Crenoa => MeasureKind::Crenoa,
        }
    }
}

impl std::str::FromStr for Inequality {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Inequality::ALL
            .into_iter()
            .find(|q| q.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::domain(format!("unknown inequality `{s}`")))
    }
}

/// One pairwise term of an audit.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditTerm<T: Real> {
    /// The other party of the pair (0-based; a block index for coarse-grained
    /// audits).
    pub partner: usize,
    pub value: T,
    pub bound: BoundKind,
    pub method: Method,
    /// A proven lower bound, present when `value` is an upper bound.
    pub lower: Option<T>,
}

impl<T: Real> AuditTerm<T> {
    fn exact(partner: usize, value: T, method: Method) -> Self {
        Self {
            partner,
            value,
            bound: BoundKind::Exact,
            method,
            lower: None,
        }
    }

    pub fn squared(&self) -> T {
        self.value * self.value
    }

    /// Smallest value the true term can take given the bound semantics.
    pub fn certified_lower(&self) -> T {
        match self.bound {
            BoundKind::Exact | BoundKind::LowerBound => self.value,
            BoundKind::UpperBound => self.lower.unwrap_or_else(T::zero),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditReport<T: Real> {
    pub state_id: String,
    /// Focus party, 0-based.
    pub focus: usize,
    pub inequality: Inequality,
    pub lhs_sq: T,
    pub terms: Vec<AuditTerm<T>>,
    pub rhs_sq_sum: T,
    /// `lhs_sq - rhs_sq_sum`.
    pub residual: T,
    pub verdict: Verdict,
}

impl<T: Real> AuditReport<T> {
    pub fn with_state_id(mut self, id: impl Into<String>) -> Self {
        self.state_id = id.into();
        self
    }

    pub fn rhs_terms_sq(&self) -> Vec<T> {
        self.terms.iter().map(AuditTerm::squared).collect()
    }

    /// `lhs_sq` minus the sum of squared certified lower bounds.
    pub fn certified_residual(&self) -> T {
        self.terms.iter().fold(self.lhs_sq, |acc, t| {
            let l = t.certified_lower();
            acc - l * l
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditConfig {
    pub opt: OptConfig,
    pub tol_sat: f64,
    /// Decompositions drawn when cross-checking analytic values.
    pub flatness_samples: usize,
}

impl Default for AuditConfig {
    fn default() -> Self {
        Self {
            opt: OptConfig::default(),
            tol_sat: TOL_SAT,
            flatness_samples: 16,
        }
    }
}

fn primal_report<T: Real>(
    inequality: Inequality,
    focus: usize,
    lhs_sq: T,
    terms: Vec<AuditTerm<T>>,
    tol_sat: f64,
) -> AuditReport<T> {
    let rhs_sq_sum = terms.iter().fold(T::zero(), |acc, t| acc + t.squared());
    let residual = lhs_sq - rhs_sq_sum;
    let mut report = AuditReport {
        state_id: String::new(),
        focus,
        inequality,
        lhs_sq,
        terms,
        rhs_sq_sum,
        residual,
        verdict: Verdict::Holds,
    };
    let t = tol::<T>(tol_sat);
    report.verdict = if residual.abs() <= t {
        Verdict::Saturated
    } else if residual > t {
        Verdict::Holds
    } else if report.certified_residual() < -t {
        Verdict::CertifiedViolation
    } else {
        Verdict::CandidateViolation
    };
    report
}

/// Dual inequalities read `lhs <= sum`; their terms are lower bounds, so
/// only agreement can be certified.
fn dual_report<T: Real>(
    inequality: Inequality,
    focus: usize,
    lhs_sq: T,
    terms: Vec<AuditTerm<T>>,
    tol_sat: f64,
) -> AuditReport<T> {
    let rhs_sq_sum = terms.iter().fold(T::zero(), |acc, t| acc + t.squared());
    let residual = lhs_sq - rhs_sq_sum;
    let t = tol::<T>(tol_sat);
    let verdict = if residual.abs() <= t {
        Verdict::Saturated
    } else if residual < -t {
        Verdict::Holds
    } else {
        Verdict::CandidateViolation
    };
    AuditReport {
        state_id: String::new(),
        focus,
        inequality,
        lhs_sq,
        terms,
        rhs_sq_sum,
        residual,
        verdict,
    }
}

/// Marginal on `{focus, partner}` and the cut isolating `focus` in it.
fn pair_marginal<T: Real>(
    psi: &PureState<T>,
    focus: usize,
    partner: usize,
) -> Result<(DensityOperator<T>, Bipartition)> {
    let rho = psi.marginal(&[focus, partner])?;
    let cut = Bipartition::single(2, usize::from(partner < focus))?;
    Ok((rho, cut))
}

fn check_focus<T: Real>(psi: &PureState<T>, focus: usize) -> Result<Bipartition> {
    let n = psi.profile().parties();
    if n < 3 {
        return Err(Error::domain(format!(
            "monogamy audits need at least three parties, got {n}"
        )));
    }
    Bipartition::single(n, focus)
}

fn partners(n: usize, focus: usize) -> impl Iterator<Item = usize> {
    (0..n).filter(move |&j| j != focus)
}

fn is_two_qubit<T: Real>(rho: &DensityOperator<T>) -> bool {
    rho.profile().dims() == [2, 2]
}

/// Roof term from the optimizer, with the bound kind it actually earned.
fn roof_term<T: Real>(
    partner: usize,
    rho: &DensityOperator<T>,
    cut: &Bipartition,
    measure: PureMeasure,
    direction: Direction,
    opt: &OptConfig,
) -> Result<AuditTerm<T>> {
    let res = optimize_roof(rho, cut, measure, direction, opt)?;
    Ok(AuditTerm {
        partner,
        value: res.value,
        bound: res.bound_kind,
        method: if res.bound_kind == BoundKind::Exact {
            Method::ClosedForm
        } else {
            Method::Optimizer
        },
        lower: None,
    })
}

/// Negativity monogamy with convex-roof pair terms.
pub fn cren_audit<T: Real>(
    psi: &PureState<T>,
    focus: usize,
    cfg: &AuditConfig,
) -> Result<AuditReport<T>> {
    let cut = check_focus(psi, focus)?;
    let lhs = negativity_pure_checked(psi, &cut)?;
    let n = psi.profile().parties();
    let mut terms = Vec::with_capacity(n - 1);
    for j in partners(n, focus) {
        let (rho, pcut) = pair_marginal(psi, focus, j)?;
        let term = if is_two_qubit(&rho) {
            AuditTerm::exact(j, wootters_concurrence_2q(&rho)?, Method::ClosedForm)
        } else {
            let mut t = roof_term(
                j,
                &rho,
                &pcut,
                PureMeasure::Negativity,
                Direction::Min,
                &cfg.opt,
            )?;
            if t.bound == BoundKind::UpperBound {
                t.lower = Some(negativity_mixed(&rho, &pcut)?);
            }
            t
        };
        terms.push(term);
    }
    Ok(primal_report(
        Inequality::Cren,
        focus,
        lhs * lhs,
        terms,
        cfg.tol_sat,
    ))
}

/// Concurrence monogamy.
pub fn ckw_audit<T: Real>(
    psi: &PureState<T>,
    focus: usize,
    cfg: &AuditConfig,
) -> Result<AuditReport<T>> {
    let cut = check_focus(psi, focus)?;
    let lhs = concurrence_pure(psi, &cut)?;
    let n = psi.profile().parties();
    let mut terms = Vec::with_capacity(n - 1);
    for j in partners(n, focus) {
        let (rho, pcut) = pair_marginal(psi, focus, j)?;
        let term = if is_two_qubit(&rho) {
            AuditTerm::exact(j, wootters_concurrence_2q(&rho)?, Method::ClosedForm)
        } else {
            let mut t = roof_term(
                j,
                &rho,
                &pcut,
                PureMeasure::Concurrence,
                Direction::Min,
                &cfg.opt,
            )?;
            if t.bound == BoundKind::UpperBound {
                let floor = concurrence_floor(&rho, &pcut)?;
                let caf = concurrence_ppt_floor(&rho, &pcut)?;
                t.lower = Some(floor.max(caf).min(t.value));
            }
            t
        };
        terms.push(term);
    }
    Ok(primal_report(
        Inequality::Ckw,
        focus,
        lhs * lhs,
        terms,
        cfg.tol_sat,
    ))
}

/// Assistance (dual) monogamy; `inequality` must be `Coa` or `Crenoa`.
pub fn dual_audit<T: Real>(
    psi: &PureState<T>,
    focus: usize,
    inequality: Inequality,
    cfg: &AuditConfig,
) -> Result<AuditReport<T>> {
    let measure = match inequality {
        Inequality::Coa => PureMeasure::Concurrence,
        Inequality::Crenoa => PureMeasure::Negativity,
        other => {
            return Err(Error::domain(format!(
                "`{}` is not an assistance inequality",
                other.name()
            )))
        }
    };
    let cut = check_focus(psi, focus)?;
    let lhs = match measure {
        PureMeasure::Concurrence => concurrence_pure(psi, &cut)?,
        PureMeasure::Negativity => negativity_pure_checked(psi, &cut)?,
    };
    let n = psi.profile().parties();
    let mut terms = Vec::with_capacity(n - 1);
    for j in partners(n, focus) {
        let (rho, pcut) = pair_marginal(psi, focus, j)?;
        terms.push(roof_term(
            j,
            &rho,
            &pcut,
            measure,
            Direction::Max,
            &cfg.opt,
        )?);
    }
    Ok(dual_report(
        inequality,
        focus,
        lhs * lhs,
        terms,
        cfg.tol_sat,
    ))
}

/// Negativity monogamy with plain PPT pair terms; no optimization.
pub fn negativity_audit<T: Real>(
    psi: &PureState<T>,
    focus: usize,
    cfg: &AuditConfig,
) -> Result<AuditReport<T>> {
    let cut = check_focus(psi, focus)?;
    let lhs = negativity_pure_checked(psi, &cut)?;
    let n = psi.profile().parties();
    let mut terms = Vec::with_capacity(n - 1);
    for j in partners(n, focus) {
        let (rho, pcut) = pair_marginal(psi, focus, j)?;
        terms.push(AuditTerm::exact(
            j,
            negativity_mixed(&rho, &pcut)?,
            Method::TraceNorm,
        ));
    }
    Ok(primal_report(
        Inequality::Negativity,
        focus,
        lhs * lhs,
        terms,
        cfg.tol_sat,
    ))
}

/// Runs one inequality by name.
pub fn audit<T: Real>(
    psi: &PureState<T>,
    focus: usize,
    inequality: Inequality,
    cfg: &AuditConfig,
) -> Result<AuditReport<T>> {
    match inequality {
        Inequality::Ckw => ckw_audit(psi, focus, cfg),
        Inequality::Cren => cren_audit(psi, focus, cfg),
        Inequality::Negativity => negativity_audit(psi, focus, cfg),
        Inequality::Coa | Inequality::Crenoa => dual_audit(psi, focus, inequality, cfg),
    }
}

/// Closed-form negativity roofs of a partially coherent W-class state.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalyticWValues<T: Real> {
    pub p: T,
    pub lambda: T,
    /// Block 0 against the rest: `2p sqrt(A (1 - A))`.
    pub global_cren: T,
    /// Block 0 with block `k + 1`: `2p sqrt((1 - A)(A - A_{k+1}))`.
    pub pair_cren: Vec<T>,
    /// `global^2 - sum pair^2`.
    pub residual: T,
    /// Mean and spread of sampled decomposition averages of the actual
    /// density operator across the same cut.
    pub scan_mean: T,
    pub scan_max_dev: T,
}

/// Evaluates the closed forms (over the blocks of `partition`, if given) and
/// cross-checks the global value against sampled decompositions of the
/// mixed state.
pub fn analytic_w_audit<T: Real>(
    spec: &PcsSpec<T>,
    partition: Option<&PartitionSpec>,
    cfg: &AuditConfig,
) -> Result<(AnalyticWValues<T>, AuditReport<T>)> {
    let n = spec.w.parties();
    let coarse = match partition {
        Some(part) => coarse_grain(&spec.w, part)?,
        None => spec.w.clone(),
    };
    let sa = coarse.script_a();
    let p = spec.p();
    let two_p = lit::<T>(2.0) * p;
    let one = T::one();
    let global_cren = two_p * (sa.a * (one - sa.a)).max(T::zero()).sqrt();
    let pair_cren: Vec<T> = sa
        .a_i
        .iter()
        .map(|&ai| two_p * ((one - sa.a) * (sa.a - ai)).max(T::zero()).sqrt())
        .collect();

    let block0 = match partition {
        Some(part) => part.blocks()[0].clone(),
        None => vec![0],
    };
    let rho = build_pcs_density(spec);
    let cut = Bipartition::new(n, block0)?;
    let scan = flatness_scan(&rho, &cut, cfg.flatness_samples.max(2), cfg.opt.seed)?;
    let limit = tol::<T>(TOL_CROSS_CHECK);
    if (scan.mean - global_cren).abs() > limit || scan.max_abs_dev > limit {
        return Err(Error::Numerical(format!(
            "analytic global value {} disagrees with sampled decompositions \
             (mean {}, spread {})",
            global_cren.to_f64(),
            scan.mean.to_f64(),
            scan.max_abs_dev.to_f64()
        )));
    }

    let terms: Vec<AuditTerm<T>> = pair_cren
        .iter()
        .enumerate()
        .map(|(k, &v)| AuditTerm::exact(k + 1, v, Method::ClosedForm))
        .collect();
    let report = primal_report(
        Inequality::Cren,
        0,
        global_cren * global_cren,
        terms,
        cfg.tol_sat,
    );
    let values = AnalyticWValues {
        p,
        lambda: spec.lambda(),
        global_cren,
        pair_cren,
        residual: report.residual,
        scan_mean: scan.mean,
        scan_max_dev: scan.max_abs_dev,
    };
    Ok((values, report))
}

/// Complex standard normal amplitudes, normalized.
pub fn random_pure_state<T: Real, R: Rng + ?Sized>(
    profile: &DimensionProfile,
    rng: &mut R,
) -> PureState<T> {
    let v = random_vector::<T, R>(profile.total(), rng);
    PureState::normalized(profile.clone(), v).expect("a Gaussian vector is nonzero")
}

/// `G G^dagger / tr` for a `total x rank` Gaussian matrix `G`; rank `rank`
/// almost surely.
pub fn random_density<T: Real, R: Rng + ?Sized>(
    profile: &DimensionProfile,
    rank: usize,
    rng: &mut R,
) -> Result<DensityOperator<T>> {
    let dim = profile.total();
    if rank == 0 || rank > dim {
        return Err(Error::domain(format!("rank {rank} outside 1..={dim}")));
    }
    let cols: Vec<CVector<T>> = (0..rank).map(|_| random_vector::<T, R>(dim, rng)).collect();
    let g = CMatrix::from_columns(&cols);
    let m = &g * g.adjoint();
    let tr = m.trace().re;
    DensityOperator::new(profile.clone(), m / Complex::new(tr, T::zero()))
}

fn random_vector<T: Real, R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CVector<T> {
    CVector::from_fn(dim, |_, _| {
        let a: f64 = rng.sample(StandardNormal);
        let b: f64 = rng.sample(StandardNormal);
        Complex::new(lit(a), lit(b))
    })
}

/// Findings of a violation hunt.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HuntSummary<T: Real> {
    pub trials: usize,
    pub candidates: usize,
    pub certified: usize,
    /// Candidate and certified violations, sorted by state id.
    pub findings: Vec<AuditReport<T>>,
}

/// Audits `trials` seeded random pure states on `profile` (focus party 0)
/// for the convex-roof negativity inequality and keeps the violations.
pub fn hunt<T: Real>(
    profile: &DimensionProfile,
    trials: usize,
    seed: u64,
    cfg: &AuditConfig,
) -> Result<HuntSummary<T>> {
    if profile.parties() < 3 {
        return Err(Error::domain("hunting needs at least three parties"));
    }
    let results: Vec<Result<Option<AuditReport<T>>>> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(trial as u64);
            let psi = random_pure_state::<T, _>(profile, &mut rng);
            let report = cren_audit(&psi, 0, cfg)?;
            Ok(report
                .verdict
                .is_violation()
                .then(|| report.with_state_id(format!("hunt-{seed}-{trial:05}"))))
        })
        .collect();
    let mut findings = Vec::new();
    for r in results {
        if let Some(report) = r? {
            findings.push(report);
        }
    }
    findings.sort_by(|a, b| a.state_id.cmp(&b.state_id));
    let certified = findings
        .iter()
        .filter(|r| r.verdict == Verdict::CertifiedViolation)
        .count();
    Ok(HuntSummary {
        trials,
        candidates: findings.len() - certified,
        certified,
        findings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{build_w_state, ghz_state, kim_sanders_state, ou_state, WClassSpec};

    fn cfg() -> AuditConfig {
        AuditConfig::default()
    }

    #[test]
    fn ou_cren_holds_and_ckw_is_certified() {
        let psi = ou_state::<f64>();
        let cren = cren_audit(&psi, 0, &cfg()).unwrap();
        assert!((cren.lhs_sq - 4.0).abs() < 1e-9);
        assert!((cren.residual - 2.0).abs() < 1e-6, "{}", cren.residual);
        assert_eq!(cren.verdict, Verdict::Holds);
        let ckw = ckw_audit(&psi, 0, &cfg()).unwrap();
        assert!((ckw.lhs_sq - 4.0 / 3.0).abs() < 1e-9);
        assert_eq!(ckw.verdict, Verdict::CertifiedViolation);
    }

    #[test]
    fn kim_sanders_verdicts() {
        let psi = kim_sanders_state::<f64>();
        let cren = cren_audit(&psi, 0, &cfg()).unwrap();
        assert!((cren.residual - (4.0 - 16.0 / 9.0)).abs() < 1e-6);
        assert_eq!(cren.verdict, Verdict::Holds);
        let ckw = ckw_audit(&psi, 0, &cfg()).unwrap();
        assert!((ckw.residual - (12.0 / 9.0 - 16.0 / 9.0)).abs() < 1e-3);
        assert_eq!(ckw.verdict, Verdict::CertifiedViolation);
    }

    #[test]
    fn ghz_pair_terms_vanish() {
        let psi = ghz_state::<f64>(3).unwrap();
        let r = cren_audit(&psi, 0, &cfg()).unwrap();
        assert!(r.terms.iter().all(|t| t.value.abs() < 1e-12));
        assert!((r.residual - r.lhs_sq).abs() < 1e-12);
        let d = dual_audit(&psi, 0, Inequality::Coa, &cfg()).unwrap();
        assert_eq!(d.verdict, Verdict::Holds);
    }

    #[test]
    fn w_state_saturates_exact_audits() {
        let psi = build_w_state(&WClassSpec::<f64>::symmetric_qubit(3).unwrap());
        for q in [Inequality::Ckw, Inequality::Cren] {
            let r = audit(&psi, 1, q, &cfg()).unwrap();
            assert_eq!(r.verdict, Verdict::Saturated, "{}", q.name());
        }
        let d = dual_audit(&psi, 0, Inequality::Crenoa, &cfg()).unwrap();
        assert!(!d.verdict.is_violation());
    }

    #[test]
    fn product_state_is_saturated() {
        let psi =
            PureState::<f64>::basis(DimensionProfile::uniform(3, 2).unwrap(), &[0, 1, 0]).unwrap();
        let r = negativity_audit(&psi, 0, &cfg()).unwrap();
        assert_eq!(r.verdict, Verdict::Saturated);
    }

    #[test]
    fn rejects_two_party_states_and_bad_dual() {
        let psi =
            PureState::<f64>::basis(DimensionProfile::uniform(2, 2).unwrap(), &[0, 0]).unwrap();
        assert!(cren_audit(&psi, 0, &cfg()).is_err());
        let psi = ghz_state::<f64>(3).unwrap();
        assert!(dual_audit(&psi, 0, Inequality::Ckw, &cfg()).is_err());
        assert!(cren_audit(&psi, 3, &cfg()).is_err());
    }

    #[test]
    fn analytic_values_for_symmetric_w() {
        let w = WClassSpec::<f64>::symmetric_qubit(3).unwrap();
        let spec = PcsSpec::new(w.clone(), 1.0, 0.3).unwrap();
        let (v, r) = analytic_w_audit(&spec, None, &cfg()).unwrap();
        assert!((v.global_cren - 2.0 * 2f64.sqrt() / 3.0).abs() < 1e-12);
        assert!(v.pair_cren.iter().all(|x| (x - 2.0 / 3.0).abs() < 1e-12));
        assert_eq!(r.verdict, Verdict::Saturated);
        let spec = PcsSpec::new(w, 0.5, 0.7).unwrap();
        let (v, _) = analytic_w_audit(&spec, None, &cfg()).unwrap();
        assert!((v.global_cren - 2f64.sqrt() / 3.0).abs() < 1e-12);
        assert!(v.pair_cren.iter().all(|x| (x - 1.0 / 3.0).abs() < 1e-12));
    }

    #[test]
    fn hunt_with_no_trials_is_empty() {
        let profile = DimensionProfile::uniform(3, 2).unwrap();
        let h = hunt::<f64>(&profile, 0, 7, &cfg()).unwrap();
        assert_eq!((h.trials, h.candidates, h.certified), (0, 0, 0));
        assert!(h.findings.is_empty());
    }

    #[test]
    fn random_states_are_reproducible() {
        let profile = DimensionProfile::uniform(2, 2).unwrap();
        let a = random_density::<f64, _>(&profile, 3, &mut ChaCha8Rng::seed_from_u64(4)).unwrap();
        let b = random_density::<f64, _>(&profile, 3, &mut ChaCha8Rng::seed_from_u64(4)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.rank(), 3);
    }
}
