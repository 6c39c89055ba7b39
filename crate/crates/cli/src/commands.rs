use std::io::Write;
use std::path::Path;

use cren_core::convexroof::{optimize_roof, Direction, OptConfig};
use cren_core::measures::{
    concurrence_pure, negativity_mixed, negativity_pure_checked, wootters_concurrence_2q,
    BoundKind, MeasureKind, Method, PureMeasure,
};
use cren_core::monogamy::{analytic_w_audit, audit, hunt, AuditConfig, Inequality};
use cren_core::qlinalg::{
    hermitian_eigenvalues, partial_trace, schmidt, Bipartition, DimensionProfile,
};
use cren_core::report::{audit_table, Cell, Format, Table};
use cren_core::specfile::{family, load_state, LoadedState, StateDocument};
use cren_core::states::{PartitionSpec, PcsSpec};
use cren_core::{Error, Result};

use crate::{Command, OptArgs, Output, Source};

fn input(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub fn run(command: Command) -> Result<()> {
    match command {
        Command::State {
            source,
            cut,
            output,
        } => cmd_state(&source, cut.as_deref(), &output),
        Command::Measure {
            source,
            measure,
            cut,
            opt,
            output,
        } => cmd_measure(&source, &measure, &cut, &opt, &output),
        Command::Audit {
            source,
            focus,
            measures,
            opt,
            output,
        } => cmd_audit(&source, focus, &measures, &opt, &output),
        Command::Sweep {
            source,
            p,
            lambda,
            partition,
            samples,
            seed,
            output,
        } => cmd_sweep(
            &source,
            &p,
            &lambda,
            partition.as_deref(),
            samples,
            seed,
            &output,
        ),
        Command::Hunt {
            profile,
            trials,
            opt,
            output,
        } => cmd_hunt(&profile, trials, &opt, &output),
    }
}

/// 1-based party list (`13`, `1,3`) to sorted 0-based indices.
fn parse_parties(s: &str, n: usize) -> Result<Vec<usize>> {
    let items: Vec<&str> = if s.contains(',') {
        s.split(',').map(str::trim).collect()
    } else {
        s.trim()
            .char_indices()
            .map(|(i, ch)| &s.trim()[i..i + ch.len_utf8()])
            .collect()
    };
    let mut out = Vec::with_capacity(items.len());
    for item in items {
        let k: usize = item
            .parse()
            .map_err(|_| input(format!("bad party `{item}` in `{s}`")))?;
        if k == 0 || k > n {
            return Err(input(format!("party {k} outside 1..={n}")));
        }
        out.push(k - 1);
    }
    if out.is_empty() {
        return Err(input("empty party list"));
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

/// `1` or `13` names side A; `1|23` names both sides.
fn parse_cut(s: &str, n: usize) -> Result<Bipartition> {
    match s.split_once('|') {
        Some((a, b)) => {
            let side_a = parse_parties(a, n)?;
            let cut = Bipartition::new(n, side_a)?;
            if parse_parties(b, n)? != cut.side_b() {
                return Err(input(format!("`{s}` does not split all {n} parties")));
            }
            Ok(cut)
        }
        None => Bipartition::new(n, parse_parties(s, n)?),
    }
}

fn parse_partition(s: &str, n: usize) -> Result<PartitionSpec> {
    let blocks = s
        .split('|')
        .map(|b| parse_parties(b, n))
        .collect::<Result<Vec<_>>>()?;
    PartitionSpec::new(n, blocks)
}

fn parse_reals(s: &str, what: &str) -> Result<Vec<f64>> {
    let values = s
        .split(',')
        .map(|x| {
            x.trim()
                .parse::<f64>()
                .map_err(|_| input(format!("bad {what} value `{x}`")))
        })
        .collect::<Result<Vec<_>>>()?;
    if values.is_empty() {
        return Err(input(format!("empty {what} grid")));
    }
    Ok(values)
}

fn parse_profile(s: &str) -> Result<DimensionProfile> {
    let dims = s
        .split(',')
        .map(|x| {
            x.trim()
                .parse::<usize>()
                .map_err(|_| input(format!("bad local dimension `{x}`")))
        })
        .collect::<Result<Vec<_>>>()?;
    DimensionProfile::new(dims)
}

fn format_of(output: &Output) -> Result<Format> {
    output.format.parse()
}

fn emit(text: &str, output: &Output) -> Result<()> {
    match &output.output {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn opt_config(opt: &OptArgs) -> OptConfig {
    OptConfig {
        size: opt.size,
        starts: opt.starts,
        max_sweeps: opt.sweeps,
        tol_rel: opt.tol_rel,
        seed: opt.seed,
    }
}

/// Loads the requested state and applies `--trace-out`; returns an id for
/// reports alongside it.
fn load(source: &Source) -> Result<(String, StateDocument<f64>)> {
    let (id, mut doc) = match (&source.spec, &source.family) {
        (Some(path), _) => (stem(path), load_state::<f64>(path)?),
        (None, Some(name)) => (name.clone(), family::<f64>(name)?),
        (None, None) => return Err(input("give --spec FILE or --family NAME")),
    };
    if let Some(out) = &source.trace_out {
        let n = doc.state.profile().parties();
        let gone = parse_parties(out, n)?;
        let keep: Vec<usize> = (0..n).filter(|j| !gone.contains(j)).collect();
        if keep.is_empty() {
            return Err(input("cannot trace out every party"));
        }
        let rho = partial_trace(&doc.state.density(), &keep)?;
        doc.state = LoadedState::Mixed(rho);
        doc.w_class = None;
        doc.pcs = None;
        let kept: Vec<String> = keep.iter().map(|j| (j + 1).to_string()).collect();
        return Ok((format!("{id}[{}]", kept.join("")), doc));
    }
    Ok((id, doc))
}

fn stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "state".into())
}

fn profile_text(p: &DimensionProfile) -> String {
    let dims: Vec<String> = p.dims().iter().map(ToString::to_string).collect();
    dims.join(",")
}

fn cmd_state(source: &Source, cut: Option<&str>, output: &Output) -> Result<()> {
    let format = format_of(output)?;
    let (id, doc) = load(source)?;
    let profile = doc.state.profile().clone();
    let mut t = Table::new(["quantity", "value"]);
    t.push(vec!["state_id".into(), id.into()]);
    t.push(vec!["kind".into(), doc.kind.name().into()]);
    t.push(vec!["profile".into(), profile_text(&profile).into()]);
    t.push(vec!["dimension".into(), profile.total().into()]);
    match &doc.state {
        LoadedState::Pure(psi) => {
            t.push(vec!["pure".into(), "true".into()]);
            t.push(vec!["norm".into(), Cell::num(psi.norm())]);
            t.push(vec!["purity".into(), 1.0f64.into()]);
            t.push(vec!["rank".into(), 1usize.into()]);
        }
        LoadedState::Mixed(rho) => {
            t.push(vec!["pure".into(), "false".into()]);
            t.push(vec!["trace".into(), Cell::num(rho.trace())]);
            t.push(vec!["purity".into(), Cell::num(rho.purity())]);
            t.push(vec!["rank".into(), rho.rank().into()]);
        }
    }
    if let Some(cut) = cut {
        let cut = parse_cut(cut, profile.parties())?;
        t.push(vec!["cut".into(), cut.to_string().into()]);
        match &doc.state {
            LoadedState::Pure(psi) => {
                let data = schmidt(psi, &cut)?;
                t.push(vec!["schmidt_rank".into(), data.rank.into()]);
                for (i, lam) in data.coefficients.iter().enumerate() {
                    t.push(vec![
                        format!("schmidt_coefficient_{}", i + 1).into(),
                        Cell::num(*lam),
                    ]);
                }
            }
            LoadedState::Mixed(rho) => {
                let marginal = partial_trace(rho, cut.side_a())?;
                for (i, ev) in hermitian_eigenvalues(marginal.matrix()).iter().enumerate() {
                    t.push(vec![
                        format!("marginal_eigenvalue_{}", i + 1).into(),
                        Cell::num(*ev),
                    ]);
                }
            }
        }
    }
    emit(&t.render(format)?, output)
}

fn measure_row(
    state: &LoadedState<f64>,
    kind: MeasureKind,
    cut: &Bipartition,
    cfg: &OptConfig,
) -> Result<(f64, Method, BoundKind)> {
    let closed = |v: f64| Ok((v, Method::ClosedForm, BoundKind::Exact));
    match state {
        LoadedState::Pure(psi) => match kind {
            MeasureKind::Concurrence | MeasureKind::Coa => closed(concurrence_pure(psi, cut)?),
            MeasureKind::Negativity | MeasureKind::Cren | MeasureKind::Crenoa => {
                closed(negativity_pure_checked(psi, cut)?)
            }
        },
        LoadedState::Mixed(rho) => {
            let roof = |measure, direction| -> Result<(f64, Method, BoundKind)> {
                let res = optimize_roof(rho, cut, measure, direction, cfg)?;
                let method = if res.bound_kind == BoundKind::Exact {
                    Method::ClosedForm
                } else {
                    Method::Optimizer
                };
                Ok((res.value, method, res.bound_kind))
            };
            match kind {
                MeasureKind::Negativity => Ok((
                    negativity_mixed(rho, cut)?,
                    Method::TraceNorm,
                    BoundKind::Exact,
                )),
                MeasureKind::Concurrence if rho.profile().dims() == [2, 2] => {
                    closed(wootters_concurrence_2q(rho)?)
                }
                MeasureKind::Concurrence => roof(PureMeasure::Concurrence, Direction::Min),
                MeasureKind::Cren => roof(PureMeasure::Negativity, Direction::Min),
                MeasureKind::Crenoa => roof(PureMeasure::Negativity, Direction::Max),
                MeasureKind::Coa => roof(PureMeasure::Concurrence, Direction::Max),
            }
        }
    }
}

fn cmd_measure(
    source: &Source,
    measures: &str,
    cut: &str,
    opt: &OptArgs,
    output: &Output,
) -> Result<()> {
    let format = format_of(output)?;
    let (id, doc) = load(source)?;
    let cut = parse_cut(cut, doc.state.profile().parties())?;
    let cfg = opt_config(opt);
    let mut t = Table::new(["state_id", "measure", "cut", "value", "method", "bound"]);
    for name in measures.split(',') {
        let kind: MeasureKind = name.trim().parse()?;
        let (value, method, bound) = measure_row(&doc.state, kind, &cut, &cfg)?;
        t.push(vec![
            id.clone().into(),
            kind.name().into(),
            cut.to_string().into(),
            value.into(),
            method.name().into(),
            bound.name().into(),
        ]);
    }
    emit(&t.render(format)?, output)
}

fn audit_config(opt: &OptArgs) -> AuditConfig {
    AuditConfig {
        opt: opt_config(opt),
        tol_sat: opt.tol_sat,
        ..AuditConfig::default()
    }
}

fn cmd_audit(
    source: &Source,
    focus: usize,
    measures: &str,
    opt: &OptArgs,
    output: &Output,
) -> Result<()> {
    let format = format_of(output)?;
    let (id, doc) = load(source)?;
    let psi = doc
        .state
        .as_pure()
        .ok_or_else(|| input("monogamy audits need a pure state; the input is mixed"))?;
    let n = psi.profile().parties();
    if focus == 0 || focus > n {
        return Err(input(format!("focus party {focus} outside 1..={n}")));
    }
    let cfg = audit_config(opt);
    let mut reports = Vec::new();
    for name in measures.split(',') {
        let inequality: Inequality = name.trim().parse()?;
        reports.push(audit(psi, focus - 1, inequality, &cfg)?.with_state_id(id.clone()));
    }
    emit(&audit_table(&reports).render(format)?, output)
}

#[allow(clippy::too_many_arguments)]
fn cmd_sweep(
    source: &Source,
    p_grid: &str,
    lambda_grid: &str,
    partition: Option<&str>,
    samples: usize,
    seed: u64,
    output: &Output,
) -> Result<()> {
    let format = format_of(output)?;
    if source.trace_out.is_some() {
        return Err(input("--trace-out does not apply to sweeps"));
    }
    let (_, doc) = load(source)?;
    let w = doc
        .w_class
        .ok_or_else(|| input("sweeps need a W-class state (kind w_class or pcs)"))?;
    let partition = partition
        .map(|s| parse_partition(s, w.parties()))
        .transpose()?;
    let blocks = partition.as_ref().map_or(w.parties(), PartitionSpec::len);
    let ps = parse_reals(p_grid, "p")?;
    let lambdas = parse_reals(lambda_grid, "lambda")?;
    let cfg = AuditConfig {
        opt: OptConfig {
            seed,
            ..OptConfig::default()
        },
        flatness_samples: samples,
        ..AuditConfig::default()
    };

    let mut columns = vec!["p".to_string(), "lambda".into(), "global_cren".into()];
    columns.extend((2..=blocks).map(|j| format!("pair_cren_1_{j}")));
    columns.extend([
        "residual".into(),
        "verdict".into(),
        "flatness_max_dev".into(),
    ]);
    let mut t = Table::new(columns);
    for &p in &ps {
        for &lambda in &lambdas {
            let spec = PcsSpec::new(w.clone(), p, lambda)?;
            let (values, report) = analytic_w_audit(&spec, partition.as_ref(), &cfg)?;
            let mut row: Vec<Cell> = vec![p.into(), lambda.into(), values.global_cren.into()];
            row.extend(values.pair_cren.iter().map(|&v| Cell::from(v)));
            row.push(values.residual.into());
            row.push(report.verdict.name().into());
            row.push(values.scan_max_dev.into());
            t.push(row);
        }
    }
    emit(&t.render(format)?, output)
}

fn cmd_hunt(profile: &str, trials: usize, opt: &OptArgs, output: &Output) -> Result<()> {
    let format = format_of(output)?;
    let profile = parse_profile(profile)?;
    let cfg = audit_config(opt);
    let summary = hunt::<f64>(&profile, trials, opt.seed, &cfg)?;
    emit(&audit_table(&summary.findings).render(format)?, output)?;
    eprintln!(
        "trials={} candidates={} certified={}",
        summary.trials, summary.candidates, summary.certified
    );
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn party_lists_and_cuts() {
        assert_eq!(parse_parties("13", 3).unwrap(), vec![0, 2]);
        assert_eq!(parse_parties("1, 3", 3).unwrap(), vec![0, 2]);
        assert!(parse_parties("4", 3).is_err());
        assert!(parse_parties("0", 3).is_err());
        assert_eq!(parse_cut("1|23", 3).unwrap().side_a(), &[0]);
        assert!(parse_cut("1|2", 3).is_err());
        assert_eq!(parse_cut("2", 3).unwrap().side_b(), vec![0, 2]);
        let part = parse_partition("1|23", 3).unwrap();
        assert_eq!(part.blocks(), &[vec![0], vec![1, 2]]);
        assert_eq!(parse_profile("3,2,2").unwrap().dims(), &[3, 2, 2]);
        assert!(parse_reals("0.1,x", "p").is_err());
    }
}
