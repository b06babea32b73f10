use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use lexopt::expmin::{frank_wolfe, multiplicative_weights, Schedule};
use lexopt::filling::{is_possible_output, run_fill, Selector, SolveBudget};
use lexopt::lab::corpus::lattice_resolution;
use lexopt::lab::reproduce::{run_all, summary_table};
use lexopt::lab::{
    convergence_curve, records_table, stability_curve, ConvergenceCheck, ConvergenceOptions, Expectation,
    StabilityOptions,
};
use lexopt::{distortion_full, lexmax_finite, GroundSet, Point};

use crate::config::{build_set, BuiltSet, RunConfig, ScheduleKind, SelectorKind, SolverSpec};

/// Outcome of a command that ran to completion.
pub enum Outcome {
    Ok,
    /// Some acceptance criterion failed.
    CriteriaFailed,
}

pub fn fmt_point(p: &Point) -> String {
    // adding 0.0 turns -0 into 0
    let parts: Vec<String> = p.coords().iter().map(|v| (v + 0.0).to_string()).collect();
    format!("({})", parts.join(","))
}

fn sorted_point(p: &Point) -> Point {
    let mut v = p.coords().to_vec();
    v.sort_by(f64::total_cmp);
    Point::new(v).expect("sorting keeps coordinates finite")
}

/// Resolution used when the config gives none and ε cannot size the grid.
fn default_resolution(set: &GroundSet) -> usize {
    match set {
        GroundSet::Finite(_) => 1,
        GroundSet::Path(_) => 1000,
        GroundSet::Polytope(p) => lattice_resolution(p.cols(), 20_000, 200),
        GroundSet::Curved(_) => 100,
    }
}

/// Budget for one filling run at tolerance `eps`. An explicit resolution is
/// checked against ε; otherwise the smallest certifying one is used.
fn fill_budget(set: &GroundSet, solver: &SolverSpec, eps: f64) -> Result<SolveBudget> {
    if set.is_finite() {
        return Ok(SolveBudget::new(1, solver.refine_iters)?);
    }
    Ok(match (solver.resolution, eps > 0.0) {
        (Some(r), true) => SolveBudget::new(r, solver.refine_iters)?,
        (Some(r), false) => SolveBudget::new(r, solver.refine_iters)?.uncertified(),
        (None, true) => SolveBudget::for_eps(set, eps, solver.refine_iters)?,
        (None, false) => SolveBudget::new(default_resolution(set), solver.refine_iters)?.uncertified(),
    })
}

/// Budget for sweeps, which report grid slack instead of certifying.
fn sweep_budget(set: &GroundSet, solver: &SolverSpec) -> Result<SolveBudget> {
    let r = solver.resolution.unwrap_or_else(|| default_resolution(set));
    Ok(SolveBudget::new(r, solver.refine_iters)?.uncertified())
}

fn selector(kind: SelectorKind) -> Selector {
    match kind {
        SelectorKind::Best => Selector::Best,
        SelectorKind::Adversarial => Selector::Adversarial,
    }
}

/// Known lexmax, else exact on finite sets, else filling with ε = 0.
fn reference_lexmax(b: &BuiltSet, solver: &SolverSpec) -> Result<Point> {
    if let Some(x) = &b.lexmax {
        return Ok(x.clone());
    }
    if let GroundSet::Finite(f) = &b.set {
        return Ok(lexmax_finite(f.points())?.swap_remove(0));
    }
    let budget = fill_budget(&b.set, solver, 0.0)?;
    Ok(run_fill(&b.set, 0.0, budget, Selector::Best)?.last().clone())
}

/// Writes to a sibling temporary file, then renames it into place.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let name = path
        .file_name()
        .with_context(|| format!("{} has no file name", path.display()))?
        .to_string_lossy();
    let tmp = path.with_file_name(format!(".{name}.tmp"));
    fs::write(&tmp, contents).with_context(|| format!("writing {}", tmp.display()))?;
    fs::rename(&tmp, path).with_context(|| format!("renaming {} into place", tmp.display()))?;
    Ok(())
}

/// Sends CSV to the configured file, or stdout.
fn emit(cfg: &RunConfig, csv: &str) -> Result<()> {
    match &cfg.output {
        Some(p) => write_atomic(p, csv),
        None => {
            std::io::stdout().write_all(csv.as_bytes())?;
            Ok(())
        }
    }
}

pub fn lexmax(cfg: &RunConfig, seed: u64) -> Result<Outcome> {
    let b = build_set(cfg.set.as_ref(), seed)?;
    let found = match &b.set {
        GroundSet::Finite(f) => lexmax_finite(f.points())?,
        set => {
            let budget = fill_budget(set, &cfg.solver, 0.0)?;
            println!("method fill resolution={}", budget.resolution);
            vec![run_fill(set, 0.0, budget, Selector::Best)?.last().clone()]
        }
    };
    for x in &found {
        println!("lexmax {}", fmt_point(x));
        println!("sorted {}", fmt_point(&sorted_point(x)));
    }
    Ok(Outcome::Ok)
}

pub fn fill(cfg: &RunConfig, seed: u64) -> Result<Outcome> {
    let b = build_set(cfg.set.as_ref(), seed)?;
    let eps = cfg.solver.eps;
    let budget = fill_budget(&b.set, &cfg.solver, eps)?;
    let trace = run_fill(&b.set, eps, budget, selector(cfg.solver.selector))?;
    emit(cfg, &trace.to_csv())?;
    let x = trace.last();
    let admissible = is_possible_output(&b.set, x, eps, budget.uncertified())?;
    eprintln!("final {} possible_output={admissible} grid_slack={}", fmt_point(x), trace.grid_slack);
    if let Some(w) = b.witness {
        let w = w(eps);
        let ok = is_possible_output(&b.set, &w, eps, budget.uncertified())?;
        eprintln!("witness {} possible_output={ok}", fmt_point(&w));
    }
    Ok(Outcome::Ok)
}

pub fn solve(cfg: &RunConfig, seed: u64) -> Result<Outcome> {
    let b = build_set(cfg.set.as_ref(), seed)?;
    let Some(poly) = &b.matrix else {
        bail!("solve needs a matrix: use a finite, polytope, intro, random_polytope or sharp_lower set");
    };
    let s = &cfg.solver;
    let run = match s.schedule {
        ScheduleKind::FrankWolfe => frank_wolfe(poly, s.c, s.rounds)?,
        ScheduleKind::OverT => multiplicative_weights(poly, Schedule::OverT(s.c), s.rounds)?,
        ScheduleKind::Constant => multiplicative_weights(poly, Schedule::Constant(s.eta), s.rounds)?,
    };
    let reference = match &b.lexmax {
        Some(x) => x.clone(),
        None => {
            let set = GroundSet::Polytope(poly.clone());
            let budget = fill_budget(&set, s, 0.0)?;
            run_fill(&set, 0.0, budget, Selector::Best)?.last().clone()
        }
    };
    emit(cfg, &run.to_csv(poly, Some(&reference)))?;
    let out = run.output(poly);
    eprintln!(
        "output {} distortion={}",
        fmt_point(&out),
        distortion_full(&reference, &out)?
    );
    Ok(Outcome::Ok)
}

pub fn stability(cfg: &RunConfig, seed: u64) -> Result<Outcome> {
    let b = build_set(cfg.set.as_ref(), seed)?;
    let budget = sweep_budget(&b.set, &cfg.solver)?;
    let opts = StabilityOptions {
        name: b.name.clone(),
        lexmax: Some(reference_lexmax(&b, &cfg.solver)?),
        witness: b.witness,
        expect: Expectation::None,
    };
    let records = stability_curve(&b.set, &cfg.solver.eps_list, budget, &opts)?;
    emit(cfg, &records_table(&records).render())?;
    Ok(Outcome::Ok)
}

pub fn converge(cfg: &RunConfig, seed: u64) -> Result<Outcome> {
    let b = build_set(cfg.set.as_ref(), seed)?;
    let budget = sweep_budget(&b.set, &cfg.solver)?;
    let check = match (b.rate, b.name.as_str()) {
        (Some((k, a)), _) => ConvergenceCheck::RateLower { k, a },
        (None, "sharp_lower") => ConvergenceCheck::SharpLower,
        _ => ConvergenceCheck::Upper { ks: vec![1, 2] },
    };
    let opts = ConvergenceOptions {
        name: b.name.clone(),
        lexmax: Some(reference_lexmax(&b, &cfg.solver)?),
        check,
    };
    let records = convergence_curve(&b.set, &cfg.solver.c_list, cfg.solver.gamma, budget, &opts)?;
    emit(cfg, &records_table(&records).render())?;
    Ok(Outcome::Ok)
}

pub fn reproduce(cfg: &RunConfig, seed: u64, only: Option<&str>, out_dir: Option<PathBuf>) -> Result<Outcome> {
    let dir = out_dir
        .or_else(|| cfg.output.clone())
        .unwrap_or_else(|| PathBuf::from("reproduce"));
    fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    let reports = run_all(seed, only)?;
    let mut failed = Vec::new();
    for r in &reports {
        write_atomic(&dir.join(format!("{}.csv", r.name)), &r.table.render())?;
        println!("{}", r.line());
        if !r.pass {
            failed.push(r.name);
        }
    }
    write_atomic(&dir.join("summary.csv"), &summary_table(&reports).render())?;
    if failed.is_empty() {
        Ok(Outcome::Ok)
    } else {
        eprintln!("failed criteria: {}", failed.join(", "));
        Ok(Outcome::CriteriaFailed)
    }
}
