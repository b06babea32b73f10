//! Run configuration: a TOML file, `--set key=value` overrides on top, then
//! the seed from the environment or the command line.
//!
//! ```toml
//! seed = 7
//! output = "trace.csv"
//!
//! [set]
//! kind = "finite"          # finite | polytope | path | curved3 | sharp_lower
//!                          # rate_segment | hartman | intro | random_finite
//!                          # random_polytope
//! points = [[5, 2, 4], [2, 6, 3], [8, 7, 1]]
//!
//! [solver]
//! c = 2.0
//! eps = 0.1
//! schedule = "fw"          # fw | c/t | constant
//! ```

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use lexopt::lab::corpus::{random_finite_set, random_polytope, rng};
use lexopt::lab::reproduce::sharp_lower_matrix;
use lexopt::lab::{
    curved_lexmax, curved_witness, make_hartman_set, make_rate_segment, make_sharp_lower_set, sharp_lower_points,
};
use lexopt::{CurvedSet3, FiniteSet, GroundSet, Point, PolyPath, VPolytope};
use serde::Deserialize;
use toml::{Table, Value};

pub const SEED_ENV: &str = "LEXOPT_SEED";

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub seed: Option<u64>,
    pub output: Option<PathBuf>,
    pub set: Option<SetSpec>,
    #[serde(default)]
    pub solver: SolverSpec,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SetSpec {
    Finite { points: Vec<Vec<f64>> },
    /// Columns of the matrix whose convex hull is the set.
    Polytope { columns: Vec<Vec<f64>> },
    Path { vertices: Vec<Vec<f64>> },
    Curved3,
    SharpLower { n: usize },
    RateSegment { n: usize, k: usize, a: f64 },
    Hartman { eps: f64 },
    /// The three-point set `{(5,2,4), (2,6,3), (8,7,1)}`.
    Intro,
    RandomFinite { max_dim: usize, max_points: usize },
    RandomPolytope { rows: usize, cols: usize },
}

#[derive(Debug, Clone, Copy, Deserialize, PartialEq, Eq)]
pub enum ScheduleKind {
    #[serde(rename = "fw")]
    FrankWolfe,
    #[serde(rename = "c/t")]
    OverT,
    #[serde(rename = "constant")]
    Constant,
}

#[derive(Debug, Clone, Copy, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum SelectorKind {
    Best,
    Adversarial,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverSpec {
    pub c: f64,
    pub gamma: f64,
    pub eps: f64,
    #[serde(alias = "T")]
    pub rounds: usize,
    pub schedule: ScheduleKind,
    /// Rate for the constant schedule.
    pub eta: f64,
    /// Grid resolution; chosen from ε and the set when absent.
    pub resolution: Option<usize>,
    pub refine_iters: usize,
    pub selector: SelectorKind,
    pub eps_list: Vec<f64>,
    pub c_list: Vec<f64>,
}

impl Default for SolverSpec {
    fn default() -> Self {
        Self {
            c: 2.0,
            gamma: 0.0,
            eps: 0.0,
            rounds: 2000,
            schedule: ScheduleKind::FrankWolfe,
            eta: 1.0,
            resolution: None,
            refine_iters: 30,
            selector: SelectorKind::Best,
            eps_list: vec![0.2, 0.1, 0.05, 0.025],
            c_list: vec![1.0, 2.0, 4.0, 8.0, 16.0],
        }
    }
}

/// Reads the optional config file and applies `key=value` overrides. Values
/// are parsed as TOML, falling back to a bare string (`set.kind=intro`).
pub fn load(path: Option<&Path>, overrides: &[String]) -> Result<RunConfig> {
    let mut table = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            text.parse::<Table>().with_context(|| format!("parsing {}", p.display()))?
        }
        None => Table::new(),
    };
    for item in overrides {
        let Some((key, value)) = item.split_once('=') else {
            bail!("override {item:?} is not of the form key=value");
        };
        let (key, value) = (key.trim(), value.trim());
        let parsed = format!("{key} = {value}")
            .parse::<Table>()
            .or_else(|_| format!("{key} = {}", Value::String(value.into())).parse::<Table>())
            .with_context(|| format!("bad override key {key:?}"))?;
        merge(&mut table, parsed);
    }
    table.try_into().context("invalid configuration")
}

fn merge(base: &mut Table, top: Table) {
    for (k, v) in top {
        match (base.get_mut(&k), v) {
            (Some(Value::Table(b)), Value::Table(t)) => merge(b, t),
            (_, v) => {
                base.insert(k, v);
            }
        }
    }
}

/// Seed precedence: command line, then `LEXOPT_SEED`, then the file.
pub fn resolve_seed(cli: Option<u64>, file: Option<u64>) -> Result<u64> {
    if let Some(s) = cli {
        return Ok(s);
    }
    if let Ok(v) = std::env::var(SEED_ENV) {
        return v.trim().parse().with_context(|| format!("{SEED_ENV}={v:?} is not an unsigned integer"));
    }
    Ok(file.unwrap_or(lexopt::lab::reproduce::DEFAULT_SEED))
}

fn points(rows: &[Vec<f64>]) -> Result<Vec<Point>> {
    rows.iter().map(|r| Ok(Point::new(r.clone())?)).collect()
}

/// A set built from the config, plus what is known about it in closed form.
pub struct BuiltSet {
    pub name: String,
    pub set: GroundSet,
    pub lexmax: Option<Point>,
    pub witness: Option<fn(f64) -> Point>,
    /// `(k, a)` for rate segments.
    pub rate: Option<(usize, f64)>,
    /// The same set as a matrix, when it has one.
    pub matrix: Option<VPolytope>,
}

impl BuiltSet {
    fn plain(name: &str, set: GroundSet) -> Self {
        Self {
            name: name.into(),
            set,
            lexmax: None,
            witness: None,
            rate: None,
            matrix: None,
        }
    }
}

pub fn build_set(spec: Option<&SetSpec>, seed: u64) -> Result<BuiltSet> {
    let Some(spec) = spec else {
        bail!("no [set] given; add one to the config or pass --set set.kind=...");
    };
    Ok(match spec {
        SetSpec::Finite { points: p } => {
            let fin = FiniteSet::new(points(p)?)?;
            let mut b = BuiltSet::plain("finite", GroundSet::Finite(fin.clone()));
            b.matrix = Some(VPolytope::new(fin.into_points())?);
            b
        }
        SetSpec::Polytope { columns } => {
            let poly = VPolytope::new(points(columns)?)?;
            let mut b = BuiltSet::plain("polytope", GroundSet::Polytope(poly.clone()));
            b.matrix = Some(poly);
            b
        }
        SetSpec::Path { vertices } => BuiltSet::plain("path", GroundSet::Path(PolyPath::new(points(vertices)?)?)),
        SetSpec::Curved3 => {
            let mut b = BuiltSet::plain("curved3", GroundSet::Curved(CurvedSet3));
            b.lexmax = Some(curved_lexmax());
            b.witness = Some(curved_witness);
            b
        }
        SetSpec::SharpLower { n } => {
            let mut b = BuiltSet::plain("sharp_lower", GroundSet::Path(make_sharp_lower_set(*n)?));
            b.lexmax = Some(sharp_lower_points(*n)?.0);
            b.matrix = Some(sharp_lower_matrix(*n)?);
            b
        }
        SetSpec::RateSegment { n, k, a } => {
            let seg = make_rate_segment(*n, *k, *a)?;
            let mut b = BuiltSet::plain("rate_segment", GroundSet::Path(seg.path));
            b.lexmax = Some(seg.x_star);
            b.rate = Some((*k, *a));
            b
        }
        SetSpec::Hartman { eps } => BuiltSet::plain("hartman", GroundSet::Finite(make_hartman_set(*eps)?)),
        SetSpec::Intro => {
            let rows = [vec![5.0, 2.0, 4.0], vec![2.0, 6.0, 3.0], vec![8.0, 7.0, 1.0]];
            let fin = FiniteSet::new(points(&rows)?)?;
            let mut b = BuiltSet::plain("intro", GroundSet::Finite(fin.clone()));
            b.matrix = Some(VPolytope::new(fin.into_points())?);
            b
        }
        SetSpec::RandomFinite { max_dim, max_points } => {
            if *max_dim == 0 || *max_points == 0 {
                bail!("random_finite needs positive max_dim and max_points");
            }
            let fin = random_finite_set(&mut rng(seed), *max_dim, *max_points);
            BuiltSet::plain("random_finite", GroundSet::Finite(fin))
        }
        SetSpec::RandomPolytope { rows, cols } => {
            if *rows == 0 || *cols == 0 {
                bail!("random_polytope needs positive rows and cols");
            }
            let poly = random_polytope(&mut rng(seed), (*rows, *rows), (*cols, *cols));
            let mut b = BuiltSet::plain("random_polytope", GroundSet::Polytope(poly.clone()));
            b.matrix = Some(poly);
            b
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overrides_merge_into_nested_tables() {
        let cfg = load(
            None,
            &[
                "set.kind=sharp_lower".into(),
                "set.n=12".into(),
                "solver.schedule=c/t".into(),
                "solver.T=50".into(),
            ],
        )
        .unwrap();
        assert!(matches!(cfg.set, Some(SetSpec::SharpLower { n: 12 })));
        assert_eq!(cfg.solver.schedule, ScheduleKind::OverT);
        assert_eq!(cfg.solver.rounds, 50);
        assert_eq!(cfg.solver.c, 2.0);
    }

    #[test]
    fn rejects_unknown_and_malformed_entries() {
        assert!(load(None, &["solver.temperature=3".into()]).is_err());
        assert!(load(None, &["no_equals_sign".into()]).is_err());
        assert!(load(None, &["set.kind=pentagon".into()]).is_err());
        assert!(build_set(None, 1).is_err());
    }

    #[test]
    fn explicit_seed_wins() {
        assert_eq!(resolve_seed(Some(4), Some(9)).unwrap(), 4);
    }
}
