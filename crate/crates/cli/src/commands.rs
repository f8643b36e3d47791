use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::Args;
use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use volrat::brascamp_lieb::{self, bl_ratio, BLSystem, Density1D};
use volrat::geometry::AffineImage;
use volrat::john::{self, JohnDecomposition};
use volrat::linalg::DecompositionResidual;
use volrat::lp_spaces::{l1_vr_bound, subspace_volume_ratio, L1VrBound, SubspaceSpec, SubspaceVr};
use volrat::measures::{holder_quotient_bound, isoperimetric_quotient, petty_functional};
use volrat::{bodies, random, Estimate, HPolytope, McParams, PolytopeFile, VPolytope};

use crate::output::{num, Output};
use crate::OutputArgs;

/// Relative slack allowed on the extremal constants.
const BOUND_REL_TOL: f64 = 1e-6;
/// Standard errors allowed on Monte Carlo comparisons.
const SIGMAS: f64 = 3.0;

#[derive(Args, Debug, Clone, Serialize)]
pub struct McArgs {
    #[arg(long, default_value_t = 100_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

impl McArgs {
    fn params(&self) -> McParams {
        McParams::new(self.samples, self.seed)
    }
}

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

fn load_hpolytope(path: &Path) -> anyhow::Result<HPolytope> {
    Ok(PolytopeFile::from_json(&read(path)?)?.into_body()?.to_hrep()?)
}

fn load_vpolytope(path: &Path) -> anyhow::Result<VPolytope> {
    Ok(PolytopeFile::from_json(&read(path)?)?.into_body()?.to_vrep()?)
}

// ---------------------------------------------------------------- john

#[derive(Args, Debug, Clone, Serialize)]
pub struct JohnArgs {
    /// Polytope file `{"dim", "kind": "H"|"V", "rows"}`.
    #[arg(long)]
    pub input: PathBuf,
    /// Declare the body centrally symmetric (drops the barycenter condition).
    #[arg(long)]
    pub symmetric: bool,
    #[command(flatten)]
    #[serde(skip)]
    pub output: OutputArgs,
}

#[derive(Serialize)]
struct EllipsoidReport {
    center: Vec<f64>,
    shape: Vec<Vec<f64>>,
}

#[derive(Serialize)]
struct MapReport {
    linear: Vec<Vec<f64>>,
    shift: Vec<f64>,
}

#[derive(Serialize)]
struct JohnReport {
    dim: usize,
    ellipsoid: EllipsoidReport,
    kkt_residual: f64,
    john_map: MapReport,
    decomposition: JohnDecomposition,
    residual: DecompositionResidual,
    volume_ratio: f64,
    volume_in_john_position: f64,
    isoperimetric_quotient: f64,
}

pub fn john(args: &JohnArgs) -> anyhow::Result<Output> {
    let p = load_hpolytope(&args.input)?;
    let n = p.dim();
    let a = john::analyze(&p, args.symmetric)?;
    let residual = a.decomposition.residual();
    let report = JohnReport {
        dim: n,
        ellipsoid: EllipsoidReport {
            center: a.ellipsoid.center().iter().copied().collect(),
            shape: rows(a.ellipsoid.shape()),
        },
        kkt_residual: a.kkt_residual,
        john_map: MapReport {
            linear: rows(a.map.linear()),
            shift: a.map.shift().iter().copied().collect(),
        },
        volume_ratio: (a.volume / volrat::geometry::unit_ball_volume(n)).powf(1.0 / n as f64),
        volume_in_john_position: a.volume,
        isoperimetric_quotient: a.quotient,
        residual,
        decomposition: a.decomposition,
    };
    let table = report
        .decomposition
        .contacts
        .iter()
        .zip(&report.decomposition.weights)
        .enumerate()
        .map(|(i, (u, c))| {
            let mut row = vec![i.to_string(), num(*c)];
            row.extend(u.iter().map(|v| num(*v)));
            row
        })
        .collect();
    let mut header = vec!["contact", "weight"];
    let names: Vec<String> = (1..=n).map(|j| format!("u{j}")).collect();
    header.extend(names.iter().map(String::as_str));
    Ok(Output::new("john", args, true, &report)?.table(&header, table))
}

// ---------------------------------------------------------------- reviso

#[derive(Args, Debug, Clone, Serialize)]
pub struct RevisoArgs {
    /// Dimension: 2, 3 or 4.
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 100)]
    pub count: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Mirror every random half-space through the origin.
    #[arg(long)]
    pub symmetric: bool,
    /// Put the extremal body (regular simplex, or the cube when symmetric) first.
    #[arg(long)]
    pub inject_extremal: bool,
    #[command(flatten)]
    #[serde(skip)]
    pub output: OutputArgs,
}

#[derive(Serialize)]
struct RevisoConfig<'a> {
    #[serde(flatten)]
    args: &'a RevisoArgs,
    relative_tolerance: f64,
    max_draws_per_body: usize,
}

#[derive(Serialize)]
struct RevisoRow {
    index: usize,
    extremal: bool,
    facets: usize,
    contacts: usize,
    kkt_residual: f64,
    decomposition_residual: f64,
    volume: f64,
    quotient: f64,
}

#[derive(Serialize)]
struct RevisoReport {
    constant: f64,
    volume_bound: f64,
    max_quotient: f64,
    max_volume: f64,
    violations: usize,
    rows: Vec<RevisoRow>,
}

fn reviso_row(index: usize, extremal: bool, p: &HPolytope, symmetric: bool) -> volrat::Result<RevisoRow> {
    let a = john::analyze(p, symmetric)?;
    Ok(RevisoRow {
        index,
        extremal,
        facets: p.len(),
        contacts: a.decomposition.contacts.len(),
        kkt_residual: a.kkt_residual,
        decomposition_residual: a.decomposition.residual().frobenius,
        volume: a.volume,
        quotient: a.quotient,
    })
}

pub fn reviso(args: &RevisoArgs) -> anyhow::Result<Output> {
    let n = args.n;
    if !(2..=4).contains(&n) {
        bail!("--n must be 2, 3 or 4");
    }
    if args.count == 0 {
        bail!("--count must be at least 1");
    }
    let symmetric = args.symmetric;
    let rows: Vec<RevisoRow> = (0..args.count)
        .into_par_iter()
        .map(|i| {
            if i == 0 && args.inject_extremal {
                let body = if symmetric {
                    bodies::cube(n)
                } else {
                    bodies::regular_simplex(n)
                };
                return reviso_row(i, true, &body, symmetric);
            }
            let mut rng = random::stream(args.seed, i as u64);
            let mut last = None;
            for _ in 0..random::MAX_DRAWS {
                let p = random::random_polytope(&mut rng, n, symmetric)?;
                match reviso_row(i, false, &p, symmetric) {
                    Ok(row) => return Ok(row),
                    Err(e) => last = Some(e),
                }
            }
            Err(last.expect("at least one draw"))
        })
        .collect::<volrat::Result<_>>()?;
    let constant = brascamp_lieb::reverse_isoperimetric_constant(n, symmetric);
    let volume_bound = brascamp_lieb::volume_bound(n, symmetric);
    let violations = rows
        .iter()
        .filter(|r| r.quotient > constant * (1.0 + BOUND_REL_TOL) || r.volume > volume_bound * (1.0 + BOUND_REL_TOL))
        .count();
    let report = RevisoReport {
        constant,
        volume_bound,
        max_quotient: rows.iter().map(|r| r.quotient).fold(0.0, f64::max),
        max_volume: rows.iter().map(|r| r.volume).fold(0.0, f64::max),
        violations,
        rows,
    };
    let table = report
        .rows
        .iter()
        .map(|r| {
            vec![
                r.index.to_string(),
                r.extremal.to_string(),
                r.facets.to_string(),
                r.contacts.to_string(),
                num(r.kkt_residual),
                num(r.decomposition_residual),
                num(r.volume),
                num(r.quotient),
                num(constant),
            ]
        })
        .collect();
    let config = RevisoConfig {
        args,
        relative_tolerance: BOUND_REL_TOL,
        max_draws_per_body: random::MAX_DRAWS,
    };
    Ok(Output::new("reviso", &config, violations == 0, &report)?.table(
        &[
            "index",
            "extremal",
            "facets",
            "contacts",
            "kkt_residual",
            "decomposition_residual",
            "volume",
            "quotient",
            "constant",
        ],
        table,
    ))
}

// ---------------------------------------------------------------- lp

#[derive(Args, Debug, Clone, Serialize)]
pub struct LpArgs {
    /// Subspace file `{"m", "n", "p", "basis"}`.
    #[arg(long)]
    pub input: PathBuf,
    #[command(flatten)]
    #[serde(flatten)]
    pub mc: McArgs,
    #[command(flatten)]
    #[serde(skip)]
    pub output: OutputArgs,
}

#[derive(Serialize)]
struct LpReport {
    m: usize,
    n: usize,
    p: f64,
    #[serde(flatten)]
    vr: SubspaceVr,
    l1_bound: Option<L1VrBound>,
}

pub fn lp(args: &LpArgs) -> anyhow::Result<Output> {
    let spec = SubspaceSpec::from_json(&read(&args.input)?)?;
    let vr = subspace_volume_ratio(&spec, &args.mc.params())?;
    let l1_bound = (spec.p == 1.0).then(|| l1_vr_bound(spec.n));
    let below_limit = l1_bound.is_none_or(|b| vr.vr.value <= b.limit + SIGMAS * vr.vr.std_error);
    let pass = vr.holds && below_limit;
    let report = LpReport {
        m: spec.m,
        n: spec.n,
        p: spec.p,
        vr,
        l1_bound,
    };
    let table = vec![vec![
        spec.m.to_string(),
        spec.n.to_string(),
        num(spec.p),
        num(vr.vr.value),
        num(vr.vr.std_error),
        num(vr.reference),
        num(vr.lewis_residual),
        vr.lewis_iterations.to_string(),
    ]];
    Ok(Output::new("lp", args, pass, &report)?.table(
        &[
            "m",
            "n",
            "p",
            "vr",
            "std_error",
            "reference",
            "lewis_residual",
            "lewis_iterations",
        ],
        table,
    ))
}

// ---------------------------------------------------------------- bl

#[derive(Args, Debug, Clone, Serialize)]
pub struct BlArgs {
    /// System file `{"dim", "vectors", "weights"}` with an optional
    /// `"densities"` list; identical standard Gaussians when absent.
    #[arg(long)]
    pub input: PathBuf,
    #[command(flatten)]
    #[serde(flatten)]
    pub mc: McArgs,
    #[command(flatten)]
    #[serde(skip)]
    pub output: OutputArgs,
}

#[derive(Deserialize)]
struct BlInput {
    #[serde(flatten)]
    system: BLSystem,
    #[serde(default)]
    densities: Option<Vec<Density1D>>,
}

#[derive(Serialize)]
struct BlReport {
    residual: DecompositionResidual,
    densities: Vec<Density1D>,
    ratio: Estimate,
}

pub fn bl(args: &BlArgs) -> anyhow::Result<Output> {
    let input: BlInput = serde_json::from_str(&read(&args.input)?).context("parsing system file")?;
    let system = BLSystem::new(input.system.dim, input.system.vectors, input.system.weights)?;
    let densities = input
        .densities
        .unwrap_or_else(|| vec![Density1D::Gaussian { sigma: 1.0 }; system.len()]);
    let ratio = bl_ratio(&system, &densities, &args.mc.params())?;
    let pass = ratio.value <= 1.0 + SIGMAS * ratio.std_error;
    let report = BlReport {
        residual: system.residual(),
        densities,
        ratio,
    };
    let table = vec![vec![
        system.dim.to_string(),
        system.len().to_string(),
        num(report.residual.frobenius),
        num(ratio.value),
        num(ratio.std_error),
        ratio.samples.to_string(),
    ]];
    Ok(Output::new("bl", args, pass, &report)?
        .table(&["dim", "vectors", "residual", "ratio", "std_error", "samples"], table))
}

// ---------------------------------------------------------------- petty

#[derive(Args, Debug, Clone, Serialize)]
pub struct PettyArgs {
    /// Polytope file, same format as for `john`.
    #[arg(long)]
    pub input: PathBuf,
    /// Number of seeded random affine images to compare against.
    #[arg(long, default_value_t = 10)]
    pub count: usize,
    #[command(flatten)]
    #[serde(flatten)]
    pub mc: McArgs,
    #[command(flatten)]
    #[serde(skip)]
    pub output: OutputArgs,
}

#[derive(Serialize)]
struct PettyImage {
    index: usize,
    petty: Estimate,
    /// `(image - body) / combined std error`
    z: f64,
}

#[derive(Serialize)]
struct PettyReport {
    petty: Estimate,
    isoperimetric_quotient: f64,
    holder_bound: Estimate,
    images: Vec<PettyImage>,
}

pub fn petty(args: &PettyArgs) -> anyhow::Result<Output> {
    let v = load_vpolytope(&args.input)?;
    let n = v.dim();
    let mc = args.mc.params();
    let base = petty_functional(&v, &mc)?;
    let holder = holder_quotient_bound(&v, &mc)?;
    let quotient = isoperimetric_quotient(&v)?;
    let images = (0..args.count)
        .map(|k| {
            let t = random::random_affine(&mut random::stream(args.mc.seed, k as u64 + 1), n);
            let image = v.apply_affine(&t)?;
            let petty = petty_functional(
                &image,
                &McParams::new(mc.sample_count, mc.seed.wrapping_add(k as u64 + 1)),
            )?;
            let spread = (base.std_error.powi(2) + petty.std_error.powi(2)).sqrt();
            Ok(PettyImage {
                index: k,
                petty,
                z: (petty.value - base.value) / spread,
            })
        })
        .collect::<volrat::Result<Vec<_>>>()?;
    let invariant = images.iter().all(|i| i.z.abs() <= SIGMAS);
    let holder_ok = quotient >= holder.value - SIGMAS * holder.std_error;
    let report = PettyReport {
        petty: base,
        isoperimetric_quotient: quotient,
        holder_bound: holder,
        images,
    };
    let mut table = vec![vec!["body".to_string(), num(base.value), num(base.std_error), num(0.0)]];
    table.extend(report.images.iter().map(|i| {
        vec![
            format!("image{}", i.index),
            num(i.petty.value),
            num(i.petty.std_error),
            num(i.z),
        ]
    }));
    Ok(Output::new("petty", args, invariant && holder_ok, &report)?.table(&["body", "petty", "std_error", "z"], table))
}
