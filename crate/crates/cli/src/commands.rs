use std::f64::consts::PI;
use std::path::PathBuf;

use clap::{Args, ValueEnum};
use serde::Serialize;
use serde_json::json;

use polyspread::dual_graph::Weight;
use polyspread::geometry::{coangle, enumerate_faces, is_simple, CoangleMethod};
use polyspread::random_poly::{run_experiment, ExperimentConfig, QueryMode};
use polyspread::rounding::{convergence_study, round, VertexSet};
use polyspread::skyscraper::{asymptotic_study, build, hexagon_family, verify, SkyscraperSpec};
use polyspread::spread::{certify, search_spread, MapOptions, SearchMode, SearchOptions};
use polyspread::waists::{generic_map, probe_fibers, ProbeOptions};

use crate::input::{parse_list, read_json, Loaded, Source};
use crate::{CliError, Output};

fn json_output<T: Serialize>(value: &T, summary: Option<String>) -> Output {
    let body = serde_json::to_string_pretty(value).expect("plain data serializes") + "\n";
    Output { body, summary }
}

fn weight_name(w: Weight) -> &'static str {
    match w {
        Weight::Comb => "comb",
        Weight::Angular => "angular",
    }
}

#[derive(Debug, Args, Serialize)]
pub struct PolyInfo {
    #[command(flatten)]
    pub source: Source,
}

impl PolyInfo {
    pub fn run(&self) -> Result<Output, CliError> {
        let loaded = self.source.load()?;
        let g = loaded.graph()?;
        let comb = g.diameter(Weight::Comb)?;
        let angular = if g.has_angular_weights() { Some(g.diameter(Weight::Angular)?) } else { None };
        let value = match &loaded {
            Loaded::Polytope(p) => {
                let lattice = enumerate_faces(p)?;
                json!({
                    "kind": "polytope",
                    "dim": p.dim(),
                    "facets": p.facet_count(),
                    "f_vector": lattice.f_vector(),
                    "simple": is_simple(&lattice),
                    "tolerance": p.tolerance(),
                    "comb_diameter": comb,
                    "angular_diameter": angular,
                    "angular_range": g.angular_range(),
                })
            }
            Loaded::Graph { .. } => json!({
                "kind": "graph",
                "provenance": g.provenance(),
                "vertices": g.vertex_count(),
                "edges": g.edges().len(),
                "comb_diameter": comb,
                "angular_diameter": angular,
            }),
        };
        Ok(json_output(&value, None))
    }
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Exact,
    MonteCarlo,
}

#[derive(Debug, Args, Serialize)]
pub struct Angles {
    #[command(flatten)]
    pub source: Source,
    /// dimension of the faces (default n-2, the ridges)
    #[arg(long)]
    pub face_dim: Option<usize>,
    #[arg(long, value_enum, default_value = "exact")]
    pub method: Method,
    /// samples per face where no closed form applies
    #[arg(long, default_value_t = 100_000)]
    pub samples: usize,
    #[arg(long)]
    pub seed: Option<u64>,
}

impl Angles {
    pub fn run(&self) -> Result<Output, CliError> {
        let p = self.source.polytope()?;
        let lattice = enumerate_faces(&p)?;
        let n = p.dim();
        let k = self.face_dim.unwrap_or(n.saturating_sub(2));
        if k + 1 >= n {
            return Err(CliError::Usage(format!("--face-dim: must be below {}", n - 1)));
        }
        let method = match self.method {
            Method::Exact => CoangleMethod::Exact,
            Method::MonteCarlo => CoangleMethod::MonteCarlo,
        };
        let seed = self.seed.unwrap_or(0);
        let mut body = String::from("face,dim,facets,value,std_error,method\n");
        let mut total = 0.0;
        for &f in &lattice.by_dim[k] {
            let c = coangle(&p, &lattice, f, method, self.samples, seed ^ f as u64)?;
            total += c.value;
            let facets: Vec<String> = lattice.faces[f].active.iter().map(usize::to_string).collect();
            let m = match c.method {
                CoangleMethod::Exact => "exact",
                CoangleMethod::MonteCarlo => "monte-carlo",
            };
            body.push_str(&format!("{f},{k},{},{},{},{m}\n", facets.join(" "), c.value, c.std_error));
        }
        let summary = format!("{} faces of dimension {k}, coangle sum {total}", lattice.by_dim[k].len());
        Ok(Output { body, summary: Some(summary) })
    }
}

fn facet_list(flag: &str, s: &str) -> Result<Vec<usize>, CliError> {
    parse_list(flag, s)
}

#[derive(Debug, Args, Serialize)]
pub struct Dist {
    #[command(flatten)]
    pub source: Source,
    #[arg(long, default_value = "comb")]
    pub weight: Weight,
    /// comma-separated source facets; with --to gives one distance instead of the matrix
    #[arg(long, requires = "to")]
    pub from: Option<String>,
    #[arg(long, requires = "from")]
    pub to: Option<String>,
}

impl Dist {
    pub fn run(&self) -> Result<Output, CliError> {
        let g = self.source.load()?.graph()?;
        match (&self.from, &self.to) {
            (Some(a), Some(b)) => {
                let (a, b) = (facet_list("--from", a)?, facet_list("--to", b)?);
                let d = g.distance(&a, &b, self.weight)?;
                let value = json!({ "weight": weight_name(self.weight), "from": a, "to": b, "distance": d });
                Ok(json_output(&value, None))
            }
            _ => Ok(Output { body: g.distance_matrix_csv(self.weight)?, summary: None }),
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct SpreadCertify {
    #[command(flatten)]
    pub source: Source,
    /// natural (cube facets), bands (subdivided cube) or a labeling JSON file
    #[arg(long)]
    pub labeling: String,
    #[arg(long, default_value = "comb")]
    pub weight: Weight,
    /// subdivision of each flag simplex of the sphere mesh
    #[arg(long, default_value_t = 1)]
    pub resolution: usize,
    #[arg(long)]
    pub seed: Option<u64>,
}

impl SpreadCertify {
    pub fn run(&self) -> Result<Output, CliError> {
        let loaded = self.source.load()?;
        let labeling = loaded.labeling(&self.labeling)?;
        let opts = MapOptions { resolution: self.resolution, seed: self.seed.unwrap_or(0) };
        let cert = certify(&loaded.instance()?, &labeling, self.weight, opts)?;
        let summary = format!("d = {}, degree {:?}", cert.d, cert.degree);
        Ok(json_output(&cert, Some(summary)))
    }
}

#[derive(Debug, Args, Serialize)]
pub struct SpreadSearch {
    #[command(flatten)]
    pub source: Source,
    /// number of cube axes (default: the dimension)
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long, default_value = "comb")]
    pub weight: Weight,
    #[arg(long, default_value = "auto")]
    pub mode: SearchMode,
    /// most labelings whose degree is evaluated
    #[arg(long, default_value_t = 200_000)]
    pub budget: usize,
    #[arg(long, default_value_t = 1)]
    pub resolution: usize,
    #[arg(long)]
    pub seed: Option<u64>,
}

impl SpreadSearch {
    pub fn run(&self) -> Result<Output, CliError> {
        let inst = self.source.load()?.instance()?;
        let k = match (self.k, inst.dim()) {
            (Some(k), _) => k,
            (None, Some(n)) => n,
            (None, None) => return Err(CliError::Usage("--k is required for an abstract graph".into())),
        };
        let opts = SearchOptions {
            mode: self.mode,
            budget: self.budget,
            map: MapOptions { resolution: self.resolution, seed: self.seed.unwrap_or(0) },
        };
        let cert = search_spread(&inst, k, self.weight, opts)?;
        let summary = format!("d = {}, degree {:?}", cert.d, cert.degree);
        Ok(json_output(&cert, Some(summary)))
    }
}

#[derive(Debug, Args, Serialize)]
pub struct Family {
    /// skyscraper spec JSON: {"bases", "scales", "heights", "stretch"}
    #[arg(long, value_name = "FILE", conflicts_with = "hexagon", required_unless_present = "hexagon")]
    pub spec: Option<PathBuf>,
    /// hexagon skyscraper with 2N alternating triangle cones
    #[arg(long, value_name = "N")]
    pub hexagon: Option<usize>,
    /// vertical stretch C, replacing the one in the spec
    #[arg(long)]
    pub stretch: Option<f64>,
}

impl Family {
    fn spec(&self) -> Result<SkyscraperSpec, CliError> {
        let spec = match (&self.spec, self.hexagon) {
            (Some(path), _) => read_json(path)?,
            (None, Some(n)) if n > 0 => hexagon_family(n, 1.0)?,
            _ => return Err(CliError::Usage("--hexagon: N must be at least 1".into())),
        };
        Ok(match self.stretch {
            Some(c) => spec.with_stretch(c),
            None => spec,
        })
    }
}

#[derive(Debug, Args, Serialize)]
pub struct SkyscraperBuild {
    #[command(flatten)]
    pub family: Family,
}

impl SkyscraperBuild {
    pub fn run(&self) -> Result<Output, CliError> {
        let spec = self.family.spec()?;
        let sky = build(&spec)?;
        let report = verify(&sky, &spec)?;
        let summary = format!(
            "{} facets, min side angle {}, min bottom angle {}, intersection {}",
            report.facet_count,
            report.min_side_angle,
            report.min_bottom_angle,
            if report.intersection_ok { "ok" } else { "violated" }
        );
        let value = json!({ "spec": spec, "report": report, "polytope": sky.polytope, "origins": sky.origins });
        Ok(json_output(&value, Some(summary)))
    }
}

#[derive(Debug, Args, Serialize)]
pub struct SkyscraperStudy {
    #[command(flatten)]
    pub family: Family,
    /// comma-separated stretches
    #[arg(long, default_value = "1,10,100,1000")]
    pub stretches: String,
}

impl SkyscraperStudy {
    pub fn run(&self) -> Result<Output, CliError> {
        let spec = self.family.spec()?;
        let stretches: Vec<f64> = parse_list("--stretches", &self.stretches)?;
        let study = asymptotic_study(&spec, &stretches)?;
        let summary = format!(
            "side limit {} (π/3 = {}), bottom limit {}, side monotone {}",
            study.side_limit,
            PI / 3.0,
            study.bottom_limit,
            study.side_monotone
        );
        Ok(Output { body: study.to_csv(), summary: Some(summary) })
    }
}

#[derive(Debug, Args, Serialize)]
pub struct Round {
    #[command(flatten)]
    pub source: Source,
    #[arg(long)]
    pub epsilon: f64,
    /// mesh resolution in (0, 1], as a fraction of ε
    #[arg(long, default_value_t = 0.1)]
    pub resolution: f64,
}

impl Round {
    pub fn run(&self) -> Result<Output, CliError> {
        let mesh = round(&self.source.polytope()?, self.epsilon, self.resolution)?;
        let summary = format!(
            "{} vertices, {} triangles, seam defect {}",
            mesh.vertices.len(),
            mesh.triangles.len(),
            mesh.seam_defect
        );
        Ok(Output { body: mesh.to_text(), summary: Some(summary) })
    }
}

/// `region:F`, `interior:F[:SHRINK]` or `point:X,Y,Z[;X,Y,Z...]`
fn vertex_set(flag: &str, s: &str) -> Result<VertexSet, CliError> {
    let bad = || CliError::Usage(format!("{flag}: expected region:F, interior:F[:SHRINK] or point:X,Y,Z, got `{s}`"));
    let (kind, rest) = s.split_once(':').ok_or_else(bad)?;
    match kind {
        "region" => Ok(VertexSet::FaceRegion(rest.parse().map_err(|_| bad())?)),
        "interior" => {
            let (f, shrink) = rest.split_once(':').unwrap_or((rest, "0.5"));
            Ok(VertexSet::FaceInterior {
                facet: f.parse().map_err(|_| bad())?,
                shrink: shrink.parse().map_err(|_| bad())?,
            })
        }
        "point" => rest
            .split(';')
            .map(|p| {
                let v: Vec<f64> = parse_list(flag, p)?;
                <[f64; 3]>::try_from(v).map_err(|_| bad())
            })
            .collect::<Result<_, _>>()
            .map(VertexSet::Points),
        _ => Err(bad()),
    }
}

#[derive(Debug, Args, Serialize)]
pub struct Natdist {
    #[command(flatten)]
    pub source: Source,
    #[arg(long)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 0.1)]
    pub resolution: f64,
    /// region:F, interior:F[:SHRINK] or point:X,Y,Z[;X,Y,Z...]
    #[arg(long)]
    pub from: String,
    #[arg(long)]
    pub to: String,
}

impl Natdist {
    pub fn run(&self) -> Result<Output, CliError> {
        let (src, dst) = (vertex_set("--from", &self.from)?, vertex_set("--to", &self.to)?);
        let mesh = round(&self.source.polytope()?, self.epsilon, self.resolution)?;
        let report = mesh.path_structure(&src, &dst)?;
        let summary = format!("♮-distance {}, {} strips crossed", report.nat_length, report.strips_crossed);
        Ok(json_output(&report, Some(summary)))
    }
}

#[derive(Debug, Args, Serialize)]
pub struct NatConverge {
    #[command(flatten)]
    pub source: Source,
    #[arg(long, default_value = "0.2,0.1,0.05")]
    pub epsilons: String,
    /// facet pairs as A:B, comma-separated
    #[arg(long)]
    pub pairs: String,
    #[arg(long, default_value = "0.1")]
    pub resolutions: String,
}

impl NatConverge {
    pub fn run(&self) -> Result<Output, CliError> {
        let epsilons: Vec<f64> = parse_list("--epsilons", &self.epsilons)?;
        let resolutions: Vec<f64> = parse_list("--resolutions", &self.resolutions)?;
        let pairs = self
            .pairs
            .split(',')
            .map(|s| {
                let bad = || CliError::Usage(format!("--pairs: expected A:B, got `{s}`"));
                let (a, b) = s.trim().split_once(':').ok_or_else(bad)?;
                Ok((a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?))
            })
            .collect::<Result<Vec<(usize, usize)>, CliError>>()?;
        let study = convergence_study(&self.source.polytope()?, &epsilons, &pairs, &resolutions)?;
        let worst = study.rows.iter().map(|r| r.error).fold(0.0, f64::max);
        let summary = format!("largest error {worst}, decreasing {}", study.decreasing);
        Ok(Output { body: study.to_csv(), summary: Some(summary) })
    }
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Antipodal,
    Random,
}

#[derive(Debug, Args, Serialize)]
pub struct RandomExperiment {
    /// experiment config JSON: {"n", "sizes", "trials", "queries", "mode", "seed"}
    #[arg(long, value_name = "FILE", conflicts_with_all = ["n", "sizes", "trials", "queries", "mode", "seed"])]
    pub config: Option<PathBuf>,
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    /// linear sizes N; a trial samples N^(n-1) points
    #[arg(long, default_value = "10,20,40")]
    pub sizes: String,
    #[arg(long, default_value_t = 20)]
    pub trials: usize,
    #[arg(long, default_value_t = 1)]
    pub queries: usize,
    #[arg(long, value_enum, default_value = "antipodal")]
    pub mode: Mode,
    #[arg(long)]
    pub seed: Option<u64>,
}

impl RandomExperiment {
    pub fn run(&self) -> Result<Output, CliError> {
        let config = match &self.config {
            Some(path) => read_json(path)?,
            None => ExperimentConfig {
                n: self.n,
                sizes: parse_list("--sizes", &self.sizes)?,
                trials: self.trials,
                queries: self.queries,
                mode: match self.mode {
                    Mode::Antipodal => QueryMode::Antipodal,
                    Mode::Random => QueryMode::Random,
                },
                seed: self.seed.expect("seed resolved before running"),
            },
        };
        let result = run_experiment(&config)?;
        let cvs: Vec<String> = result.aggregates.iter().map(|a| format!("{}:{:.4}", a.size, a.comb.cv)).collect();
        let (up, lo) = result.band_deviation();
        let summary = format!("comb ratio cv by size {}, band deviation {up:.3}/{lo:.3}", cvs.join(" "));
        Ok(Output { body: result.to_csv(), summary: Some(summary) })
    }
}

#[derive(Debug, Args, Serialize)]
pub struct Waist {
    #[command(flatten)]
    pub source: Source,
    /// target dimension of the generic linear map
    #[arg(long, default_value_t = 2)]
    pub k: usize,
    /// dimension of the faces counted (default n-1, the facets)
    #[arg(long)]
    pub face_dim: Option<usize>,
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    /// skip vertex images and edge-image crossings
    #[arg(long)]
    pub no_critical: bool,
    #[arg(long)]
    pub seed: Option<u64>,
}

impl Waist {
    pub fn run(&self) -> Result<Output, CliError> {
        let p = self.source.polytope()?;
        let lattice = enumerate_faces(&p)?;
        let seed = self.seed.unwrap_or(0);
        let map = generic_map(p.dim(), self.k, seed);
        let face_dim = self.face_dim.unwrap_or(p.dim() - 1);
        let opts = ProbeOptions { uniform: self.samples, critical: !self.no_critical, seed };
        let probe = probe_fibers(&p, &lattice, &map, face_dim, opts)?;
        let (open, closed) = probe.overlap_counts();
        let summary = format!("open count {open}, closed count {closed}, {} fibers", probe.rows.len());
        Ok(Output { body: probe.to_csv(), summary: Some(summary) })
    }
}
