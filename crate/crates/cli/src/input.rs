//! Loading polytopes, graphs and labelings from files or built-in shapes.

use std::path::{Path, PathBuf};

use clap::Args;
use serde::{de::DeserializeOwned, Deserialize, Serialize};

use polyspread::dual_graph::{
    edge_graph_from_lattice, ingest_abstract_graph, subdivided_cube_graph, CubeSide, EdgeGraph, GraphDescription,
};
use polyspread::geometry::{enumerate_faces, shapes, HPolytope, Halfspace, DEFAULT_TOLERANCE};
use polyspread::spread::{CubeLabeling, SpreadInstance};

use crate::CliError;

pub const TOLERANCE_VAR: &str = "POLYSPREAD_TOLERANCE";

/// Where the polytope or graph of a command comes from.
#[derive(Debug, Clone, Args, Serialize)]
pub struct Source {
    /// polytope JSON: {"dim", "halfspaces": [{"normal", "offset"}], "tolerance"?}
    #[arg(long = "in", value_name = "FILE", conflicts_with_all = ["graph", "shape"])]
    pub input: Option<PathBuf>,
    /// abstract graph JSON: {"vertices": [{"id", "normal"?}], "edges": [{"i", "j", "w_ang"?}]}
    #[arg(long, value_name = "FILE", conflicts_with = "shape")]
    pub graph: Option<PathBuf>,
    /// built-in shape: cube:N, simplex:N, cross:N, prism:K, dodecahedron, subdivided-cube:N
    #[arg(long, value_name = "NAME")]
    pub shape: Option<String>,
}

pub enum Loaded {
    Polytope(HPolytope),
    Graph { graph: EdgeGraph, sides: Option<Vec<CubeSide>> },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPolytope {
    dim: usize,
    halfspaces: Vec<Halfspace>,
    tolerance: Option<f64>,
}

/// Tolerance from the environment, or the library default.
pub fn default_tolerance() -> Result<f64, CliError> {
    match std::env::var(TOLERANCE_VAR) {
        Ok(s) => match s.trim().parse::<f64>() {
            Ok(t) if t > 0.0 && t.is_finite() => Ok(t),
            _ => Err(CliError::Usage(format!("{TOLERANCE_VAR}: expected a positive number, got `{s}`"))),
        },
        Err(_) => Ok(DEFAULT_TOLERANCE),
    }
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("malformed {}: {e}", path.display())))
}

pub fn read_polytope(path: &Path) -> Result<HPolytope, CliError> {
    let raw: RawPolytope = read_json(path)?;
    if let Some(i) = raw.halfspaces.iter().position(|h| h.normal.len() != raw.dim) {
        return Err(CliError::Usage(format!(
            "malformed {}: halfspace {i} has {} coordinates but dim is {}",
            path.display(),
            raw.halfspaces[i].normal.len(),
            raw.dim
        )));
    }
    let tol = match raw.tolerance {
        Some(t) => t,
        None => default_tolerance()?,
    };
    let pairs = raw.halfspaces.into_iter().map(|h| (h.normal, h.offset)).collect();
    Ok(HPolytope::normalize(pairs, tol)?)
}

fn shape(spec: &str) -> Result<Loaded, CliError> {
    let (name, arg) = spec.split_once(':').unwrap_or((spec, ""));
    let number = |lo: usize| -> Result<usize, CliError> {
        match arg.parse::<usize>() {
            Ok(v) if v >= lo => Ok(v),
            _ => Err(CliError::Usage(format!("--shape {spec}: expected an integer ≥ {lo} after `{name}:`"))),
        }
    };
    let tol = default_tolerance()?;
    let p = match name {
        "cube" => shapes::cube(number(2)?),
        "simplex" => shapes::regular_simplex(number(2)?),
        "cross" => shapes::cross_polytope(number(2)?),
        "prism" => shapes::prism(number(3)?, 1.0),
        "dodecahedron" => shapes::dodecahedron(),
        "subdivided-cube" => {
            let (graph, sides) = subdivided_cube_graph(number(1)?)?;
            return Ok(Loaded::Graph { graph, sides: Some(sides) });
        }
        _ => return Err(CliError::Usage(format!("--shape: unknown shape `{name}`"))),
    };
    Ok(Loaded::Polytope(p.with_tolerance(tol)))
}

impl Source {
    pub fn load(&self) -> Result<Loaded, CliError> {
        match (&self.input, &self.graph, &self.shape) {
            (Some(p), _, _) => Ok(Loaded::Polytope(read_polytope(p)?)),
            (_, Some(g), _) => {
                let desc: GraphDescription = read_json(g)?;
                Ok(Loaded::Graph { graph: ingest_abstract_graph(&desc)?, sides: None })
            }
            (_, _, Some(s)) => shape(s),
            _ => Err(CliError::Usage("one of --in, --graph or --shape is required".into())),
        }
    }

    pub fn polytope(&self) -> Result<HPolytope, CliError> {
        match self.load()? {
            Loaded::Polytope(p) => Ok(p),
            Loaded::Graph { .. } => Err(CliError::Usage("this command needs a polytope (--in or --shape)".into())),
        }
    }

    pub fn files(&self) -> Vec<PathBuf> {
        self.input.iter().chain(&self.graph).cloned().collect()
    }
}

impl Loaded {
    pub fn graph(&self) -> Result<EdgeGraph, CliError> {
        match self {
            Loaded::Polytope(p) => Ok(edge_graph_from_lattice(p, &enumerate_faces(p)?)),
            Loaded::Graph { graph, .. } => Ok(graph.clone()),
        }
    }

    pub fn instance(&self) -> Result<SpreadInstance, CliError> {
        match self {
            Loaded::Polytope(p) => Ok(SpreadInstance::from_polytope(p)?),
            Loaded::Graph { graph, .. } => Ok(SpreadInstance::from_graph(graph.clone())),
        }
    }

    /// `natural`, `bands` or a labeling JSON file.
    pub fn labeling(&self, spec: &str) -> Result<CubeLabeling, CliError> {
        match (spec, self) {
            ("natural", Loaded::Polytope(p)) => Ok(CubeLabeling::natural_cube(p.dim())),
            ("natural", _) => Err(CliError::Usage("--labeling natural needs a cube polytope".into())),
            ("bands", Loaded::Graph { sides: Some(s), .. }) => Ok(CubeLabeling::bands(s)),
            ("bands", _) => Err(CliError::Usage("--labeling bands needs --shape subdivided-cube:N".into())),
            (path, _) => read_json(Path::new(path)),
        }
    }
}

/// Comma-separated list of numbers.
pub fn parse_list<T: std::str::FromStr>(flag: &str, s: &str) -> Result<Vec<T>, CliError> {
    s.split(',')
        .map(|x| {
            x.trim()
                .parse()
                .map_err(|_| CliError::Usage(format!("{flag}: cannot parse `{x}`")))
        })
        .collect()
}
