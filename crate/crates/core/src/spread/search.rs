use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{certify, CubeLabeling, DegreeStatus, MapOptions, SpreadCertificate, SpreadError, SpreadInstance};
use crate::dual_graph::Weight;

/// Facet count up to which `Auto` searches exhaustively.
pub const EXHAUSTIVE_CUTOFF: usize = 12;
/// Exhaustive search enumerates all facet subsets, so it is capped hard.
const EXHAUSTIVE_LIMIT: usize = 16;
const BALL_FRACTIONS: [f64; 5] = [0.0, 0.1, 0.2, 0.3, 0.4];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SearchMode {
    Auto,
    Exhaustive,
    Heuristic,
}

impl std::str::FromStr for SearchMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "auto" => Ok(SearchMode::Auto),
            "exhaustive" => Ok(SearchMode::Exhaustive),
            "heuristic" => Ok(SearchMode::Heuristic),
            _ => Err(format!("unknown search mode `{s}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchOptions {
    pub mode: SearchMode,
    /// maximum number of labelings whose degree is evaluated
    pub budget: usize,
    pub map: MapOptions,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions { mode: SearchMode::Auto, budget: 200_000, map: MapOptions::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchInfo {
    pub mode: SearchMode,
    pub evaluated: usize,
    /// every candidate up to the returned value was examined
    pub complete: bool,
    pub budget: usize,
}

/// Best certificate found for `k` axes.
///
/// Minus classes are chosen by the search; each plus class is every facet
/// at distance at least `d` from its minus class, and `D′ = d`. When `k`
/// equals the dimension of the polytope only nonzero-degree labelings are
/// accepted. The result is a lower bound, never a claim of optimality.
pub fn search_spread(
    inst: &SpreadInstance,
    k: usize,
    weight: Weight,
    opts: SearchOptions,
) -> Result<SpreadCertificate, SpreadError> {
    let m = inst.facet_count();
    if k == 0 || m < 2 {
        return Err(SpreadError::NoValidLabeling(format!("no labeling with {k} axes on {m} facets")));
    }
    let exhaustive = match opts.mode {
        SearchMode::Auto => m <= EXHAUSTIVE_CUTOFF,
        SearchMode::Exhaustive => true,
        SearchMode::Heuristic => false,
    };
    if exhaustive && m > EXHAUSTIVE_LIMIT {
        return Err(SpreadError::NoValidLabeling(format!(
            "exhaustive search is limited to {EXHAUSTIVE_LIMIT} facets, got {m}"
        )));
    }
    let needs_degree = inst.dim() == Some(k);
    let (cert, evaluated, complete) = if exhaustive {
        exhaustive_search(inst, k, weight, opts, needs_degree)?
    } else {
        heuristic_search(inst, k, weight, opts, needs_degree)?
    };
    let mut cert = cert.ok_or_else(|| {
        SpreadError::NoValidLabeling(format!("no nonzero-degree labeling among {evaluated} candidates"))
    })?;
    if cert.degree == DegreeStatus::Asserted {
        // nobody vouched for the degree of a searched labeling
        cert.degree = DegreeStatus::Unverified;
    }
    cert.search = Some(SearchInfo {
        mode: if exhaustive { SearchMode::Exhaustive } else { SearchMode::Heuristic },
        evaluated,
        complete,
        budget: opts.budget,
    });
    Ok(cert)
}

fn eccentricity(inst: &SpreadInstance, set: &[usize], weight: Weight) -> Result<f64, SpreadError> {
    Ok(inst
        .graph
        .distances_from(set, weight)?
        .into_iter()
        .fold(0.0, f64::max))
}

fn evaluate(
    inst: &SpreadInstance,
    minus: Vec<Vec<usize>>,
    reach: f64,
    weight: Weight,
    opts: SearchOptions,
    needs_degree: bool,
) -> Option<SpreadCertificate> {
    let labeling = CubeLabeling::with_far_classes(&inst.graph, minus, weight, reach).ok()?;
    let cert = certify(inst, &labeling, weight, opts.map).ok()?;
    (!needs_degree || cert.is_valid_lower_bound()).then_some(cert)
}

type Outcome = (Option<SpreadCertificate>, usize, bool);

fn exhaustive_search(
    inst: &SpreadInstance,
    k: usize,
    weight: Weight,
    opts: SearchOptions,
    needs_degree: bool,
) -> Result<Outcome, SpreadError> {
    let m = inst.facet_count();
    let mut subsets: Vec<(f64, Vec<usize>)> = (1u32..(1 << m) - 1)
        .into_par_iter()
        .map(|mask| {
            let set: Vec<usize> = (0..m).filter(|i| mask >> i & 1 == 1).collect();
            Ok((eccentricity(inst, &set, weight)?, set))
        })
        .collect::<Result<_, SpreadError>>()?;
    // stable: ties keep mask order, so results are deterministic
    subsets.sort_by(|a, b| b.0.total_cmp(&a.0));
    subsets.retain(|s| s.0 > 0.0);
    if subsets.len() < k {
        return Ok((None, 0, true));
    }

    let mut evaluated = 0;
    let mut start = 0;
    while start < subsets.len() {
        let t = subsets[start].0;
        let end = subsets[start..]
            .iter()
            .position(|s| s.0 < t * (1.0 - 1e-12))
            .map_or(subsets.len(), |p| start + p);
        if end >= k {
            // combinations whose smallest eccentricity is exactly t
            let room = opts.budget.saturating_sub(evaluated);
            let mut combos = Vec::new();
            for last in start.max(k - 1)..end {
                for_each_combination(last, k - 1, |c| {
                    let mut c = c.to_vec();
                    c.push(last);
                    combos.push(c);
                    combos.len() <= room
                });
                if combos.len() > room {
                    break;
                }
            }
            let truncated = combos.len() > room;
            combos.truncate(room);
            evaluated += combos.len();
            let found = combos.par_iter().find_map_first(|c| {
                let minus = c.iter().map(|i| subsets[*i].1.clone()).collect();
                evaluate(inst, minus, t, weight, opts, needs_degree)
            });
            if found.is_some() || truncated {
                return Ok((found, evaluated, !truncated));
            }
        }
        start = end;
    }
    Ok((None, evaluated, true))
}

/// Calls `f` on every increasing `r`-tuple from `0..n` until it returns false.
fn for_each_combination(n: usize, r: usize, mut f: impl FnMut(&[usize]) -> bool) {
    if r > n {
        return;
    }
    let mut c: Vec<usize> = (0..r).collect();
    loop {
        if !f(&c) {
            return;
        }
        let Some(i) = (0..r).rev().find(|&i| c[i] < n - r + i) else {
            return;
        };
        c[i] += 1;
        for j in i + 1..r {
            c[j] = c[j - 1] + 1;
        }
    }
}

/// Poles are chosen one axis at a time: the farthest pair, then pairs that
/// are far apart while equidistant from earlier poles. Minus classes are
/// balls around the minus poles at several radii.
fn heuristic_search(
    inst: &SpreadInstance,
    k: usize,
    weight: Weight,
    opts: SearchOptions,
    needs_degree: bool,
) -> Result<Outcome, SpreadError> {
    let dist = inst.graph.distance_matrix(weight)?;
    let m = dist.len();
    let mut poles: Vec<(usize, usize)> = Vec::with_capacity(k);
    for _ in 0..k {
        let mut best = (f64::NEG_INFINITY, 0, 0);
        for a in 0..m {
            for b in a + 1..m {
                let skew: f64 = poles
                    .iter()
                    .map(|&(p, q)| (dist[a][p] - dist[a][q]).abs() + (dist[b][p] - dist[b][q]).abs())
                    .sum();
                let score = dist[a][b] - skew;
                if score > best.0 {
                    best = (score, a, b);
                }
            }
        }
        poles.push((best.1, best.2));
    }

    let candidates: Vec<Vec<Vec<usize>>> = BALL_FRACTIONS
        .iter()
        .map(|frac| {
            poles
                .iter()
                .map(|&(a, b)| {
                    let r = frac * dist[a][b];
                    (0..m).filter(|f| dist[a][*f] <= r).collect()
                })
                .collect()
        })
        .collect();
    let candidates: Vec<_> = candidates.into_iter().take(opts.budget.max(1)).collect();
    let evaluated = candidates.len();
    let results: Vec<Option<SpreadCertificate>> = candidates
        .into_par_iter()
        .map(|minus: Vec<Vec<usize>>| {
            let reach = minus
                .iter()
                .map(|s| eccentricity(inst, s, weight))
                .collect::<Result<Vec<_>, _>>()
                .ok()?
                .into_iter()
                .fold(f64::INFINITY, f64::min);
            if reach <= 0.0 {
                return None;
            }
            evaluate(inst, minus, reach, weight, opts, needs_degree)
        })
        .collect();
    let best = results
        .into_iter()
        .flatten()
        .fold(None::<SpreadCertificate>, |acc, c| match acc {
            Some(a) if a.d >= c.d => Some(a),
            _ => Some(c),
        });
    Ok((best, evaluated, false))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::shapes;
    use std::f64::consts::PI;

    #[test]
    fn combinations() {
        let mut all = Vec::new();
        for_each_combination(5, 3, |c| {
            all.push(c.to_vec());
            true
        });
        assert_eq!(all.len(), 10);
        assert_eq!(all[0], vec![0, 1, 2]);
        assert_eq!(all[9], vec![2, 3, 4]);
    }

    #[test]
    fn cube_attains_pi() {
        let inst = SpreadInstance::from_polytope(&shapes::cube(3)).unwrap();
        let c = search_spread(&inst, 3, Weight::Angular, SearchOptions::default()).unwrap();
        assert!((c.d - PI).abs() < 1e-12);
        assert!(c.is_valid_lower_bound());
        assert!(c.search.unwrap().complete);
    }

    #[test]
    fn simplex_needs_shared_classes() {
        let inst = SpreadInstance::from_polytope(&shapes::regular_simplex(3)).unwrap();
        let c = search_spread(&inst, 3, Weight::Angular, SearchOptions::default()).unwrap();
        assert!((c.d - (-1.0f64 / 3.0).acos()).abs() < 1e-12);
        assert!(c.is_valid_lower_bound());
    }

    #[test]
    fn heuristic_on_a_cube() {
        let inst = SpreadInstance::from_polytope(&shapes::cube(3)).unwrap();
        let opts = SearchOptions { mode: SearchMode::Heuristic, ..Default::default() };
        let c = search_spread(&inst, 3, Weight::Comb, opts).unwrap();
        assert_eq!(c.d, 2.0);
        assert!(c.is_valid_lower_bound());
    }
}
