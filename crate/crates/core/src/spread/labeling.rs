use serde::{Deserialize, Serialize};

use super::SpreadError;
use crate::dual_graph::{CubeSide, EdgeGraph, GraphError, Weight};

/// Facets pulled back from the faces `x_i = -1` and `x_i = 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AxisClasses {
    pub minus: Vec<usize>,
    pub plus: Vec<usize>,
}

/// One pair of classes per axis. A facet may belong to classes of several
/// axes (it then maps to a lower-dimensional face of the cube) and facets in
/// no class are free.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CubeLabeling {
    pub axes: Vec<AxisClasses>,
}

impl CubeLabeling {
    pub fn new(axes: Vec<AxisClasses>, facet_count: usize) -> Result<Self, SpreadError> {
        let l = CubeLabeling { axes };
        l.validate(facet_count)?;
        Ok(l)
    }

    pub fn k(&self) -> usize {
        self.axes.len()
    }

    pub fn validate(&self, facet_count: usize) -> Result<(), SpreadError> {
        if self.axes.is_empty() {
            return Err(SpreadError::NoValidLabeling("a labeling needs at least one axis".into()));
        }
        for (axis, a) in self.axes.iter().enumerate() {
            for (side, class) in [("minus", &a.minus), ("plus", &a.plus)] {
                if class.is_empty() {
                    return Err(SpreadError::EmptyClass { axis, side });
                }
                if let Some(f) = class.iter().find(|f| **f >= facet_count) {
                    return Err(SpreadError::InvalidFacet(*f));
                }
            }
            if let Some(f) = a.minus.iter().find(|f| a.plus.contains(f)) {
                return Err(SpreadError::OverlappingClasses { axis, facet: *f });
            }
        }
        Ok(())
    }

    /// Each facet of the cube as its own class, in the facet order of
    /// [`crate::geometry::shapes::cube`].
    pub fn natural_cube(n: usize) -> Self {
        CubeLabeling {
            axes: (0..n)
                .map(|i| AxisClasses { minus: vec![2 * i + 1], plus: vec![2 * i] })
                .collect(),
        }
    }

    /// Squares of each side of a subdivided cube as the classes of its axis.
    pub fn bands(sides: &[CubeSide]) -> Self {
        CubeLabeling {
            axes: (0..3)
                .map(|axis| AxisClasses {
                    minus: (0..sides.len()).filter(|s| sides[*s] == (axis, false)).collect(),
                    plus: (0..sides.len()).filter(|s| sides[*s] == (axis, true)).collect(),
                })
                .collect(),
        }
    }

    /// Completes minus classes with plus classes made of every facet at
    /// distance at least `reach` from the minus class.
    pub fn with_far_classes(
        g: &EdgeGraph,
        minus: Vec<Vec<usize>>,
        weight: Weight,
        reach: f64,
    ) -> Result<Self, GraphError> {
        let axes = minus
            .into_iter()
            .map(|m| {
                let d = g.distances_from(&m, weight)?;
                let plus = (0..d.len()).filter(|f| d[*f] >= reach).collect();
                Ok(AxisClasses { minus: m, plus })
            })
            .collect::<Result<_, GraphError>>()?;
        Ok(CubeLabeling { axes })
    }
}
