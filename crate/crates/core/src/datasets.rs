//! The six built-in two-feature grid datasets.
//!
//! Every dataset is a `G × G` grid over `[0, 1]²` sampled at cell centers:
//! column `c` has `f0 = (c + 0.5) / G` and row `r` has `f1 = (r + 0.5) / G`.
//! Cells are stored row-major (row = feature-1 bin).

use serde::ser::{SerializeStruct, Serializer};
use serde::Serialize;

use crate::error::{Error, Result};

pub const DEFAULT_RESOLUTION: usize = 16;
pub const MIN_RESOLUTION: usize = 4;
pub const MAX_RESOLUTION: usize = 64;

/// Binary class label, encoded numerically as -1 / +1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Label {
    Negative,
    Positive,
}

impl Label {
    pub fn from_bool(positive: bool) -> Self {
        if positive {
            Label::Positive
        } else {
            Label::Negative
        }
    }

    /// Sign-based prediction; ties go to `Positive`.
    pub fn predict(output: f64) -> Self {
        Label::from_bool(output >= 0.0)
    }

    pub fn value(self) -> f64 {
        match self {
            Label::Negative => -1.0,
            Label::Positive => 1.0,
        }
    }

    pub fn as_i8(self) -> i8 {
        match self {
            Label::Negative => -1,
            Label::Positive => 1,
        }
    }
}

impl Serialize for Label {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_i8(self.as_i8())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridPoint {
    pub f0: f64,
    pub f1: f64,
    pub label: Label,
}

impl GridPoint {
    pub fn features(&self) -> [f64; 2] {
        [self.f0, self.f1]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledGrid {
    id: String,
    display_name: String,
    resolution: usize,
    points: Vec<GridPoint>,
}

impl LabeledGrid {
    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn display_name(&self) -> &str {
        &self.display_name
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    /// All cells, row-major.
    pub fn points(&self) -> &[GridPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn point(&self, row: usize, col: usize) -> &GridPoint {
        &self.points[row * self.resolution + col]
    }

    pub fn labels(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.label.value()).collect()
    }

    /// Fraction of cells labelled +1.
    pub fn positive_fraction(&self) -> f64 {
        let positives = self.points.iter().filter(|p| p.label == Label::Positive).count();
        positives as f64 / self.points.len() as f64
    }

    /// Builds a grid from an arbitrary labelling rule over cell centers.
    pub fn from_rule(
        id: impl Into<String>,
        display_name: impl Into<String>,
        resolution: usize,
        rule: impl Fn(f64, f64) -> bool,
    ) -> Result<Self> {
        check_resolution(resolution)?;
        let g = resolution as f64;
        let mut points = Vec::with_capacity(resolution * resolution);
        for row in 0..resolution {
            let f1 = (row as f64 + 0.5) / g;
            for col in 0..resolution {
                let f0 = (col as f64 + 0.5) / g;
                points.push(GridPoint { f0, f1, label: Label::from_bool(rule(f0, f1)) });
            }
        }
        Ok(Self { id: id.into(), display_name: display_name.into(), resolution, points })
    }
}

impl Serialize for LabeledGrid {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let labels: Vec<Vec<i8>> =
            self.points.chunks(self.resolution).map(|row| row.iter().map(|p| p.label.as_i8()).collect()).collect();
        let mut s = serializer.serialize_struct("LabeledGrid", 5)?;
        s.serialize_field("id", &self.id)?;
        s.serialize_field("display_name", &self.display_name)?;
        s.serialize_field("resolution", &self.resolution)?;
        s.serialize_field("positive_fraction", &self.positive_fraction())?;
        s.serialize_field("labels", &labels)?;
        s.end()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DatasetInfo {
    pub id: &'static str,
    pub display_name: &'static str,
    pub description: &'static str,
    /// Fraction of +1 cells at the default resolution.
    pub positive_fraction: f64,
}

struct DatasetSpec {
    id: &'static str,
    display_name: &'static str,
    description: &'static str,
    rule: fn(f64, f64) -> bool,
}

const CATALOG: [DatasetSpec; 6] = [
    DatasetSpec {
        id: "D1-vstripes",
        display_name: "Vertical stripes",
        description: "two vertical bands, +1 where f0 < 0.5",
        rule: |f0, _| f0 < 0.5,
    },
    DatasetSpec {
        id: "D2-checkerboard",
        display_name: "Checkerboard",
        description: "2x2 parity board, +1 where both features fall on the same side of 0.5",
        rule: |f0, f1| (f0 > 0.5) == (f1 > 0.5),
    },
    DatasetSpec {
        id: "D3-corner-circle",
        display_name: "Corner circle",
        description: "+1 inside the disk of radius 0.28 centered at (0.65, 0.65)",
        rule: |f0, f1| (f0 - 0.65).powi(2) + (f1 - 0.65).powi(2) <= 0.28 * 0.28,
    },
    DatasetSpec {
        id: "D4-diagonal",
        display_name: "Diagonal split",
        description: "+1 above the main diagonal, where f1 > f0",
        rule: |f0, f1| f1 > f0,
    },
    DatasetSpec {
        id: "D5-ring",
        display_name: "Ring",
        description: "+1 on the annulus 0.2 <= r <= 0.35 around (0.5, 0.5)",
        rule: |f0, f1| {
            let r = (f0 - 0.5).hypot(f1 - 0.5);
            (0.2..=0.35).contains(&r)
        },
    },
    DatasetSpec {
        id: "D6-hstripes",
        display_name: "Horizontal stripes",
        description: "two horizontal bands, +1 where f1 > 0.5",
        rule: |_, f1| f1 > 0.5,
    },
];

fn check_resolution(resolution: usize) -> Result<()> {
    if !(MIN_RESOLUTION..=MAX_RESOLUTION).contains(&resolution) {
        return Err(Error::InvalidConfig(format!(
            "resolution must be within {MIN_RESOLUTION}..={MAX_RESOLUTION}, got {resolution}"
        )));
    }
    Ok(())
}

pub fn dataset_ids() -> impl Iterator<Item = &'static str> {
    CATALOG.iter().map(|d| d.id)
}

pub fn list_datasets() -> Vec<DatasetInfo> {
    CATALOG
        .iter()
        .map(|spec| {
            let grid = LabeledGrid::from_rule(spec.id, spec.display_name, DEFAULT_RESOLUTION, spec.rule)
                .expect("default resolution is in range");
            DatasetInfo {
                id: spec.id,
                display_name: spec.display_name,
                description: spec.description,
                positive_fraction: grid.positive_fraction(),
            }
        })
        .collect()
}

pub fn generate(id: &str, resolution: usize) -> Result<LabeledGrid> {
    let spec = CATALOG.iter().find(|d| d.id == id).ok_or_else(|| Error::not_found("dataset", id))?;
    LabeledGrid::from_rule(spec.id, spec.display_name, resolution, spec.rule)
}
