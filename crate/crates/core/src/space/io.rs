use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::space::MetricMeasureSpace;

/// On-disk form of a space: either an explicit distance table or coordinates
/// with `"metric": "euclidean"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpaceFile {
    pub weights: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dist: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coords: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metric: Option<String>,
}

impl SpaceFile {
    pub fn into_space(self) -> Result<MetricMeasureSpace> {
        match (self.dist, self.coords) {
            (Some(dist), _) => MetricMeasureSpace::from_distances(self.weights, dist),
            (None, Some(coords)) => match self.metric.as_deref() {
                Some("euclidean") | None => MetricMeasureSpace::euclidean(self.weights, coords),
                Some(other) => Err(Error::Parse(format!("unknown metric {other:?}"))),
            },
            (None, None) => Err(Error::Parse("space file needs \"dist\" or \"coords\"".into())),
        }
    }

    /// Dense export: always writes the full distance table.
    pub fn from_space(space: &MetricMeasureSpace) -> Self {
        let n = space.len();
        Self {
            weights: space.weights().to_vec(),
            dist: Some((0..n).map(|i| space.row(i).into_owned()).collect()),
            coords: None,
            metric: None,
        }
    }
}

impl MetricMeasureSpace {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str::<SpaceFile>(text)?.into_space()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&SpaceFile::from_space(self))?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }
}
