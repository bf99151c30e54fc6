use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{ComplexError, Marks, PLMap, SimplicialComplex, VertexId};
use crate::exact::Point;

/// On-disk complex format. Faces are completed on load; a map adds `images`.
///
/// ```json
/// {"m": 3, "vertices": [0, 1, 2], "maximal_simplices": [[0, 1], [1, 2]],
///  "marked": {"B1": [0], "B2": [2]},
///  "images": {"0": ["0", "0", "0"], "1": ["1", "0", "0"], "2": ["1", "1/2", "0"]}}
/// ```
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplexJson {
    pub m: usize,
    pub vertices: Vec<VertexId>,
    pub maximal_simplices: Vec<Vec<VertexId>>,
    #[serde(default, skip_serializing_if = "MarksJson::is_empty")]
    pub marked: MarksJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub images: Option<BTreeMap<VertexId, Point>>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MarksJson {
    #[serde(rename = "B1", default)]
    pub b1: Vec<VertexId>,
    #[serde(rename = "B2", default)]
    pub b2: Vec<VertexId>,
}

impl MarksJson {
    pub fn is_empty(&self) -> bool {
        self.b1.is_empty() && self.b2.is_empty()
    }
}

impl ComplexJson {
    pub fn to_complex(&self) -> Result<SimplicialComplex, ComplexError> {
        let c = SimplicialComplex::from_maximal(self.vertices.iter().copied(), self.maximal_simplices.clone())?;
        c.with_marks(Marks::new(self.marked.b1.iter().copied(), self.marked.b2.iter().copied()))
    }

    /// Requires `images`.
    pub fn to_map(&self) -> Result<PLMap, ComplexError> {
        let images = self.images.clone().ok_or(ComplexError::MissingImages)?;
        PLMap::new(self.to_complex()?, self.m, images)
    }

    /// The map given by `images`, or the constant map at the origin when the
    /// file describes a bare complex.
    pub fn to_map_or_constant(&self) -> Result<PLMap, ComplexError> {
        match self.images {
            Some(_) => self.to_map(),
            None => PLMap::constant(self.to_complex()?, self.m),
        }
    }
}

impl SimplicialComplex {
    pub fn to_json(&self, m: usize) -> ComplexJson {
        ComplexJson {
            m,
            vertices: self.vertices().iter().copied().collect(),
            maximal_simplices: self.maximal_simplices().iter().map(|s| s.vertices().to_vec()).collect(),
            marked: MarksJson {
                b1: self.marks().b1.iter().copied().collect(),
                b2: self.marks().b2.iter().copied().collect(),
            },
            images: None,
        }
    }
}

impl PLMap {
    pub fn to_json(&self) -> ComplexJson {
        let mut json = self.complex().to_json(self.ambient());
        json.images = Some(self.images().clone());
        json
    }

    pub fn from_json_str(s: &str) -> Result<PLMap, String> {
        let json: ComplexJson = serde_json::from_str(s).map_err(|e| e.to_string())?;
        json.to_map().map_err(|e| e.to_string())
    }
}
