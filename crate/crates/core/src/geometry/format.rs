//! JSON polytope documents: `{"dim": n, "kind": "H"|"V", "rows": [[...], ...]}`.
//!
//! H rows are `[a_1, .., a_n, b]`, V rows are vertex coordinates. Reals are
//! written in shortest round-trip form, so a write/read cycle is bit-exact.

use serde::{Deserialize, Serialize};

use super::{HPolytope, VPolytope};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PolytopeKind {
    H,
    V,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolytopeFile {
    pub dim: usize,
    pub kind: PolytopeKind,
    pub rows: Vec<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Body {
    H(HPolytope),
    V(VPolytope),
}

impl Body {
    pub fn dim(&self) -> usize {
        match self {
            Body::H(h) => h.dim(),
            Body::V(v) => v.dim(),
        }
    }

    pub fn to_hrep(&self) -> Result<HPolytope> {
        match self {
            Body::H(h) => Ok(h.clone()),
            Body::V(v) => v.to_hrep(),
        }
    }

    pub fn to_vrep(&self) -> Result<VPolytope> {
        match self {
            Body::H(h) => h.to_vrep(),
            Body::V(v) => Ok(v.clone()),
        }
    }
}

impl PolytopeFile {
    pub fn from_json(text: &str) -> Result<Self> {
        let file: PolytopeFile = serde_json::from_str(text)?;
        let width = match file.kind {
            PolytopeKind::H => file.dim + 1,
            PolytopeKind::V => file.dim,
        };
        if let Some(r) = file.rows.iter().find(|r| r.len() != width) {
            return Err(Error::Format(format!("row has {} entries, expected {width}", r.len())));
        }
        Ok(file)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }

    pub fn into_body(self) -> Result<Body> {
        match self.kind {
            PolytopeKind::H => HPolytope::from_rows(&self.rows).map(Body::H),
            PolytopeKind::V => VPolytope::from_rows(&self.rows).map(Body::V),
        }
    }

    pub fn from_hpolytope(p: &HPolytope) -> Self {
        Self {
            dim: p.dim(),
            kind: PolytopeKind::H,
            rows: p.rows(),
        }
    }

    pub fn from_vpolytope(p: &VPolytope) -> Self {
        Self {
            dim: p.dim(),
            kind: PolytopeKind::V,
            rows: p.rows(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_cube() {
        let text = r#"{"dim": 2, "kind": "H", "rows": [[1,0,1],[-1,0,1],[0,1,1],[0,-1,1]]}"#;
        let body = PolytopeFile::from_json(text).unwrap().into_body().unwrap();
        assert_eq!(body.dim(), 2);
        assert_eq!(body.to_vrep().unwrap().vertices().len(), 4);
    }

    #[test]
    fn bad_row_width() {
        let text = r#"{"dim": 2, "kind": "V", "rows": [[1,0,1]]}"#;
        assert!(matches!(PolytopeFile::from_json(text), Err(Error::Format(_))));
    }

    proptest! {
        #[test]
        fn json_round_trip_is_exact(rows in proptest::collection::vec(
            proptest::collection::vec(-1e6f64..1e6, 3), 1..8)) {
            let f = PolytopeFile { dim: 3, kind: PolytopeKind::V, rows };
            let back = PolytopeFile::from_json(&f.to_json()).unwrap();
            prop_assert_eq!(back, f);
        }
    }
}
