//! JSON input and output. Rational numbers are written as `"p/q"`
//! strings and integers as bare numbers (strings when they exceed 64 bits).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactmath::{format_rat, parse_rat, Rat};
use crate::fan::Fan;
use crate::lattice::Lattice;
use crate::polytope::LatticePolytope;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Number {
    Int(i64),
    Text(String),
}

impl Number {
    pub fn to_rat(&self) -> Result<Rat> {
        match self {
            Number::Int(n) => Ok(Rat::from_integer((*n).into())),
            Number::Text(s) => parse_rat(s),
        }
    }

    pub fn from_rat(r: &Rat) -> Number {
        if r.is_integer() {
            if let Ok(n) = i64::try_from(r.to_integer()) {
                return Number::Int(n);
            }
        }
        Number::Text(format_rat(r))
    }
}

fn to_vectors(rows: &[Vec<Number>]) -> Result<Vec<Vec<Rat>>> {
    rows.iter()
        .map(|r| r.iter().map(Number::to_rat).collect())
        .collect()
}

fn from_vectors(rows: &[Vec<Rat>]) -> Vec<Vec<Number>> {
    rows.iter()
        .map(|r| r.iter().map(Number::from_rat).collect())
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeJson {
    pub dim: usize,
    pub generators: Vec<Vec<Number>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolytopeJson {
    pub vertices: Vec<Vec<Number>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExplicitFanJson {
    pub rays: Vec<Vec<Number>>,
    pub max_cones: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FromReflexiveJson {
    pub from_reflexive: PolytopeJson,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FanJson {
    Explicit(ExplicitFanJson),
    FromReflexive(FromReflexiveJson),
}

/// A complete input document.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Document {
    pub lattice: LatticeJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub polytope: Option<PolytopeJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fan: Option<FanJson>,
}

impl LatticeJson {
    pub fn build(&self) -> Result<Lattice> {
        let gens = to_vectors(&self.generators)?;
        if let Some(g) = gens.iter().find(|g| g.len() != self.dim) {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: g.len(),
            });
        }
        Lattice::from_generators(&gens)
    }

    pub fn from_lattice(l: &Lattice) -> LatticeJson {
        LatticeJson {
            dim: l.dim(),
            generators: from_vectors(&l.basis_vectors()),
        }
    }
}

impl PolytopeJson {
    pub fn build(&self, lattice: &Lattice) -> Result<LatticePolytope> {
        LatticePolytope::hull(lattice, &to_vectors(&self.vertices)?)
    }

    pub fn from_polytope(p: &LatticePolytope) -> PolytopeJson {
        PolytopeJson {
            vertices: from_vectors(&p.vertex_ambient()),
        }
    }
}

impl FanJson {
    pub fn build(&self, lattice: &Lattice) -> Result<Fan> {
        match self {
            FanJson::Explicit(f) => Fan::new(lattice, &to_vectors(&f.rays)?, &f.max_cones),
            FanJson::FromReflexive(f) => Fan::face_fan(&f.from_reflexive.build(lattice)?),
        }
    }

    pub fn from_fan(fan: &Fan) -> FanJson {
        let rays: Vec<Vec<Rat>> = fan.rays().iter().map(|r| r.ambient.clone()).collect();
        FanJson::Explicit(ExplicitFanJson {
            rays: from_vectors(&rays),
            max_cones: fan.cones().iter().map(|c| c.rays.clone()).collect(),
        })
    }
}

impl Document {
    pub fn parse(text: &str) -> Result<Document> {
        serde_json::from_str(text).map_err(|e| Error::Input(e.to_string()))
    }

    pub fn lattice(&self) -> Result<Lattice> {
        self.lattice.build()
    }

    pub fn polytope(&self) -> Result<LatticePolytope> {
        let p = self
            .polytope
            .as_ref()
            .ok_or_else(|| Error::Input("document has no \"polytope\" entry".into()))?;
        p.build(&self.lattice()?)
    }

    /// The fan entry, or the face fan of the polytope entry.
    pub fn fan(&self) -> Result<Fan> {
        match (&self.fan, &self.polytope) {
            (Some(f), _) => f.build(&self.lattice()?),
            (None, Some(_)) => Fan::face_fan(&self.polytope()?),
            (None, None) => Err(Error::Input("document has neither \"fan\" nor \"polytope\"".into())),
        }
    }

    pub fn for_polytope(p: &LatticePolytope) -> Document {
        Document {
            lattice: LatticeJson::from_lattice(p.lattice()),
            polytope: Some(PolytopeJson::from_polytope(p)),
            fan: None,
        }
    }

    pub fn for_fan(fan: &Fan) -> Document {
        Document {
            lattice: LatticeJson::from_lattice(fan.lattice()),
            polytope: None,
            fan: Some(FanJson::from_fan(fan)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::hibi_counterexample;

    const EXAMPLE: &str = r#"{
        "lattice": {"dim": 2, "generators": [[1, 0], [0, 1], ["1/2", "1/2"]]},
        "polytope": {"vertices": [[1, 0], [0, 1], [-1, 0], [0, -1]]}
    }"#;

    #[test]
    fn parses_rationals_and_integers() {
        let doc = Document::parse(EXAMPLE).unwrap();
        let l = doc.lattice().unwrap();
        assert!(l.contains(&[Rat::new(1.into(), 2.into()), Rat::new(1.into(), 2.into())]));
        assert_eq!(doc.polytope().unwrap().vertices().len(), 4);
    }

    #[test]
    fn unknown_fields_rejected() {
        let bad = r#"{"lattice": {"dim": 1, "generators": [[1]], "extra": 1}}"#;
        assert!(matches!(Document::parse(bad), Err(Error::Input(_))));
        let bad_top = r#"{"lattice": {"dim": 1, "generators": [[1]]}, "polytopes": {}}"#;
        assert!(matches!(Document::parse(bad_top), Err(Error::Input(_))));
        let bad_num = r#"{"lattice": {"dim": 1, "generators": [["x/2"]]}}"#;
        assert!(Document::parse(bad_num).unwrap().lattice().is_err());
    }

    #[test]
    fn polytope_round_trip() {
        let p = hibi_counterexample(2).unwrap().polytope;
        let text = serde_json::to_string(&Document::for_polytope(&p)).unwrap();
        let back = Document::parse(&text).unwrap().polytope().unwrap();
        assert_eq!(back, p);
        assert!(text.contains("\"-1/2\""));
    }

    #[test]
    fn fan_round_trip() {
        let p = hibi_counterexample(1).unwrap().polytope;
        let fan = Fan::face_fan(&p).unwrap();
        let text = serde_json::to_string(&Document::for_fan(&fan)).unwrap();
        let back = Document::parse(&text).unwrap().fan().unwrap();
        assert_eq!(back, fan);
        let reflexive = format!(
            r#"{{"lattice": {}, "fan": {{"from_reflexive": {}}}}}"#,
            serde_json::to_string(&LatticeJson::from_lattice(p.lattice())).unwrap(),
            serde_json::to_string(&PolytopeJson::from_polytope(&p)).unwrap()
        );
        assert_eq!(Document::parse(&reflexive).unwrap().fan().unwrap(), fan);
    }
}
