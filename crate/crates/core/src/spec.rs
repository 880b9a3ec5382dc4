//! JSON spec files for measures and operators.
//!
//! Measure: `{"atoms": [[alpha, mass]], "density": {...}, "ifs": {...}}`.
//! Operator: `{"kind": ..., "J": ..., "blocks": ..., "diag": ..., "dimension": ...}`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::{AffineWindow, Atom, Density, DensityShape, Digit, IfsMeasure, Measure};
use crate::operators::{Block, BlockRule, OperatorKind, SparseSet, TruncatedOperator};

/// Finite-section size used when an operator spec gives none.
pub const DEFAULT_DIMENSION: usize = 4096;

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureSpec {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub atoms: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub density: Option<DensitySpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ifs: Option<IfsSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DensitySpec {
    /// `constant`, `samples` or `expr-id`.
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mass: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
    /// `one_plus_half_cos`, `two_sin_squared` or `von_mises`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IfsSpec {
    pub base: u32,
    pub digits: Vec<(u32, f64)>,
    #[serde(default = "unit")]
    pub mass: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<AffineWindow>,
}

fn unit() -> f64 {
    1.0
}

fn malformed(field: &str, msg: impl std::fmt::Display) -> Error {
    Error::MalformedSpec(format!("field `{field}`: {msg}"))
}

fn json_error(e: serde_json::Error) -> Error {
    Error::MalformedSpec(e.to_string())
}

impl MeasureSpec {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(json_error)
    }

    pub fn to_measure(&self) -> Result<Measure> {
        let atoms = self.atoms.iter().map(|[a, m]| Atom::new(*a, *m)).collect();
        let density = self.density.as_ref().map(DensitySpec::to_density).transpose()?;
        let ifs = self.ifs.as_ref().map(IfsSpec::to_ifs).transpose()?;
        if self.atoms.is_empty() && density.is_none() && ifs.is_none() {
            return Err(malformed("atoms", "a measure needs at least one part"));
        }
        Measure::new(atoms, density, ifs).map_err(|e| match e {
            Error::InvalidMeasure(m) => malformed("atoms", m),
            other => other,
        })
    }

    /// Canonical spec of a measure: atoms sorted, every optional field that
    /// matters written out.
    pub fn from_measure(m: &Measure) -> Self {
        Self {
            atoms: m.atoms().iter().map(|a| [a.position, a.mass]).collect(),
            density: m.density().map(DensitySpec::from_density),
            ifs: m.self_similar().map(IfsSpec::from_ifs),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec serialises")
    }
}

impl DensitySpec {
    fn to_density(&self) -> Result<Density> {
        let mass = self.mass.unwrap_or(1.0);
        let shape = match self.kind.as_str() {
            "constant" => DensityShape::Constant,
            "samples" => {
                let values = self.values.clone().ok_or_else(|| malformed("density.values", "required for samples"))?;
                return Density::samples(values).map_err(|e| malformed("density.values", e));
            }
            "expr-id" => match self.id.as_deref() {
                Some("one_plus_half_cos") => DensityShape::OnePlusHalfCos,
                Some("two_sin_squared") => DensityShape::TwoSinSquared,
                Some("von_mises") => DensityShape::VonMises {
                    kappa: self.kappa.ok_or_else(|| malformed("density.kappa", "required for von_mises"))?,
                },
                Some(other) => return Err(malformed("density.id", format!("unknown density `{other}`"))),
                None => return Err(malformed("density.id", "required for expr-id")),
            },
            other => return Err(malformed("density.kind", format!("unknown kind `{other}`"))),
        };
        Density::new(shape, mass).map_err(|e| malformed("density", e))
    }

    fn from_density(d: &Density) -> Self {
        let mut s = Self { kind: "expr-id".into(), mass: Some(d.mass()), values: None, id: None, kappa: None };
        match d.shape() {
            DensityShape::Constant => s.kind = "constant".into(),
            DensityShape::OnePlusHalfCos => s.id = Some("one_plus_half_cos".into()),
            DensityShape::TwoSinSquared => s.id = Some("two_sin_squared".into()),
            DensityShape::VonMises { kappa } => {
                s.id = Some("von_mises".into());
                s.kappa = Some(*kappa);
            }
            DensityShape::Samples(v) => {
                s.kind = "samples".into();
                s.mass = None;
                s.values = Some(v.clone());
            }
        }
        s
    }
}

impl IfsSpec {
    fn to_ifs(&self) -> Result<IfsMeasure> {
        let digits = self.digits.iter().map(|&(offset, probability)| Digit { offset, probability }).collect();
        IfsMeasure::new(self.base, digits, self.mass, self.window).map_err(|e| malformed("ifs", e))
    }

    fn from_ifs(s: &IfsMeasure) -> Self {
        Self {
            base: s.base(),
            digits: s.digits().iter().map(|d| (d.offset, d.probability)).collect(),
            mass: s.mass(),
            window: s.window(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SetSpec {
    List(Vec<u64>),
    Powers { powers: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BlocksSpec {
    /// `"default"`: block `k` of size `k + 1` and scale `k^{1/k}`.
    Named(String),
    ConstantScale {
        constant_scale: f64,
    },
    List(Vec<(usize, f64)>),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EntrySpec {
    Real(f64),
    Complex([f64; 2]),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorSpec {
    /// `unilateral-shift`, `adjoint-shift`, `bilateral-shift`,
    /// `sparse-projection`, `foguel`, `block-nilpotent` or `diagonal`.
    pub kind: String,
    #[serde(rename = "J", default, skip_serializing_if = "Option::is_none")]
    pub set: Option<SetSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub blocks: Option<BlocksSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diag: Option<Vec<EntrySpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dimension: Option<usize>,
}

impl OperatorSpec {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(json_error)
    }

    fn sparse_set(&self) -> Result<SparseSet> {
        match &self.set {
            None => Ok(SparseSet::default()),
            Some(SetSpec::Powers { powers }) => SparseSet::powers(*powers).map_err(|e| malformed("J", e)),
            Some(SetSpec::List(v)) => SparseSet::explicit(v.clone()).map_err(|e| malformed("J", e)),
        }
    }

    pub fn to_operator(&self) -> Result<TruncatedOperator> {
        let kind = match self.kind.as_str() {
            "unilateral-shift" => OperatorKind::UnilateralShift,
            "adjoint-shift" => OperatorKind::AdjointShift,
            "bilateral-shift" => OperatorKind::BilateralShift,
            "sparse-projection" => OperatorKind::ProjectionOntoSparseSet(self.sparse_set()?),
            "foguel" => OperatorKind::Foguel(self.sparse_set()?),
            "block-nilpotent" => OperatorKind::BlockNilpotent(match &self.blocks {
                None => BlockRule::LinearGrowth,
                Some(BlocksSpec::Named(n)) if n == "default" => BlockRule::LinearGrowth,
                Some(BlocksSpec::Named(n)) => return Err(malformed("blocks", format!("unknown rule `{n}`"))),
                Some(BlocksSpec::ConstantScale { constant_scale }) => {
                    BlockRule::ConstantScale { scale: *constant_scale }
                }
                Some(BlocksSpec::List(v)) => {
                    BlockRule::Explicit(v.iter().map(|&(size, scale)| Block { size, scale }).collect())
                }
            }),
            "diagonal" => {
                let d = self.diag.as_ref().ok_or_else(|| malformed("diag", "required for diagonal"))?;
                OperatorKind::Diagonal(
                    d.iter()
                        .map(|e| match *e {
                            EntrySpec::Real(r) => Complex64::new(r, 0.0),
                            EntrySpec::Complex([re, im]) => Complex64::new(re, im),
                        })
                        .collect(),
                )
            }
            other => return Err(malformed("kind", format!("unknown operator `{other}`"))),
        };
        let dimension = match (&kind, self.dimension) {
            (_, Some(d)) => d,
            (OperatorKind::Diagonal(d), None) => d.len().max(1),
            (OperatorKind::BlockNilpotent(BlockRule::Explicit(b)), None) => {
                b.iter().map(|b| b.size).sum::<usize>().max(1)
            }
            (OperatorKind::BlockNilpotent(rule), None) => rule.offset(201).unwrap_or(DEFAULT_DIMENSION),
            _ => DEFAULT_DIMENSION,
        };
        TruncatedOperator::new(kind, dimension).map_err(|e| match e {
            Error::InvalidOperator(m) => malformed("kind", m),
            other => other,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec serialises")
    }
}

/// Reads either spec from a file's contents; a `kind` field marks an
/// operator.
#[derive(Debug, Clone, PartialEq)]
pub enum SpecFile {
    Measure(MeasureSpec),
    Operator(OperatorSpec),
}

impl SpecFile {
    pub fn parse(text: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(text).map_err(json_error)?;
        if value.get("kind").is_some() {
            OperatorSpec::parse(text).map(SpecFile::Operator)
        } else {
            MeasureSpec::parse(text).map(SpecFile::Measure)
        }
    }
}
