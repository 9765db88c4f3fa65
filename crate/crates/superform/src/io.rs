//! The document formats consumed and produced by the command line: JSON
//! with rationals as `"a/b"` strings, so nothing is ever read through
//! floating point.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::polyalg::{Mat, Polynomial, Rat};
use crate::polyhedra::{PolyhedralComplex, Polyhedron, PolyhedraError};
use crate::pullback::{MapPair, PullbackError};
use crate::superforms::{MixedForm, Superform};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Polyhedra(#[from] PolyhedraError),
    #[error(transparent)]
    MapShape(#[from] PullbackError),
    #[error("term {term}: {detail}")]
    BadFormTerm { term: usize, detail: String },
    #[error("bidegree [{p}, {q}] does not match index sets of sizes {got_p}, {got_q}")]
    BidegreeMismatch {
        p: usize,
        q: usize,
        got_p: usize,
        got_q: usize,
    },
}

/// A polyhedral complex on disk: cells in V-representation plus the listed
/// face pairs `[child, parent]`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct ComplexDocument {
    pub ambient_dim: usize,
    pub cells: Vec<CellRecord>,
    #[serde(default)]
    pub faces: Vec<(String, String)>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct CellRecord {
    pub id: String,
    pub vertices: Vec<Vec<Rat>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub rays: Vec<Vec<Rat>>,
}

impl ComplexDocument {
    pub fn to_complex(&self) -> Result<PolyhedralComplex, IoError> {
        let cells = self
            .cells
            .iter()
            .map(|c| {
                Polyhedron::new(
                    c.id.clone(),
                    self.ambient_dim,
                    c.vertices.clone(),
                    c.rays.clone(),
                )
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(PolyhedralComplex::new(self.ambient_dim, cells, &self.faces)?)
    }

    pub fn from_complex(complex: &PolyhedralComplex) -> ComplexDocument {
        ComplexDocument {
            ambient_dim: complex.ambient_dim(),
            cells: complex
                .cells()
                .iter()
                .map(|c| CellRecord {
                    id: c.id().to_string(),
                    vertices: c.vertices().to_vec(),
                    rays: c.rays().to_vec(),
                })
                .collect(),
            faces: complex
                .listed_pairs()
                .iter()
                .map(|&(child, parent)| {
                    (
                        complex.cell(child).id().to_string(),
                        complex.cell(parent).id().to_string(),
                    )
                })
                .collect(),
        }
    }
}

/// One polynomial term: an exact coefficient and an exponent tuple.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct PolyTermRecord {
    pub coeff: Rat,
    pub exps: Vec<u32>,
}

fn poly_to_records(poly: &Polynomial) -> Vec<PolyTermRecord> {
    poly.graded_lex_terms()
        .into_iter()
        .map(|(exps, coeff)| PolyTermRecord { coeff, exps })
        .collect()
}

fn poly_from_records(
    records: &[PolyTermRecord],
    num_vars: usize,
    term: usize,
) -> Result<Polynomial, IoError> {
    let mut poly = Polynomial::zero(num_vars);
    for record in records {
        if record.exps.len() != num_vars {
            return Err(IoError::BadFormTerm {
                term,
                detail: format!(
                    "exponent tuple of length {} in ambient dimension {num_vars}",
                    record.exps.len()
                ),
            });
        }
        poly.add_term(record.exps.clone(), record.coeff.clone());
    }
    Ok(poly)
}

/// A homogeneous superform on disk. Indices are 1-based and strictly
/// increasing; terms are emitted in lexicographic `(dI, dJ)` order with
/// graded-lexicographic polynomial terms, so canonical documents are
/// byte-stable.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct FormDocument {
    pub ambient_dim: usize,
    pub bidegree: (usize, usize),
    pub terms: Vec<FormTermRecord>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct FormTermRecord {
    #[serde(rename = "dI")]
    pub d_i: Vec<usize>,
    #[serde(rename = "dJ")]
    pub d_j: Vec<usize>,
    pub poly: Vec<PolyTermRecord>,
}

impl FormDocument {
    pub fn to_superform(&self) -> Result<Superform, IoError> {
        let (p, q) = self.bidegree;
        let mut form = Superform::zero(self.ambient_dim, p, q);
        for (t, record) in self.terms.iter().enumerate() {
            if record.d_i.len() != p || record.d_j.len() != q {
                return Err(IoError::BidegreeMismatch {
                    p,
                    q,
                    got_p: record.d_i.len(),
                    got_q: record.d_j.len(),
                });
            }
            let convert = |indices: &[usize]| -> Result<Vec<usize>, IoError> {
                let mut out = Vec::with_capacity(indices.len());
                for &i in indices {
                    if i == 0 || i > self.ambient_dim {
                        return Err(IoError::BadFormTerm {
                            term: t,
                            detail: format!(
                                "index {i} out of range 1..={}",
                                self.ambient_dim
                            ),
                        });
                    }
                    out.push(i - 1);
                }
                if !out.windows(2).all(|w| w[0] < w[1]) {
                    return Err(IoError::BadFormTerm {
                        term: t,
                        detail: "indices must be strictly increasing".to_string(),
                    });
                }
                Ok(out)
            };
            let d_i = convert(&record.d_i)?;
            let d_j = convert(&record.d_j)?;
            let poly = poly_from_records(&record.poly, self.ambient_dim, t)?;
            form.add_term(d_i, d_j, poly);
        }
        Ok(form)
    }

    pub fn from_superform(form: &Superform) -> FormDocument {
        let (p, q) = form.bidegree();
        FormDocument {
            ambient_dim: form.ambient_dim(),
            bidegree: (p, q),
            terms: form
                .terms()
                .map(|((i, j), poly)| FormTermRecord {
                    d_i: i.iter().map(|&k| k + 1).collect(),
                    d_j: j.iter().map(|&k| k + 1).collect(),
                    poly: poly_to_records(poly),
                })
                .collect(),
        }
    }
}

/// A map pair on disk: `s` as a list of polynomials in the source
/// variables, `L` as a dense rational matrix.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct MapPairDocument {
    pub s: Vec<Vec<PolyTermRecord>>,
    #[serde(rename = "L")]
    pub linear: Vec<Vec<Rat>>,
}

impl MapPairDocument {
    pub fn to_map_pair(&self) -> Result<MapPair, IoError> {
        let target = self.linear.len();
        let source = self.linear.first().map_or(0, Vec::len);
        let linear = Mat::from_rows(self.linear.clone());
        let components = self
            .s
            .iter()
            .enumerate()
            .map(|(i, records)| poly_from_records(records, source, i))
            .collect::<Result<Vec<_>, _>>()?;
        let _ = target;
        Ok(MapPair::new(source, components, linear)?)
    }

    pub fn from_map_pair(pair: &MapPair) -> MapPairDocument {
        MapPairDocument {
            s: pair.components().iter().map(poly_to_records).collect(),
            linear: (0..pair.linear().rows())
                .map(|i| pair.linear().row(i).to_vec())
                .collect(),
        }
    }
}

/// One row of a Betti table as emitted by `betti --json`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct BettiRowDocument {
    pub q: usize,
    pub dims: Vec<usize>,
    pub certified: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct BettiDocument {
    pub rows: Vec<BettiRowDocument>,
    /// The standing assumption behind the uncertified rows.
    pub assumption: String,
}

pub const GOOD_COVER_ASSUMPTION: &str = "rows with q > 0 use the image coefficient system of \
     the star cover; they are good-cover Cech numbers, not certified cohomology dimensions";

/// Verification record attached to emitted primitives.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct CheckRecord {
    pub input_hash: String,
    pub domain: String,
    pub verified: bool,
}

/// Output of the primitive command: the primitive (one homogeneous
/// component per entry) plus, for the reduction, the residual pure-second-
/// degree part.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct PrimitiveDocument {
    pub beta: Vec<FormDocument>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<FormDocument>,
    pub check: CheckRecord,
}

pub fn mixed_to_documents(form: &MixedForm) -> Vec<FormDocument> {
    form.components()
        .map(|(_, c)| FormDocument::from_superform(c))
        .collect()
}

/// Stable content hash for check records (FNV-1a over the canonical JSON).
pub fn content_hash(bytes: &[u8]) -> String {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        hash ^= u64::from(b);
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    format!("{hash:016x}")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn complex_document_round_trip() {
        let complex = fixtures::tropical_line();
        let doc = ComplexDocument::from_complex(&complex);
        let json = serde_json::to_string_pretty(&doc).unwrap();
        let parsed: ComplexDocument = serde_json::from_str(&json).unwrap();
        assert_eq!(parsed, doc);
        let rebuilt = parsed.to_complex().unwrap();
        assert!(rebuilt.validate().is_clean());
        assert_eq!(rebuilt.cells().len(), complex.cells().len());
    }

    #[test]
    fn complex_document_example() {
        let json = r#"{
            "ambient_dim": 2,
            "cells": [
                {"id": "a", "vertices": [["0", "0"]]},
                {"id": "b", "vertices": [["1", "0"]]},
                {"id": "ab", "vertices": [["0", "0"], ["1", "0"]]}
            ],
            "faces": [["a", "ab"], ["b", "ab"]]
        }"#;
        let doc: ComplexDocument = serde_json::from_str(json).unwrap();
        let complex = doc.to_complex().unwrap();
        assert!(complex.validate().is_clean());
        assert_eq!(complex.dimension(), 1);
    }

    #[test]
    fn malformed_rational_is_rejected() {
        let json = r#"{
            "ambient_dim": 1,
            "cells": [{"id": "a", "vertices": [["1/0"]]}],
            "faces": []
        }"#;
        let err = serde_json::from_str::<ComplexDocument>(json).unwrap_err();
        assert!(err.to_string().contains("zero denominator"));
    }

    #[test]
    fn form_document_round_trip_and_validation() {
        let mut form = Superform::zero(2, 1, 1);
        form.add_term(vec![0], vec![1], Polynomial::var(2, 0));
        let doc = FormDocument::from_superform(&form);
        // Indices are 1-based on disk.
        assert_eq!(doc.terms[0].d_i, vec![1]);
        assert_eq!(doc.terms[0].d_j, vec![2]);
        let json = serde_json::to_string(&doc).unwrap();
        let parsed: FormDocument = serde_json::from_str(&json).unwrap();
        assert_eq!(parsed.to_superform().unwrap(), form);

        // Out-of-range and unsorted indices are rejected.
        let bad = FormDocument {
            ambient_dim: 2,
            bidegree: (1, 0),
            terms: vec![FormTermRecord {
                d_i: vec![3],
                d_j: vec![],
                poly: vec![PolyTermRecord {
                    coeff: Rat::one(),
                    exps: vec![0, 0],
                }],
            }],
        };
        assert!(bad.to_superform().is_err());
        let unsorted = FormDocument {
            ambient_dim: 2,
            bidegree: (2, 0),
            terms: vec![FormTermRecord {
                d_i: vec![2, 1],
                d_j: vec![],
                poly: vec![PolyTermRecord {
                    coeff: Rat::one(),
                    exps: vec![0, 0],
                }],
            }],
        };
        assert!(unsorted.to_superform().is_err());
    }

    #[test]
    fn map_pair_document_round_trip() {
        let pair = MapPair::affine(
            Mat::from_rows(vec![
                vec![Rat::from(1), Rat::from(2)],
                vec![Rat::from(0), Rat::from(1)],
            ]),
            vec![Rat::frac(1, 2), Rat::zero()],
        );
        let doc = MapPairDocument::from_map_pair(&pair);
        let json = serde_json::to_string(&doc).unwrap();
        let parsed: MapPairDocument = serde_json::from_str(&json).unwrap();
        assert_eq!(parsed.to_map_pair().unwrap(), pair);
    }

    #[test]
    fn serialization_is_deterministic() {
        let complex = fixtures::solid_triangle();
        let doc = ComplexDocument::from_complex(&complex);
        let a = serde_json::to_string(&doc).unwrap();
        let b = serde_json::to_string(&ComplexDocument::from_complex(&complex)).unwrap();
        assert_eq!(a, b);
        assert_eq!(content_hash(a.as_bytes()), content_hash(b.as_bytes()));
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        prop_compose! {
            fn arb_form()(
                terms in prop::collection::vec(
                    (0usize..2, 0usize..2, -5i64..=5, prop::collection::vec(0u32..3, 2)),
                    0..4
                )
            ) -> Superform {
                // (p, q) = (1, 1) forms over Q^2 with varied index choices.
                let mut form = Superform::zero(2, 1, 1);
                for (i, j, c, exps) in terms {
                    form.add_term(vec![i], vec![j], Polynomial::monomial(2, exps, Rat::from(c)));
                }
                form
            }
        }

        proptest! {
            #[test]
            fn form_documents_round_trip(form in arb_form()) {
                let doc = FormDocument::from_superform(&form);
                let json = serde_json::to_string(&doc).unwrap();
                let parsed: FormDocument = serde_json::from_str(&json).unwrap();
                prop_assert_eq!(parsed.to_superform().unwrap(), form);
                // Parse → serialize → parse is the identity on canonical
                // documents.
                prop_assert_eq!(serde_json::to_string(&parsed).unwrap(), json);
            }
        }
    }
}
