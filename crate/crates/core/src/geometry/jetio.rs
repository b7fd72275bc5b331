//! Jet serialization: a structured text document with fields `dim`,
//! `degree`, metric entries as lists of `[exponent-tuple, numerator,
//! denominator]`, and the dilaton likewise. Writing is canonical (upper
//! triangle in index order, terms in exponent order, coefficients in lowest
//! terms) so read/write round-trips are bit-exact.

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::jet::PolyJet;
use crate::rational::Rational;

use super::MetricDilatonJet;

#[derive(Serialize, Deserialize)]
struct JetDoc {
    dim: usize,
    degree: u32,
    metric: Vec<MetricEntry>,
    dilaton: Vec<Term>,
}

#[derive(Serialize, Deserialize)]
struct MetricEntry {
    i: usize,
    j: usize,
    terms: Vec<Term>,
}

/// `[exponent-tuple, numerator, denominator]` with the integers rendered as
/// strings so arbitrary precision survives the text layer.
type Term = (Vec<u32>, String, String);

fn jet_terms(p: &PolyJet) -> Vec<Term> {
    p.terms()
        .map(|(e, c)| (e.clone(), c.numer().to_string(), c.denom().to_string()))
        .collect()
}

fn parse_terms(dim: usize, degree: u32, terms: &[Term]) -> Result<PolyJet> {
    let mut entries = Vec::with_capacity(terms.len());
    for (e, num, den) in terms {
        if e.len() != dim {
            return Err(CoreError::JetFormat(format!(
                "exponent tuple {e:?} does not have {dim} entries"
            )));
        }
        if e.iter().sum::<u32>() > degree {
            return Err(CoreError::JetFormat(format!(
                "term {e:?} exceeds truncation degree {degree}"
            )));
        }
        let n: BigInt = num
            .parse()
            .map_err(|_| CoreError::JetFormat(format!("bad numerator {num:?}")))?;
        let d: BigInt = den
            .parse()
            .map_err(|_| CoreError::JetFormat(format!("bad denominator {den:?}")))?;
        if d.is_zero() {
            return Err(CoreError::JetFormat("zero denominator".into()));
        }
        entries.push((e.clone(), Rational::new(n, d)));
    }
    Ok(PolyJet::from_terms(dim, degree, entries))
}

/// Canonical textual form of a jet.
pub fn write_jet(jet: &MetricDilatonJet) -> String {
    let dim = jet.dim();
    let mut metric = Vec::new();
    for i in 0..dim {
        for j in i..dim {
            metric.push(MetricEntry {
                i: i + 1,
                j: j + 1,
                terms: jet_terms(jet.metric(i, j)),
            });
        }
    }
    let doc = JetDoc {
        dim,
        degree: jet.degree(),
        metric,
        dilaton: jet_terms(jet.phi()),
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("jet serialization cannot fail");
    s.push('\n');
    s
}

/// Parse a jet document and validate the normal-gauge contract.
pub fn read_jet(text: &str) -> Result<MetricDilatonJet> {
    let doc: JetDoc =
        serde_json::from_str(text).map_err(|e| CoreError::JetFormat(e.to_string()))?;
    if doc.dim == 0 {
        return Err(CoreError::JetFormat("dimension must be positive".into()));
    }
    let dim = doc.dim;
    let mut g = vec![PolyJet::zero(dim, doc.degree); dim * dim];
    let mut seen = vec![false; dim * dim];
    for entry in &doc.metric {
        if entry.i == 0 || entry.j == 0 || entry.i > dim || entry.j > dim {
            return Err(CoreError::JetFormat(format!(
                "metric index ({}, {}) out of range 1..={dim}",
                entry.i, entry.j
            )));
        }
        let (i, j) = (entry.i - 1, entry.j - 1);
        if seen[i * dim + j] {
            return Err(CoreError::JetFormat(format!(
                "duplicate metric entry ({}, {})",
                entry.i, entry.j
            )));
        }
        let p = parse_terms(dim, doc.degree, &entry.terms)?;
        g[i * dim + j] = p.clone();
        g[j * dim + i] = p;
        seen[i * dim + j] = true;
        seen[j * dim + i] = true;
    }
    let phi = parse_terms(dim, doc.degree, &doc.dilaton)?;
    MetricDilatonJet::new(dim, doc.degree, g, phi)
}
