//! JSON inputs: posets, nets, morphisms and graded elements.
//!
//! A net names its poset either inline or by file name; names are looked up
//! next to the net file first and among the bundled fixtures second.

use std::collections::BTreeMap;
use std::path::Path;

use num::BigRational;
use serde::Deserialize;

use crate::algebra_net::NetMorphism;
use crate::error::InputError;
use crate::fixtures;
use crate::graded::{GradedElement, QMat};
use crate::net::TruncatedNet;
use crate::paths::PathSeq;
use crate::poset::{Poset, PosetSpec};

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum PosetRef {
    Named(String),
    Inline(PosetSpec),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetSpec {
    pub poset: PosetRef,
    pub dims: BTreeMap<String, usize>,
    #[serde(default)]
    pub gamma: BTreeMap<String, Vec<usize>>,
    #[serde(rename = "L")]
    pub budget: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MorphismSpec {
    pub phi: BTreeMap<String, String>,
    #[serde(rename = "Phi")]
    pub maps: BTreeMap<String, Vec<usize>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermSpec {
    /// `[from, to]` pairs of basis indices.
    pub map: Vec<(usize, usize)>,
    #[serde(default = "one")]
    pub coeff: String,
}

fn one() -> String {
    "1".into()
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElementSpec {
    pub base: String,
    /// Degree path text to terms.
    pub parts: BTreeMap<String, Vec<TermSpec>>,
}

pub fn read(path: &Path) -> Result<String, InputError> {
    std::fs::read_to_string(path).map_err(|source| InputError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn parse_poset(text: &str) -> Result<Poset, InputError> {
    let spec: PosetSpec = serde_json::from_str(text)?;
    Ok(Poset::from_spec(&spec)?)
}

/// Reads a poset file, or a bundled fixture when `name` is not a file.
pub fn load_poset(name: &str) -> Result<Poset, InputError> {
    parse_poset(&resolve(name, None)?)
}

/// Text of `name` looked up under `dir` (or as given), falling back to the
/// bundled fixture with the same file stem.
pub fn resolve(name: &str, dir: Option<&Path>) -> Result<String, InputError> {
    let local = match dir {
        Some(d) => d.join(name),
        None => Path::new(name).to_path_buf(),
    };
    if local.is_file() {
        return read(&local);
    }
    let stem = Path::new(name)
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or(name);
    fixtures::source(stem)
        .map(str::to_string)
        .ok_or_else(|| InputError::Io {
            path: local.display().to_string(),
            source: std::io::Error::new(std::io::ErrorKind::NotFound, "no such file or bundled fixture"),
        })
}

/// Parses a net; a named poset is resolved against `dir`, then the fixtures.
pub fn parse_net(text: &str, dir: Option<&Path>) -> Result<TruncatedNet, InputError> {
    let spec: NetSpec = serde_json::from_str(text)?;
    let poset = match &spec.poset {
        PosetRef::Inline(p) => Poset::from_spec(p)?,
        PosetRef::Named(n) => parse_poset(&resolve(n, dir)?)?,
    };
    let dims: Vec<(&str, usize)> = spec.dims.iter().map(|(k, &v)| (k.as_str(), v)).collect();
    let mut gammas = Vec::new();
    for (key, img) in &spec.gamma {
        let (lo, hi) = key
            .split_once("<=")
            .ok_or_else(|| InputError::Invalid(format!("gamma key `{key}` is not of the form `a<=b`")))?;
        gammas.push((lo.trim(), hi.trim(), img.clone()));
    }
    for name in spec.dims.keys() {
        poset.elem(name)?;
    }
    Ok(TruncatedNet::from_labels(poset, &dims, &gammas, spec.budget)?)
}

pub fn load_net(name: &str) -> Result<TruncatedNet, InputError> {
    let path = Path::new(name);
    let text = resolve(name, None)?;
    parse_net(&text, path.parent().filter(|p| p.is_dir()))
}

pub fn parse_morphism(text: &str, src: &TruncatedNet, dst: &TruncatedNet) -> Result<NetMorphism, InputError> {
    let spec: MorphismSpec = serde_json::from_str(text)?;
    let k = src.poset();
    let l = dst.poset();
    let mut phi = Vec::new();
    let mut maps = Vec::new();
    for a in k.elements() {
        let label = k.label(a);
        let target = spec
            .phi
            .get(label)
            .ok_or_else(|| InputError::Invalid(format!("site map misses `{label}`")))?;
        phi.push(l.elem(target)?);
        maps.push(
            spec.maps
                .get(label)
                .cloned()
                .ok_or_else(|| InputError::Invalid(format!("no index map for `{label}`")))?,
        );
    }
    for name in spec.phi.keys().chain(spec.maps.keys()) {
        k.elem(name)?;
    }
    Ok(NetMorphism { phi, maps })
}

pub fn load_morphism(name: &str, src: &TruncatedNet, dst: &TruncatedNet) -> Result<NetMorphism, InputError> {
    parse_morphism(&resolve(name, None)?, src, dst)
}

pub fn parse_rational(text: &str) -> Result<BigRational, InputError> {
    text.trim()
        .parse::<BigRational>()
        .map_err(|_| InputError::Invalid(format!("`{text}` is not a rational number")))
}

pub fn parse_element(text: &str, net: &TruncatedNet) -> Result<GradedElement, InputError> {
    let spec: ElementSpec = serde_json::from_str(text)?;
    let poset = net.poset();
    let a = poset.elem(&spec.base)?;
    let d = net.dim(a);
    let mut x = GradedElement::zero(net, a);
    for (degree, terms) in &spec.parts {
        let p = PathSeq::parse(poset, degree)?;
        let mut m = QMat::zero(d, d);
        for t in terms {
            let c = parse_rational(&t.coeff)?;
            for &(from, to) in &t.map {
                if from >= d || to >= d {
                    return Err(InputError::Invalid(format!("index out of range in `{degree}`: dimension is {d}")));
                }
                let old = m.get(to, from).clone();
                m.set(to, from, old + &c);
            }
        }
        let part = GradedElement::monomial(net, a, &p, m).map_err(|e| InputError::Invalid(e.to_string()))?;
        x = x.add(&part).map_err(|e| InputError::Invalid(e.to_string()))?;
    }
    Ok(x)
}

pub fn load_element(name: &str, net: &TruncatedNet) -> Result<GradedElement, InputError> {
    parse_element(&resolve(name, None)?, net)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn net_with_inline_poset() {
        let text = r#"{"poset": {"elements": ["a", "b"], "leq": [["a", "b"]]},
                       "dims": {"a": 1, "b": 2}, "gamma": {"a<=b": [1]}, "L": 2}"#;
        let n = parse_net(text, None).unwrap();
        assert_eq!(n.dims(), &[1, 2]);
        assert_eq!(n.budget(), 2);
    }

    #[test]
    fn malformed_inputs() {
        assert!(matches!(parse_poset("{"), Err(InputError::Json(_))));
        assert!(matches!(
            parse_poset(r#"{"elements": ["a"], "leq": [["a", "z"]]}"#),
            Err(InputError::Poset(_))
        ));
        let bad_key = r#"{"poset": "chain.json", "dims": {"a": 1, "b": 1, "c": 1}, "gamma": {"ab": [0]}, "L": 1}"#;
        assert!(matches!(parse_net(bad_key, None), Err(InputError::Invalid(_))));
        let missing = r#"{"poset": "chain.json", "dims": {"a": 1, "b": 1}, "L": 1}"#;
        assert!(matches!(parse_net(missing, None), Err(InputError::Net(_))));
    }

    #[test]
    fn element_round_trip() {
        let net = fixtures::net("crown2_net");
        let x = parse_element(fixtures::source("crown2_turn").unwrap(), &net).unwrap();
        assert_eq!(x.parts.len(), 2);
        assert_eq!(x.expectation().parts.len(), 1);
    }

    #[test]
    fn morphism_fixture() {
        let k = fixtures::net("crown2_net");
        let l = fixtures::net("crown2_top_net");
        let m = parse_morphism(fixtures::source("crown2_into_top").unwrap(), &k, &l).unwrap();
        assert_eq!(m.maps[0], vec![0, 1]);
        let bad = r#"{"phi": {"a1": "a1"}, "Phi": {"a1": [0, 1]}}"#;
        assert!(matches!(parse_morphism(bad, &k, &l), Err(InputError::Invalid(_))));
    }
}
