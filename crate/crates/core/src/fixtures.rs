//! Bundled posets, nets, morphisms and elements.

use crate::algebra_net::NetMorphism;
use crate::json;
use crate::net::TruncatedNet;
use crate::poset::Poset;

macro_rules! bundle {
    ($($name:literal),* $(,)?) => {
        &[$(($name, include_str!(concat!("../fixtures/", $name, ".json")))),*]
    };
}

pub const POSETS: &[(&str, &str)] = bundle!["chain", "antichain", "crown2", "crown3", "crown2_top", "diamond_chain"];

pub const NETS: &[(&str, &str)] = bundle![
    "chain_net",
    "chain_growing_net",
    "antichain_net",
    "crown2_net",
    "crown2_id_net",
    "crown3_net",
    "crown2_top_net",
    "crown2_top_id_net",
    "diamond_chain_net",
];

pub const MORPHISMS: &[(&str, &str)] = bundle!["crown2_into_top", "crown2_id_into_top", "chain_identity"];

pub const ELEMENTS: &[(&str, &str)] = bundle!["crown2_turn"];

/// `(morphism, source net, target net)`.
pub const MORPHISM_ENDPOINTS: &[(&str, &str, &str)] = &[
    ("crown2_into_top", "crown2_net", "crown2_top_net"),
    ("crown2_id_into_top", "crown2_id_net", "crown2_top_id_net"),
    ("chain_identity", "chain_growing_net", "chain_growing_net"),
];

pub fn source(name: &str) -> Option<&'static str> {
    POSETS
        .iter()
        .chain(NETS)
        .chain(MORPHISMS)
        .chain(ELEMENTS)
        .find(|(n, _)| *n == name)
        .map(|(_, s)| *s)
}

/// Panics on unknown names; the bundle is checked by the tests below.
pub fn poset(name: &str) -> Poset {
    json::parse_poset(source(name).expect("bundled poset")).expect("valid bundled poset")
}

pub fn net(name: &str) -> TruncatedNet {
    json::parse_net(source(name).expect("bundled net"), None).expect("valid bundled net")
}

pub fn morphism(name: &str) -> (TruncatedNet, TruncatedNet, NetMorphism) {
    let &(_, s, t) = MORPHISM_ENDPOINTS
        .iter()
        .find(|(m, _, _)| *m == name)
        .expect("bundled morphism");
    let (src, dst) = (net(s), net(t));
    let m = json::parse_morphism(source(name).expect("bundled morphism"), &src, &dst).expect("valid morphism");
    (src, dst, m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::net::{verify_chi_laws, verify_domains, verify_representation, verify_sequence_laws};

    #[test]
    fn every_fixture_loads() {
        for (n, _) in POSETS {
            poset(n);
        }
        for (n, _) in NETS {
            let net = net(n);
            assert!(net.dims().iter().all(|&d| d <= 3), "{n}");
            assert!(net.budget() <= 4, "{n}");
        }
        for (n, _, _) in MORPHISM_ENDPOINTS {
            morphism(n);
        }
    }

    #[test]
    fn laws_hold_on_every_net() {
        for (n, _) in NETS {
            let net = super::net(n);
            let mut r = verify_chi_laws(&net);
            r.extend("representation: ", verify_representation(&net, 3));
            r.extend("sequences: ", verify_sequence_laws(&net, 3));
            r.extend("domains: ", verify_domains(&net, 3));
            assert!(r.failures().next().is_none(), "{n}:\n{r}");
        }
    }
}
