//! Node labelling and the locator set shared by both constructions.
//!
//! Node `(e, g)` (rack `e`, slot `g`) has flat index `e·u + g`.

use std::fmt;

use crate::error::{Error, Result};
use crate::gf::{Elem, Field, FieldSpec};
use crate::params::CodeParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId {
    pub rack: usize,
    pub slot: usize,
}

impl NodeId {
    pub fn new(rack: usize, slot: usize) -> Self {
        NodeId { rack, slot }
    }

    pub fn index(self, u: usize) -> usize {
        self.rack * u + self.slot
    }

    pub fn from_index(index: usize, u: usize) -> Self {
        NodeId { rack: index / u, slot: index % u }
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.rack, self.slot)
    }
}

/// GF(2^8) when `u | 255` and `n < 256`, otherwise the smallest prime `q > n`
/// with `u | q − 1`.
pub fn default_field(p: &CodeParams) -> FieldSpec {
    if 255 % p.u == 0 && p.n < 256 {
        return FieldSpec::Binary { m: 8, poly: crate::gf::DEFAULT_POLYNOMIALS[8] };
    }
    let mut q = p.n as u64 + 1;
    loop {
        if (q - 1).is_multiple_of(p.u as u64) && crate::gf::is_prime(q) {
            return FieldSpec::Prime(q as u32);
        }
        q += 1;
    }
}

/// Rejects fields with `q ≤ n` or `u ∤ q − 1`.
pub fn check_field(field: &Field, p: &CodeParams) -> Result<()> {
    let q = field.order() as usize;
    if q <= p.n {
        return Err(Error::FieldConstraint { field: field.spec(), reason: format!("need |F| > n = {}", p.n) });
    }
    if !(q - 1).is_multiple_of(p.u) {
        return Err(Error::FieldConstraint { field: field.spec(), reason: format!("need u = {} | |F| − 1", p.u) });
    }
    // u | q − 1 already forces this
    assert!(!field.from_int(p.u as i64).is_zero(), "characteristic divides u");
    Ok(())
}

/// `λ_(e,g) = ξ^e η^g` for every node, with `ξ` the smallest primitive element
/// and `η = ξ^((q−1)/u)`.
#[derive(Debug, Clone)]
pub struct Locators {
    pub xi: Elem,
    pub eta: Elem,
    pub values: Vec<Elem>,
}

impl Locators {
    pub fn new(field: &Field, p: &CodeParams) -> Result<Self> {
        check_field(field, p)?;
        let xi = field.find_primitive();
        let eta = field.unity_root(p.u as u64)?;
        let values: Vec<Elem> = (0..p.n)
            .map(|i| {
                let NodeId { rack, slot } = NodeId::from_index(i, p.u);
                field.mul(field.pow(xi, rack as u64), field.pow(eta, slot as u64))
            })
            .collect();
        let mut sorted = values.clone();
        sorted.sort_unstable();
        assert!(sorted.windows(2).all(|w| w[0] != w[1]), "locators must be distinct");
        Ok(Locators { xi, eta, values })
    }
}
