//! A uniform view of both constructions: each node stores a row of `α`
//! symbols, and a repair is planned, fed by helper racks, then finished.

use std::collections::BTreeMap;

use crate::error::Result;
use crate::gf::{Elem, Field};
use crate::params::{CodeParams, DerivedParams};
use crate::repair::RepairRequest;

pub type NodeRows = Vec<Vec<Elem>>;

pub trait RackCodec {
    type Plan;

    fn params(&self) -> &CodeParams;
    fn derived(&self) -> &DerivedParams;
    fn field(&self) -> &Field;

    /// Encodes `B` data symbols into `n` rows of `α` symbols.
    fn encode_data(&self, data: &[Elem], systematic: bool) -> Result<NodeRows>;
    /// Recovers the data symbols from at least `k̄u + ũ₀` node rows.
    fn decode_data(&self, rows: &BTreeMap<usize, Vec<Elem>>, systematic: bool) -> Result<Vec<Elem>>;
    /// Regenerates every node row from at least `k̄u + ũ₀` of them.
    fn reconstruct_rows(&self, rows: &BTreeMap<usize, Vec<Elem>>) -> Result<NodeRows>;

    fn plan(&self, request: &RepairRequest) -> Result<Self::Plan>;
    fn request<'a>(&self, plan: &'a Self::Plan) -> &'a RepairRequest;
    /// Symbols rack `rack` sends out of the rack, computed from its `u` rows.
    fn contribution(&self, plan: &Self::Plan, rack: usize, rack_rows: &[Vec<Elem>]) -> Result<Vec<Elem>>;
    /// Rows of the failed nodes, in the order of `request.failed`.
    fn finish(
        &self,
        plan: &Self::Plan,
        contributions: &[(usize, Vec<Elem>)],
        local_rows: &[Vec<Elem>],
    ) -> Result<NodeRows>;
}

impl<C: RackCodec> RackCodec for &C {
    type Plan = C::Plan;

    fn params(&self) -> &CodeParams {
        (**self).params()
    }

    fn derived(&self) -> &DerivedParams {
        (**self).derived()
    }

    fn field(&self) -> &Field {
        (**self).field()
    }

    fn encode_data(&self, data: &[Elem], systematic: bool) -> Result<NodeRows> {
        (**self).encode_data(data, systematic)
    }

    fn decode_data(&self, rows: &BTreeMap<usize, Vec<Elem>>, systematic: bool) -> Result<Vec<Elem>> {
        (**self).decode_data(rows, systematic)
    }

    fn reconstruct_rows(&self, rows: &BTreeMap<usize, Vec<Elem>>) -> Result<NodeRows> {
        (**self).reconstruct_rows(rows)
    }

    fn plan(&self, request: &RepairRequest) -> Result<Self::Plan> {
        (**self).plan(request)
    }

    fn request<'a>(&self, plan: &'a Self::Plan) -> &'a RepairRequest {
        (**self).request(plan)
    }

    fn contribution(&self, plan: &Self::Plan, rack: usize, rack_rows: &[Vec<Elem>]) -> Result<Vec<Elem>> {
        (**self).contribution(plan, rack, rack_rows)
    }

    fn finish(
        &self,
        plan: &Self::Plan,
        contributions: &[(usize, Vec<Elem>)],
        local_rows: &[Vec<Elem>],
    ) -> Result<NodeRows> {
        (**self).finish(plan, contributions, local_rows)
    }
}
