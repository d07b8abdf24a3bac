//! Minimum-bandwidth construction: codewords are `C = ΛM`, with `Λ` the
//! `n × (k̄u+ũ₀)` Vandermonde matrix on the locators and `M` a message matrix
//! whose rows in `I_i` (`i ≥ 1`) hold a symmetric `d̄ × d̄` block on top of
//! zeros. Each node stores one row of `C`, `α = d̄` symbols.
//!
//! Collapsing rack `e` with `Δ_e` yields rack-level words `Γ S_i`, which form
//! a product-matrix MBR code over the racks.

use std::collections::BTreeMap;

use crate::codec::{NodeRows, RackCodec};
use crate::error::{Error, Result};
use crate::gf::{Elem, Field};
use crate::layout::{Locators, NodeId};
use crate::linalg::{self, Matrix};
use crate::msrr::contributions_by_rack;
use crate::params::{derive, CodeParams, DerivedParams, Mode};
use crate::repair::RepairRequest;

/// Which block a row label of `M` belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowClass {
    /// A row of `M₀`.
    Free,
    /// Row `delta` of `M_block` (`block ∈ [1, u−l]`); rows `delta ≥ d̄` are zero.
    Symmetric { block: usize, delta: usize },
}

fn row_class(p: &CodeParams, j: usize) -> RowClass {
    let (delta, b) = (j / p.u, j % p.u);
    if delta < p.kbar() && b >= p.l {
        RowClass::Symmetric { block: b + 1 - p.l, delta }
    } else {
        RowClass::Free
    }
}

/// The `(k̄u+ũ₀) × d̄` message matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MessageMatrix {
    m: Matrix,
}

impl MessageMatrix {
    pub fn matrix(&self) -> &Matrix {
        &self.m
    }

    pub fn into_inner(self) -> Matrix {
        self.m
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MbrrCodeword {
    rows: Matrix,
}

impl MbrrCodeword {
    pub fn new(rows: Matrix) -> Self {
        MbrrCodeword { rows }
    }

    /// `n × d̄`.
    pub fn matrix(&self) -> &Matrix {
        &self.rows
    }

    pub fn node(&self, node: usize) -> &[Elem] {
        self.rows.row(node)
    }

    /// `C_e`, the `u × d̄` block of rack `e`.
    pub fn rack(&self, rack: usize, u: usize) -> Matrix {
        self.rows.select_rows(&(rack * u..(rack + 1) * u).collect::<Vec<_>>())
    }

    pub fn to_rows(&self) -> NodeRows {
        self.rows.to_rows()
    }
}

#[derive(Debug, Clone)]
pub struct MbrrRepairPlan {
    pub request: RepairRequest,
    pub idle: Vec<usize>,
    /// `A*`, `h × (u−l)`.
    pub transform: Matrix,
    /// `A* Δ_host`, `h × u`: identity on failed slots, zero on idle ones.
    pub combined: Matrix,
    /// Inverse of `Γ` restricted to the helper racks.
    pub interpolation: Matrix,
}

#[derive(Debug, Clone)]
pub struct MbrrCode {
    params: CodeParams,
    derived: DerivedParams,
    field: Field,
    locators: Locators,
    lambda: Matrix,
    gamma: Matrix,
    deltas: Vec<Matrix>,
    information_set: Vec<(usize, usize)>,
}

/// Coordinates `(node, a)` carrying raw data, sorted by node then `a`.
pub fn information_set(p: &CodeParams) -> Vec<(usize, usize)> {
    let (u, l, dbar, kbar) = (p.u, p.l, p.dbar, p.kbar());
    let mut x = Vec::new();
    for node in 0..p.reconstruction_size() {
        let NodeId { rack, slot } = NodeId::from_index(node, u);
        let from = if rack < kbar && slot >= l {
            if rack < dbar {
                rack
            } else {
                dbar
            }
        } else {
            0
        };
        x.extend((from..dbar).map(|a| (node, a)));
    }
    debug_assert!(x.iter().all(|&(node, _)| NodeId::from_index(node, u).rack <= kbar));
    x
}

impl MbrrCode {
    pub fn build(params: CodeParams, field: Field) -> Result<Self> {
        let derived = derive(&params, Mode::Mbrr)?;
        let locators = Locators::new(&field, &params)?;
        let (u, l, dbar) = (params.u, params.l, params.dbar);
        let kk = params.reconstruction_size();
        let lambda = linalg::vandermonde(&field, &locators.values, &(0..kk as u64).collect::<Vec<_>>())?.transpose();
        let base = field.pow(locators.xi, u as u64);
        let points: Vec<Elem> = (0..params.nbar() as u64).map(|e| field.pow(base, e)).collect();
        let gamma = linalg::vandermonde(&field, &points, &(0..dbar as u64).collect::<Vec<_>>())?.transpose();
        let u_inv = field.inv(field.from_int(u as i64))?;
        let deltas = (0..params.nbar())
            .map(|e| {
                let mut d = Matrix::zeros(u - l, u);
                for i in 0..u - l {
                    let t = (l + i) as i64;
                    let scale = field.mul(u_inv, field.pow_signed(locators.xi, -(e as i64) * t)?);
                    for g in 0..u {
                        d[(i, g)] = field.mul(scale, field.pow_signed(locators.eta, -t * g as i64)?);
                    }
                }
                Ok(d)
            })
            .collect::<Result<Vec<_>>>()?;
        let information_set = information_set(&params);
        assert_eq!(information_set.len(), derived.file_size);
        Ok(MbrrCode { params, derived, field, locators, lambda, gamma, deltas, information_set })
    }

    pub fn params(&self) -> &CodeParams {
        &self.params
    }

    pub fn derived(&self) -> &DerivedParams {
        &self.derived
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn locators(&self) -> &[Elem] {
        &self.locators.values
    }

    /// `n × (k̄u+ũ₀)`, entry `((e,g), j) = λ^j_(e,g)`.
    pub fn lambda(&self) -> &Matrix {
        &self.lambda
    }

    /// `n̄ × d̄`, row `e` is `(ξ^{eu})^a` for `a ∈ [0, d̄)`.
    pub fn gamma(&self) -> &Matrix {
        &self.gamma
    }

    /// `(u−l) × u`; `Δ_e C_e` stacks the rack-level rows of rack `e`.
    pub fn delta(&self, rack: usize) -> &Matrix {
        &self.deltas[rack]
    }

    pub fn information_set(&self) -> &[(usize, usize)] {
        &self.information_set
    }

    pub fn file_size(&self) -> usize {
        self.derived.file_size
    }

    pub fn row_class(&self, j: usize) -> RowClass {
        row_class(&self.params, j)
    }

    fn check_len(&self, data: &[Elem]) -> Result<()> {
        if data.len() != self.file_size() {
            return Err(Error::DataLength { expected: self.file_size(), got: data.len() });
        }
        Ok(())
    }

    /// Visits the entries of `M` row-major, saying for each whether it takes
    /// a fresh symbol, is fixed to zero, or mirrors an earlier entry.
    fn walk(&self, mut visit: impl FnMut(usize, usize, Slot)) {
        let (u, l, dbar) = (self.params.u, self.params.l, self.params.dbar);
        for j in 0..self.params.reconstruction_size() {
            for a in 0..dbar {
                let slot = match row_class(&self.params, j) {
                    RowClass::Free => Slot::Fresh,
                    RowClass::Symmetric { delta, .. } if delta >= dbar => Slot::Zero,
                    RowClass::Symmetric { delta, .. } if a >= delta => Slot::Fresh,
                    RowClass::Symmetric { block, delta } => Slot::Mirror(a * u + block + l - 1, delta),
                };
                visit(j, a, slot);
            }
        }
    }

    /// Places `B` symbols into `M`, row by row; each symmetric block takes a
    /// fresh symbol on and above its diagonal and mirrors below it.
    pub fn fill_message(&self, data: &[Elem]) -> Result<MessageMatrix> {
        self.check_len(data)?;
        let mut m = Matrix::zeros(self.params.reconstruction_size(), self.params.dbar);
        let mut next = data.iter();
        self.walk(|j, a, slot| match slot {
            Slot::Fresh => m[(j, a)] = *next.next().expect("symbol count matches B"),
            Slot::Mirror(r, c) => m[(j, a)] = m[(r, c)],
            Slot::Zero => {}
        });
        debug_assert!(next.next().is_none());
        Ok(MessageMatrix { m })
    }

    /// Inverse of [`fill_message`](Self::fill_message).
    pub fn extract(&self, m: &MessageMatrix) -> Vec<Elem> {
        let mut out = Vec::with_capacity(self.file_size());
        self.walk(|j, a, slot| {
            if slot == Slot::Fresh {
                out.push(m.m[(j, a)]);
            }
        });
        out
    }

    /// Checks shape, the zero rows and the symmetry of every block.
    pub fn validate_message(&self, m: &Matrix) -> Result<MessageMatrix> {
        if m.rows() != self.params.reconstruction_size() || m.cols() != self.params.dbar {
            return Err(Error::Linalg(linalg::LinalgError::Shape(format!(
                "message is {}x{}, need {}x{}",
                m.rows(),
                m.cols(),
                self.params.reconstruction_size(),
                self.params.dbar
            ))));
        }
        let mut ok = true;
        self.walk(|j, a, slot| match slot {
            Slot::Zero => ok &= m[(j, a)].is_zero(),
            Slot::Mirror(r, c) => ok &= m[(j, a)] == m[(r, c)],
            Slot::Fresh => {}
        });
        if ok {
            Ok(MessageMatrix { m: m.clone() })
        } else {
            Err(Error::Inconsistent)
        }
    }

    /// `S_block`, the top `d̄ × d̄` part of `M_block`.
    pub fn symmetric_block(&self, m: &MessageMatrix, block: usize) -> Result<Matrix> {
        let (u, l) = (self.params.u, self.params.l);
        if block == 0 || block > u - l {
            return Err(Error::OutOfRange(format!("block {block} outside 1..={}", u - l)));
        }
        let rows: Vec<usize> = (0..self.params.dbar).map(|d| d * u + block + l - 1).collect();
        Ok(m.m.select_rows(&rows))
    }

    pub fn encode(&self, m: &MessageMatrix) -> Result<MbrrCodeword> {
        Ok(MbrrCodeword::new(self.lambda.mul(&self.field, &m.m)?))
    }

    pub fn encode_data(&self, data: &[Elem]) -> Result<MbrrCodeword> {
        self.encode(&self.fill_message(data)?)
    }

    /// Solves `Λ_R M = C_R` on the first `k̄u+ũ₀` supplied rows and checks
    /// the remaining ones.
    pub fn reconstruct(&self, rows: &BTreeMap<usize, Vec<Elem>>) -> Result<MessageMatrix> {
        let p = &self.params;
        let kk = p.reconstruction_size();
        for (&node, r) in rows {
            if node >= p.n {
                return Err(Error::OutOfRange(format!("node {node} outside 0..{}", p.n)));
            }
            if r.len() != p.dbar {
                return Err(Error::DataLength { expected: p.dbar, got: r.len() });
            }
        }
        if rows.len() < kk {
            return Err(Error::InsufficientData { needed: kk, got: rows.len() });
        }
        let chosen: Vec<usize> = rows.keys().take(kk).copied().collect();
        let c_r = Matrix::from_rows(&chosen.iter().map(|i| rows[i].clone()).collect::<Vec<_>>())?;
        let m = linalg::solve(&self.field, &self.lambda.select_rows(&chosen), &c_r)?;
        let m = self.validate_message(&m)?;
        for (&node, r) in rows.iter().skip(kk) {
            let row = Matrix::from_vec(1, kk, self.lambda.row(node).to_vec())?.mul(&self.field, &m.m)?;
            if row.as_slice() != r.as_slice() {
                return Err(Error::Inconsistent);
            }
        }
        Ok(m)
    }

    /// Stacked `w^{(i)}_e = Δ_e[i] C_e`, an `n̄ × d̄` matrix.
    pub fn rack_level(&self, c: &MbrrCodeword, i: usize) -> Result<Matrix> {
        let (u, l) = (self.params.u, self.params.l);
        if i >= u - l {
            return Err(Error::OutOfRange(format!("rack-level index {i} outside 0..{}", u - l)));
        }
        let f = &self.field;
        let mut out = Matrix::zeros(self.params.nbar(), self.params.dbar);
        for e in 0..self.params.nbar() {
            let rack = c.rack(e, u);
            for a in 0..self.params.dbar {
                out[(e, a)] = f.dot(self.deltas[e].row(i), &rack.col(a));
            }
        }
        Ok(out)
    }

    pub fn repair_plan(&self, request: &RepairRequest) -> Result<MbrrRepairPlan> {
        let idle = request.validate(&self.params)?;
        let f = &self.field;
        let delta = &self.deltas[request.host];
        let transform = linalg::partial_identity_transform(f, delta, &request.failed, &idle)?;
        let combined = transform.mul(f, delta)?;
        let interpolation = linalg::inverse(f, &self.gamma.select_rows(&request.helper_racks))?;
        Ok(MbrrRepairPlan { request: request.clone(), idle, transform, combined, interpolation })
    }

    /// `h` symbols: row `i` of `A* Δ_e C_e` dotted with the host's `Γ` row.
    pub fn helper_contribution(&self, plan: &MbrrRepairPlan, rack: usize, rack_rows: &Matrix) -> Result<Vec<Elem>> {
        if !plan.request.helper_racks.contains(&rack) {
            return Err(Error::InvalidRepair(format!("rack {rack} is not a helper in this plan")));
        }
        if rack_rows.rows() != self.params.u || rack_rows.cols() != self.params.dbar {
            return Err(Error::DataLength {
                expected: self.params.u * self.params.dbar,
                got: rack_rows.as_slice().len(),
            });
        }
        let f = &self.field;
        let v = plan.transform.mul(f, &self.deltas[rack])?.mul(f, rack_rows)?;
        Ok(v.mul_vec(f, self.gamma.row(plan.request.host))?)
    }

    /// Rows of the failed nodes, in `plan.request.failed` order.
    pub fn repair(
        &self,
        plan: &MbrrRepairPlan,
        contributions: &[(usize, Vec<Elem>)],
        local_rows: &Matrix,
    ) -> Result<Matrix> {
        let f = &self.field;
        let req = &plan.request;
        let (h, dbar) = (req.failed.len(), self.params.dbar);
        if local_rows.rows() != req.local_helpers.len() || local_rows.cols() != dbar {
            return Err(Error::DataLength {
                expected: req.local_helpers.len() * dbar,
                got: local_rows.as_slice().len(),
            });
        }
        let by_rack = contributions_by_rack(req, contributions, h)?;
        let mut out = Matrix::zeros(h, dbar);
        for i in 0..h {
            let s: Vec<Elem> = by_rack.iter().map(|c| c[i]).collect();
            // S Γ_hostᵀ, which is (Γ_host S)ᵀ since S is symmetric
            let v = plan.interpolation.mul_vec(f, &s)?;
            for a in 0..dbar {
                let local = f.sum(
                    req.local_helpers
                        .iter()
                        .enumerate()
                        .map(|(t, &g)| f.mul(plan.combined[(i, g)], local_rows[(t, a)])),
                );
                out[(i, a)] = f.sub(v[a], local);
            }
        }
        Ok(out)
    }

    /// Whether `(node, a)` is a shadowed coordinate: among the first
    /// `k̄u+ũ₀` nodes but outside the information set.
    fn shadowed(&self, node: usize, a: usize) -> bool {
        let NodeId { rack, slot } = NodeId::from_index(node, self.params.u);
        rack < self.params.kbar() && slot >= self.params.l && (rack >= self.params.dbar || a < rack)
    }

    /// Finds `C` with `C_X = data`: recover each `S_i` from the known
    /// rack-level entries of racks `[0, d̄)`, extend the rack-level words to
    /// racks `[0, k̄)`, solve the shadowed coordinates from `Δ_e C_e`, then
    /// re-encode from the first `k̄u+ũ₀` nodes.
    pub fn encode_systematic(&self, data: &[Elem]) -> Result<MbrrCodeword> {
        self.check_len(data)?;
        let f = &self.field;
        let p = &self.params;
        let (u, l, dbar, kbar) = (p.u, p.l, p.dbar, p.kbar());
        let kk = p.reconstruction_size();
        let mut c = Matrix::zeros(kk, dbar);
        for (&(node, a), &s) in self.information_set.iter().zip(data) {
            c[(node, a)] = s;
        }
        let gamma_top = self.gamma.select_rows(&(0..dbar).collect::<Vec<_>>());
        let racks: Vec<usize> = (0..kbar).collect();
        let mut words: Vec<Matrix> = Vec::with_capacity(u - l);
        for i in 0..u - l {
            let mut w_top = Matrix::zeros(dbar, dbar);
            for e in 0..dbar {
                for a in e..dbar {
                    w_top[(e, a)] = f.sum((0..u).map(|g| f.mul(self.deltas[e][(i, g)], c[(e * u + g, a)])));
                }
            }
            let s = recover_symmetric(f, &gamma_top, &w_top)?;
            words.push(self.gamma.select_rows(&racks).mul(f, &s)?);
        }
        let tail: Vec<usize> = (l..u).collect();
        for e in 1..kbar {
            let solve_tail = linalg::inverse(f, &self.deltas[e].select_cols(&tail))?;
            for a in 0..dbar {
                if !self.shadowed(e * u + l, a) {
                    continue;
                }
                let rhs: Vec<Elem> = (0..u - l)
                    .map(|i| {
                        let known = f.sum((0..l).map(|g| f.mul(self.deltas[e][(i, g)], c[(e * u + g, a)])));
                        f.sub(words[i][(e, a)], known)
                    })
                    .collect();
                for (g, v) in tail.iter().zip(solve_tail.mul_vec(f, &rhs)?) {
                    c[(e * u + g, a)] = v;
                }
            }
        }
        let m = linalg::solve(f, &self.lambda.select_rows(&(0..kk).collect::<Vec<_>>()), &c)?;
        let m = self.validate_message(&m)?;
        let cw = self.encode(&m)?;
        debug_assert_eq!(self.systematic_data(&cw), data);
        Ok(cw)
    }

    pub fn systematic_data(&self, c: &MbrrCodeword) -> Vec<Elem> {
        self.information_set.iter().map(|&(node, a)| c.rows[(node, a)]).collect()
    }

    /// Shadowed coordinates among the first `k̄u+ũ₀` nodes.
    pub fn excluded_count(&self) -> usize {
        let kk = self.params.reconstruction_size();
        (0..kk)
            .flat_map(|node| (0..self.params.dbar).map(move |a| (node, a)))
            .filter(|&(n, a)| self.shadowed(n, a))
            .count()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Slot {
    Fresh,
    Zero,
    Mirror(usize, usize),
}

/// Recovers symmetric `S` from `Γ S = W` when only the entries `W[e][a]`
/// with `a ≥ e` are known, sweeping columns right to left: the entries of
/// column `a` below the diagonal are already known by symmetry, leaving an
/// `(a+1) × (a+1)` Vandermonde system.
pub fn recover_symmetric(f: &Field, gamma: &Matrix, w_upper: &Matrix) -> Result<Matrix> {
    let d = gamma.rows();
    if gamma.cols() != d || w_upper.rows() != d || w_upper.cols() != d {
        return Err(Error::Linalg(linalg::LinalgError::Shape("recover_symmetric needs square d x d inputs".into())));
    }
    let mut s = Matrix::zeros(d, d);
    for a in (0..d).rev() {
        let head: Vec<usize> = (0..=a).collect();
        let rhs: Vec<Elem> = head
            .iter()
            .map(|&e| f.sub(w_upper[(e, a)], f.sum((a + 1..d).map(|r| f.mul(gamma[(e, r)], s[(r, a)])))))
            .collect();
        let x = linalg::solve_vec(f, &gamma.select_rows(&head).select_cols(&head), &rhs)?;
        for (r, v) in x.into_iter().enumerate() {
            s[(r, a)] = v;
            s[(a, r)] = v;
        }
    }
    Ok(s)
}

impl RackCodec for MbrrCode {
    type Plan = MbrrRepairPlan;

    fn params(&self) -> &CodeParams {
        &self.params
    }

    fn derived(&self) -> &DerivedParams {
        &self.derived
    }

    fn field(&self) -> &Field {
        &self.field
    }

    fn encode_data(&self, data: &[Elem], systematic: bool) -> Result<NodeRows> {
        let c = if systematic { self.encode_systematic(data)? } else { MbrrCode::encode_data(self, data)? };
        Ok(c.to_rows())
    }

    fn decode_data(&self, rows: &BTreeMap<usize, Vec<Elem>>, systematic: bool) -> Result<Vec<Elem>> {
        let m = self.reconstruct(rows)?;
        if systematic {
            Ok(self.systematic_data(&self.encode(&m)?))
        } else {
            Ok(self.extract(&m))
        }
    }

    fn reconstruct_rows(&self, rows: &BTreeMap<usize, Vec<Elem>>) -> Result<NodeRows> {
        Ok(self.encode(&self.reconstruct(rows)?)?.to_rows())
    }

    fn plan(&self, request: &RepairRequest) -> Result<MbrrRepairPlan> {
        self.repair_plan(request)
    }

    fn request<'a>(&self, plan: &'a MbrrRepairPlan) -> &'a RepairRequest {
        &plan.request
    }

    fn contribution(&self, plan: &MbrrRepairPlan, rack: usize, rack_rows: &[Vec<Elem>]) -> Result<Vec<Elem>> {
        self.helper_contribution(plan, rack, &rows_matrix(rack_rows, self.params.dbar)?)
    }

    fn finish(
        &self,
        plan: &MbrrRepairPlan,
        contributions: &[(usize, Vec<Elem>)],
        local_rows: &[Vec<Elem>],
    ) -> Result<NodeRows> {
        let local = rows_matrix(local_rows, self.params.dbar)?;
        Ok(self.repair(plan, contributions, &local)?.to_rows())
    }
}

fn rows_matrix(rows: &[Vec<Elem>], width: usize) -> Result<Matrix> {
    if let Some(r) = rows.iter().find(|r| r.len() != width) {
        return Err(Error::DataLength { expected: width, got: r.len() });
    }
    Ok(Matrix::from_vec(rows.len(), width, rows.concat())?)
}
