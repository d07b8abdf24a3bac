//! Minimum-storage construction: a scalar (`α = β = 1`) subcode of the
//! `[n, k̄u+ũ₀]` Reed-Solomon code on the locators `ξ^e η^g`.
//!
//! The parity checks are the Vandermonde rows `t ∈ T`, where
//! `T = [0, n−k̄u−ũ₀−1] ∪ ⋃_{i<u−l} {i + ju : j ∈ [n̄−k̄, n̄−d̄−1]}`. Collapsing
//! a rack with weights `λ^i` gives the rack-level words, which all lie in one
//! `[n̄, d̄]` MDS code; that is what lets `d̄` helper racks send one symbol
//! per failed node.

use std::collections::BTreeMap;

use crate::codec::{NodeRows, RackCodec};
use crate::error::{Error, Result};
use crate::gf::{Elem, Field};
use crate::layout::{Locators, NodeId};
use crate::linalg::{self, Matrix};
use crate::params::{derive, CodeParams, DerivedParams, Mode};
use crate::rack::RackMds;
use crate::repair::RepairRequest;

/// Largest message space `dmin_bruteforce` will enumerate.
pub const BRUTE_FORCE_LIMIT: u128 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MsrrCodeword {
    symbols: Vec<Elem>,
}

impl MsrrCodeword {
    pub fn new(symbols: Vec<Elem>) -> Self {
        MsrrCodeword { symbols }
    }

    pub fn symbols(&self) -> &[Elem] {
        &self.symbols
    }

    pub fn get(&self, node: usize) -> Elem {
        self.symbols[node]
    }

    pub fn rack(&self, rack: usize, u: usize) -> &[Elem] {
        &self.symbols[rack * u..(rack + 1) * u]
    }

    pub fn into_inner(self) -> Vec<Elem> {
        self.symbols
    }
}

/// `w^{(i)}_e = Σ_g λ^i_(e,g) c_(e,g)` for every rack `e`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RackLevelWord {
    pub index: usize,
    pub values: Vec<Elem>,
}

#[derive(Debug, Clone)]
pub struct MsrrRepairPlan {
    pub request: RepairRequest,
    /// Slots that are neither failed nor helping; `A*` zeroes them.
    pub idle: Vec<usize>,
    /// `h × (u−l)`, identity on the failed columns of `Λ*`, zero on idle ones.
    pub transform: Matrix,
    /// `A* Λ*`, an `h × u` matrix.
    pub combined: Matrix,
    /// Coefficients that interpolate the host coordinate of a rack-level word
    /// from the helper racks, in `helper_racks` order.
    pub interpolation: Vec<Elem>,
}

#[derive(Debug, Clone)]
pub struct MsrrCode {
    params: CodeParams,
    derived: DerivedParams,
    field: Field,
    locators: Locators,
    parity_rows: Vec<u64>,
    parity: Matrix,
    generator: Matrix,
    information_set: Vec<usize>,
    rack_code: RackMds,
}

/// Row indices of the parity-check matrix.
pub fn parity_row_set(p: &CodeParams) -> Vec<u64> {
    let (n, u, l, nbar, kbar, dbar) = (p.n, p.u, p.l, p.nbar(), p.kbar(), p.dbar);
    let mut rows: Vec<u64> = (0..(n - p.reconstruction_size()) as u64).collect();
    for i in 0..u - l {
        rows.extend((nbar - kbar..nbar - dbar).map(|j| (i + j * u) as u64));
    }
    rows.sort_unstable();
    rows
}

/// Coordinates carrying raw data: racks `[0, d̄)` whole, slots `[0, l)` of
/// racks `[d̄, k̄)`, and slots `[0, ũ₀)` of rack `k̄`. Sorted by node index.
pub fn information_set(p: &CodeParams) -> Vec<usize> {
    let u = p.u;
    let x1 = (0..p.dbar).flat_map(|e| (0..u).map(move |g| (e, g)));
    let x2 = (p.dbar..p.kbar()).flat_map(|e| (0..p.l).map(move |g| (e, g)));
    let x3 = (0..p.u0_tilde()).map(|g| (p.kbar(), g));
    x1.chain(x2).chain(x3).map(|(e, g)| NodeId::new(e, g).index(u)).collect()
}

impl MsrrCode {
    pub fn build(params: CodeParams, field: Field) -> Result<Self> {
        let derived = derive(&params, Mode::Msrr)?;
        let locators = Locators::new(&field, &params)?;
        let parity_rows = parity_row_set(&params);
        assert_eq!(parity_rows.len(), params.n - derived.file_size);
        let parity = linalg::vandermonde(&field, &locators.values, &parity_rows)?;
        let generator = linalg::null_space(&field, &parity);
        if generator.rows() != derived.file_size {
            return Err(Error::FieldConstraint {
                field: field.spec(),
                reason: format!("parity matrix has rank {}", params.n - generator.rows()),
            });
        }
        let information_set = information_set(&params);
        let rack_code = RackMds::new(&field, locators.xi, params.u, params.nbar(), params.dbar);
        Ok(MsrrCode { params, derived, field, locators, parity_rows, parity, generator, information_set, rack_code })
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

    pub fn xi(&self) -> Elem {
        self.locators.xi
    }

    pub fn eta(&self) -> Elem {
        self.locators.eta
    }

    pub fn locators(&self) -> &[Elem] {
        &self.locators.values
    }

    pub fn parity_rows(&self) -> &[u64] {
        &self.parity_rows
    }

    pub fn parity_matrix(&self) -> &Matrix {
        &self.parity
    }

    /// `B × n`, rows span the code.
    pub fn generator(&self) -> &Matrix {
        &self.generator
    }

    pub fn information_set(&self) -> &[usize] {
        &self.information_set
    }

    pub fn rack_code(&self) -> &RackMds {
        &self.rack_code
    }

    pub fn file_size(&self) -> usize {
        self.derived.file_size
    }

    pub fn is_codeword(&self, c: &[Elem]) -> bool {
        c.len() == self.params.n && self.parity.mul_vec(&self.field, c).unwrap().iter().all(|e| e.is_zero())
    }

    fn check_len(&self, data: &[Elem]) -> Result<()> {
        if data.len() != self.file_size() {
            return Err(Error::DataLength { expected: self.file_size(), got: data.len() });
        }
        Ok(())
    }

    /// `data · G` for the null-space basis `G`.
    pub fn encode(&self, data: &[Elem]) -> Result<MsrrCodeword> {
        self.check_len(data)?;
        let row = Matrix::from_vec(1, data.len(), data.to_vec())?;
        Ok(MsrrCodeword::new(row.mul(&self.field, &self.generator)?.as_slice().to_vec()))
    }

    /// Inverse of [`encode`](Self::encode) on a full codeword.
    pub fn message_of(&self, c: &MsrrCodeword) -> Result<Vec<Elem>> {
        Ok(linalg::solve_vec(&self.field, &self.generator.transpose(), c.symbols())?)
    }

    /// Solves the Vandermonde rows `exponents` for the coordinates `unknown`,
    /// all other coordinates of `c` being known.
    fn fill_by_parity(&self, c: &mut [Elem], unknown: &[usize], exponents: &[u64]) -> Result<()> {
        let f = &self.field;
        let locs: Vec<Elem> = unknown.iter().map(|&i| self.locators.values[i]).collect();
        let a = linalg::vandermonde(f, &locs, exponents)?;
        let rhs: Vec<Elem> = exponents
            .iter()
            .map(|&t| {
                let s = f.sum(
                    (0..c.len())
                        .filter(|i| !unknown.contains(i))
                        .map(|i| f.mul(f.pow(self.locators.values[i], t), c[i])),
                );
                f.neg(s)
            })
            .collect();
        let x = linalg::solve_vec(f, &a, &rhs)?;
        for (&i, v) in unknown.iter().zip(x) {
            c[i] = v;
        }
        Ok(())
    }

    /// `Λ*_e`: rows `i ∈ [0, u−l)`, columns the slots of rack `e`, entries `λ^i`.
    pub fn rack_matrix(&self, rack: usize) -> Matrix {
        let u = self.params.u;
        let locs = &self.locators.values[rack * u..(rack + 1) * u];
        let exps: Vec<u64> = (0..(u - self.params.l) as u64).collect();
        linalg::vandermonde(&self.field, locs, &exps).expect("locators are distinct")
    }

    /// Places `data` on the information set and fills in the rest: rack-level
    /// words of the first `d̄` racks, MDS extension to racks `[d̄, k̄)`, their
    /// slots `[l, u)` from the rack equations, then the remaining
    /// `n − k̄u − ũ₀` symbols from the supercode checks.
    pub fn encode_systematic(&self, data: &[Elem]) -> Result<MsrrCodeword> {
        self.check_len(data)?;
        let (f, p) = (&self.field, &self.params);
        let (u, l, dbar, kbar) = (p.u, p.l, p.dbar, p.kbar());
        let mut c = vec![Elem::ZERO; p.n];
        for (&node, &s) in self.information_set.iter().zip(data) {
            c[node] = s;
        }
        let head: Vec<usize> = (0..dbar).collect();
        let words: Vec<Vec<Elem>> = (0..u - l)
            .map(|i| {
                let known: Vec<Elem> =
                    head.iter().map(|&e| rack_value(f, &self.rack_matrix(e), c.chunks(u).nth(e).unwrap(), i)).collect();
                self.rack_code.complete(f, &head, &known)
            })
            .collect::<Result<_>>()?;
        let tail: Vec<usize> = (l..u).collect();
        for e in dbar..kbar {
            let lam = self.rack_matrix(e);
            let rack = &c[e * u..(e + 1) * u];
            let rhs: Vec<Elem> = (0..u - l).map(|i| f.sub(words[i][e], f.dot(&lam.row(i)[..l], &rack[..l]))).collect();
            let x = linalg::solve_vec(f, &lam.select_cols(&tail), &rhs)?;
            c[e * u + l..(e + 1) * u].copy_from_slice(&x);
        }
        let kk = p.reconstruction_size();
        let unknown: Vec<usize> = (kk..p.n).collect();
        let exps: Vec<u64> = (0..(p.n - kk) as u64).collect();
        self.fill_by_parity(&mut c, &unknown, &exps)?;
        debug_assert!(self.is_codeword(&c));
        Ok(MsrrCodeword::new(c))
    }

    /// Reads the information set back.
    pub fn systematic_data(&self, c: &MsrrCodeword) -> Vec<Elem> {
        self.information_set.iter().map(|&i| c.get(i)).collect()
    }

    /// Recovers the codeword from any `k̄u + ũ₀` coordinates (the first ones in
    /// index order are used); extra coordinates are cross-checked.
    pub fn reconstruct(&self, coords: &BTreeMap<usize, Elem>) -> Result<MsrrCodeword> {
        let p = &self.params;
        let kk = p.reconstruction_size();
        if let Some((&node, _)) = coords.iter().find(|(&i, _)| i >= p.n) {
            return Err(Error::OutOfRange(format!("node {node} outside 0..{}", p.n)));
        }
        if coords.len() < kk {
            return Err(Error::InsufficientData { needed: kk, got: coords.len() });
        }
        let mut c = vec![Elem::ZERO; p.n];
        let mut used = vec![false; p.n];
        for (&i, &v) in coords.iter().take(kk) {
            c[i] = v;
            used[i] = true;
        }
        let unknown: Vec<usize> = (0..p.n).filter(|&i| !used[i]).collect();
        let exps: Vec<u64> = (0..(p.n - kk) as u64).collect();
        self.fill_by_parity(&mut c, &unknown, &exps)?;
        if coords.iter().skip(kk).any(|(&i, &v)| c[i] != v) || !self.is_codeword(&c) {
            return Err(Error::Inconsistent);
        }
        Ok(MsrrCodeword::new(c))
    }

    pub fn rack_level(&self, c: &MsrrCodeword, i: usize) -> Result<RackLevelWord> {
        let (u, l) = (self.params.u, self.params.l);
        if i >= u - l {
            return Err(Error::OutOfRange(format!("rack-level index {i} outside 0..{}", u - l)));
        }
        let values =
            (0..self.params.nbar()).map(|e| rack_value(&self.field, &self.rack_matrix(e), c.rack(e, u), i)).collect();
        Ok(RackLevelWord { index: i, values })
    }

    pub fn repair_plan(&self, request: &RepairRequest) -> Result<MsrrRepairPlan> {
        let idle = request.validate(&self.params)?;
        let f = &self.field;
        let lam = self.rack_matrix(request.host);
        let transform = linalg::partial_identity_transform(f, &lam, &request.failed, &idle)?;
        let combined = transform.mul(f, &lam)?;
        let interpolation = self.rack_code.recovery_matrix(f, &request.helper_racks, &[request.host])?.row(0).to_vec();
        Ok(MsrrRepairPlan { request: request.clone(), idle, transform, combined, interpolation })
    }

    /// `A* (w^{(0)}_e, …, w^{(u−l−1)}_e)ᵀ`: the `h` symbols rack `e` sends.
    pub fn helper_contribution(&self, plan: &MsrrRepairPlan, rack: usize, rack_symbols: &[Elem]) -> Result<Vec<Elem>> {
        if !plan.request.helper_racks.contains(&rack) {
            return Err(Error::InvalidRepair(format!("rack {rack} is not a helper in this plan")));
        }
        if rack_symbols.len() != self.params.u {
            return Err(Error::DataLength { expected: self.params.u, got: rack_symbols.len() });
        }
        let f = &self.field;
        let w = self.rack_matrix(rack).mul_vec(f, rack_symbols)?;
        Ok(plan.transform.mul_vec(f, &w)?)
    }

    /// Failed symbols, in `plan.request.failed` order.
    pub fn repair(
        &self,
        plan: &MsrrRepairPlan,
        contributions: &[(usize, Vec<Elem>)],
        local_symbols: &[Elem],
    ) -> Result<Vec<Elem>> {
        let f = &self.field;
        let req = &plan.request;
        let h = req.failed.len();
        if local_symbols.len() != req.local_helpers.len() {
            return Err(Error::DataLength { expected: req.local_helpers.len(), got: local_symbols.len() });
        }
        let by_rack = contributions_by_rack(req, contributions, h)?;
        (0..h)
            .map(|i| {
                let host_value = f.dot(&plan.interpolation, &by_rack.iter().map(|s| s[i]).collect::<Vec<_>>());
                let local =
                    f.sum(req.local_helpers.iter().zip(local_symbols).map(|(&g, &c)| f.mul(plan.combined[(i, g)], c)));
                Ok(f.sub(host_value, local))
            })
            .collect()
    }

    /// Minimum distance by enumerating every codeword.
    pub fn dmin_bruteforce(&self) -> Result<usize> {
        Ok(linalg::min_distance_bruteforce(&self.field, &self.generator, BRUTE_FORCE_LIMIT)?)
    }
}

fn rack_value(f: &Field, lam: &Matrix, rack: &[Elem], i: usize) -> Elem {
    f.dot(lam.row(i), rack)
}

/// Orders contributions like `request.helper_racks`, checking each has `h` symbols.
pub(crate) fn contributions_by_rack<'a>(
    req: &RepairRequest,
    contributions: &'a [(usize, Vec<Elem>)],
    h: usize,
) -> Result<Vec<&'a [Elem]>> {
    if contributions.len() != req.helper_racks.len() {
        return Err(Error::InvalidRepair(format!(
            "{} contributions for {} helper racks",
            contributions.len(),
            req.helper_racks.len()
        )));
    }
    req.helper_racks
        .iter()
        .map(|rack| {
            let (_, s) = contributions
                .iter()
                .find(|(r, _)| r == rack)
                .ok_or_else(|| Error::InvalidRepair(format!("missing contribution from rack {rack}")))?;
            if s.len() != h {
                return Err(Error::DataLength { expected: h, got: s.len() });
            }
            Ok(s.as_slice())
        })
        .collect()
}

impl RackCodec for MsrrCode {
    type Plan = MsrrRepairPlan;

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
        let c = if systematic { self.encode_systematic(data)? } else { self.encode(data)? };
        Ok(c.into_inner().into_iter().map(|s| vec![s]).collect())
    }

    fn decode_data(&self, rows: &BTreeMap<usize, Vec<Elem>>, systematic: bool) -> Result<Vec<Elem>> {
        let c = self.reconstruct(&scalar_rows(rows)?)?;
        if systematic {
            Ok(self.systematic_data(&c))
        } else {
            self.message_of(&c)
        }
    }

    fn reconstruct_rows(&self, rows: &BTreeMap<usize, Vec<Elem>>) -> Result<NodeRows> {
        let c = self.reconstruct(&scalar_rows(rows)?)?;
        Ok(c.into_inner().into_iter().map(|s| vec![s]).collect())
    }

    fn plan(&self, request: &RepairRequest) -> Result<MsrrRepairPlan> {
        self.repair_plan(request)
    }

    fn request<'a>(&self, plan: &'a MsrrRepairPlan) -> &'a RepairRequest {
        &plan.request
    }

    fn contribution(&self, plan: &MsrrRepairPlan, rack: usize, rack_rows: &[Vec<Elem>]) -> Result<Vec<Elem>> {
        let symbols = rack_rows.iter().map(|r| single(r)).collect::<Result<Vec<_>>>()?;
        self.helper_contribution(plan, rack, &symbols)
    }

    fn finish(
        &self,
        plan: &MsrrRepairPlan,
        contributions: &[(usize, Vec<Elem>)],
        local_rows: &[Vec<Elem>],
    ) -> Result<NodeRows> {
        let local = local_rows.iter().map(|r| single(r)).collect::<Result<Vec<_>>>()?;
        Ok(self.repair(plan, contributions, &local)?.into_iter().map(|s| vec![s]).collect())
    }
}

fn single(row: &[Elem]) -> Result<Elem> {
    match row {
        [s] => Ok(*s),
        _ => Err(Error::DataLength { expected: 1, got: row.len() }),
    }
}

fn scalar_rows(rows: &BTreeMap<usize, Vec<Elem>>) -> Result<BTreeMap<usize, Elem>> {
    rows.iter().map(|(&i, r)| Ok((i, single(r)?))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::FieldSpec;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn code(n: usize, u: usize, k: usize, l: usize, d: usize, field: FieldSpec) -> MsrrCode {
        MsrrCode::build(CodeParams::new(n, u, k, l, d).unwrap(), Field::new(field).unwrap()).unwrap()
    }

    fn code_30_5_24() -> MsrrCode {
        code(30, 5, 24, 3, 2, FieldSpec::Prime(31))
    }

    fn code_16_4_13() -> MsrrCode {
        code(16, 4, 13, 2, 2, FieldSpec::Prime(29))
    }

    fn random_data(code: &MsrrCode, rng: &mut ChaCha8Rng) -> Vec<Elem> {
        (0..code.file_size()).map(|_| Elem(rng.gen_range(0..code.field().order()))).collect()
    }

    #[test]
    fn parity_rows_30_5_24() {
        let c = code_30_5_24();
        assert_eq!(c.parity_rows(), &[0, 1, 2, 3, 4, 5, 6, 10, 11, 15, 16]);
        assert_eq!(linalg::rank(c.field(), c.parity_matrix()), 11);
        assert_eq!(c.parity_matrix().cols(), 30);
    }

    #[test]
    fn sizes_16_4_13() {
        let c = code_16_4_13();
        assert_eq!(c.file_size(), 11);
        assert_eq!(c.parity_rows().len(), 5);
        assert_eq!(c.generator().rows(), 11);
    }

    #[test]
    fn rejects_dbar_equal_kbar() {
        assert!(CodeParams::new(16, 4, 13, 2, 3).is_err());
    }

    #[test]
    fn rejects_small_field() {
        let p = CodeParams::new(16, 4, 13, 2, 2).unwrap();
        let err = MsrrCode::build(p, Field::new(FieldSpec::Prime(13)).unwrap()).unwrap_err();
        assert!(matches!(err, Error::FieldConstraint { .. }));
    }

    #[test]
    fn zero_data_encodes_to_zero() {
        let c = code_16_4_13();
        let zero = vec![Elem::ZERO; 11];
        assert!(c.encode_systematic(&zero).unwrap().symbols().iter().all(|e| e.is_zero()));
        assert!(c.encode(&zero).unwrap().symbols().iter().all(|e| e.is_zero()));
        assert!(matches!(c.encode_systematic(&zero[1..]), Err(Error::DataLength { expected: 11, got: 10 })));
    }

    #[test]
    fn systematic_layout_16_4_13() {
        let c = code_16_4_13();
        let data: Vec<Elem> = (1..=11).map(Elem).collect();
        let cw = c.encode_systematic(&data).unwrap();
        let head: Vec<u32> = cw.symbols()[..13].iter().map(|e| e.0).collect();
        assert_eq!(&head[..10], &[1, 2, 3, 4, 5, 6, 7, 8, 9, 10]);
        assert_eq!(head[12], 11);
        assert!(c.is_codeword(cw.symbols()));
        assert_eq!(c.systematic_data(&cw), data);
    }

    #[test]
    fn random_systematic_codewords() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for c in [code_30_5_24(), code_16_4_13()] {
            for _ in 0..50 {
                let data = random_data(&c, &mut rng);
                let cw = c.encode_systematic(&data).unwrap();
                assert!(c.is_codeword(cw.symbols()));
                assert_eq!(c.systematic_data(&cw), data);
                let plain = c.encode(&data).unwrap();
                assert!(c.is_codeword(plain.symbols()));
                assert_eq!(c.message_of(&plain).unwrap(), data);
            }
        }
    }

    #[test]
    fn reconstruct_from_subsets() {
        let c = code_16_4_13();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let cw = c.encode_systematic(&random_data(&c, &mut rng)).unwrap();
        let all: BTreeMap<usize, Elem> = (0..16).map(|i| (i, cw.get(i))).collect();
        assert_eq!(c.reconstruct(&all).unwrap(), cw);
        for _ in 0..40 {
            let mut idx: Vec<usize> = (0..16).collect();
            for i in (1..16).rev() {
                idx.swap(i, rng.gen_range(0..=i));
            }
            let some: BTreeMap<usize, Elem> = idx[..13].iter().map(|&i| (i, cw.get(i))).collect();
            assert_eq!(c.reconstruct(&some).unwrap(), cw);
            let few: BTreeMap<usize, Elem> = idx[..12].iter().map(|&i| (i, cw.get(i))).collect();
            assert!(matches!(c.reconstruct(&few), Err(Error::InsufficientData { needed: 13, got: 12 })));
        }
    }

    #[test]
    fn corruption_is_reported() {
        let c = code_16_4_13();
        let cw = c.encode_systematic(&(1..=11).map(Elem).collect::<Vec<_>>()).unwrap();
        let mut all: BTreeMap<usize, Elem> = (0..16).map(|i| (i, cw.get(i))).collect();
        let v = all[&15];
        all.insert(15, c.field().add(v, Elem::ONE));
        assert!(matches!(c.reconstruct(&all), Err(Error::Inconsistent)));
        // exactly 13 coordinates that are not from the subcode
        let mut some: BTreeMap<usize, Elem> = (0..13).map(|i| (i, cw.get(i))).collect();
        some.insert(0, c.field().add(cw.get(0), Elem::ONE));
        assert!(matches!(c.reconstruct(&some), Err(Error::Inconsistent)));
    }

    #[test]
    fn rack_level_words() {
        let c = code_30_5_24();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let cw = c.encode_systematic(&random_data(&c, &mut rng)).unwrap();
        let w0 = c.rack_level(&cw, 0).unwrap();
        for e in 0..6 {
            assert_eq!(w0.values[e], c.field().sum(cw.rack(e, 5).iter().copied()));
        }
        let f = c.field();
        for i in 0..2 {
            let w = c.rack_level(&cw, i).unwrap();
            assert!(c.rack_code().is_codeword(f, &w.values));
            // the parity rows t ∈ {i, i+5, i+10, i+15}
            for j in 0..4u64 {
                let t = i as u64 + 5 * j;
                assert!(c.parity_rows().contains(&t));
                let s = f.sum((0..30).map(|node| f.mul(f.pow(c.locators()[node], t), cw.get(node))));
                assert_eq!(s, Elem::ZERO);
            }
        }
        assert!(matches!(c.rack_level(&cw, 2), Err(Error::OutOfRange(_))));
        let zero = MsrrCodeword::new(vec![Elem::ZERO; 30]);
        assert!(c.rack_level(&zero, 1).unwrap().values.iter().all(|e| e.is_zero()));
    }

    #[test]
    fn single_failure_30_5_24() {
        let c = code_30_5_24();
        let req = RepairRequest { host: 0, failed: vec![0], local_helpers: vec![2, 3, 4], helper_racks: vec![3, 5] };
        let plan = c.repair_plan(&req).unwrap();
        assert_eq!(plan.idle, vec![1]);
        assert_eq!(plan.transform.rows(), 1);
        assert_eq!(plan.transform.cols(), 2);
        assert_eq!(plan.combined[(0, 0)], Elem::ONE);
        assert_eq!(plan.combined[(0, 1)], Elem::ZERO);

        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let cw = c.encode_systematic(&random_data(&c, &mut rng)).unwrap();
        let contribs: Vec<(usize, Vec<Elem>)> =
            req.helper_racks.iter().map(|&e| (e, c.helper_contribution(&plan, e, cw.rack(e, 5)).unwrap())).collect();
        assert!(contribs.iter().all(|(_, s)| s.len() == 1));
        let local: Vec<Elem> = [2, 3, 4].iter().map(|&g| cw.get(g)).collect();
        assert_eq!(c.repair(&plan, &contribs, &local).unwrap(), vec![cw.get(0)]);
    }

    #[test]
    fn full_width_plan_inverts_failed_columns() {
        let c = code_30_5_24();
        let req = RepairRequest { host: 2, failed: vec![1, 4], local_helpers: vec![0, 2, 3], helper_racks: vec![0, 5] };
        let plan = c.repair_plan(&req).unwrap();
        let inv = linalg::inverse(c.field(), &c.rack_matrix(2).select_cols(&[1, 4])).unwrap();
        assert_eq!(plan.transform, inv);
    }

    #[test]
    fn two_failures_match_explicit_transform() {
        let c = code_30_5_24();
        let f = c.field();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let cw = c.encode_systematic(&random_data(&c, &mut rng)).unwrap();
        let req = RepairRequest { host: 4, failed: vec![0, 3], local_helpers: vec![1, 2, 4], helper_racks: vec![1, 2] };
        let plan = c.repair_plan(&req).unwrap();
        let w: Vec<RackLevelWord> = (0..2).map(|i| c.rack_level(&cw, i).unwrap()).collect();
        for &e in &req.helper_racks {
            let got = c.helper_contribution(&plan, e, cw.rack(e, 5)).unwrap();
            let expect = plan.transform.mul_vec(f, &[w[0].values[e], w[1].values[e]]).unwrap();
            assert_eq!(got, expect);
        }
        assert!(c.helper_contribution(&plan, 0, cw.rack(0, 5)).is_err());
    }

    #[test]
    fn transformed_rack_words_stay_in_the_mds_code() {
        let c = code_30_5_24();
        let f = c.field();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let cw = c.encode_systematic(&random_data(&c, &mut rng)).unwrap();
        let w: Vec<Vec<Elem>> = (0..2).map(|i| c.rack_level(&cw, i).unwrap().values).collect();
        for _ in 0..20 {
            let a = [Elem(rng.gen_range(0..31)), Elem(rng.gen_range(0..31))];
            let v: Vec<Elem> = (0..6).map(|e| f.add(f.mul(a[0], w[0][e]), f.mul(a[1], w[1][e]))).collect();
            assert!(c.rack_code().is_codeword(f, &v));
        }
    }

    #[test]
    fn zero_codeword_repairs_to_zero() {
        let c = code_16_4_13();
        let req = RepairRequest::lowest(c.params(), 1, &[2, 3]);
        let plan = c.repair_plan(&req).unwrap();
        let contribs: Vec<(usize, Vec<Elem>)> =
            req.helper_racks.iter().map(|&e| (e, c.helper_contribution(&plan, e, &[Elem::ZERO; 4]).unwrap())).collect();
        assert_eq!(contribs[0].1, vec![Elem::ZERO; 2]);
        assert_eq!(c.repair(&plan, &contribs, &[Elem::ZERO; 2]).unwrap(), vec![Elem::ZERO; 2]);
        assert!(c.repair(&plan, &contribs[..1], &[Elem::ZERO; 2]).is_err());
    }

    #[test]
    fn lrc_distance_u_not_dividing_k() {
        let c = code(8, 4, 5, 2, 0, FieldSpec::Prime(13));
        assert_eq!(c.file_size(), 3);
        assert_eq!(c.dmin_bruteforce().unwrap(), 4);
        assert_eq!(crate::params::lrc_dmin_bound(8, 3, 2, 3), 4);
    }

    #[test]
    fn lrc_distance_u_dividing_k() {
        let c = code(8, 4, 4, 2, 0, FieldSpec::Prime(13));
        assert_eq!(c.file_size(), 2);
        // n − (k̄−1)u − l + 1 with k̄ = 1
        assert_eq!(c.dmin_bruteforce().unwrap(), 7);
        assert_eq!(crate::params::lrc_dmin_bound(8, 2, 2, 3), 7);
    }

    #[test]
    fn no_helper_racks_means_rack_local_mds() {
        let c = code(8, 4, 5, 2, 0, FieldSpec::Prime(13));
        let f = c.field();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..20 {
            let cw = c.encode_systematic(&random_data(&c, &mut rng)).unwrap();
            for e in 0..2 {
                // each rack is a [u, l] Reed-Solomon word: its rack-level values vanish
                let w = c.rack_matrix(e).mul_vec(f, cw.rack(e, 4)).unwrap();
                assert!(w.iter().all(|x| x.is_zero()));
            }
            let req = RepairRequest::lowest(c.params(), 1, &[0, 3]);
            let plan = c.repair_plan(&req).unwrap();
            let local: Vec<Elem> = req.local_helpers.iter().map(|&g| cw.get(4 + g)).collect();
            assert_eq!(c.repair(&plan, &[], &local).unwrap(), vec![cw.get(4), cw.get(7)]);
        }
    }
}
