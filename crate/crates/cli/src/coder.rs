//! A codec flattened to its generator matrix, so that a file of many stripes
//! is encoded and decoded with one matrix product per stripe.

use std::collections::BTreeMap;

use metrrc::codec::{NodeRows, RackCodec};
use metrrc::gf::{Elem, Field};
use metrrc::linalg::{self, Matrix};
use metrrc::{Error, Result};

pub struct StripeCoder {
    field: Field,
    n: usize,
    alpha: usize,
    /// `nα × B`; rows `iα..(i+1)α` belong to node `i`.
    generator: Matrix,
    min_nodes: usize,
}

impl StripeCoder {
    /// Probes `codec` with unit vectors. Encoding is linear in the data, and
    /// one extra random-looking vector checks that.
    pub fn new<C: RackCodec>(codec: &C, systematic: bool) -> Result<Self> {
        let field = codec.field().clone();
        let p = codec.params();
        let alpha = codec.derived().alpha;
        let b = codec.derived().file_size;
        let mut generator = Matrix::zeros(p.n * alpha, b);
        for j in 0..b {
            let mut unit = vec![Elem::ZERO; b];
            unit[j] = Elem::ONE;
            for (i, row) in codec.encode_data(&unit, systematic)?.iter().enumerate() {
                for (a, &s) in row.iter().enumerate() {
                    generator[(i * alpha + a, j)] = s;
                }
            }
        }
        let coder = StripeCoder { field, n: p.n, alpha, generator, min_nodes: p.reconstruction_size() };
        let probe: Vec<Elem> = (0..b).map(|j| coder.field.from_int(3 * j as i64 + 1)).collect();
        if coder.encode(&probe)? != codec.encode_data(&probe, systematic)? {
            return Err(Error::Inconsistent);
        }
        Ok(coder)
    }

    pub fn file_size(&self) -> usize {
        self.generator.cols()
    }

    pub fn alpha(&self) -> usize {
        self.alpha
    }

    pub fn encode(&self, data: &[Elem]) -> Result<NodeRows> {
        if data.len() != self.file_size() {
            return Err(Error::DataLength { expected: self.file_size(), got: data.len() });
        }
        let flat = self.generator.mul_vec(&self.field, data)?;
        Ok(flat.chunks(self.alpha).map(<[Elem]>::to_vec).collect())
    }

    /// Prepares decoding from exactly the nodes in `available`.
    pub fn decoder(&self, available: &[usize]) -> Result<Decoder> {
        let mut nodes = available.to_vec();
        nodes.sort_unstable();
        nodes.dedup();
        if let Some(&bad) = nodes.iter().find(|&&i| i >= self.n) {
            return Err(Error::OutOfRange(format!("node {bad} outside 0..{}", self.n)));
        }
        if nodes.len() < self.min_nodes {
            return Err(Error::InsufficientData { needed: self.min_nodes, got: nodes.len() });
        }
        let rows: Vec<usize> = nodes.iter().flat_map(|&i| i * self.alpha..(i + 1) * self.alpha).collect();
        let sub = self.generator.select_rows(&rows);
        // pivot columns of the transpose are independent rows
        let (_, pivots) = linalg::rref(&self.field, &sub.transpose());
        if pivots.len() < self.file_size() {
            return Err(Error::InsufficientData { needed: self.min_nodes, got: nodes.len() });
        }
        let inverse = linalg::inverse(&self.field, &sub.select_rows(&pivots))?;
        let rest: Vec<usize> = (0..rows.len()).filter(|r| !pivots.contains(r)).collect();
        let check = sub.select_rows(&rest);
        Ok(Decoder { field: self.field.clone(), nodes, alpha: self.alpha, used: pivots, rest, inverse, check })
    }
}

/// Decoding for one fixed set of available nodes.
pub struct Decoder {
    field: Field,
    nodes: Vec<usize>,
    alpha: usize,
    used: Vec<usize>,
    rest: Vec<usize>,
    inverse: Matrix,
    /// Generator rows of the symbols not used for solving.
    check: Matrix,
}

impl Decoder {
    pub fn nodes(&self) -> &[usize] {
        &self.nodes
    }

    /// `rows[j]` is the row of node `nodes()[j]`. Rows beyond the ones
    /// needed must agree with the result.
    pub fn decode(&self, rows: &[&[Elem]]) -> Result<Vec<Elem>> {
        if rows.len() != self.nodes.len() || rows.iter().any(|r| r.len() != self.alpha) {
            return Err(Error::OutOfRange(format!("expected {} rows of {} symbols", self.nodes.len(), self.alpha)));
        }
        let flat: Vec<Elem> = rows.iter().flat_map(|r| r.iter().copied()).collect();
        let pick = |idx: &[usize]| idx.iter().map(|&r| flat[r]).collect::<Vec<Elem>>();
        let data = self.inverse.mul_vec(&self.field, &pick(&self.used))?;
        if self.check.mul_vec(&self.field, &data)? != pick(&self.rest) {
            return Err(Error::Inconsistent);
        }
        Ok(data)
    }

    pub fn decode_map(&self, rows: &BTreeMap<usize, Vec<Elem>>) -> Result<Vec<Elem>> {
        let ordered: Option<Vec<&[Elem]>> = self.nodes.iter().map(|i| rows.get(i).map(Vec::as_slice)).collect();
        self.decode(&ordered.ok_or_else(|| Error::OutOfRange("missing a decoder node".into()))?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use metrrc::gf::FieldSpec;
    use metrrc::mbrr::MbrrCode;
    use metrrc::msrr::MsrrCode;
    use metrrc::params::CodeParams;

    fn data(f: &Field, b: usize, seed: u64) -> Vec<Elem> {
        (0..b).map(|j| f.from_int((seed as i64 + 7) * (j as i64 + 3) % 1009)).collect()
    }

    fn agrees_with_codec<C: RackCodec>(codec: &C) {
        let f = codec.field();
        for systematic in [false, true] {
            let coder = StripeCoder::new(codec, systematic).unwrap();
            for seed in 0..5 {
                let d = data(f, coder.file_size(), seed);
                let rows = coder.encode(&d).unwrap();
                assert_eq!(rows, codec.encode_data(&d, systematic).unwrap());
                let n = rows.len();
                // drop n − k nodes, a different run each time
                let k = codec.params().k;
                let avail: Vec<usize> = (0..n).filter(|i| (i + n - seed as usize) % n >= n - k).collect();
                let dec = coder.decoder(&avail).unwrap();
                let refs: Vec<&[Elem]> = avail.iter().map(|&i| rows[i].as_slice()).collect();
                assert_eq!(dec.decode(&refs).unwrap(), d);
            }
        }
    }

    #[test]
    fn matches_both_codecs() {
        let p = CodeParams::new(16, 4, 13, 2, 2).unwrap();
        agrees_with_codec(&MsrrCode::build(p, Field::new(FieldSpec::Prime(29)).unwrap()).unwrap());
        agrees_with_codec(&MbrrCode::build(p, Field::new(FieldSpec::Prime(17)).unwrap()).unwrap());
    }

    #[test]
    fn too_few_nodes_and_corruption() {
        let p = CodeParams::new(16, 4, 13, 2, 2).unwrap();
        let code = MsrrCode::build(p, Field::new(FieldSpec::Prime(29)).unwrap()).unwrap();
        let coder = StripeCoder::new(&code, true).unwrap();
        assert!(matches!(coder.decoder(&(0..12).collect::<Vec<_>>()), Err(Error::InsufficientData { .. })));
        let d = data(code.field(), coder.file_size(), 1);
        let mut rows = coder.encode(&d).unwrap();
        rows[15][0] = code.field().add(rows[15][0], Elem::ONE);
        let dec = coder.decoder(&(0..16).collect::<Vec<_>>()).unwrap();
        let refs: Vec<&[Elem]> = rows.iter().map(Vec::as_slice).collect();
        assert!(matches!(dec.decode(&refs), Err(Error::Inconsistent)));
    }
}
