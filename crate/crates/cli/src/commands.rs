//! The subcommands as plain functions returning their output lines, so they
//! can be driven in-process as well as from `main`.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use metrrc::codec::RackCodec;
use metrrc::gf::{Elem, Field, FieldSpec, DEFAULT_POLYNOMIALS};
use metrrc::layout::{default_field, NodeId};
use metrrc::mbrr::MbrrCode;
use metrrc::msrr::MsrrCode;
use metrrc::params::{derive, flowgraph_mincut, general_cutset_bound, CodeParams, Mode};
use metrrc::sim::{classify, Cluster, FailurePattern, HelperPolicy, RepairClass, RepairReport};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::chunk::{self, ChunkHeader};
use crate::coder::StripeCoder;
use crate::error::{CliError, Result};
use crate::packing;

/// `auto`, `p:<q>` for a prime field, or `gf2^<m>[:<poly>]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FieldArg {
    #[default]
    Auto,
    Explicit(FieldSpec),
}

impl FieldArg {
    pub fn resolve(self, p: &CodeParams) -> FieldSpec {
        match self {
            FieldArg::Auto => default_field(p),
            FieldArg::Explicit(spec) => spec,
        }
    }
}

impl FromStr for FieldArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim().to_ascii_lowercase();
        if s == "auto" {
            return Ok(FieldArg::Auto);
        }
        let number = |t: &str| -> Result<u32, String> {
            let t = t.trim();
            let parsed = match t.strip_prefix("0x") {
                Some(hex) => u32::from_str_radix(hex, 16),
                None => t.parse(),
            };
            parsed.map_err(|_| format!("not a number: {t:?}"))
        };
        if let Some(q) = s.strip_prefix("p:") {
            return Ok(FieldArg::Explicit(FieldSpec::Prime(number(q)?)));
        }
        if let Some(rest) = s.strip_prefix("gf2^") {
            let (m, poly) = match rest.split_once(':') {
                Some((m, poly)) => (number(m)?, Some(number(poly)?)),
                None => (number(rest)?, None),
            };
            let spec = match poly {
                Some(poly) => FieldSpec::Binary { m, poly },
                None => FieldSpec::binary(m).map_err(|e| e.to_string())?,
            };
            return Ok(FieldArg::Explicit(spec));
        }
        Err(format!("unknown field {s:?}; use auto, p:<prime> or gf2^<m>[:<poly>] (m ≤ {})", DEFAULT_POLYNOMIALS.len()))
    }
}

/// Parameters, mode and field of one code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CodeSpec {
    pub params: CodeParams,
    pub mode: Mode,
    pub field: FieldArg,
}

/// Either construction behind one type.
#[derive(Debug, Clone)]
pub enum Codec {
    Msrr(MsrrCode),
    Mbrr(MbrrCode),
}

macro_rules! with_codec {
    ($codec:expr, $c:ident => $body:expr) => {
        match $codec {
            Codec::Msrr($c) => $body,
            Codec::Mbrr($c) => $body,
        }
    };
}

impl Codec {
    pub fn build(params: CodeParams, mode: Mode, field: FieldSpec) -> Result<Self> {
        let field = Field::new(field).map_err(|e| CliError::Param(e.to_string()))?;
        Ok(match mode {
            Mode::Msrr => Codec::Msrr(MsrrCode::build(params, field)?),
            Mode::Mbrr => Codec::Mbrr(MbrrCode::build(params, field)?),
        })
    }

    pub fn from_spec(spec: &CodeSpec) -> Result<Self> {
        Codec::build(spec.params, spec.mode, spec.field.resolve(&spec.params))
    }

    pub fn field(&self) -> &Field {
        with_codec!(self, c => c.field())
    }

    pub fn params(&self) -> &CodeParams {
        with_codec!(self, c => c.params())
    }

    pub fn mode(&self) -> Mode {
        match self {
            Codec::Msrr(_) => Mode::Msrr,
            Codec::Mbrr(_) => Mode::Mbrr,
        }
    }

    pub fn stripe_coder(&self, systematic: bool) -> Result<StripeCoder> {
        Ok(with_codec!(self, c => StripeCoder::new(c, systematic))?)
    }
}

/// One `key=value` line per mode. With `mode = None` both are listed, and a
/// mode the parameters do not support is reported instead of failing.
pub fn cmd_params(p: &CodeParams, mode: Option<Mode>) -> Result<Vec<String>> {
    p.validate()?;
    let modes = mode.map_or(vec![Mode::Msrr, Mode::Mbrr], |m| vec![m]);
    let mut out = Vec::new();
    for m in modes {
        let d = match derive(p, m) {
            Ok(d) => d,
            Err(e) if mode.is_none() => {
                out.push(format!("mode={m} unavailable=\"{e}\""));
                continue;
            }
            Err(e) => return Err(e.into()),
        };
        let ratio = d.storage_overhead(p.n);
        let (num, den) = (*ratio.numer(), *ratio.denom());
        out.push(format!(
            "mode={m} n={} u={} k={} l={} dbar={} nbar={} kbar={} u0={} u0_tilde={} alpha={} beta={} B={} overhead={num}/{den} overhead_approx={:.4} repair_bandwidth={}",
            p.n,
            p.u,
            p.k,
            p.l,
            p.dbar,
            d.nbar,
            d.kbar,
            d.u0,
            d.u0_tilde,
            d.alpha,
            d.beta,
            d.file_size,
            num as f64 / den as f64,
            d.repair_bandwidth(p.dbar),
        ));
    }
    Ok(out)
}

/// Splits `input` into stripes of `B` symbols and writes one chunk file per
/// node into `out_dir`.
pub fn cmd_encode(input: &Path, out_dir: &Path, spec: &CodeSpec, systematic: bool) -> Result<Vec<String>> {
    let codec = Codec::from_spec(spec)?;
    let bytes = fs::read(input).map_err(CliError::io(input))?;
    fs::create_dir_all(out_dir).map_err(CliError::io(out_dir))?;
    let written = encode_bytes(&codec, &bytes, out_dir, systematic)?;
    Ok(vec![format!(
        "event=encode mode={} field={} B={} alpha={} stripes={} chunks={} bytes={}",
        codec.mode(),
        codec.field().spec(),
        written.0,
        written.1,
        written.2,
        codec.params().n,
        bytes.len()
    )])
}

/// Returns `(B, α, stripes)`.
pub fn encode_bytes(codec: &Codec, bytes: &[u8], out_dir: &Path, systematic: bool) -> Result<(usize, usize, u64)> {
    let p = *codec.params();
    let field = codec.field().clone();
    let coder = codec.stripe_coder(systematic)?;
    let b = coder.file_size();
    if b == 0 {
        return Err(CliError::Param(format!("{} at these parameters stores no data (B = 0)", codec.mode())));
    }
    let symbols = packing::pack(bytes, field.payload_bits(), b);
    let stripes = symbols.len() / b;
    let mut bodies: Vec<Vec<Elem>> = vec![Vec::with_capacity(stripes * coder.alpha()); p.n];
    for stripe in symbols.chunks(b) {
        for (body, row) in bodies.iter_mut().zip(coder.encode(stripe)?) {
            body.extend(row);
        }
    }
    for (i, body) in bodies.iter().enumerate() {
        let header = ChunkHeader {
            mode: codec.mode(),
            field: field.spec(),
            params: p,
            payload_len: bytes.len() as u64,
            node: NodeId::from_index(i, p.u),
            systematic,
        };
        chunk::write_chunk(out_dir, &header, &field, body)?;
    }
    Ok((b, coder.alpha(), stripes as u64))
}

/// Everything needed to work on a directory of chunks.
struct StripeSet {
    header: ChunkHeader,
    codec: Codec,
    stripes: usize,
    alpha: usize,
    chunks: BTreeMap<usize, chunk::Chunk>,
}

fn load(dir: &Path) -> Result<StripeSet> {
    let chunks = chunk::read_dir(dir)?;
    let Some(first) = chunks.values().next() else {
        return Err(CliError::Unrecoverable(format!("no chunk files in {}", dir.display())));
    };
    let header = first.header;
    let codec = Codec::build(header.params, header.mode, header.field)?;
    let alpha = derive(&header.params, header.mode)?.alpha;
    let b = derive(&header.params, header.mode)?.file_size;
    let bits = codec.field().payload_bits();
    let stripes = if b == 0 { 0 } else { packing::stripe_count(header.payload_len, b, bits) as usize };
    for (&i, c) in &chunks {
        if c.symbols.len() != stripes * alpha {
            return Err(CliError::Chunk {
                path: chunk::chunk_path(dir, NodeId::from_index(i, header.params.u)),
                reason: format!("{} symbols, expected {} stripes of {alpha}", c.symbols.len(), stripes),
            });
        }
    }
    Ok(StripeSet { header, codec, stripes, alpha, chunks })
}

/// Rebuilds the original file from whatever chunks are present.
pub fn cmd_decode(dir: &Path, output: &Path) -> Result<Vec<String>> {
    let set = load(dir)?;
    let bytes = decode_set(&set)?;
    fs::write(output, &bytes).map_err(CliError::io(output))?;
    Ok(vec![format!(
        "event=decode mode={} stripes={} chunks={} bytes={}",
        set.header.mode,
        set.stripes,
        set.chunks.len(),
        bytes.len()
    )])
}

fn decode_set(set: &StripeSet) -> Result<Vec<u8>> {
    let coder = set.codec.stripe_coder(set.header.systematic)?;
    let available: Vec<usize> = set.chunks.keys().copied().collect();
    let decoder = coder.decoder(&available)?;
    let mut symbols = Vec::with_capacity(set.stripes * coder.file_size());
    let a = set.alpha;
    for s in 0..set.stripes {
        let rows: Vec<&[Elem]> = set.chunks.values().map(|c| &c.symbols[s * a..(s + 1) * a]).collect();
        symbols.extend(decoder.decode(&rows)?);
    }
    Ok(packing::unpack(&symbols, set.codec.field().payload_bits(), set.header.payload_len as usize))
}

/// Parses `3`, `0:3` style node references.
pub fn parse_node(s: &str, p: &CodeParams) -> Result<usize> {
    let bad = || CliError::Param(format!("bad node {s:?}; use an index or rack:slot"));
    let index = match s.trim().split_once(':') {
        Some((e, g)) => {
            let (e, g): (usize, usize) = (e.parse().map_err(|_| bad())?, g.parse().map_err(|_| bad())?);
            if g >= p.u {
                return Err(bad());
            }
            NodeId::new(e, g).index(p.u)
        }
        None => s.trim().parse().map_err(|_| bad())?,
    };
    if index >= p.n {
        return Err(CliError::Param(format!("node {s} outside 0..{}", p.n)));
    }
    Ok(index)
}

/// `spread:RxF` (F failures in each of the first R racks), `none`, or a
/// comma list of nodes.
pub fn parse_pattern(s: &str, p: &CodeParams) -> Result<FailurePattern> {
    let s = s.trim();
    if s.is_empty() || s == "none" {
        return Ok(FailurePattern::default());
    }
    if let Some(spread) = s.strip_prefix("spread:") {
        let bad = || CliError::Param(format!("bad spread {spread:?}; use RACKSxPER_RACK"));
        let (r, f) = spread.split_once('x').ok_or_else(bad)?;
        return Ok(FailurePattern::spread(p, r.parse().map_err(|_| bad())?, f.parse().map_err(|_| bad())?)?);
    }
    let nodes = s.split(',').map(|t| parse_node(t, p)).collect::<Result<Vec<_>>>()?;
    Ok(FailurePattern::new(p, nodes)?)
}

fn unrecoverable(p: &CodeParams, pattern: &FailurePattern) -> CliError {
    CliError::Unrecoverable(format!(
        "class=unrecoverable failures={} survivors={} need={}",
        pattern.len(),
        p.n - pattern.len(),
        p.k
    ))
}

fn repair_stripe<C: RackCodec>(
    codec: C,
    store: Vec<Option<Vec<Elem>>>,
    helpers: &[usize],
) -> Result<(RepairReport, Vec<Option<Vec<Elem>>>)> {
    let mut cluster = Cluster::from_rows(codec, store)?;
    cluster.prefer_racks(helpers);
    let report = cluster.run_repair(HelperPolicy::LowestIndex)?;
    Ok((report, cluster.rows().to_vec()))
}

/// Regenerates missing chunks (or the listed ones) in place. Helper racks in
/// `helpers` are used first when eligible.
pub fn cmd_repair(dir: &Path, failed: Option<&[String]>, helpers: &[usize]) -> Result<Vec<String>> {
    let set = load(dir)?;
    let p = set.header.params;
    let failed_nodes: Vec<usize> = match failed {
        Some(list) => list.iter().map(|s| parse_node(s, &p)).collect::<Result<_>>()?,
        None => (0..p.n).filter(|i| !set.chunks.contains_key(i)).collect(),
    };
    if let Some(&bad) = helpers.iter().find(|&&e| e >= p.nbar()) {
        return Err(CliError::Param(format!("helper rack {bad} outside 0..{}", p.nbar())));
    }
    let pattern = FailurePattern::new(&p, failed_nodes)?;
    let dead = |i: usize| pattern.nodes().contains(&i) || !set.chunks.contains_key(&i);
    let all_dead = FailurePattern::new(&p, (0..p.n).filter(|&i| dead(i)))?;
    if classify(&p, &all_dead) == RepairClass::Unrecoverable {
        return Err(unrecoverable(&p, &all_dead));
    }
    let a = set.alpha;
    let mut repaired: BTreeMap<usize, Vec<Elem>> = all_dead.nodes().iter().map(|&i| (i, Vec::new())).collect();
    let mut report = None;
    // with no stripes, one all-zero stripe still yields the repair report
    for s in 0..set.stripes.max(1) {
        let store: Vec<Option<Vec<Elem>>> = (0..p.n)
            .map(|i| match set.chunks.get(&i) {
                _ if dead(i) => None,
                Some(c) if set.stripes > 0 => Some(c.symbols[s * a..(s + 1) * a].to_vec()),
                _ => Some(vec![Elem::ZERO; a]),
            })
            .collect();
        let (r, rows) = with_codec!(&set.codec, c => repair_stripe(c, store, helpers))?;
        if set.stripes > 0 {
            for (i, body) in repaired.iter_mut() {
                body.extend_from_slice(rows[*i].as_ref().expect("repaired"));
            }
        }
        report.get_or_insert(r);
    }
    let report = report.expect("at least one stripe");
    for (&i, body) in &repaired {
        let header = ChunkHeader { node: NodeId::from_index(i, p.u), ..set.header };
        chunk::write_chunk(dir, &header, set.codec.field(), body)?;
    }
    let mut out = report.lines();
    let written: Vec<String> = repaired.keys().map(usize::to_string).collect();
    out.push(format!(
        "event=files stripes={} written={}",
        set.stripes,
        if written.is_empty() { "-".to_string() } else { written.join(",") }
    ));
    Ok(out)
}

/// How `simulate` picks failures.
#[derive(Debug, Clone)]
pub enum SimulateWhat {
    /// One explicit pattern; an unrecoverable one is an error.
    Pattern(String),
    /// `trials` random patterns of `failures` nodes each.
    Random { failures: usize, trials: usize },
}

fn random_data<R: Rng>(field: &Field, len: usize, rng: &mut R) -> Vec<Elem> {
    (0..len).map(|_| Elem(rng.gen_range(0..field.order()))).collect()
}

fn simulate_one<C: RackCodec>(
    codec: C,
    pattern: &FailurePattern,
    seed: u64,
) -> Result<std::result::Result<RepairReport, RepairClass>> {
    let p = *codec.params();
    let class = classify(&p, pattern);
    if class == RepairClass::Unrecoverable {
        return Ok(Err(class));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data = random_data(codec.field(), codec.derived().file_size, &mut rng);
    let mut cluster = Cluster::new(codec, &data, true)?;
    cluster.inject(pattern);
    let policy = if seed == 0 { HelperPolicy::LowestIndex } else { HelperPolicy::Seeded(seed) };
    Ok(Ok(cluster.run_repair(policy)?))
}

/// Runs failure patterns through an in-memory cluster and reports every
/// repair, then an aggregate line.
pub fn cmd_simulate(spec: &CodeSpec, what: &SimulateWhat, seed: u64) -> Result<Vec<String>> {
    let codec = Codec::from_spec(spec)?;
    let p = *codec.params();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let patterns: Vec<FailurePattern> = match what {
        SimulateWhat::Pattern(s) => vec![parse_pattern(s, &p)?],
        SimulateWhat::Random { failures, trials } => {
            if *failures > p.n {
                return Err(CliError::Param(format!("{failures} failures among {} nodes", p.n)));
            }
            (0..*trials)
                .map(|_| FailurePattern::new(&p, sample(&mut rng, p.n, *failures)))
                .collect::<metrrc::Result<_>>()?
        }
    };
    let mut out = Vec::new();
    let mut counts: BTreeMap<RepairClass, usize> = BTreeMap::new();
    let (mut cross, mut intra) = (0, 0);
    for (trial, pattern) in patterns.iter().enumerate() {
        let trial_seed = seed.wrapping_add(trial as u64);
        match with_codec!(&codec, c => simulate_one(c, pattern, trial_seed))? {
            Ok(report) => {
                *counts.entry(report.class).or_default() += 1;
                cross += report.cross_rack_symbols;
                intra += report.intra_rack_symbols;
                out.extend(report.lines());
            }
            Err(class) => {
                *counts.entry(class).or_default() += 1;
                if matches!(what, SimulateWhat::Pattern(_)) {
                    return Err(unrecoverable(&p, pattern));
                }
                out.push(format!(
                    "event=summary class={class} failures={} racks={} cross_rack=0 intra_rack=0",
                    pattern.len(),
                    pattern.by_rack(p.u).len()
                ));
            }
        }
    }
    let count = |c| counts.get(&c).copied().unwrap_or(0);
    out.push(format!(
        "event=aggregate mode={} trials={} optimal={} naive={} unrecoverable={} cross_rack={} intra_rack={}",
        codec.mode(),
        patterns.len(),
        count(RepairClass::Optimal),
        count(RepairClass::Naive),
        count(RepairClass::Unrecoverable),
        cross,
        intra
    ));
    Ok(out)
}

/// Inclusive range like `1..3` or a single value.
pub fn parse_range(s: &str) -> Result<(u64, u64)> {
    let bad = || CliError::Param(format!("bad range {s:?}; use A..B or A"));
    let (lo, hi) = match s.split_once("..") {
        Some((a, b)) => (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?),
        None => {
            let v = s.trim().parse().map_err(|_| bad())?;
            (v, v)
        }
    };
    if lo == 0 || lo > hi {
        return Err(bad());
    }
    Ok((lo, hi))
}

/// Cut-set values over an `(α, β)` grid, optionally checked against the
/// flow-graph min-cut, followed by the two extreme points.
pub fn cmd_bounds(p: &CodeParams, alpha: (u64, u64), beta: (u64, u64), flow: bool) -> Result<Vec<String>> {
    p.validate()?;
    let mut out = Vec::new();
    for a in alpha.0..=alpha.1 {
        for b in beta.0..=beta.1 {
            let bound = general_cutset_bound(p.u, p.k, p.l, p.dbar, a, b);
            let mut line = format!("event=bound alpha={a} beta={b} cutset={bound}");
            if flow {
                line.push_str(&format!(" mincut={}", flowgraph_mincut(p, a, b)?));
            }
            out.push(line);
        }
    }
    for mode in [Mode::Msrr, Mode::Mbrr] {
        match derive(p, mode) {
            Ok(d) => {
                let bound = general_cutset_bound(p.u, p.k, p.l, p.dbar, d.alpha as u64, d.beta as u64);
                out.push(format!(
                    "event=point mode={mode} alpha={} beta={} B={} cutset={} gamma={}",
                    d.alpha,
                    d.beta,
                    d.file_size,
                    bound,
                    d.repair_bandwidth(p.dbar)
                ));
            }
            Err(e) => out.push(format!("event=point mode={mode} unavailable=\"{e}\"")),
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(n: usize, u: usize, k: usize, l: usize, d: usize) -> CodeParams {
        CodeParams::new(n, u, k, l, d).unwrap()
    }

    #[test]
    fn field_args() {
        assert_eq!("auto".parse::<FieldArg>().unwrap(), FieldArg::Auto);
        assert_eq!("p:29".parse::<FieldArg>().unwrap(), FieldArg::Explicit(FieldSpec::Prime(29)));
        assert_eq!(
            "gf2^8:0x11d".parse::<FieldArg>().unwrap(),
            FieldArg::Explicit(FieldSpec::Binary { m: 8, poly: 0x11d })
        );
        assert_eq!("GF2^8".parse::<FieldArg>().unwrap(), FieldArg::Explicit(FieldSpec::binary(8).unwrap()));
        assert!("q:7".parse::<FieldArg>().is_err());
    }

    #[test]
    fn params_table() {
        let out = cmd_params(&p(30, 5, 24, 3, 2), Some(Mode::Msrr)).unwrap();
        assert_eq!(out.len(), 1);
        assert!(out[0].contains(" B=19 "), "{}", out[0]);
        assert!(out[0].ends_with("overhead=30/19 overhead_approx=1.5789 repair_bandwidth=2"));
        let both = cmd_params(&p(8, 4, 5, 2, 0), None).unwrap();
        assert!(both[1].starts_with("mode=MBRR unavailable="));
        assert!(cmd_params(&p(8, 4, 5, 2, 0), Some(Mode::Mbrr)).is_err());
    }

    #[test]
    fn nodes_and_patterns() {
        let q = p(16, 4, 13, 2, 2);
        assert_eq!(parse_node("2:1", &q).unwrap(), 9);
        assert_eq!(parse_node("9", &q).unwrap(), 9);
        assert!(parse_node("4:0", &q).is_err());
        assert!(parse_node("1:4", &q).is_err());
        assert_eq!(parse_pattern("spread:2x2", &q).unwrap().len(), 4);
        assert_eq!(parse_pattern("0,1:1,15", &q).unwrap().nodes().iter().copied().collect::<Vec<_>>(), vec![0, 5, 15]);
        assert!(parse_pattern("none", &q).unwrap().is_empty());
        assert!(parse_pattern("spread:2", &q).is_err());
    }

    #[test]
    fn ranges() {
        assert_eq!(parse_range("1..3").unwrap(), (1, 3));
        assert_eq!(parse_range("2").unwrap(), (2, 2));
        assert!(parse_range("0..3").is_err());
        assert!(parse_range("3..1").is_err());
    }

    #[test]
    fn simulate_counts_classes() {
        let spec = CodeSpec { params: p(16, 4, 13, 2, 2), mode: Mode::Mbrr, field: FieldArg::Auto };
        let out = cmd_simulate(&spec, &SimulateWhat::Random { failures: 3, trials: 20 }, 5).unwrap();
        let last = out.last().unwrap();
        assert!(last.starts_with("event=aggregate mode=MBRR trials=20 "), "{last}");
        let err = cmd_simulate(&spec, &SimulateWhat::Pattern("0,1,2,3".into()), 0).unwrap_err();
        assert_eq!(err.exit_code(), 3);
    }

    #[test]
    fn bounds_meet_the_points() {
        let out = cmd_bounds(&p(9, 3, 6, 1, 1), (1, 2), (1, 2), true).unwrap();
        assert_eq!(out.len(), 6);
        for line in &out[..4] {
            let v: Vec<&str> = line.split(' ').collect();
            assert_eq!(v[3].trim_start_matches("cutset="), v[4].trim_start_matches("mincut="));
        }
        assert_eq!(out[4], "event=point mode=MSRR alpha=1 beta=1 B=4 cutset=4 gamma=1");
    }
}
