//! A deterministic rack-aware cluster: nodes sit on an `n̄ × u` grid, failure
//! patterns are injected, classified and repaired rack by rack, and every
//! symbol that moves is counted.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::codec::{NodeRows, RackCodec};
use crate::error::{Error, Result};
use crate::gf::Elem;
use crate::layout::NodeId;
use crate::params::CodeParams;
use crate::repair::RepairRequest;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RepairClass {
    /// Each failed rack can be repaired from `l` local nodes and `d̄` racks.
    Optimal,
    /// Only a full reconstruction from `k` survivors works.
    Naive,
    Unrecoverable,
}

impl fmt::Display for RepairClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RepairClass::Optimal => "optimal",
            RepairClass::Naive => "naive",
            RepairClass::Unrecoverable => "unrecoverable",
        })
    }
}

/// A set of failed node indices.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FailurePattern {
    failed: BTreeSet<usize>,
}

impl FailurePattern {
    pub fn new(p: &CodeParams, nodes: impl IntoIterator<Item = usize>) -> Result<Self> {
        let failed: BTreeSet<usize> = nodes.into_iter().collect();
        if let Some(&bad) = failed.iter().find(|&&i| i >= p.n) {
            return Err(Error::OutOfRange(format!("node {bad} outside 0..{}", p.n)));
        }
        Ok(FailurePattern { failed })
    }

    pub fn from_ids(p: &CodeParams, ids: impl IntoIterator<Item = NodeId>) -> Result<Self> {
        let mut nodes = Vec::new();
        for id in ids {
            if id.rack >= p.nbar() || id.slot >= p.u {
                return Err(Error::OutOfRange(format!("node {id} outside the {}x{} grid", p.nbar(), p.u)));
            }
            nodes.push(id.index(p.u));
        }
        Self::new(p, nodes)
    }

    /// `per_rack` failures in each of the racks `0..racks`, at the lowest slots.
    pub fn spread(p: &CodeParams, racks: usize, per_rack: usize) -> Result<Self> {
        if racks > p.nbar() || per_rack > p.u {
            return Err(Error::OutOfRange(format!(
                "{racks} racks x {per_rack} failures on a {}x{} grid",
                p.nbar(),
                p.u
            )));
        }
        Self::new(p, (0..racks).flat_map(|e| (0..per_rack).map(move |g| e * p.u + g)))
    }

    pub fn nodes(&self) -> &BTreeSet<usize> {
        &self.failed
    }

    pub fn len(&self) -> usize {
        self.failed.len()
    }

    pub fn is_empty(&self) -> bool {
        self.failed.is_empty()
    }

    /// Failed slots per rack, for racks with at least one failure.
    pub fn by_rack(&self, u: usize) -> BTreeMap<usize, Vec<usize>> {
        let mut out: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for &i in &self.failed {
            let id = NodeId::from_index(i, u);
            out.entry(id.rack).or_default().push(id.slot);
        }
        out
    }
}

pub fn classify(p: &CodeParams, pattern: &FailurePattern) -> RepairClass {
    let racks = pattern.by_rack(p.u);
    let optimal = racks.len() <= p.nbar() - p.dbar
        && racks.values().all(|slots| slots.len() <= p.u - p.l && p.u - slots.len() >= p.l);
    if optimal {
        RepairClass::Optimal
    } else if p.n - pattern.len() >= p.k {
        RepairClass::Naive
    } else {
        RepairClass::Unrecoverable
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HelperPolicy {
    /// Lowest-index eligible racks and lowest-index surviving slots.
    #[default]
    LowestIndex,
    /// A seeded shuffle of the eligible racks and surviving slots.
    Seeded(u64),
}

/// One repair: either one host rack (optimal) or the whole pattern (naive).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RepairEvent {
    pub class: RepairClass,
    /// The host rack, or the reconstruction site for a naive repair.
    pub rack: usize,
    /// Repaired node indices.
    pub failed: Vec<usize>,
    pub helper_racks: Vec<usize>,
    /// Node indices read inside `rack`.
    pub local_helpers: Vec<usize>,
    pub cross_rack: usize,
    pub intra_rack: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RepairReport {
    pub class: RepairClass,
    pub failures: usize,
    /// Racks with at least one failure.
    pub failed_racks: usize,
    pub cross_rack_symbols: usize,
    pub intra_rack_symbols: usize,
    pub events: Vec<RepairEvent>,
}

fn join(values: &[usize]) -> String {
    if values.is_empty() {
        return "-".into();
    }
    values.iter().map(usize::to_string).collect::<Vec<_>>().join(",")
}

impl RepairEvent {
    pub fn to_line(&self) -> String {
        format!(
            "event=repair class={} rack={} failed={} helper_racks={} local={} cross_rack={} intra_rack={}",
            self.class,
            self.rack,
            join(&self.failed),
            join(&self.helper_racks),
            join(&self.local_helpers),
            self.cross_rack,
            self.intra_rack
        )
    }
}

impl RepairReport {
    pub fn summary_line(&self) -> String {
        format!(
            "event=summary class={} failures={} racks={} cross_rack={} intra_rack={}",
            self.class, self.failures, self.failed_racks, self.cross_rack_symbols, self.intra_rack_symbols
        )
    }

    /// One line per event, then the summary.
    pub fn lines(&self) -> Vec<String> {
        let mut out: Vec<String> = self.events.iter().map(RepairEvent::to_line).collect();
        out.push(self.summary_line());
        out
    }
}

/// Nodes on the grid, optionally with a golden copy of what they should hold.
pub struct Cluster<C: RackCodec> {
    codec: C,
    reference: Option<NodeRows>,
    store: Vec<Option<Vec<Elem>>>,
    preferred_racks: Vec<usize>,
}

impl<C: RackCodec> Cluster<C> {
    pub fn new(codec: C, data: &[Elem], systematic: bool) -> Result<Self> {
        let reference = codec.encode_data(data, systematic)?;
        let store = reference.iter().cloned().map(Some).collect();
        Ok(Cluster { codec, reference: Some(reference), store, preferred_racks: Vec::new() })
    }

    /// A cluster over stored rows with no golden copy; `None` marks a dead
    /// node. Repairs are then only checked by the codec itself.
    pub fn from_rows(codec: C, store: Vec<Option<Vec<Elem>>>) -> Result<Self> {
        let p = codec.params();
        let alpha = codec.derived().alpha;
        if store.len() != p.n {
            return Err(Error::OutOfRange(format!("{} rows for {} nodes", store.len(), p.n)));
        }
        if let Some(i) = store.iter().position(|r| r.as_ref().is_some_and(|r| r.len() != alpha)) {
            return Err(Error::OutOfRange(format!("node {i} holds the wrong number of symbols")));
        }
        Ok(Cluster { codec, reference: None, store, preferred_racks: Vec::new() })
    }

    /// Racks to try first as helpers, in order, whenever they are eligible.
    pub fn prefer_racks(&mut self, racks: &[usize]) {
        self.preferred_racks = racks.to_vec();
    }

    /// Stored rows, `None` for dead nodes.
    pub fn rows(&self) -> &[Option<Vec<Elem>>] {
        &self.store
    }

    pub fn codec(&self) -> &C {
        &self.codec
    }

    pub fn params(&self) -> &CodeParams {
        self.codec.params()
    }

    pub fn alive(&self, node: usize) -> bool {
        self.store[node].is_some()
    }

    pub fn failed(&self) -> FailurePattern {
        FailurePattern { failed: (0..self.store.len()).filter(|&i| !self.alive(i)).collect() }
    }

    /// Marks nodes dead and drops their contents. Injecting a dead node again
    /// changes nothing.
    pub fn inject(&mut self, pattern: &FailurePattern) {
        for &i in pattern.nodes() {
            self.store[i] = None;
        }
    }

    /// Whether every node is alive and, when a golden copy exists, holds its
    /// original row.
    pub fn is_healthy(&self) -> bool {
        match &self.reference {
            Some(reference) => self.store.iter().zip(reference).all(|(s, r)| s.as_ref() == Some(r)),
            None => self.store.iter().all(Option::is_some),
        }
    }

    /// Repairs every dead node, host racks in ascending order; racks repaired
    /// earlier help later ones.
    pub fn run_repair(&mut self, policy: HelperPolicy) -> Result<RepairReport> {
        let p = *self.params();
        let pattern = self.failed();
        let class = classify(&p, &pattern);
        let events = match class {
            RepairClass::Unrecoverable => {
                return Err(Error::Unrecoverable(format!(
                    "{} of {} nodes survive, need {}",
                    p.n - pattern.len(),
                    p.n,
                    p.k
                )))
            }
            RepairClass::Optimal => self.repair_optimal(&pattern, policy)?,
            RepairClass::Naive => vec![self.repair_naive(&pattern)?],
        };
        if !self.is_healthy() {
            return Err(Error::Inconsistent);
        }
        Ok(RepairReport {
            class,
            failures: pattern.len(),
            failed_racks: pattern.by_rack(p.u).len(),
            cross_rack_symbols: events.iter().map(|e| e.cross_rack).sum(),
            intra_rack_symbols: events.iter().map(|e| e.intra_rack).sum(),
            events,
        })
    }

    fn row(&self, node: usize) -> &[Elem] {
        self.store[node].as_deref().expect("reading a live node")
    }

    fn repair_optimal(&mut self, pattern: &FailurePattern, policy: HelperPolicy) -> Result<Vec<RepairEvent>> {
        let p = *self.params();
        let alpha = self.codec.derived().alpha;
        let mut rng = match policy {
            HelperPolicy::Seeded(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
            HelperPolicy::LowestIndex => None,
        };
        let mut events = Vec::new();
        for (host, failed) in pattern.by_rack(p.u) {
            let healthy = |e: usize| (0..p.u).all(|g| self.alive(e * p.u + g));
            let mut racks: Vec<usize> = (0..p.nbar()).filter(|&e| e != host && healthy(e)).collect();
            let mut slots: Vec<usize> = (0..p.u).filter(|g| !failed.contains(g)).collect();
            if let Some(rng) = rng.as_mut() {
                racks.shuffle(rng);
                slots.shuffle(rng);
            }
            let preferred: Vec<usize> = self.preferred_racks.iter().copied().filter(|e| racks.contains(e)).collect();
            racks.retain(|e| !preferred.contains(e));
            racks.splice(0..0, preferred);
            racks.truncate(p.dbar);
            slots.truncate(p.l);
            let request = RepairRequest { host, failed: failed.clone(), local_helpers: slots, helper_racks: racks };
            let plan = self.codec.plan(&request)?;
            let mut contributions = Vec::with_capacity(p.dbar);
            let mut intra = 0;
            for &e in &request.helper_racks {
                let rows: Vec<Vec<Elem>> = (0..p.u).map(|g| self.row(e * p.u + g).to_vec()).collect();
                contributions.push((e, self.codec.contribution(&plan, e, &rows)?));
                // the other u − 1 nodes hand their rows to the one that sends
                intra += (p.u - 1) * alpha;
            }
            let local: Vec<Vec<Elem>> =
                request.local_helpers.iter().map(|&g| self.row(host * p.u + g).to_vec()).collect();
            intra += local.iter().map(Vec::len).sum::<usize>();
            let cross = contributions.iter().map(|(_, s)| s.len()).sum();
            let rows = self.codec.finish(&plan, &contributions, &local)?;
            for (&g, row) in failed.iter().zip(rows) {
                self.store[host * p.u + g] = Some(row);
            }
            events.push(RepairEvent {
                class: RepairClass::Optimal,
                rack: host,
                failed: failed.iter().map(|&g| host * p.u + g).collect(),
                helper_racks: request.helper_racks.clone(),
                local_helpers: request.local_helpers.iter().map(|&g| host * p.u + g).collect(),
                cross_rack: cross,
                intra_rack: intra,
            });
        }
        Ok(events)
    }

    /// Reads `k` survivors at the lowest-index rack that still has one,
    /// local nodes first, and rebuilds everything.
    fn repair_naive(&mut self, pattern: &FailurePattern) -> Result<RepairEvent> {
        let p = *self.params();
        let alive: Vec<usize> = (0..p.n).filter(|&i| self.alive(i)).collect();
        let site = alive.first().map(|&i| p.rack_of(i)).ok_or_else(|| Error::Unrecoverable("no survivors".into()))?;
        let mut order: Vec<usize> = alive.iter().copied().filter(|&i| p.rack_of(i) == site).collect();
        order.extend(alive.iter().copied().filter(|&i| p.rack_of(i) != site));
        order.truncate(p.k);
        let read: BTreeMap<usize, Vec<Elem>> = order.iter().map(|&i| (i, self.row(i).to_vec())).collect();
        let (mut cross, mut intra) = (0, 0);
        for (&i, row) in &read {
            if p.rack_of(i) == site {
                intra += row.len();
            } else {
                cross += row.len();
            }
        }
        let rows = self.codec.reconstruct_rows(&read)?;
        for &i in pattern.nodes() {
            self.store[i] = Some(rows[i].clone());
        }
        let helper_racks: BTreeSet<usize> = order.iter().map(|&i| p.rack_of(i)).filter(|&e| e != site).collect();
        Ok(RepairEvent {
            class: RepairClass::Naive,
            rack: site,
            failed: pattern.nodes().iter().copied().collect(),
            helper_racks: helper_racks.into_iter().collect(),
            local_helpers: order.iter().copied().filter(|&i| p.rack_of(i) == site).collect(),
            cross_rack: cross,
            intra_rack: intra,
        })
    }
}
