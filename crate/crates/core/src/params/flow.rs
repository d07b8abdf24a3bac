//! Information-flow graph for the worst-case data collector, solved by max-flow
//! (Dinic, from petgraph).
//!
//! The collector reads `k̄` whole racks and then `u₀` nodes of one more rack.
//! In every rack it reads, the first `l` nodes are originals and the rest are
//! replacement nodes, each repaired from those `l` nodes, the racks read
//! before it (up to `d̄` of them) and as many fresh helper racks as are needed
//! to reach `d̄`. Node storage is split into in/out vertices joined by an
//! `α` edge, helper racks feed `β` per replacement node and intra-rack edges
//! are unbounded.

use petgraph::algo::dinics;
use petgraph::graph::{DiGraph, NodeIndex};

use super::{CodeParams, ParamError};

pub const MAX_RACKS: usize = 8;
pub const MAX_RACK_SIZE: usize = 5;

#[derive(Default)]
struct FlowNetwork {
    graph: DiGraph<(), u64>,
}

impl FlowNetwork {
    fn vertex(&mut self) -> NodeIndex {
        self.graph.add_node(())
    }

    fn edge(&mut self, from: NodeIndex, to: NodeIndex, cap: u64) {
        self.graph.add_edge(from, to, cap);
    }

    fn max_flow(&self, s: NodeIndex, t: NodeIndex) -> u64 {
        dinics(&self.graph, s, t).0
    }
}

struct Builder {
    net: FlowNetwork,
    source: NodeIndex,
    alpha: u64,
    inf: u64,
}

struct Rack {
    outs: Vec<NodeIndex>,
    hub: NodeIndex,
}

impl Builder {
    fn original(&mut self) -> (NodeIndex, NodeIndex) {
        let (i, o) = (self.net.vertex(), self.net.vertex());
        self.net.edge(self.source, i, self.inf);
        self.net.edge(i, o, self.alpha);
        (i, o)
    }

    fn hub(&mut self, outs: &[NodeIndex]) -> NodeIndex {
        let hub = self.net.vertex();
        for &o in outs {
            self.net.edge(o, hub, self.inf);
        }
        hub
    }

    fn fresh_rack(&mut self, u: usize) -> NodeIndex {
        let outs: Vec<NodeIndex> = (0..u).map(|_| self.original().1).collect();
        self.hub(&outs)
    }
}

/// Min cut between source and the worst-case collector; equals the cut-set
/// bound when the construction is tight.
pub fn flowgraph_mincut(p: &CodeParams, alpha: u64, beta: u64) -> Result<u64, ParamError> {
    p.validate()?;
    if p.nbar() > MAX_RACKS || p.u > MAX_RACK_SIZE {
        return Err(ParamError::TooLarge(format!("n̄={} u={}", p.nbar(), p.u)));
    }
    let (u, l, dbar, kbar, u0) = (p.u, p.l, p.dbar, p.kbar(), p.u0());
    // exceeds the total capacity of every finite edge in the graph
    let inf = (p.n as u64 + (kbar as u64 + 1) * (dbar as u64 + 1) * u as u64 + 1) * (alpha + beta + 1);
    let mut net = FlowNetwork::default();
    let source = net.vertex();
    let collector = net.vertex();
    let mut b = Builder { net, source, alpha, inf };
    let mut read: Vec<Rack> = Vec::new();

    let racks = kbar + usize::from(u0 > 0);
    for i in 0..racks {
        let width = if i < kbar { u } else { u0 };
        let mut outs = Vec::with_capacity(u);
        let originals = l.min(width);
        for _ in 0..originals {
            outs.push(b.original().1);
        }
        if width > l {
            let earlier: Vec<NodeIndex> = read.iter().take(dbar).map(|r| r.hub).collect();
            let fresh: Vec<NodeIndex> = (0..dbar.saturating_sub(earlier.len())).map(|_| b.fresh_rack(u)).collect();
            for _ in l..width {
                let (vin, vout) = (b.net.vertex(), b.net.vertex());
                b.net.edge(vin, vout, alpha);
                for &local in &outs[..l] {
                    b.net.edge(local, vin, inf);
                }
                for &hub in earlier.iter().chain(&fresh) {
                    b.net.edge(hub, vin, beta);
                }
                outs.push(vout);
            }
        }
        for &o in &outs {
            b.net.edge(o, collector, inf);
        }
        let hub = b.hub(&outs);
        read.push(Rack { outs, hub });
    }
    debug_assert_eq!(read.iter().map(|r| r.outs.len()).sum::<usize>(), p.k);
    Ok(b.net.max_flow(source, collector))
}
