use crate::error::{Error, Result};
use crate::params::CodeParams;

/// Which nodes failed in one host rack and who helps repair them. Slots are
/// positions inside the host rack, racks are rack indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RepairRequest {
    pub host: usize,
    pub failed: Vec<usize>,
    pub local_helpers: Vec<usize>,
    pub helper_racks: Vec<usize>,
}

impl RepairRequest {
    /// Failed slots plus the first `l` survivors and the first `d̄` other racks.
    pub fn lowest(p: &CodeParams, host: usize, failed: &[usize]) -> Self {
        let local_helpers = (0..p.u).filter(|g| !failed.contains(g)).take(p.l).collect();
        let helper_racks = (0..p.nbar()).filter(|&e| e != host).take(p.dbar).collect();
        RepairRequest { host, failed: failed.to_vec(), local_helpers, helper_racks }
    }

    /// Checks sizes and disjointness; returns the idle slots, i.e. those that
    /// are neither failed nor local helpers.
    pub fn validate(&self, p: &CodeParams) -> Result<Vec<usize>> {
        let bad = |msg: String| Err(Error::InvalidRepair(msg));
        if self.host >= p.nbar() {
            return bad(format!("host rack {} outside 0..{}", self.host, p.nbar()));
        }
        let h = self.failed.len();
        if h == 0 || h > p.u - p.l {
            return bad(format!("{h} failed nodes, need 1..={}", p.u - p.l));
        }
        if self.local_helpers.len() != p.l {
            return bad(format!("{} local helpers, need exactly l = {}", self.local_helpers.len(), p.l));
        }
        if self.helper_racks.len() != p.dbar {
            return bad(format!("{} helper racks, need exactly d̄ = {}", self.helper_racks.len(), p.dbar));
        }
        let mut slots: Vec<usize> = self.failed.iter().chain(&self.local_helpers).copied().collect();
        if slots.iter().any(|&g| g >= p.u) {
            return bad(format!("slot outside 0..{}", p.u));
        }
        slots.sort_unstable();
        if slots.windows(2).any(|w| w[0] == w[1]) {
            return bad("failed and local helper slots overlap or repeat".into());
        }
        let mut racks = self.helper_racks.clone();
        racks.sort_unstable();
        if racks.windows(2).any(|w| w[0] == w[1]) {
            return bad("helper racks repeat".into());
        }
        if racks.iter().any(|&e| e >= p.nbar()) {
            return bad(format!("helper rack outside 0..{}", p.nbar()));
        }
        if racks.contains(&self.host) {
            return bad("helper racks include the host rack".into());
        }
        Ok((0..p.u).filter(|g| slots.binary_search(g).is_err()).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        let p = CodeParams::new(30, 5, 24, 3, 2).unwrap();
        let ok = RepairRequest { host: 0, failed: vec![0], local_helpers: vec![2, 3, 4], helper_racks: vec![1, 2] };
        assert_eq!(ok.validate(&p).unwrap(), vec![1]);
        let lowest = RepairRequest::lowest(&p, 0, &[0]);
        assert_eq!(lowest.local_helpers, vec![1, 2, 3]);
        assert_eq!(lowest.helper_racks, vec![1, 2]);
        for bad in [
            RepairRequest { helper_racks: vec![0, 1], ..ok.clone() },
            RepairRequest { local_helpers: vec![0, 3, 4], ..ok.clone() },
            RepairRequest { local_helpers: vec![3, 4], ..ok.clone() },
            RepairRequest { failed: vec![], ..ok.clone() },
            RepairRequest { failed: vec![0, 1, 2], local_helpers: vec![3, 4, 1], ..ok.clone() },
            RepairRequest { helper_racks: vec![1, 1], ..ok.clone() },
            RepairRequest { host: 6, ..ok.clone() },
        ] {
            assert!(matches!(bad.validate(&p), Err(Error::InvalidRepair(_))), "{bad:?}");
        }
    }
}
