//! Code parameters, their derived quantities and the storage/bandwidth bounds.

use std::fmt;

use num_rational::Ratio;
use thiserror::Error;

mod flow;

pub use flow::flowgraph_mincut;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParamError {
    #[error("constraint violated: {constraint} ({detail})")]
    Constraint { constraint: &'static str, detail: String },
    #[error("instance too large for the flow-graph oracle: {0}")]
    TooLarge(String),
}

fn violated(constraint: &'static str, detail: String) -> ParamError {
    ParamError::Constraint { constraint, detail }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mode {
    Msrr,
    Mbrr,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Msrr => "MSRR",
            Mode::Mbrr => "MBRR",
        })
    }
}

/// `(n, u, k, l, d̄)`: `n = n̄u` nodes in `n̄` racks of `u`, any `k` nodes
/// recover the file, a repair uses `l` survivors of the host rack and `d̄`
/// helper racks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CodeParams {
    pub n: usize,
    pub u: usize,
    pub k: usize,
    pub l: usize,
    pub dbar: usize,
}

impl CodeParams {
    pub fn new(n: usize, u: usize, k: usize, l: usize, dbar: usize) -> Result<Self, ParamError> {
        let p = CodeParams { n, u, k, l, dbar };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), ParamError> {
        let CodeParams { n, u, k, l, dbar } = *self;
        if u == 0 || n % u != 0 {
            return Err(violated("n = n̄·u", format!("n={n} is not a multiple of u={u}")));
        }
        if n / u < 2 {
            return Err(violated("n̄ ≥ 2", format!("n̄={}", n / u)));
        }
        if k < u {
            return Err(violated("u ≤ k", format!("k={k} < u={u}")));
        }
        if k >= n {
            return Err(violated("k < n", format!("k={k} ≥ n={n}")));
        }
        if l >= u {
            return Err(violated("l < u", format!("l={l} ≥ u={u}")));
        }
        if dbar >= k / u {
            return Err(violated("d̄ < k̄", format!("d̄={dbar} ≥ k̄={}", k / u)));
        }
        Ok(())
    }

    pub fn nbar(&self) -> usize {
        self.n / self.u
    }

    pub fn kbar(&self) -> usize {
        self.k / self.u
    }

    pub fn u0(&self) -> usize {
        self.k - self.kbar() * self.u
    }

    pub fn u0_tilde(&self) -> usize {
        self.u0().min(self.l)
    }

    /// `k̄u + ũ₀`: the dimension of the Reed-Solomon supercode, i.e. how many
    /// nodes reconstruction actually needs.
    pub fn reconstruction_size(&self) -> usize {
        self.kbar() * self.u + self.u0_tilde()
    }

    pub fn rack_of(&self, node: usize) -> usize {
        node / self.u
    }
}

impl fmt::Display for CodeParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(n={}, u={}, k={}, l={}, d̄={})", self.n, self.u, self.k, self.l, self.dbar)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DerivedParams {
    pub nbar: usize,
    pub kbar: usize,
    pub u0: usize,
    pub u0_tilde: usize,
    pub mode: Mode,
    /// symbols stored per node
    pub alpha: usize,
    /// symbols sent by each helper rack per repaired node
    pub beta: usize,
    /// file size in symbols
    pub file_size: usize,
}

impl DerivedParams {
    pub fn storage_overhead(&self, n: usize) -> Ratio<u64> {
        Ratio::new((n * self.alpha) as u64, self.file_size as u64)
    }

    /// Cross-rack symbols per repaired node, `d̄β`.
    pub fn repair_bandwidth(&self, dbar: usize) -> usize {
        dbar * self.beta
    }
}

/// Extreme-point parameters, normalised to `β = 1` (or `β = 0` when `d̄ = 0`).
pub fn derive(p: &CodeParams, mode: Mode) -> Result<DerivedParams, ParamError> {
    p.validate()?;
    let (kbar, u0t, dbar, u, l) = (p.kbar(), p.u0_tilde(), p.dbar, p.u, p.l);
    let base = kbar * l + u0t;
    let (alpha, beta, file_size) = match mode {
        Mode::Msrr => (1, usize::from(dbar > 0), base + (u - l) * dbar),
        Mode::Mbrr => {
            if dbar == 0 {
                return Err(violated("d̄ ≥ 1", "MBRR needs at least one helper rack".into()));
            }
            let twice = dbar * (2 * base + (u - l) * (dbar + 1));
            assert_eq!(twice % 2, 0, "2B must be even");
            (dbar, 1, twice / 2)
        }
    };
    Ok(DerivedParams { nbar: p.nbar(), kbar, u0: p.u0(), u0_tilde: u0t, mode, alpha, beta, file_size })
}

/// Maximum file size for the given `(α, β)` over validated parameters.
pub fn cutset_bound(p: &CodeParams, alpha: u64, beta: u64) -> u64 {
    general_cutset_bound(p.u, p.k, p.l, p.dbar, alpha, beta)
}

/// The cut-set bound without the `d̄ < k̄` restriction:
/// `(k̄l + min{u₀,l})α + (u−l) Σ_{i=1}^{min{d̄,k̄}} min{(d̄−i+1)β, α}`.
pub fn general_cutset_bound(u: usize, k: usize, l: usize, dbar: usize, alpha: u64, beta: u64) -> u64 {
    let kbar = k / u;
    let u0 = k - kbar * u;
    let local = (kbar * l + u0.min(l)) as u64 * alpha;
    let remote: u64 = (1..=dbar.min(kbar)).map(|i| ((dbar - i + 1) as u64 * beta).min(alpha)).sum();
    local + (u - l) as u64 * remote
}

/// `n − B + 1 − (⌈B/r⌉ − 1)(δ − 1)`, the distance bound for a dimension-`B`
/// code with `(r, δ)` locality.
pub fn lrc_dmin_bound(n: usize, b: usize, r: usize, delta: usize) -> i64 {
    assert!(r >= 1 && b >= 1 && b <= n, "lrc bound needs 1 ≤ r and 1 ≤ B ≤ n");
    n as i64 - b as i64 + 1 - (b.div_ceil(r) as i64 - 1) * (delta as i64 - 1)
}
