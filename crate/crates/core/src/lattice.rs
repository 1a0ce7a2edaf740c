//! Periodic hypercubic lattice of binary spins.
//!
//! A site holds a spin `s = ±1/2`, equivalently an occupation `n = s + 1/2`
//! (one share held or not). Sites are indexed row-major; axis `a` has stride
//! `L^a` and wraps periodically. Each undirected link is the pair
//! `(i, i + e_a)` for every site `i` and axis `a`, so there are exactly `D·N`
//! links (on a side-2 lattice the two directions along an axis reach the same
//! site and that pair is counted twice).

use std::fmt::Write as _;

use rand::Rng;
use thiserror::Error;

use crate::rng;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum LatticeError {
    #[error("lattice dimension must be at least 1")]
    ZeroDimension,
    #[error("lattice side must be at least 2, got {0}")]
    SideTooSmall(usize),
    #[error("lattice with side {side} in {dims} dimensions has too many sites")]
    Overflow { dims: usize, side: usize },
    #[error("site {site} out of range for lattice of {n_sites} sites")]
    SiteOutOfRange { site: usize, n_sites: usize },
    #[error("expected {expected} spins, got {got}")]
    SpinCount { expected: usize, got: usize },
    #[error("malformed lattice snapshot: {0}")]
    Snapshot(String),
}

/// Initial configuration of a new lattice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Init {
    AllUp,
    AllDown,
    /// Each spin up with probability 1/2, drawn from the given seed.
    Random(u64),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpinLattice {
    dims: usize,
    side: usize,
    /// `true` is spin up (`s = +1/2`, occupied).
    spins: Vec<bool>,
    /// `2·D` neighbor indices per site: forward then backward along each axis.
    neighbors: Vec<usize>,
    seed: Option<u64>,
}

impl SpinLattice {
    pub fn new(dims: usize, side: usize, init: Init) -> Result<Self, LatticeError> {
        let n = checked_sites(dims, side)?;
        let (spins, seed) = match init {
            Init::AllUp => (vec![true; n], None),
            Init::AllDown => (vec![false; n], None),
            Init::Random(seed) => {
                let mut rng = rng::stream_rng(seed, rng::STREAM_INIT);
                ((0..n).map(|_| rng.random::<bool>()).collect(), Some(seed))
            }
        };
        Ok(Self::assemble(dims, side, spins, seed))
    }

    /// Lattice with an explicit configuration in site order (`true` = up).
    pub fn from_spins(dims: usize, side: usize, spins: Vec<bool>) -> Result<Self, LatticeError> {
        let n = checked_sites(dims, side)?;
        if spins.len() != n {
            return Err(LatticeError::SpinCount { expected: n, got: spins.len() });
        }
        Ok(Self::assemble(dims, side, spins, None))
    }

    fn assemble(dims: usize, side: usize, spins: Vec<bool>, seed: Option<u64>) -> Self {
        let n = spins.len();
        let mut neighbors = Vec::with_capacity(2 * dims * n);
        for site in 0..n {
            let mut stride = 1;
            for _ in 0..dims {
                let coord = (site / stride) % side;
                let fwd = if coord + 1 == side { site - (side - 1) * stride } else { site + stride };
                let bwd = if coord == 0 { site + (side - 1) * stride } else { site - stride };
                neighbors.push(fwd);
                neighbors.push(bwd);
                stride *= side;
            }
        }
        SpinLattice { dims, side, spins, neighbors, seed }
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn n_sites(&self) -> usize {
        self.spins.len()
    }

    /// Number of links, `D·N`.
    pub fn n_links(&self) -> usize {
        self.dims * self.spins.len()
    }

    /// Seed of a random initial configuration, if any.
    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn spins(&self) -> &[bool] {
        &self.spins
    }

    pub fn is_up(&self, site: usize) -> bool {
        self.spins[site]
    }

    /// `s_i ∈ {+1/2, −1/2}`.
    pub fn spin(&self, site: usize) -> f64 {
        if self.spins[site] {
            0.5
        } else {
            -0.5
        }
    }

    /// `n_i = s_i + 1/2 ∈ {0, 1}`.
    pub fn occupation(&self, site: usize) -> u8 {
        u8::from(self.spins[site])
    }

    pub fn set_up(&mut self, site: usize, up: bool) {
        self.spins[site] = up;
    }

    pub fn flip(&mut self, site: usize) {
        self.spins[site] = !self.spins[site];
    }

    /// Global `s → −s`.
    pub fn flip_all(&mut self) {
        for s in &mut self.spins {
            *s = !*s;
        }
    }

    /// The `2·D` neighbors of `site`, forward and backward along each axis.
    pub fn neighbors(&self, site: usize) -> &[usize] {
        let k = 2 * self.dims;
        &self.neighbors[site * k..(site + 1) * k]
    }

    /// Number of occupied sites `n = Σ n_i`.
    pub fn occupied(&self) -> usize {
        self.spins.iter().filter(|&&s| s).count()
    }

    fn sign(&self, site: usize) -> i64 {
        if self.spins[site] {
            1
        } else {
            -1
        }
    }

    /// `Σ_links σ_i σ_j` with `σ = 2s = ±1`.
    fn link_sign_sum(&self) -> i64 {
        let k = 2 * self.dims;
        (0..self.n_sites())
            .map(|i| {
                let si = self.sign(i);
                // forward neighbors only: each link once
                (0..self.dims).map(|a| si * self.sign(self.neighbors[i * k + 2 * a])).sum::<i64>()
            })
            .sum()
    }

    /// Lattice-gas energy `−(1/D)·Σ_links n_i n_j + μ·Σ_i n_i`.
    pub fn occupation_energy(&self, mu: f64) -> f64 {
        let k = 2 * self.dims;
        let mut occupied_links = 0usize;
        for i in 0..self.n_sites() {
            if self.spins[i] {
                occupied_links += (0..self.dims).filter(|&a| self.spins[self.neighbors[i * k + 2 * a]]).count();
            }
        }
        -(occupied_links as f64) / self.dims as f64 + mu * self.occupied() as f64
    }

    /// Ising energy `−(1/D)·Σ_links s_i s_j`.
    pub fn spin_energy(&self) -> f64 {
        -(self.link_sign_sum() as f64) / (4.0 * self.dims as f64)
    }

    /// Energy change from flipping `site`, `(2/D)·s_site·Σ_neighbors s_j`.
    pub fn flip_delta_energy(&self, site: usize) -> Result<f64, LatticeError> {
        if site >= self.n_sites() {
            return Err(LatticeError::SiteOutOfRange { site, n_sites: self.n_sites() });
        }
        Ok(self.flip_delta_unchecked(site))
    }

    #[inline]
    pub(crate) fn flip_delta_unchecked(&self, site: usize) -> f64 {
        let sum: i64 = self.neighbors(site).iter().map(|&j| self.sign(j)).sum();
        (self.sign(site) * sum) as f64 / (2.0 * self.dims as f64)
    }

    /// Total magnetization `M = Σ s_i = n − N/2`.
    pub fn magnetization(&self) -> f64 {
        self.occupied() as f64 - self.n_sites() as f64 / 2.0
    }

    /// Share price `P = n / n₀` with long-term holding `n₀ = N/2`.
    pub fn implied_price(&self) -> f64 {
        self.occupied() as f64 / (self.n_sites() as f64 / 2.0)
    }

    /// Text snapshot: a header line `D L seed` (`-` when there is no seed)
    /// followed by one line of `N` characters `0`/`1` in site order.
    pub fn to_snapshot(&self) -> String {
        let mut out = String::with_capacity(self.n_sites() + 32);
        let seed = self.seed.map_or_else(|| "-".to_string(), |s| s.to_string());
        writeln!(out, "{} {} {}", self.dims, self.side, seed).unwrap();
        out.extend(self.spins.iter().map(|&s| if s { '1' } else { '0' }));
        out.push('\n');
        out
    }

    pub fn from_snapshot(text: &str) -> Result<Self, LatticeError> {
        let bad = |m: &str| LatticeError::Snapshot(m.to_string());
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| bad("empty input"))?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(bad("header must be `D L seed`"));
        }
        let dims: usize = fields[0].parse().map_err(|_| bad("bad dimension"))?;
        let side: usize = fields[1].parse().map_err(|_| bad("bad side"))?;
        let seed = match fields[2] {
            "-" => None,
            s => Some(s.parse::<u64>().map_err(|_| bad("bad seed"))?),
        };
        let body = lines.next().ok_or_else(|| bad("missing spin line"))?;
        let spins = body
            .chars()
            .map(|c| match c {
                '1' => Ok(true),
                '0' => Ok(false),
                _ => Err(bad("spin characters must be 0 or 1")),
            })
            .collect::<Result<Vec<_>, _>>()?;
        let mut lattice = Self::from_spins(dims, side, spins)?;
        lattice.seed = seed;
        Ok(lattice)
    }
}

fn checked_sites(dims: usize, side: usize) -> Result<usize, LatticeError> {
    if dims == 0 {
        return Err(LatticeError::ZeroDimension);
    }
    if side < 2 {
        return Err(LatticeError::SideTooSmall(side));
    }
    let overflow = LatticeError::Overflow { dims, side };
    let n = u32::try_from(dims).ok().and_then(|d| side.checked_pow(d)).ok_or(overflow.clone())?;
    // the neighbor table holds 2·D·N entries
    n.checked_mul(2 * dims).ok_or(overflow)?;
    Ok(n)
}
