//! The two physical systems: a driven two-level system with loss, and a
//! Haldane heterostructure flake (topological core, trivial ring, lossy
//! trivial outer ring) on the honeycomb lattice.

use std::collections::{BTreeSet, HashMap};
use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::{CMatrix, C64, ZERO};
use crate::localizer::MatrixTuple;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwoLevelParams {
    pub delta_e: f64,
    pub delta_gamma: f64,
    pub c: f64,
}

impl Default for TwoLevelParams {
    fn default() -> Self {
        TwoLevelParams {
            delta_e: 0.0,
            delta_gamma: 2.0,
            c: 1.0,
        }
    }
}

fn ensure_finite_params(values: &[f64], what: &str) -> Result<()> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::input(format!("{what} parameters must be finite")))
    }
}

/// `X = diag(-1, 1)` and `H = [[ΔE + iΔγ, c], [c, 0]]`.
pub fn build_tls(p: &TwoLevelParams) -> Result<MatrixTuple> {
    ensure_finite_params(&[p.delta_e, p.delta_gamma, p.c], "two-level")?;
    let x = CMatrix::from_diag(&ndarray::array![C64::new(-1.0, 0.0), C64::new(1.0, 0.0)]);
    let cc = C64::new(p.c, 0.0);
    let h = ndarray::array![[C64::new(p.delta_e, p.delta_gamma), cc], [cc, ZERO]];
    MatrixTuple::new(vec![x], vec![h])
}

/// `((ΔE + iΔγ) ± sqrt((ΔE + iΔγ)^2 + 4c^2)) / 2`, the `+` root first.
pub fn tls_eigenvalues(p: &TwoLevelParams) -> [C64; 2] {
    let a = C64::new(p.delta_e, p.delta_gamma);
    let r = (a * a + 4.0 * p.c * p.c).sqrt();
    [(a + r) / 2.0, (a - r) / 2.0]
}

/// Unit eigenvectors `[lambda, c] / |.|` of `H` as columns, in the order of
/// [`tls_eigenvalues`]. Requires `c != 0`.
pub fn tls_eigenvectors(p: &TwoLevelParams) -> Result<CMatrix> {
    if p.c == 0.0 {
        return Err(Error::Unsupported(
            "eigenvectors of the uncoupled system are the standard basis".into(),
        ));
    }
    let mut v = CMatrix::zeros((2, 2));
    for (k, lam) in tls_eigenvalues(p).iter().enumerate() {
        let col = [*lam, C64::new(p.c, 0.0)];
        let nrm = (col[0].norm_sqr() + col[1].norm_sqr()).sqrt();
        v[[0, k]] = col[0] / nrm;
        v[[1, k]] = col[1] / nrm;
    }
    Ok(v)
}

/// Couplings `c` at which the lossy two-level system (with `ΔE = 0`) has an
/// exceptional point: `±Δγ/2`, larger first, a single value when `Δγ = 0`.
pub fn exceptional_point_locus(p: &TwoLevelParams) -> Result<Vec<f64>> {
    if p.delta_e != 0.0 {
        return Err(Error::Unsupported(
            "exceptional-point locus is only available for zero detuning".into(),
        ));
    }
    let half = (p.delta_gamma / 2.0).abs();
    if half == 0.0 {
        Ok(vec![0.0])
    } else {
        Ok(vec![half, -half])
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegionParams {
    /// On-site mass.
    pub m: f64,
    /// On-site loss rate.
    pub mu: f64,
    /// Nearest-neighbour hopping.
    pub t: f64,
    /// Next-nearest-neighbour hopping.
    pub t_c: f64,
    /// Next-nearest-neighbour phase.
    pub phi: f64,
}

impl RegionParams {
    pub fn topological() -> Self {
        RegionParams {
            m: 0.0,
            mu: 0.0,
            t: 1.0,
            t_c: 0.5,
            phi: FRAC_PI_2,
        }
    }

    pub fn trivial() -> Self {
        RegionParams {
            m: 0.5 * 3f64.sqrt(),
            mu: 0.0,
            t: 1.0,
            t_c: 0.0,
            phi: FRAC_PI_2,
        }
    }

    pub fn lossy() -> Self {
        RegionParams {
            mu: 0.2,
            ..Self::trivial()
        }
    }

    fn mean(&self, o: &RegionParams) -> RegionParams {
        RegionParams {
            m: 0.5 * (self.m + o.m),
            mu: 0.5 * (self.mu + o.mu),
            t: 0.5 * (self.t + o.t),
            t_c: 0.5 * (self.t_c + o.t_c),
            phi: 0.5 * (self.phi + o.phi),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HaldaneParams {
    pub topological: RegionParams,
    pub trivial: RegionParams,
    pub lossy: RegionParams,
    /// Outermost plaquette ring (hexagonal distance from the central
    /// plaquette, in A-site spacings) of each region.
    pub r_topo: u32,
    pub r_trivial: u32,
    pub r_lossy: u32,
    pub kappa: f64,
}

impl Default for HaldaneParams {
    fn default() -> Self {
        HaldaneParams {
            topological: RegionParams::topological(),
            trivial: RegionParams::trivial(),
            lossy: RegionParams::lossy(),
            r_topo: 1,
            r_trivial: 2,
            r_lossy: 3,
            kappa: 0.5,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sublattice {
    A,
    B,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Region {
    Topological,
    Trivial,
    Lossy,
}

impl Region {
    pub fn name(self) -> &'static str {
        match self {
            Region::Topological => "topological",
            Region::Trivial => "trivial",
            Region::Lossy => "lossy",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Site {
    pub x: f64,
    pub y: f64,
    pub sublattice: Sublattice,
    pub region: Region,
}

/// A finite lattice: sites, diagonal position operators and Hamiltonian.
#[derive(Clone, Debug, PartialEq)]
pub struct LatticeModel {
    pub sites: Vec<Site>,
    pub x: CMatrix,
    pub y: CMatrix,
    pub h: CMatrix,
}

impl LatticeModel {
    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    /// `(x_min, x_max, y_min, y_max)` over all sites.
    pub fn bounding_box(&self) -> (f64, f64, f64, f64) {
        self.sites.iter().fold(
            (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY),
            |(a, b, c, d), s| (a.min(s.x), b.max(s.x), c.min(s.y), d.max(s.y)),
        )
    }

    pub fn indices_in(&self, region: Region) -> Vec<usize> {
        (0..self.len())
            .filter(|&k| self.sites[k].region == region)
            .collect()
    }
}

/// `(κX, κY; H)`.
pub fn scaled_tuple(model: &LatticeModel, kappa: f64) -> Result<MatrixTuple> {
    if !(kappa > 0.0 && kappa.is_finite()) {
        return Err(Error::input(format!("kappa must be positive, got {kappa}")));
    }
    let k = C64::new(kappa, 0.0);
    MatrixTuple::new(
        vec![model.x.mapv(|z| z * k), model.y.mapv(|z| z * k)],
        vec![model.h.clone()],
    )
}

// Sites live on integer keys (2x, 2√3 y): hexagon centres i a1 + j a2 with
// a1 = (1, 0), a2 = (1/2, √3/2), vertices at distance 1/√3 from the centre.
type Key = (i64, i64);

const SQRT3: f64 = 1.732_050_807_568_877_2;
/// Vertex offsets from a hexagon centre at angles 30°, 90°, ..., 330°.
const VERTEX_OFFSETS: [(Key, Sublattice); 6] = [
    ((1, 1), Sublattice::B),
    ((0, 2), Sublattice::A),
    ((-1, 1), Sublattice::B),
    ((-1, -1), Sublattice::A),
    ((0, -2), Sublattice::B),
    ((1, -1), Sublattice::A),
];
/// Displacements from an A site to its three B neighbours.
const A_TO_B: [Key; 3] = [(1, -1), (-1, -1), (0, 2)];
/// Same-sublattice next-nearest displacements.
const NNN: [Key; 6] = [(2, 0), (1, 3), (-1, 3), (-2, 0), (-1, -3), (1, -3)];

fn key_to_xy(k: Key) -> (f64, f64) {
    (k.0 as f64 / 2.0, k.1 as f64 / (2.0 * SQRT3))
}

fn hex_distance(i: i64, j: i64) -> i64 {
    (i.abs() + j.abs() + (i + j).abs()) / 2
}

fn neighbours(sub: Sublattice) -> [Key; 3] {
    match sub {
        Sublattice::A => A_TO_B,
        Sublattice::B => A_TO_B.map(|(a, b)| (-a, -b)),
    }
}

fn add(a: Key, b: Key) -> Key {
    (a.0 + b.0, a.1 + b.1)
}

/// Honeycomb flake made of every plaquette within hexagonal distance
/// `r_lossy` of the central one. A site belongs to the innermost region
/// containing any plaquette it touches.
pub fn build_haldane_heterostructure(p: &HaldaneParams) -> Result<LatticeModel> {
    if !(p.r_topo < p.r_trivial && p.r_trivial < p.r_lossy) {
        return Err(Error::input(format!(
            "region radii must increase strictly, got {} / {} / {}",
            p.r_topo, p.r_trivial, p.r_lossy
        )));
    }
    if !(p.kappa > 0.0 && p.kappa.is_finite()) {
        return Err(Error::input("kappa must be positive"));
    }
    for r in [&p.topological, &p.trivial, &p.lossy] {
        ensure_finite_params(&[r.m, r.mu, r.t, r.t_c, r.phi], "region")?;
    }
    let rmax = p.r_lossy as i64;
    let mut ring_of: HashMap<Key, (i64, Sublattice)> = HashMap::new();
    for i in -rmax..=rmax {
        for j in -rmax..=rmax {
            let ring = hex_distance(i, j);
            if ring > rmax {
                continue;
            }
            let centre = (2 * i + j, 3 * j);
            for (off, sub) in VERTEX_OFFSETS {
                let e = ring_of.entry(add(centre, off)).or_insert((ring, sub));
                e.0 = e.0.min(ring);
            }
        }
    }
    let region_of = |ring: i64| {
        if ring <= p.r_topo as i64 {
            Region::Topological
        } else if ring <= p.r_trivial as i64 {
            Region::Trivial
        } else {
            Region::Lossy
        }
    };
    let params_of = |r: Region| match r {
        Region::Topological => &p.topological,
        Region::Trivial => &p.trivial,
        Region::Lossy => &p.lossy,
    };

    let mut keys: Vec<Key> = ring_of.keys().copied().collect();
    keys.sort_by_key(|&(kx, ky)| (ky, kx));
    let index: HashMap<Key, usize> = keys.iter().enumerate().map(|(i, &k)| (k, i)).collect();
    let sites: Vec<Site> = keys
        .iter()
        .map(|&k| {
            let (ring, sub) = ring_of[&k];
            let (x, y) = key_to_xy(k);
            Site {
                x,
                y,
                sublattice: sub,
                region: region_of(ring),
            }
        })
        .collect();

    let n = sites.len();
    let mut h = CMatrix::zeros((n, n));
    for (k, s) in sites.iter().enumerate() {
        let rp = params_of(s.region);
        h[[k, k]] = match s.sublattice {
            Sublattice::A => C64::new(rp.m, -rp.mu),
            Sublattice::B => C64::new(-rp.m, -rp.mu),
        };
    }
    let mut nn: BTreeSet<(usize, usize)> = BTreeSet::new();
    for (k, &key) in keys.iter().enumerate() {
        let s = &sites[k];
        for d in neighbours(s.sublattice) {
            if let Some(&m) = index.get(&add(key, d)) {
                nn.insert((k.min(m), k.max(m)));
            }
        }
    }
    for &(a, b) in &nn {
        let bond = params_of(sites[a].region).mean(params_of(sites[b].region));
        h[[a, b]] += C64::new(-bond.t, 0.0);
        h[[b, a]] += C64::new(-bond.t, 0.0);
    }
    for (n_idx, &n_key) in keys.iter().enumerate() {
        let sub = sites[n_idx].sublattice;
        for d in NNN {
            let m_key = add(n_key, d);
            let Some(&m_idx) = index.get(&m_key) else {
                continue;
            };
            // hop m -> k -> n through the shared neighbour k of m and n
            let via = neighbours(sub)
                .into_iter()
                .map(|e| add(n_key, e))
                .find(|&k_key| {
                    neighbours(sub)
                        .iter()
                        .any(|&e| add(m_key, e) == k_key)
                })
                .expect("same-sublattice sites at unit distance share a neighbour");
            let (rm, rk, rn) = (key_to_xy(m_key), key_to_xy(via), key_to_xy(n_key));
            let d1 = (rk.0 - rm.0, rk.1 - rm.1);
            let d2 = (rn.0 - rk.0, rn.1 - rk.1);
            let nu = (d1.0 * d2.1 - d1.1 * d2.0).signum();
            let bond = params_of(sites[n_idx].region).mean(params_of(sites[m_idx].region));
            if bond.t_c != 0.0 {
                h[[n_idx, m_idx]] += -bond.t_c * C64::from_polar(1.0, nu * bond.phi);
            }
        }
    }
    let x = CMatrix::from_diag(&sites.iter().map(|s| C64::new(s.x, 0.0)).collect::<ndarray::Array1<_>>());
    let y = CMatrix::from_diag(&sites.iter().map(|s| C64::new(s.y, 0.0)).collect::<ndarray::Array1<_>>());
    Ok(LatticeModel { sites, x, y, h })
}

/// Bulk Haldane Hamiltonian of one region on an `l1 x l2` torus of unit
/// cells (two sites each), for reference spectra.
pub fn haldane_torus(r: &RegionParams, l1: usize, l2: usize) -> Result<CMatrix> {
    if l1 < 3 || l2 < 3 {
        return Err(Error::input("torus needs at least 3 cells per direction"));
    }
    let n = 2 * l1 * l2;
    let idx = |i: i64, j: i64, s: usize| -> usize {
        let i = i.rem_euclid(l1 as i64) as usize;
        let j = j.rem_euclid(l2 as i64) as usize;
        2 * (i * l2 + j) + s
    };
    // cell (i, j) holds A at key (2i + j, 3j + 2) and B at (2i + j, 3j + 4)
    let cell_of = |key: Key| -> (i64, i64, usize) {
        let (kx, ky) = key;
        let (s, base) = if (ky - 2).rem_euclid(3) == 0 { (0, ky - 2) } else { (1, ky - 4) };
        let j = base / 3;
        let i = (kx - j) / 2;
        (i, j, s)
    };
    let key_of = |i: i64, j: i64, s: usize| -> Key { (2 * i + j, 3 * j + if s == 0 { 2 } else { 4 }) };
    let mut h = CMatrix::zeros((n, n));
    for i in 0..l1 as i64 {
        for j in 0..l2 as i64 {
            for s in 0..2 {
                let me = idx(i, j, s);
                let sub = if s == 0 { Sublattice::A } else { Sublattice::B };
                h[[me, me]] = match sub {
                    Sublattice::A => C64::new(r.m, -r.mu),
                    Sublattice::B => C64::new(-r.m, -r.mu),
                };
                let key = key_of(i, j, s);
                for d in neighbours(sub) {
                    let (ci, cj, cs) = cell_of(add(key, d));
                    h[[me, idx(ci, cj, cs)]] += C64::new(-r.t, 0.0);
                }
                for d in NNN {
                    let m_key = add(key, d);
                    let via = neighbours(sub)
                        .into_iter()
                        .map(|e| add(key, e))
                        .find(|&k| neighbours(sub).iter().any(|&e| add(m_key, e) == k))
                        .expect("shared neighbour");
                    let (rm, rk, rn) = (key_to_xy(m_key), key_to_xy(via), key_to_xy(key));
                    let nu = ((rk.0 - rm.0) * (rn.1 - rk.1) - (rk.1 - rm.1) * (rn.0 - rk.0)).signum();
                    let (ci, cj, cs) = cell_of(m_key);
                    h[[me, idx(ci, cj, cs)]] += -r.t_c * C64::from_polar(1.0, nu * r.phi);
                }
            }
        }
    }
    Ok(h)
}

/// `|3√3 t_c sin φ - M|`: half the bulk gap at the Dirac points.
pub fn haldane_dirac_gap(r: &RegionParams) -> f64 {
    (3.0 * SQRT3 * r.t_c * (r.phi % (2.0 * PI)).sin() - r.m).abs()
}
