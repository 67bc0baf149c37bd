//! State multipoles: the expansion of each sector block in the orthonormal
//! irreducible tensor basis
//!
//! ```text
//! T_Kq^(S) = sqrt((2K+1)/(2S+1)) Σ_{m,m'} C^{S m'}_{S m, K q} |S m'⟩⟨S m|
//! ρ_Kq^(S) = Tr[ρ^(S) T_Kq^(S)†]
//! ρ^(S)    = Σ_{K=0}^{2S} Σ_q ρ_Kq^(S) T_Kq^(S)
//! ```

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, OnceLock, RwLock};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::angular::{cg, HalfInteger};
use crate::error::{Error, Result};
use crate::state::{make_state, CMatrix, PolarizationState, SectorDensityMatrix};

/// An irreducible tensor operator `T_Kq^(S)`.
#[derive(Clone, Debug, PartialEq)]
pub struct TensorOperator {
    pub spin: HalfInteger,
    pub k: u32,
    pub q: i32,
    pub matrix: CMatrix,
}

fn check_rank(spin: HalfInteger, k: u32, q: i32) -> Result<()> {
    if spin.twice() < 0 || k as i64 > spin.twice() as i64 || q.unsigned_abs() > k {
        return Err(Error::Domain(format!(
            "tensor operator needs 0 <= K <= 2S and |q| <= K, got S = {spin}, K = {k}, q = {q}"
        )));
    }
    Ok(())
}

/// Builds `T_Kq^(S)` from Clebsch–Gordan coefficients (uncached).
pub fn tensor_operator(spin: HalfInteger, k: u32, q: i32) -> Result<TensorOperator> {
    check_rank(spin, k, q)?;
    let dim = spin.multiplicity();
    let mut matrix = CMatrix::zeros(dim, dim);
    for (col, value) in tensor_diagonal(spin, k, q)? {
        matrix[(row_of(col, q), col)] = Complex64::new(value, 0.0);
    }
    Ok(TensorOperator { spin, k, q, matrix })
}

#[inline]
fn row_of(col: usize, q: i32) -> usize {
    // m' = m + q sits q rows above m in the descending basis.
    (col as i64 - q as i64) as usize
}

/// Nonzero entries of `T_Kq^(S)` as `(column, value)`; the row is
/// `column − q`.
fn tensor_diagonal(spin: HalfInteger, k: u32, q: i32) -> Result<Vec<(usize, f64)>> {
    let dim = spin.multiplicity();
    let kk = HalfInteger::from_int(k as i32);
    let qq = HalfInteger::from_int(q);
    let norm = ((2 * k + 1) as f64 / dim as f64).sqrt();
    let mut out = Vec::new();
    for col in 0..dim {
        let row = col as i64 - q as i64;
        if row < 0 || row >= dim as i64 {
            continue;
        }
        let m = spin.projection_at(col);
        let mp = spin.projection_at(row as usize);
        let c = cg(spin, m, kk, qq, spin, mp)?;
        out.push((col, norm * c));
    }
    Ok(out)
}

/// All tensor operators of one sector in sparse form, indexed `K² + K + q`.
#[derive(Debug)]
pub struct SectorTensorBasis {
    spin: HalfInteger,
    diagonals: Vec<Vec<(usize, f64)>>,
}

impl SectorTensorBasis {
    fn build(spin: HalfInteger) -> Result<Self> {
        let k_top = spin.twice() as u32;
        let mut diagonals = Vec::with_capacity(((k_top + 1) * (k_top + 1)) as usize);
        for k in 0..=k_top {
            for q in -(k as i32)..=k as i32 {
                diagonals.push(tensor_diagonal(spin, k, q)?);
            }
        }
        Ok(SectorTensorBasis { spin, diagonals })
    }

    #[inline]
    fn entries(&self, k: u32, q: i32) -> &[(usize, f64)] {
        &self.diagonals[((k * k + k) as i64 + q as i64) as usize]
    }

    pub fn spin(&self) -> HalfInteger {
        self.spin
    }

    /// Dense `T_Kq`.
    pub fn operator(&self, k: u32, q: i32) -> Result<TensorOperator> {
        check_rank(self.spin, k, q)?;
        let dim = self.spin.multiplicity();
        let mut matrix = CMatrix::zeros(dim, dim);
        for &(col, v) in self.entries(k, q) {
            matrix[(row_of(col, q), col)] = Complex64::new(v, 0.0);
        }
        Ok(TensorOperator { spin: self.spin, k, q, matrix })
    }
}

/// Process-wide tensor basis cache; each sector basis is built once and
/// shared read-only afterwards.
pub fn sector_basis(spin: HalfInteger) -> Result<Arc<SectorTensorBasis>> {
    static CACHE: OnceLock<RwLock<HashMap<i32, Arc<SectorTensorBasis>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| RwLock::new(HashMap::new()));
    if let Some(b) = cache.read().expect("tensor cache poisoned").get(&spin.twice()) {
        return Ok(Arc::clone(b));
    }
    let built = Arc::new(SectorTensorBasis::build(spin)?);
    let mut guard = cache.write().expect("tensor cache poisoned");
    Ok(Arc::clone(guard.entry(spin.twice()).or_insert(built)))
}

/// Multipoles of one sector, `ρ_Kq` for `K ≤ k_max`, stored at `K² + K + q`.
#[derive(Clone, Debug, PartialEq)]
pub struct SectorMultipoles {
    spin: HalfInteger,
    k_max: u32,
    coeffs: Vec<Complex64>,
}

impl SectorMultipoles {
    /// All-zero coefficients through `k_max` (capped at `2S`).
    pub fn zeros(spin: HalfInteger, k_max: u32) -> Self {
        let k_max = k_max.min(spin.twice().max(0) as u32);
        SectorMultipoles {
            spin,
            k_max,
            coeffs: vec![Complex64::new(0.0, 0.0); ((k_max + 1) * (k_max + 1)) as usize],
        }
    }

    pub fn spin(&self) -> HalfInteger {
        self.spin
    }

    pub fn k_max(&self) -> u32 {
        self.k_max
    }

    /// True when every rank up to `2S` is stored.
    pub fn is_complete(&self) -> bool {
        self.k_max as i64 == self.spin.twice() as i64
    }

    pub fn get(&self, k: u32, q: i32) -> Option<Complex64> {
        if k > self.k_max || q.unsigned_abs() > k {
            return None;
        }
        Some(self.coeffs[((k * k + k) as i64 + q as i64) as usize])
    }

    /// `ρ_K,-K … ρ_K,K`.
    pub fn rank(&self, k: u32) -> Option<&[Complex64]> {
        if k > self.k_max {
            return None;
        }
        let start = (k * k) as usize;
        Some(&self.coeffs[start..start + (2 * k + 1) as usize])
    }

    pub fn set(&mut self, k: u32, q: i32, value: Complex64) -> Result<()> {
        if k > self.k_max || q.unsigned_abs() > k {
            return Err(Error::Domain(format!(
                "(K, q) = ({k}, {q}) outside sector S = {} with K <= {}",
                self.spin, self.k_max
            )));
        }
        self.coeffs[((k * k + k) as i64 + q as i64) as usize] = value;
        Ok(())
    }

    /// `Σ_{K,q} |ρ_Kq|²`.
    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(|z| z.norm_sqr()).sum()
    }
}

/// Multipole coefficients `ρ_Kq^(S)` for every stored sector.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct MultipoleTable {
    sectors: BTreeMap<HalfInteger, SectorMultipoles>,
}

/// One flat row of a serialized table: `(2S, K, q, Re ρ, Im ρ)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MultipoleRecord {
    #[serde(rename = "S2")]
    pub s2: i32,
    #[serde(rename = "K")]
    pub k: u32,
    pub q: i32,
    pub re: f64,
    pub im: f64,
}

impl MultipoleTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert_sector(&mut self, sector: SectorMultipoles) {
        self.sectors.insert(sector.spin(), sector);
    }

    pub fn sector(&self, spin: HalfInteger) -> Option<&SectorMultipoles> {
        self.sectors.get(&spin)
    }

    pub fn sectors(&self) -> impl Iterator<Item = &SectorMultipoles> {
        self.sectors.values()
    }

    pub fn get(&self, spin: HalfInteger, k: u32, q: i32) -> Option<Complex64> {
        self.sectors.get(&spin)?.get(k, q)
    }

    /// Largest rank stored in any sector.
    pub fn max_k_present(&self) -> u32 {
        self.sectors.values().map(|s| s.k_max).max().unwrap_or(0)
    }

    /// `(S, K)` pairs with `K ≤ min(2S, through)` that are not stored.
    pub fn missing(&self, through: Option<u32>) -> Vec<(HalfInteger, u32)> {
        let mut out = Vec::new();
        for s in self.sectors.values() {
            let top = through.map_or(s.spin.twice() as u32, |t| t.min(s.spin.twice() as u32));
            for k in (s.k_max + 1)..=top {
                out.push((s.spin, k));
            }
        }
        out
    }

    pub fn to_records(&self) -> Vec<MultipoleRecord> {
        let mut out = Vec::new();
        for s in self.sectors.values() {
            for k in 0..=s.k_max {
                for q in -(k as i32)..=k as i32 {
                    let z = s.get(k, q).expect("stored rank");
                    out.push(MultipoleRecord { s2: s.spin.twice(), k, q, re: z.re, im: z.im });
                }
            }
        }
        out
    }

    /// Inverse of [`to_records`](Self::to_records). A sector stores ranks up
    /// to the largest `K` among its records; absent `(K, q)` below that are
    /// zero.
    pub fn from_records(records: &[MultipoleRecord]) -> Result<Self> {
        let mut top: BTreeMap<i32, u32> = BTreeMap::new();
        for r in records {
            if r.s2 < 0 || r.k as i64 > r.s2 as i64 || r.q.unsigned_abs() > r.k {
                return Err(Error::Domain(format!(
                    "record (S2, K, q) = ({}, {}, {}) violates the coupling rules",
                    r.s2, r.k, r.q
                )));
            }
            let e = top.entry(r.s2).or_insert(0);
            *e = (*e).max(r.k);
        }
        let mut table = MultipoleTable::new();
        for (&s2, &k_max) in &top {
            table.insert_sector(SectorMultipoles::zeros(HalfInteger::from_twice(s2), k_max));
        }
        for r in records {
            let sector = table.sectors.get_mut(&HalfInteger::from_twice(r.s2)).expect("sector created");
            sector.set(r.k, r.q, Complex64::new(r.re, r.im))?;
        }
        Ok(table)
    }
}

/// Multipoles of one block through `min(k_max, 2S)`.
pub fn extract_sector(block: &SectorDensityMatrix, k_max: Option<u32>) -> Result<SectorMultipoles> {
    let spin = block.spin();
    let basis = sector_basis(spin)?;
    let top = k_max.map_or(spin.twice() as u32, |k| k.min(spin.twice() as u32));
    let mut out = SectorMultipoles::zeros(spin, top);
    let rho = block.matrix();
    for k in 0..=top {
        for q in -(k as i32)..=k as i32 {
            // Tr[ρ T†] = Σ ρ_rc conj(T_rc), T real.
            let value: Complex64 = basis
                .entries(k, q)
                .iter()
                .map(|&(col, t)| rho[(row_of(col, q), col)] * t)
                .sum();
            out.set(k, q, value)?;
        }
    }
    Ok(out)
}

/// `ρ_Kq^(S) = Tr[ρ^(S) T_Kq^(S)†]` for every sector, `K ≤ min(k_max, 2S)`.
pub fn extract_multipoles(state: &PolarizationState, k_max: Option<u32>) -> Result<MultipoleTable> {
    let mut table = MultipoleTable::new();
    for block in state.sectors() {
        table.insert_sector(extract_sector(block, k_max)?);
    }
    Ok(table)
}

/// Rebuilds the sector blocks by summing `ρ_Kq T_Kq`.
pub fn reconstruct_sector(sector: &SectorMultipoles) -> Result<CMatrix> {
    if !sector.is_complete() {
        let missing = ((sector.k_max + 1)..=sector.spin.twice() as u32)
            .map(|k| (sector.spin, k))
            .collect();
        return Err(Error::IncompleteTable { missing });
    }
    let spin = sector.spin;
    let basis = sector_basis(spin)?;
    let dim = spin.multiplicity();
    let mut rho = CMatrix::zeros(dim, dim);
    for k in 0..=sector.k_max {
        for q in -(k as i32)..=k as i32 {
            let c = sector.get(k, q).expect("stored rank");
            for &(col, t) in basis.entries(k, q) {
                rho[(row_of(col, q), col)] += c * t;
            }
        }
    }
    Ok(rho)
}

/// The state whose multipoles are `table`. Every sector must be complete.
pub fn reconstruct_state(table: &MultipoleTable) -> Result<PolarizationState> {
    let missing = table.missing(None);
    if !missing.is_empty() {
        return Err(Error::IncompleteTable { missing });
    }
    let blocks = table
        .sectors()
        .map(|s| SectorDensityMatrix::new(s.spin, reconstruct_sector(s)?))
        .collect::<Result<Vec<_>>>()?;
    make_state(blocks)
}

/// `Σ_{S,q} |ρ_Kq^(S)|²`, a rotation invariant of rank `K`.
pub fn multipole_strength(table: &MultipoleTable, k: u32) -> f64 {
    table
        .sectors()
        .filter_map(|s| s.rank(k))
        .flat_map(|rank| rank.iter())
        .map(|z| z.norm_sqr())
        .sum()
}
