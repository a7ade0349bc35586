//! Value-field storage and the binary artifact format.
//!
//! A solved field is a scalar per (q, r, i, j, k); switching maps hold the
//! optimal mode per player at the same index set. Both serialize into a
//! single artifact so `simulate` can run without re-solving. The decoder
//! treats its input as untrusted: every header field is validated, lengths
//! are checked with overflow-safe arithmetic before any allocation, and the
//! payload is scanned for non-finite values.

use crate::error::{Error, Result};
use crate::grid::Grid3;
use crate::model::Tack;
use crate::qvi1d::BoundaryTable;

/// Magic bytes of the artifact format ("MatchRace Value Field").
pub const FIELD_MAGIC: [u8; 4] = *b"MRVF";
/// Current artifact format version.
pub const FIELD_VERSION: u16 = 1;
/// Decoder guard: largest accepted n_cells. The payload of a field this size
/// is ~2.2 TB, far beyond anything the solver produces; the bound exists so
/// a corrupt header cannot request an absurd allocation (the exact length
/// check below already caps allocations at the input size).
pub const MAX_DECODE_CELLS: u32 = 4096;

/// Discounted value of the game, one scalar per node and mode pair.
///
/// Storage is row-major in (q, r, i, j, k): mode pair outermost, wind-angle
/// index innermost.
#[derive(Debug, Clone, PartialEq)]
pub struct ValueField {
    pub grid: Grid3,
    values: Vec<f64>,
}

impl ValueField {
    /// A field holding `value` everywhere.
    pub fn constant(grid: Grid3, value: f64) -> Self {
        let len = 4 * grid.node_count();
        ValueField {
            grid,
            values: vec![value; len],
        }
    }

    /// The decoupled far-field guess: v(i, j, k, q, r) = table(q, r, k) at
    /// every node, which is exact on the box faces and a good interior seed.
    pub fn from_boundary(grid: Grid3, table: &BoundaryTable) -> Self {
        assert_eq!(
            table.n_nodes,
            grid.n_nodes(),
            "boundary table resolution does not match the grid"
        );
        let nodes = grid.node_count();
        let m = grid.n_nodes();
        let mut values = vec![0.0; 4 * nodes];
        for q in Tack::BOTH {
            for r in Tack::BOTH {
                let pair = table.mode_pair(q, r);
                let base = (q.index() * 2 + r.index()) * nodes;
                for i in 0..m {
                    for j in 0..m {
                        let row = base + (i * m + j) * m;
                        values[row..row + m].copy_from_slice(pair);
                    }
                }
            }
        }
        ValueField { grid, values }
    }

    /// Flat offset of a mode pair's block.
    #[inline]
    pub fn pair_offset(&self, q: Tack, r: Tack) -> usize {
        (q.index() * 2 + r.index()) * self.grid.node_count()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize, q: Tack, r: Tack) -> f64 {
        self.values[self.pair_offset(q, r) + self.grid.flat(i, j, k)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, k: usize, q: Tack, r: Tack, value: f64) {
        let idx = self.pair_offset(q, r) + self.grid.flat(i, j, k);
        self.values[idx] = value;
    }

    /// Full backing slice, mode-pair-major.
    #[inline]
    pub fn raw(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn raw_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    /// Largest absolute value over all nodes and mode pairs.
    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |acc, v| acc.max(v.abs()))
    }

    /// Largest absolute nodewise difference against another field.
    pub fn max_abs_diff(&self, other: &ValueField) -> f64 {
        assert_eq!(self.values.len(), other.values.len());
        self.values
            .iter()
            .zip(&other.values)
            .fold(0.0, |acc, (a, b)| acc.max((a - b).abs()))
    }
}

/// Optimal switching decision per node and mode pair, for both players.
///
/// `s_a` holds the mode player A should be in at (i, j, k, q, r); it is
/// always q itself or its complement. `s_b` likewise for player B and r.
#[derive(Debug, Clone, PartialEq)]
pub struct SwitchingMaps {
    pub grid: Grid3,
    s_a: Vec<u8>,
    s_b: Vec<u8>,
}

impl SwitchingMaps {
    pub fn new(grid: Grid3, s_a: Vec<u8>, s_b: Vec<u8>) -> Self {
        let len = 4 * grid.node_count();
        assert_eq!(s_a.len(), len);
        assert_eq!(s_b.len(), len);
        SwitchingMaps { grid, s_a, s_b }
    }

    #[inline]
    fn index(&self, i: usize, j: usize, k: usize, q: Tack, r: Tack) -> usize {
        (q.index() * 2 + r.index()) * self.grid.node_count() + self.grid.flat(i, j, k)
    }

    /// Player A's optimal mode at the node, given current modes (q, r).
    #[inline]
    pub fn a_target(&self, i: usize, j: usize, k: usize, q: Tack, r: Tack) -> Tack {
        Tack::from_number(self.s_a[self.index(i, j, k, q, r)]).expect("map byte in {1,2}")
    }

    /// Player B's optimal mode at the node, given current modes (q, r).
    #[inline]
    pub fn b_target(&self, i: usize, j: usize, k: usize, q: Tack, r: Tack) -> Tack {
        Tack::from_number(self.s_b[self.index(i, j, k, q, r)]).expect("map byte in {1,2}")
    }

    pub fn raw_a(&self) -> &[u8] {
        &self.s_a
    }

    pub fn raw_b(&self) -> &[u8] {
        &self.s_b
    }
}

/// Sweep strategies of the 3-D solver.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepMode {
    /// In-place sweeps using freshest values; single-threaded; fastest
    /// convergence.
    GaussSeidel,
    /// Two-buffer sweeps reading only the previous iterate; parallelizable
    /// with bitwise-reproducible results regardless of thread count.
    Jacobi,
}

impl SweepMode {
    fn to_byte(self) -> u8 {
        match self {
            SweepMode::GaussSeidel => 0,
            SweepMode::Jacobi => 1,
        }
    }

    fn from_byte(b: u8) -> Option<Self> {
        match b {
            0 => Some(SweepMode::GaussSeidel),
            1 => Some(SweepMode::Jacobi),
            _ => None,
        }
    }
}

impl std::fmt::Display for SweepMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SweepMode::GaussSeidel => write!(f, "gauss-seidel"),
            SweepMode::Jacobi => write!(f, "jacobi"),
        }
    }
}

/// A solved field with its switching maps and provenance, as persisted to
/// disk.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldArtifact {
    pub field: ValueField,
    pub maps: SwitchingMaps,
    /// SHA-256 over the parameters the field depends on.
    pub param_hash: [u8; 32],
    pub converged: bool,
    pub mode: SweepMode,
    pub iterations: u64,
    pub residual: f64,
    pub tol: f64,
}

const HEADER_LEN: usize = 4 + 2 + 1 + 1 + 4 + 3 * 8 + 32 + 8 + 8 + 8;

impl FieldArtifact {
    /// Serialize to the binary artifact format (all integers and floats
    /// little-endian). The encoding is canonical: identical artifacts yield
    /// identical bytes.
    pub fn encode(&self) -> Vec<u8> {
        let nodes = self.field.grid.node_count();
        let mut out = Vec::with_capacity(HEADER_LEN + 4 * nodes * 10);
        out.extend_from_slice(&FIELD_MAGIC);
        out.extend_from_slice(&FIELD_VERSION.to_le_bytes());
        out.push(self.converged as u8);
        out.push(self.mode.to_byte());
        out.extend_from_slice(&(self.field.grid.n_cells as u32).to_le_bytes());
        out.extend_from_slice(&self.field.grid.b1.to_le_bytes());
        out.extend_from_slice(&self.field.grid.b2.to_le_bytes());
        out.extend_from_slice(&self.field.grid.b3.to_le_bytes());
        out.extend_from_slice(&self.param_hash);
        out.extend_from_slice(&self.iterations.to_le_bytes());
        out.extend_from_slice(&self.residual.to_le_bytes());
        out.extend_from_slice(&self.tol.to_le_bytes());
        for v in self.field.raw() {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out.extend_from_slice(self.maps.raw_a());
        out.extend_from_slice(self.maps.raw_b());
        out
    }

    /// Parse and validate an artifact. Returns `MalformedField` on any
    /// structural or invariant violation; never panics and never allocates
    /// more than the input length.
    pub fn decode(bytes: &[u8]) -> Result<FieldArtifact> {
        let fail = |msg: &str| Error::MalformedField(msg.to_string());
        if bytes.len() < HEADER_LEN {
            return Err(fail("truncated header"));
        }
        let (header, body) = bytes.split_at(HEADER_LEN);
        if header[0..4] != FIELD_MAGIC {
            return Err(fail("bad magic"));
        }
        let version = u16::from_le_bytes([header[4], header[5]]);
        if version != FIELD_VERSION {
            return Err(Error::MalformedField(format!(
                "unsupported version {version}"
            )));
        }
        let converged = match header[6] {
            0 => false,
            1 => true,
            other => {
                return Err(Error::MalformedField(format!(
                    "converged flag must be 0 or 1, got {other}"
                )))
            }
        };
        let mode = SweepMode::from_byte(header[7]).ok_or_else(|| fail("unknown sweep mode"))?;
        let n_cells = u32::from_le_bytes(header[8..12].try_into().unwrap());
        if !(2..=MAX_DECODE_CELLS).contains(&n_cells) {
            return Err(Error::MalformedField(format!(
                "n_cells {n_cells} outside [2, {MAX_DECODE_CELLS}]"
            )));
        }
        let read_f64 = |off: usize| f64::from_le_bytes(header[off..off + 8].try_into().unwrap());
        let b1 = read_f64(12);
        let b2 = read_f64(20);
        let b3 = read_f64(28);
        for (name, b) in [("b1", b1), ("b2", b2), ("b3", b3)] {
            if b <= 0.0 || !b.is_finite() {
                return Err(Error::MalformedField(format!(
                    "{name} must be positive and finite"
                )));
            }
        }
        if b3 > std::f64::consts::PI {
            return Err(fail("b3 exceeds pi"));
        }
        let mut param_hash = [0u8; 32];
        param_hash.copy_from_slice(&header[36..68]);
        let iterations = u64::from_le_bytes(header[68..76].try_into().unwrap());
        let residual = read_f64(76);
        let tol = read_f64(84);
        if !residual.is_finite() || residual < 0.0 {
            return Err(fail("residual must be finite and non-negative"));
        }
        if tol <= 0.0 || !tol.is_finite() {
            return Err(fail("tol must be positive and finite"));
        }
        if converged && residual >= tol {
            return Err(fail("converged artifact with residual >= tol"));
        }

        // Exact length check before any allocation: per node and mode pair,
        // 8 bytes of value plus one map byte per player.
        let nodes_per_dim = n_cells as u64 + 1;
        let nodes = nodes_per_dim
            .checked_mul(nodes_per_dim)
            .and_then(|x| x.checked_mul(nodes_per_dim))
            .ok_or_else(|| fail("node count overflow"))?;
        let entries = nodes.checked_mul(4).ok_or_else(|| fail("entry overflow"))?;
        let expected = entries
            .checked_mul(10)
            .ok_or_else(|| fail("payload overflow"))?;
        if body.len() as u64 != expected {
            return Err(Error::MalformedField(format!(
                "payload length {} does not match expected {expected}",
                body.len()
            )));
        }
        let entries = entries as usize;

        let (value_bytes, map_bytes) = body.split_at(entries * 8);
        let mut values = Vec::with_capacity(entries);
        for chunk in value_bytes.chunks_exact(8) {
            let v = f64::from_le_bytes(chunk.try_into().unwrap());
            if !v.is_finite() {
                return Err(fail("non-finite value in payload"));
            }
            values.push(v);
        }
        let (a_bytes, b_bytes) = map_bytes.split_at(entries);
        if !a_bytes.iter().chain(b_bytes).all(|&b| b == 1 || b == 2) {
            return Err(fail("switching map byte outside {1, 2}"));
        }

        let grid = Grid3::new(b1, b2, b3, n_cells as usize);
        Ok(FieldArtifact {
            field: ValueField {
                grid: grid.clone(),
                values,
            },
            maps: SwitchingMaps::new(grid, a_bytes.to_vec(), b_bytes.to_vec()),
            param_hash,
            converged,
            mode,
            iterations,
            residual,
            tol,
        })
    }
}
