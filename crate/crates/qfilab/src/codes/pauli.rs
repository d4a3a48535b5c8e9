//! n-qubit Pauli strings in symplectic form and stabilizer groups.
//!
//! A Pauli string is stored as P = i^phase · X^x · Z^z with one bit of x and
//! z per qubit (qubit q at bit position q, up to n = 128 qubits).  The letter
//! Y at a site corresponds to x = z = 1 together with one factor of i in the
//! phase, since Y = i·XZ.

use std::fmt;

use thiserror::Error;

use crate::linalg::{ComplexMatrix, C64};

#[derive(Debug, Error)]
pub enum PauliError {
    #[error("qubit count mismatch: {0} vs {1}")]
    SizeMismatch(usize, usize),
    #[error("unsupported qubit count {0} (limit 128)")]
    TooManyQubits(usize),
    #[error("cannot parse Pauli string: {0}")]
    Parse(String),
    #[error("stabilizer generators must be Hermitian with real sign, got phase i^{0}")]
    NonHermitianGenerator(u8),
    #[error("stabilizer generators do not commute: generators {0} and {1}")]
    NonCommuting(usize, usize),
    #[error("stabilizer generators are not independent (symplectic rank {rank} < {count})")]
    NotIndependent { rank: usize, count: usize },
    #[error("no seed basis vector survives the stabilizer projection")]
    EmptyProjection,
}

pub type Result<T> = std::result::Result<T, PauliError>;

/// Pauli string i^phase · X^x · Z^z on n qubits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PauliString {
    n: usize,
    x_bits: u128,
    z_bits: u128,
    /// Exponent of i in the global prefactor, mod 4.
    phase: u8,
}

impl PauliString {
    pub fn identity(n: usize) -> Self {
        Self {
            n,
            x_bits: 0,
            z_bits: 0,
            phase: 0,
        }
    }

    pub fn new(n: usize, x_bits: u128, z_bits: u128, phase: u8) -> Result<Self> {
        if n > 128 {
            return Err(PauliError::TooManyQubits(n));
        }
        let mask = ones(n);
        Ok(Self {
            n,
            x_bits: x_bits & mask,
            z_bits: z_bits & mask,
            phase: phase % 4,
        })
    }

    /// Single-letter constructor: 'X', 'Y', or 'Z' at one site.
    pub fn single(n: usize, site: usize, letter: char) -> Result<Self> {
        let mut p = Self::identity(n);
        p.set_letter(site, letter)?;
        Ok(p)
    }

    fn set_letter(&mut self, site: usize, letter: char) -> Result<()> {
        if site >= self.n {
            return Err(PauliError::SizeMismatch(site, self.n));
        }
        let bit = 1u128 << site;
        match letter {
            'I' => {}
            'X' => self.x_bits |= bit,
            'Z' => self.z_bits |= bit,
            'Y' => {
                self.x_bits |= bit;
                self.z_bits |= bit;
                self.phase = (self.phase + 1) % 4; // Y = i·XZ
            }
            other => return Err(PauliError::Parse(format!("unknown letter {other:?}"))),
        }
        Ok(())
    }

    /// Parses e.g. "+XIZZY", "-ZZ", "+iXY", "-iY".
    pub fn parse(text: &str) -> Result<Self> {
        let rest = text.trim();
        let (phase, letters) = if let Some(r) = rest.strip_prefix("+i") {
            (1u8, r)
        } else if let Some(r) = rest.strip_prefix("-i") {
            (3u8, r)
        } else if let Some(r) = rest.strip_prefix('+') {
            (0u8, r)
        } else if let Some(r) = rest.strip_prefix('-') {
            (2u8, r)
        } else {
            (0u8, rest)
        };
        let n = letters.chars().count();
        if n > 128 {
            return Err(PauliError::TooManyQubits(n));
        }
        let mut p = Self::identity(n);
        p.phase = phase;
        for (site, letter) in letters.chars().enumerate() {
            p.set_letter(site, letter)?;
        }
        Ok(p)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn x_bits(&self) -> u128 {
        self.x_bits
    }

    pub fn z_bits(&self) -> u128 {
        self.z_bits
    }

    /// Phase as the exponent of i (0..4).
    pub fn phase_exponent(&self) -> u8 {
        self.phase
    }

    /// The letter at one site, ignoring the global phase.
    pub fn letter(&self, site: usize) -> char {
        let x = (self.x_bits >> site) & 1 == 1;
        let z = (self.z_bits >> site) & 1 == 1;
        match (x, z) {
            (false, false) => 'I',
            (true, false) => 'X',
            (false, true) => 'Z',
            (true, true) => 'Y',
        }
    }

    /// Sites on which the string acts nontrivially.
    pub fn support(&self) -> u128 {
        self.x_bits | self.z_bits
    }

    pub fn weight(&self) -> usize {
        self.support().count_ones() as usize
    }

    pub fn is_identity_up_to_phase(&self) -> bool {
        self.support() == 0
    }

    /// Group product with full phase tracking:
    /// (i^a X^x Z^z)(i^b X^x' Z^z') = i^{a+b+2·|z∧x'|} X^{x⊕x'} Z^{z⊕z'}.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(PauliError::SizeMismatch(self.n, other.n));
        }
        let swaps = (self.z_bits & other.x_bits).count_ones() as u8;
        Ok(Self {
            n: self.n,
            x_bits: self.x_bits ^ other.x_bits,
            z_bits: self.z_bits ^ other.z_bits,
            phase: (self.phase + other.phase + 2 * (swaps % 2)) % 4,
        })
    }

    pub fn negate(&self) -> Self {
        Self {
            phase: (self.phase + 2) % 4,
            ..*self
        }
    }

    /// Symplectic form ⟨P, Q⟩ = |x_P ∧ z_Q| + |z_P ∧ x_Q| mod 2; zero iff the
    /// operators commute.
    pub fn symplectic(&self, other: &Self) -> u8 {
        (((self.x_bits & other.z_bits).count_ones()
            + (self.z_bits & other.x_bits).count_ones())
            % 2) as u8
    }

    pub fn commutes(&self, other: &Self) -> bool {
        self.symplectic(other) == 0
    }

    pub fn anticommutes(&self, other: &Self) -> bool {
        !self.commutes(other)
    }

    /// Hermitian iff phase + |x∧z| is even (each Y contributes an i that the
    /// stored phase must carry).
    pub fn is_hermitian(&self) -> bool {
        (self.phase as u32 + (self.x_bits & self.z_bits).count_ones()) % 2 == 0
    }

    /// Applies the string to a dense state vector of dimension 2^n
    /// (qubit 0 is the most significant bit of the basis index).
    pub fn apply_to_vec(&self, v: &[C64]) -> Vec<C64> {
        let dim = 1usize << self.n;
        assert_eq!(v.len(), dim, "state dimension mismatch");
        let global = phase_to_c64(self.phase);
        let mut out = vec![C64::new(0.0, 0.0); dim];
        // Basis-index bit of qubit q sits at position n−1−q.
        let xmask = bit_reverse(self.x_bits, self.n);
        let zmask = bit_reverse(self.z_bits, self.n);
        for (i, amp) in v.iter().enumerate() {
            if amp.re == 0.0 && amp.im == 0.0 {
                continue;
            }
            // Z^z phase first, then X^x flips.
            let zsign = if ((i as u128 & zmask).count_ones()) % 2 == 1 {
                -1.0
            } else {
                1.0
            };
            let j = (i as u128 ^ xmask) as usize;
            out[j] += amp * global * C64::new(zsign, 0.0);
        }
        out
    }

    /// Dense matrix representation (for n small enough to materialize).
    pub fn to_matrix(&self) -> ComplexMatrix {
        let dim = 1usize << self.n;
        let mut m = ComplexMatrix::zeros(dim, dim);
        let global = phase_to_c64(self.phase);
        let xmask = bit_reverse(self.x_bits, self.n);
        let zmask = bit_reverse(self.z_bits, self.n);
        for col in 0..dim {
            let zsign = if ((col as u128 & zmask).count_ones()) % 2 == 1 {
                -1.0
            } else {
                1.0
            };
            let row = (col as u128 ^ xmask) as usize;
            m.set(row, col, global * C64::new(zsign, 0.0));
        }
        m
    }

    /// ⟨u|P|v⟩ without materializing the matrix.
    pub fn matrix_element(&self, u: &[C64], v: &[C64]) -> C64 {
        let pv = self.apply_to_vec(v);
        crate::linalg::vec_inner(u, &pv)
    }
}

fn ones(n: usize) -> u128 {
    if n == 128 {
        u128::MAX
    } else {
        (1u128 << n) - 1
    }
}

fn bit_reverse(bits: u128, n: usize) -> u128 {
    let mut out = 0u128;
    for q in 0..n {
        if (bits >> q) & 1 == 1 {
            out |= 1 << (n - 1 - q);
        }
    }
    out
}

fn phase_to_c64(phase: u8) -> C64 {
    match phase % 4 {
        0 => C64::new(1.0, 0.0),
        1 => C64::new(0.0, 1.0),
        2 => C64::new(-1.0, 0.0),
        _ => C64::new(0.0, -1.0),
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // Printed sign excludes the i's implied by Y letters.
        let ys = (self.x_bits & self.z_bits).count_ones() as u8;
        let display_phase = (self.phase + 4 - (ys % 4)) % 4;
        let sign = match display_phase {
            0 => "+",
            1 => "+i",
            2 => "-",
            _ => "-i",
        };
        write!(f, "{sign}")?;
        for site in 0..self.n {
            write!(f, "{}", self.letter(site))?;
        }
        Ok(())
    }
}

/// Abelian Pauli subgroup presented by independent commuting generators with
/// −I not in the group.
#[derive(Debug, Clone)]
pub struct StabilizerGroup {
    n: usize,
    generators: Vec<PauliString>,
}

impl StabilizerGroup {
    pub fn new(generators: Vec<PauliString>) -> Result<Self> {
        let n = generators
            .first()
            .map(|g| g.n())
            .ok_or(PauliError::Parse("empty generator list".into()))?;
        for g in &generators {
            if g.n() != n {
                return Err(PauliError::SizeMismatch(g.n(), n));
            }
            if !g.is_hermitian() || g.phase_exponent() % 2 != 0 {
                return Err(PauliError::NonHermitianGenerator(g.phase_exponent()));
            }
        }
        for i in 0..generators.len() {
            for j in (i + 1)..generators.len() {
                if !generators[i].commutes(&generators[j]) {
                    return Err(PauliError::NonCommuting(i, j));
                }
            }
        }
        // Independence over GF(2): the (x|z) rows must have full rank.  With
        // independent generators the only product with trivial symplectic
        // part is the empty one, so −I cannot be generated.
        let rank = symplectic_rank(&generators);
        if rank != generators.len() {
            return Err(PauliError::NotIndependent {
                rank,
                count: generators.len(),
            });
        }
        Ok(Self { n, generators })
    }

    pub fn parse(lines: &str) -> Result<Self> {
        let generators: Vec<PauliString> = lines
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .map(PauliString::parse)
            .collect::<Result<_>>()?;
        Self::new(generators)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn generators(&self) -> &[PauliString] {
        &self.generators
    }

    /// Flips the sign of every generator, presenting the simultaneous −1
    /// eigenspace of the original generators.
    pub fn anti_group_flip(&self) -> Self {
        Self {
            n: self.n,
            generators: self.generators.iter().map(PauliString::negate).collect(),
        }
    }

    /// A unit vector in the simultaneous +1 eigenspace, built by applying the
    /// projector Π(I + S_i)/2 to computational basis vectors in order and
    /// keeping the first non-vanishing image (deterministic).
    pub fn stabilizer_state(&self) -> Result<Vec<C64>> {
        let dim = 1usize << self.n;
        for seed in 0..dim {
            let mut v = vec![C64::new(0.0, 0.0); dim];
            v[seed] = C64::new(1.0, 0.0);
            for g in &self.generators {
                let gv = g.apply_to_vec(&v);
                for (slot, add) in v.iter_mut().zip(&gv) {
                    *slot = (*slot + add) * C64::new(0.5, 0.0);
                }
            }
            let n = crate::linalg::vec_norm(&v);
            if n > 1e-9 {
                for z in v.iter_mut() {
                    *z /= n;
                }
                return Ok(v);
            }
        }
        Err(PauliError::EmptyProjection)
    }

    /// The group element Π_i g_i^{a_i} for a GF(2) coefficient vector.
    pub fn element(&self, coefficients: u128) -> PauliString {
        let mut acc = PauliString::identity(self.n);
        for (i, g) in self.generators.iter().enumerate() {
            if (coefficients >> i) & 1 == 1 {
                acc = acc.multiply(g).expect("same qubit count");
            }
        }
        acc
    }
}

fn symplectic_rank(generators: &[PauliString]) -> usize {
    // Gaussian elimination over GF(2) on rows (x_bits | z_bits).
    let mut rows: Vec<(u128, u128)> = generators
        .iter()
        .map(|g| (g.x_bits(), g.z_bits()))
        .collect();
    let mut rank = 0usize;
    let n = generators.first().map(|g| g.n()).unwrap_or(0);
    for col in 0..(2 * n) {
        let pick = |row: &(u128, u128)| -> bool {
            if col < n {
                (row.0 >> col) & 1 == 1
            } else {
                (row.1 >> (col - n)) & 1 == 1
            }
        };
        if let Some(pivot) = (rank..rows.len()).find(|&r| pick(&rows[r])) {
            rows.swap(rank, pivot);
            let (px, pz) = rows[rank];
            for r in 0..rows.len() {
                if r != rank && pick(&rows[r]) {
                    rows[r].0 ^= px;
                    rows[r].1 ^= pz;
                }
            }
            rank += 1;
        }
    }
    rank
}
