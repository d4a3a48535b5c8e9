//! Quantum channels in Kraus form, their Stinespring dilations and
//! complementary channels, tensor powers, and the standard noise library.
//!
//! A channel N(X) = Σ_k E_k X E_k† is stored as its list of Kraus operators.
//! Trace-non-increasing maps are allowed throughout (Σ E_k†E_k ⪯ I); the
//! `trace_preserving` flag records whether the sum is the identity.
//!
//! The complementary channel is fixed to the representation
//! N̂(X) = Σ_{k,k'} tr(E_{k'}† E_k X) |k⟩⟨k'| in the Kraus index basis, in the
//! given operator order.  Complementary channels are only unique up to a
//! partial isometry on the environment; pinning the representation keeps
//! outputs and tests deterministic.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{
    eig_hermitian, ComplexMatrix, HermitianOperator, LinalgError, C64,
};

#[derive(Debug, Error)]
pub enum ChannelError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("Kraus operators are not trace-non-increasing: λ_max(ΣE†E) = {lambda_max}")]
    NotTraceNonIncreasing { lambda_max: f64 },
    #[error("no Kraus operators supplied")]
    Empty,
    #[error("parameter out of range: {0}")]
    BadParameter(String),
    #[error("unknown channel name: {0}")]
    UnknownName(String),
    #[error(
        "tensor power would materialize {requested} Kraus operators (cap {cap}); \
         use the combinatorial bound evaluators for large i.i.d. systems"
    )]
    TensorPowerCap { requested: usize, cap: usize },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

pub type Result<T> = std::result::Result<T, ChannelError>;

/// Completely positive, trace-non-increasing map as a finite Kraus list.
#[derive(Debug, Clone)]
pub struct KrausChannel {
    in_dim: usize,
    out_dim: usize,
    kraus: Vec<ComplexMatrix>,
    trace_preserving: bool,
}

impl KrausChannel {
    /// Validates shapes and Σ E_k†E_k ⪯ I + 1e-10.
    pub fn new(kraus: Vec<ComplexMatrix>) -> Result<Self> {
        let first = kraus.first().ok_or(ChannelError::Empty)?;
        let (out_dim, in_dim) = (first.rows(), first.cols());
        for e in &kraus {
            if e.rows() != out_dim || e.cols() != in_dim {
                return Err(ChannelError::DimensionMismatch(format!(
                    "Kraus operators must share the shape {out_dim}×{in_dim}"
                )));
            }
        }
        let mut sum = ComplexMatrix::zeros(in_dim, in_dim);
        for e in &kraus {
            sum = sum.add(&e.dagger().matmul(e));
        }
        let herm = HermitianOperator::new(sum.clone())?;
        let spec = eig_hermitian(&herm)?;
        let lambda_max = spec.eigenvalues().first().copied().unwrap_or(0.0);
        if lambda_max > 1.0 + 1e-10 {
            return Err(ChannelError::NotTraceNonIncreasing { lambda_max });
        }
        let trace_preserving =
            sum.sub(&ComplexMatrix::identity(in_dim)).max_abs() <= 1e-10;
        Ok(Self {
            in_dim,
            out_dim,
            kraus,
            trace_preserving,
        })
    }

    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    pub fn num_kraus(&self) -> usize {
        self.kraus.len()
    }

    pub fn is_trace_preserving(&self) -> bool {
        self.trace_preserving
    }

    /// N(X) = Σ E_k X E_k†.
    pub fn apply(&self, x: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(
            (x.rows(), x.cols()),
            (self.in_dim, self.in_dim),
            "channel applied to an operator of the wrong dimension"
        );
        let mut out = ComplexMatrix::zeros(self.out_dim, self.out_dim);
        for e in &self.kraus {
            out = out.add(&e.matmul(x).matmul(&e.dagger()));
        }
        out
    }

    /// E_k |v⟩ for every k, without forming any product matrix.
    pub fn apply_to_vector(&self, v: &[C64]) -> Vec<Vec<C64>> {
        self.kraus.iter().map(|e| e.matvec(v)).collect()
    }

    /// Adjoint action on observables, N†(W) = Σ E_k† W E_k.
    ///
    /// This is a completely positive map but in general not trace
    /// non-increasing, so it is exposed as a direct action rather than as a
    /// channel value.
    pub fn adjoint_apply(&self, w: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(
            (w.rows(), w.cols()),
            (self.out_dim, self.out_dim),
            "adjoint applied to an observable of the wrong dimension"
        );
        let mut out = ComplexMatrix::zeros(self.in_dim, self.in_dim);
        for e in &self.kraus {
            out = out.add(&e.dagger().matmul(w).matmul(e));
        }
        out
    }

    /// Complementary channel to the environment of the Stinespring dilation
    /// V = Σ_k E_k ⊗ |k⟩.  Output dimension equals the number of Kraus
    /// operators; no pruning of linearly dependent Kraus sets is attempted,
    /// the given set is kept verbatim.
    pub fn complementary(&self) -> KrausChannel {
        let env = self.kraus.len();
        // Kraus operators of the complementary channel: F_b = (⟨b|_B ⊗ I_E) V,
        // i.e. row b of every E_k stacked as the rows of an env×in matrix.
        let kraus = (0..self.out_dim)
            .map(|b| {
                ComplexMatrix::from_fn(env, self.in_dim, |k, a| self.kraus[k].get(b, a))
            })
            .collect();
        KrausChannel::new(kraus).expect("complementary of a valid channel is valid")
    }

    /// Stinespring isometry V = Σ_k E_k ⊗ |k⟩_E, a (out·env)×in matrix with
    /// output index (b, k) = b·env + k.
    pub fn stinespring(&self) -> StinespringIsometry {
        let env = self.kraus.len();
        let v = ComplexMatrix::from_fn(self.out_dim * env, self.in_dim, |row, col| {
            let (b, k) = (row / env, row % env);
            self.kraus[k].get(b, col)
        });
        StinespringIsometry {
            v,
            in_dim: self.in_dim,
            out_dim: self.out_dim,
            env_dim: env,
        }
    }

    /// n-fold tensor power with explicit Kraus materialization.
    ///
    /// Fails when the Kraus count K^n would exceed `cap` (default
    /// [`TENSOR_POWER_CAP`] via [`Self::tensor_power`]); large i.i.d. systems
    /// go through the combinatorial evaluators in the bounds module instead.
    pub fn tensor_power_capped(&self, n: usize, cap: usize) -> Result<TensorPowerChannel> {
        assert!(n >= 1, "tensor power needs n ≥ 1");
        let k = self.kraus.len();
        let total = k.checked_pow(n as u32).unwrap_or(usize::MAX);
        if total > cap {
            return Err(ChannelError::TensorPowerCap {
                requested: total,
                cap,
            });
        }
        let mut patterns: Vec<Vec<u8>> = vec![vec![]];
        for _ in 0..n {
            let mut next = Vec::with_capacity(patterns.len() * k);
            for p in &patterns {
                for idx in 0..k {
                    let mut q = p.clone();
                    q.push(idx as u8);
                    next.push(q);
                }
            }
            patterns = next;
        }
        let kraus: Vec<ComplexMatrix> = patterns
            .iter()
            .map(|pat| {
                let mut m = self.kraus[pat[0] as usize].clone();
                for &idx in &pat[1..] {
                    m = m.kron(&self.kraus[idx as usize]);
                }
                m
            })
            .collect();
        let weights = patterns
            .iter()
            .map(|pat| pat.iter().filter(|&&x| x != 0).count())
            .collect();
        Ok(TensorPowerChannel {
            channel: KrausChannel::new(kraus)?,
            patterns,
            weights,
        })
    }

    pub fn tensor_power(&self, n: usize) -> Result<TensorPowerChannel> {
        self.tensor_power_capped(n, TENSOR_POWER_CAP)
    }

    /// Choi matrix (N ⊗ Id)(|1⟩⟩⟨⟨1|) with the row-major pairing.
    pub fn choi(&self) -> ComplexMatrix {
        let d = self.in_dim;
        let mut c = ComplexMatrix::zeros(self.out_dim * d, self.out_dim * d);
        for e in &self.kraus {
            // |v_e⟩⟩ with v_e[(a, c)] = E[a, c]
            let v: Vec<C64> = (0..self.out_dim * d)
                .map(|i| e.get(i / d, i % d))
                .collect();
            c = c.add(&ComplexMatrix::outer(&v, &v));
        }
        c
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(ChannelWire::from(self)).expect("serializable")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let wire: ChannelWire = serde_json::from_value(v.clone())
            .map_err(|e| ChannelError::BadParameter(format!("channel JSON: {e}")))?;
        wire.try_into()
    }
}

/// Default materialization cap for [`KrausChannel::tensor_power`].
pub const TENSOR_POWER_CAP: usize = 4096;

/// Tensor power of a channel with its Kraus-index bookkeeping: `patterns[i]`
/// is the string x of single-site Kraus indices and `weights[i] = |x|` its
/// number of non-identity-like (jump) factors.
#[derive(Debug, Clone)]
pub struct TensorPowerChannel {
    pub channel: KrausChannel,
    pub patterns: Vec<Vec<u8>>,
    pub weights: Vec<usize>,
}

/// Stinespring isometry V: in → out ⊗ env with V†V ⪯ I.
#[derive(Debug, Clone)]
pub struct StinespringIsometry {
    v: ComplexMatrix,
    in_dim: usize,
    out_dim: usize,
    env_dim: usize,
}

impl StinespringIsometry {
    pub fn new(v: ComplexMatrix, out_dim: usize, env_dim: usize) -> Result<Self> {
        if v.rows() != out_dim * env_dim {
            return Err(ChannelError::DimensionMismatch(format!(
                "isometry rows {} ≠ out_dim·env_dim = {}",
                v.rows(),
                out_dim * env_dim
            )));
        }
        let gram = v.dagger().matmul(&v);
        let spec = eig_hermitian(&HermitianOperator::new(gram)?)?;
        let lambda_max = spec.eigenvalues().first().copied().unwrap_or(0.0);
        if lambda_max > 1.0 + 1e-10 {
            return Err(ChannelError::NotTraceNonIncreasing { lambda_max });
        }
        Ok(Self {
            in_dim: v.cols(),
            v,
            out_dim,
            env_dim,
        })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.v
    }

    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    pub fn env_dim(&self) -> usize {
        self.env_dim
    }

    /// V|v⟩ as a vector on out ⊗ env.
    pub fn apply_to_vector(&self, v: &[C64]) -> Vec<C64> {
        self.v.matvec(v)
    }

    /// The channel tr_E(V·V†) recovered as a Kraus list E_k = (I ⊗ ⟨k|) V.
    pub fn channel(&self) -> KrausChannel {
        let kraus: Vec<ComplexMatrix> = (0..self.env_dim)
            .map(|k| {
                ComplexMatrix::from_fn(self.out_dim, self.in_dim, |b, a| {
                    self.v.get(b * self.env_dim + k, a)
                })
            })
            .collect();
        KrausChannel::new(kraus).expect("marginal of an isometry is a valid channel")
    }

    /// The complementary channel tr_B(V·V†).
    pub fn complementary(&self) -> KrausChannel {
        self.channel().complementary()
    }

    /// tr_E(V X V†) without building the channel.
    pub fn b_marginal(&self, x: &ComplexMatrix) -> ComplexMatrix {
        self.channel().apply(x)
    }

    /// tr_B(V X V†).
    pub fn e_marginal(&self, x: &ComplexMatrix) -> ComplexMatrix {
        self.complementary().apply(x)
    }
}

#[derive(Serialize, Deserialize)]
struct ChannelWire {
    in_dim: usize,
    out_dim: usize,
    /// One entry per Kraus operator: row-major [re, im] pairs.
    kraus: Vec<Vec<Vec<[f64; 2]>>>,
}

impl From<&KrausChannel> for ChannelWire {
    fn from(ch: &KrausChannel) -> Self {
        ChannelWire {
            in_dim: ch.in_dim,
            out_dim: ch.out_dim,
            kraus: ch
                .kraus
                .iter()
                .map(|e| {
                    (0..e.rows())
                        .map(|i| {
                            (0..e.cols())
                                .map(|j| {
                                    let z = e.get(i, j);
                                    [z.re, z.im]
                                })
                                .collect()
                        })
                        .collect()
                })
                .collect(),
        }
    }
}

impl TryFrom<ChannelWire> for KrausChannel {
    type Error = ChannelError;

    fn try_from(w: ChannelWire) -> Result<Self> {
        let kraus: Vec<ComplexMatrix> = w
            .kraus
            .iter()
            .map(|rows| {
                ComplexMatrix::from_fn(w.out_dim, w.in_dim, |i, j| {
                    let [re, im] = rows[i][j];
                    C64::new(re, im)
                })
            })
            .collect();
        let ch = KrausChannel::new(kraus)?;
        if ch.in_dim != w.in_dim || ch.out_dim != w.out_dim {
            return Err(ChannelError::DimensionMismatch(
                "channel JSON dims disagree with Kraus shapes".into(),
            ));
        }
        Ok(ch)
    }
}

fn check_probability(p: f64, name: &str) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(ChannelError::BadParameter(format!(
            "{name} needs 0 ≤ p ≤ 1, got {p}"
        )));
    }
    Ok(())
}

/// Identity channel on dimension d.
pub fn identity(d: usize) -> KrausChannel {
    KrausChannel::new(vec![ComplexMatrix::identity(d)]).expect("identity channel")
}

fn pauli_x() -> ComplexMatrix {
    ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]])
}

fn pauli_y() -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(2, 2);
    m.set(0, 1, C64::new(0.0, -1.0));
    m.set(1, 0, C64::new(0.0, 1.0));
    m
}

fn pauli_z() -> ComplexMatrix {
    ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, -1.0]])
}

/// Partial dephasing in the Z basis: (1−p)·Id + p·D_Z, with Kraus operators
/// √(1−p/2)·I and √(p/2)·Z.
pub fn partial_dephasing_z(p: f64) -> Result<KrausChannel> {
    check_probability(p, "partial_dephasing_z")?;
    let e0 = ComplexMatrix::identity(2).scale(C64::new((1.0 - p / 2.0).sqrt(), 0.0));
    let e1 = pauli_z().scale(C64::new((p / 2.0).sqrt(), 0.0));
    KrausChannel::new(vec![e0, e1])
}

/// Complete dephasing in the X basis: X ↦ ⟨+|X|+⟩|+⟩⟨+| + ⟨−|X|−⟩|−⟩⟨−|.
pub fn complete_dephasing_x() -> KrausChannel {
    let s = 1.0 / 2f64.sqrt();
    let plus = vec![C64::new(s, 0.0), C64::new(s, 0.0)];
    let minus = vec![C64::new(s, 0.0), C64::new(-s, 0.0)];
    KrausChannel::new(vec![
        ComplexMatrix::outer(&plus, &plus),
        ComplexMatrix::outer(&minus, &minus),
    ])
    .expect("projector Kraus set")
}

/// Amplitude damping (spontaneous emission) with decay probability p; the
/// first basis vector is the excited state.
pub fn amplitude_damping(p: f64) -> Result<KrausChannel> {
    check_probability(p, "amplitude_damping")?;
    let mut e0 = ComplexMatrix::zeros(2, 2);
    e0.set(0, 0, C64::new((1.0 - p).sqrt(), 0.0));
    e0.set(1, 1, C64::new(1.0, 0.0));
    let mut e1 = ComplexMatrix::zeros(2, 2);
    e1.set(1, 0, C64::new(p.sqrt(), 0.0));
    KrausChannel::new(vec![e0, e1])
}

/// Bit flip: (1−p/2)·Id + (p/2)·X(·)X.
pub fn bit_flip(p: f64) -> Result<KrausChannel> {
    check_probability(p, "bit_flip")?;
    let e0 = ComplexMatrix::identity(2).scale(C64::new((1.0 - p / 2.0).sqrt(), 0.0));
    let e1 = pauli_x().scale(C64::new((p / 2.0).sqrt(), 0.0));
    KrausChannel::new(vec![e0, e1])
}

/// Single-qubit depolarizing channel X ↦ (1−p)X + p·tr(X)·I/2.
pub fn depolarizing(p: f64) -> Result<KrausChannel> {
    check_probability(p, "depolarizing")?;
    let id = ComplexMatrix::identity(2).scale(C64::new((1.0 - 3.0 * p / 4.0).sqrt(), 0.0));
    let w = C64::new((p / 4.0).sqrt(), 0.0);
    KrausChannel::new(vec![
        id,
        pauli_x().scale(w),
        pauli_y().scale(w),
        pauli_z().scale(w),
    ])
}

/// Located erasure on an n-qubit register: with probability p the qubit at
/// `site` is handed to the environment and the receiver gets the remaining
/// qubits together with an orthogonal flag state; with probability 1−p the
/// register passes through untouched.
///
/// The output space is the original 2^n-dimensional space followed by a flag
/// block of dimension 2^(n−1) holding the surviving qubits.
pub fn located_erasure(site: usize, p: f64, n: usize) -> Result<KrausChannel> {
    check_probability(p, "located_erasure")?;
    if site >= n {
        return Err(ChannelError::BadParameter(format!(
            "located_erasure: site {site} out of range for {n} qubits"
        )));
    }
    let dim = 1usize << n;
    let rest = 1usize << (n - 1);
    let out = dim + rest;
    let keep = C64::new((1.0 - p).sqrt(), 0.0);
    let mut k0 = ComplexMatrix::zeros(out, dim);
    for i in 0..dim {
        k0.set(i, i, keep);
    }
    // Row index within the flag block: the basis state of the surviving
    // qubits, i.e. the input index with the erased bit removed.
    let bit = n - 1 - site; // qubit 0 is the most significant factor
    let strip = |idx: usize| -> usize {
        let high = idx >> (bit + 1);
        let low = idx & ((1 << bit) - 1);
        (high << bit) | low
    };
    let lost = C64::new(p.sqrt(), 0.0);
    let mut kraus = vec![k0];
    for b in 0..2usize {
        let mut kb = ComplexMatrix::zeros(out, dim);
        for i in 0..dim {
            if (i >> bit) & 1 == b {
                kb.set(dim + strip(i), i, lost);
            }
        }
        kraus.push(kb);
    }
    KrausChannel::new(kraus)
}

/// Named channel constructor used by the scenario registry and the CLI.
pub fn by_name(name: &str, params: &[f64]) -> Result<KrausChannel> {
    let need = |n: usize| -> Result<()> {
        if params.len() < n {
            Err(ChannelError::BadParameter(format!(
                "channel {name} needs {n} parameter(s)"
            )))
        } else {
            Ok(())
        }
    };
    match name {
        "identity" => {
            need(1)?;
            Ok(identity(params[0] as usize))
        }
        "partial_dephasing_z" => {
            need(1)?;
            partial_dephasing_z(params[0])
        }
        "complete_dephasing_x" => Ok(complete_dephasing_x()),
        "amplitude_damping" => {
            need(1)?;
            amplitude_damping(params[0])
        }
        "bit_flip" => {
            need(1)?;
            bit_flip(params[0])
        }
        "depolarizing" => {
            need(1)?;
            depolarizing(params[0])
        }
        "located_erasure" => {
            need(3)?;
            located_erasure(params[0] as usize, params[1], params[2] as usize)
        }
        other => Err(ChannelError::UnknownName(other.to_string())),
    }
}

/// Z-basis dephasing with jump probability p (Kraus √(1−p/2)·I, √(p/2)·Z),
/// an alias kept next to the other single-qubit noise models.
pub fn dephasing_z(p: f64) -> Result<KrausChannel> {
    partial_dephasing_z(p)
}
