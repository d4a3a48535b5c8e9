//! Named, parameterized experiments: the bridge between the library and the
//! command line.
//!
//! Every scenario resolves a parameter map to a reproducible computation and
//! returns both a JSON-serializable report and a flat CSV row with frozen
//! headers.  Scenario names and parameter schemas are stable identifiers;
//! golden tests diff their outputs.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::bounds::{self, BoundResult};
use crate::channels;
use crate::clock::{self, FisherReport, MetrologyScenario};
use crate::codes;
use crate::linalg::{ComplexMatrix, HermitianOperator, C64};
use crate::lindblad::{self, LindbladSpec};
use crate::manybody::{self, DiagonalHamiltonian, Probe};

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("unknown scenario {0:?}; available: {1}")]
    UnknownScenario(String, String),
    #[error("unknown parameter {0:?} for scenario {1:?}")]
    UnknownParameter(String, String),
    #[error("parameter {0} = {1} out of range: {2}")]
    ParameterRange(String, f64, String),
    #[error("numerical failure in scenario {scenario}: {message}")]
    Numerical { scenario: String, message: String },
}

pub type Result<T> = std::result::Result<T, ScenarioError>;

fn numerical(scenario: &str, err: impl std::fmt::Display) -> ScenarioError {
    ScenarioError::Numerical {
        scenario: scenario.to_string(),
        message: err.to_string(),
    }
}

/// One declared parameter of a scenario.
#[derive(Debug, Clone, Serialize)]
pub struct ParamSpec {
    pub name: &'static str,
    pub default: f64,
    pub description: &'static str,
}

/// Output of one scenario evaluation.
#[derive(Debug, Clone, Serialize)]
pub struct ScenarioOutput {
    pub schema: u32,
    pub scenario: String,
    pub params: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fisher_report: Option<FisherReport>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub bounds: Vec<BoundResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub equality_diag: Option<String>,
    /// Short provenance tag naming the closed form or construction the
    /// scenario reproduces.
    pub paper_ref: &'static str,
    /// Scenario-specific scalar results, also used as the CSV columns.
    pub values: BTreeMap<String, f64>,
}

impl ScenarioOutput {
    /// CSV row with deterministic column order: declared parameters first,
    /// then the value keys in lexicographic order.
    pub fn csv_columns(&self, param_order: &[ParamSpec]) -> (Vec<String>, Vec<f64>) {
        let mut headers = Vec::new();
        let mut row = Vec::new();
        for p in param_order {
            headers.push(p.name.to_string());
            row.push(*self.params.get(p.name).unwrap_or(&p.default));
        }
        for (k, v) in &self.values {
            headers.push(k.clone());
            row.push(*v);
        }
        (headers, row)
    }
}

type Runner = fn(&BTreeMap<String, f64>) -> Result<ScenarioOutput>;

/// A registered scenario: name, parameter schema, provenance tag, runner.
pub struct ScenarioSpec {
    pub name: &'static str,
    pub summary: &'static str,
    pub params: Vec<ParamSpec>,
    pub paper_ref: &'static str,
    run: Runner,
}

/// The registry of built-in scenarios.
pub struct ScenarioRegistry {
    entries: Vec<ScenarioSpec>,
}

impl ScenarioRegistry {
    pub fn builtin() -> Self {
        Self {
            entries: build_registry(),
        }
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.iter().map(|s| s.name).collect()
    }

    pub fn get(&self, name: &str) -> Result<&ScenarioSpec> {
        self.entries
            .iter()
            .find(|s| s.name == name)
            .ok_or_else(|| {
                ScenarioError::UnknownScenario(name.to_string(), self.names().join(", "))
            })
    }

    pub fn entries(&self) -> &[ScenarioSpec] {
        &self.entries
    }

    /// Resolves parameters against the schema and runs the scenario.
    pub fn run(&self, name: &str, overrides: &BTreeMap<String, f64>) -> Result<ScenarioOutput> {
        let spec = self.get(name)?;
        let mut params: BTreeMap<String, f64> = spec
            .params
            .iter()
            .map(|p| (p.name.to_string(), p.default))
            .collect();
        for (k, v) in overrides {
            if !params.contains_key(k) {
                return Err(ScenarioError::UnknownParameter(
                    k.clone(),
                    name.to_string(),
                ));
            }
            params.insert(k.clone(), *v);
        }
        (spec.run)(&params)
    }
}

fn p(name: &'static str, default: f64, description: &'static str) -> ParamSpec {
    ParamSpec {
        name,
        default,
        description,
    }
}

fn get(params: &BTreeMap<String, f64>, key: &str) -> f64 {
    *params.get(key).expect("parameter resolved by registry")
}

fn output(
    name: &str,
    params: &BTreeMap<String, f64>,
    paper_ref: &'static str,
) -> ScenarioOutput {
    ScenarioOutput {
        schema: 1,
        scenario: name.to_string(),
        params: params.clone(),
        fisher_report: None,
        bounds: Vec::new(),
        equality_diag: None,
        paper_ref,
        values: BTreeMap::new(),
    }
}

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn qubit_h(omega: f64) -> HermitianOperator {
    HermitianOperator::new(ComplexMatrix::from_real_rows(&[
        &[omega / 2.0, 0.0],
        &[0.0, -omega / 2.0],
    ]))
    .expect("diagonal")
}

fn evolved_plus(omega: f64, t0: f64) -> Vec<C64> {
    let u = clock::evolution_unitary(&qubit_h(omega), t0);
    let s = 1.0 / 2f64.sqrt();
    u.matvec(&[re(s), re(s)])
}

fn ghz_state(n: usize) -> Vec<C64> {
    let dim = 1usize << n;
    let s = 1.0 / 2f64.sqrt();
    let mut psi = vec![re(0.0); dim];
    psi[0] = re(s);
    psi[dim - 1] = re(s);
    psi
}

fn onsite_z(n: usize, omega: f64) -> HermitianOperator {
    let dim = 1usize << n;
    HermitianOperator::from_fn(dim, |i, j| {
        if i != j {
            re(0.0)
        } else {
            let downs = (i as u64).count_ones() as f64;
            re(omega / 2.0 * (n as f64 - 2.0 * downs))
        }
    })
    .expect("diagonal")
}

fn check_site_count(name: &str, n: f64, cap: usize) -> Result<usize> {
    let sites = n as usize;
    if sites < 1 || sites > cap || (n - sites as f64).abs() > 0.0 {
        return Err(ScenarioError::ParameterRange(
            "n".into(),
            n,
            format!("{name} needs an integer 1 ≤ n ≤ {cap}"),
        ));
    }
    Ok(sites)
}

fn fisher_scenario_output(
    name: &str,
    params: &BTreeMap<String, f64>,
    paper_ref: &'static str,
    sc: &MetrologyScenario,
) -> Result<ScenarioOutput> {
    let rep = clock::fisher_report(sc).map_err(|e| numerical(name, e))?;
    let mut out = output(name, params, paper_ref);
    out.values.insert("f_alice_t".into(), rep.f_alice_t);
    out.values.insert("f_bob_t".into(), rep.f_bob_t);
    out.values.insert("f_eve_eta".into(), rep.f_eve_eta);
    out.values.insert("delta_f".into(), rep.delta_f);
    out.values.insert("sum_ratio".into(), rep.sum_ratio);
    out.values.insert(
        "equality_holds".into(),
        if rep.equality_holds { 1.0 } else { 0.0 },
    );
    out.equality_diag = Some(rep.rank_diag.clone());
    out.fisher_report = Some(rep);
    Ok(out)
}

fn build_registry() -> Vec<ScenarioSpec> {
    vec![
        ScenarioSpec {
            name: "qubit-partial-dephasing",
            summary: "Single qubit clock through partial Z dephasing",
            params: vec![
                p("p", 0.3, "dephasing weight in [0, 1]"),
                p("omega", 1.0, "level splitting of H = ωZ/2"),
                p("t0", 0.7, "reference time"),
            ],
            paper_ref: "single-qubit partial-dephasing closed form: F_Bob/F_Alice = (1−p)², F_Eve/F_Alice = 2p−p²",
            run: |params| {
                let name = "qubit-partial-dephasing";
                let (pp, omega, t0) = (get(params, "p"), get(params, "omega"), get(params, "t0"));
                let ch = channels::partial_dephasing_z(pp).map_err(|e| numerical(name, e))?;
                let sc = MetrologyScenario::new(evolved_plus(omega, t0), qubit_h(omega), ch, t0, name)
                    .map_err(|e| numerical(name, e))?;
                let mut out = fisher_scenario_output(name, params, "single-qubit partial-dephasing closed form: F_Bob/F_Alice = (1−p)², F_Eve/F_Alice = 2p−p²", &sc)?;
                out.values
                    .insert("f_bob_closed_form".into(), omega * omega * (1.0 - pp) * (1.0 - pp));
                Ok(out)
            },
        },
        ScenarioSpec {
            name: "qubit-transversal-dephasing",
            summary: "Single qubit clock under complete dephasing along X",
            params: vec![
                p("omega", 1.0, "level splitting of H = ωZ/2"),
                p("t0", 1.0, "reference time (rank changes at multiples of π/ω)"),
            ],
            paper_ref: "complete transversal dephasing: zero sensitivity loss except at rank-change times",
            run: |params| {
                let name = "qubit-transversal-dephasing";
                let (omega, t0) = (get(params, "omega"), get(params, "t0"));
                let sc = MetrologyScenario::new(
                    evolved_plus(omega, t0),
                    qubit_h(omega),
                    channels::complete_dephasing_x(),
                    t0,
                    name,
                )
                .map_err(|e| numerical(name, e))?;
                fisher_scenario_output(name, params, "complete transversal dephasing: zero sensitivity loss except at rank-change times", &sc)
            },
        },
        ScenarioSpec {
            name: "ghz-erasure",
            summary: "GHZ probe losing one site with probability p",
            params: vec![
                p("n", 6.0, "number of qubits (≤ 8 for the dense path)"),
                p("p", 0.25, "erasure probability"),
                p("omega", 2.0, "on-site splitting"),
                p("site", 0.0, "which site is lost"),
            ],
            paper_ref: "GHZ with one located erasure: ΔF = p·n²·ω²",
            run: |params| {
                let name = "ghz-erasure";
                let n = check_site_count(name, get(params, "n"), 8)?;
                let (pp, omega) = (get(params, "p"), get(params, "omega"));
                let site = get(params, "site") as usize;
                let ch = channels::located_erasure(site, pp, n).map_err(|e| numerical(name, e))?;
                let sc = MetrologyScenario::new(ghz_state(n), onsite_z(n, omega), ch, 0.0, name)
                    .map_err(|e| numerical(name, e))?;
                let mut out = fisher_scenario_output(name, params, "GHZ with one located erasure: ΔF = p·n²·ω²", &sc)?;
                out.values.insert(
                    "delta_f_closed_form".into(),
                    pp * (n as f64 * omega).powi(2),
                );
                Ok(out)
            },
        },
        ScenarioSpec {
            name: "four-two-two-erasure",
            summary: "Four-qubit code clock state with one located erasure",
            params: vec![
                p("p", 0.5, "erasure probability"),
                p("omega", 1.0, "interaction strength"),
                p("sx", 0.0, "transversal XX coupling"),
                p("sy", 0.0, "transversal YY coupling"),
                p("site", 0.0, "erased site"),
            ],
            paper_ref: "four-qubit square-lattice code state: σ_H² = 16ω² (Ising) / 16ω²(1+s_x²), no loss under one located erasure",
            run: |params| {
                let name = "four-two-two-erasure";
                let (pp, omega) = (get(params, "p"), get(params, "omega"));
                let (sx, sy) = (get(params, "sx"), get(params, "sy"));
                let site = get(params, "site") as usize;
                let h = code422_hamiltonian(omega, sx, sy);
                let psi = code422_state();
                let ch = channels::located_erasure(site, pp, 4).map_err(|e| numerical(name, e))?;
                let sc = MetrologyScenario::new(psi.clone(), h, ch.clone(), 0.0, name)
                    .map_err(|e| numerical(name, e))?;
                let zl = codes::zero_loss_check_vectors(
                    &psi,
                    &clock::xi_vector(&sc.psi, &sc.h).map_err(|e| numerical(name, e))?,
                    &ch,
                );
                let mut out = fisher_scenario_output(name, params, "four-qubit square-lattice code state: σ_H² = 16ω² (Ising) / 16ω²(1+s_x²), no loss under one located erasure", &sc)?;
                out.values.insert("sigma2".into(), sc.energy_variance());
                out.values
                    .insert("zero_loss".into(), if zl.holds { 1.0 } else { 0.0 });
                Ok(out)
            },
        },
        ScenarioSpec {
            name: "lindblad-z-dephasing",
            summary: "Continuous Z dephasing reduced to the instantaneous-channel picture",
            params: vec![
                p("gamma", 0.1, "dephasing rate"),
                p("omega", 1.0, "level splitting"),
                p("t0", 1.0, "readout time"),
            ],
            paper_ref: "commuting Lindblad reduction: F_clock = ω²e^{−2γt} + γ²e^{−2γt}/(1−e^{−2γt})",
            run: |params| {
                let name = "lindblad-z-dephasing";
                let (gamma, omega, t0) =
                    (get(params, "gamma"), get(params, "omega"), get(params, "t0"));
                let spec = LindbladSpec::new(qubit_h(omega), lindblad::dephasing_z_jumps(gamma))
                    .map_err(|e| numerical(name, e))?;
                let s = 1.0 / 2f64.sqrt();
                let cf = lindblad::clock_fisher(&spec, &[re(s), re(s)], t0)
                    .map_err(|e| numerical(name, e))?;
                let mut out = output(name, params, "commuting Lindblad reduction: F_clock = ω²e^{−2γt} + γ²e^{−2γt}/(1−e^{−2γt})");
                out.values.insert("f_exact".into(), cf.f_exact);
                out.values.insert("f_unitary".into(), cf.f_unitary);
                out.values.insert("delta".into(), cf.delta);
                out.values.insert("delta_bound".into(), cf.delta_bound);
                let e2 = (-2.0 * gamma * t0).exp();
                out.values.insert(
                    "f_exact_closed_form".into(),
                    omega * omega * e2 + gamma * gamma * e2 / (1.0 - e2),
                );
                Ok(out)
            },
        },
        ScenarioSpec {
            name: "lindblad-x-dephasing",
            summary: "Continuous transversal dephasing (non-commuting reduction)",
            params: vec![
                p("gamma", 0.1, "dephasing rate"),
                p("omega", 1.0, "level splitting"),
                p("t0", 1.0, "readout time"),
            ],
            paper_ref: "non-commuting Lindblad reduction with damped Bloch precession",
            run: |params| {
                let name = "lindblad-x-dephasing";
                let (gamma, omega, t0) =
                    (get(params, "gamma"), get(params, "omega"), get(params, "t0"));
                let spec = LindbladSpec::new(qubit_h(omega), lindblad::dephasing_x_jumps(gamma))
                    .map_err(|e| numerical(name, e))?;
                let s = 1.0 / 2f64.sqrt();
                let cf = lindblad::clock_fisher(&spec, &[re(s), re(s)], t0)
                    .map_err(|e| numerical(name, e))?;
                let mut out = output(name, params, "non-commuting Lindblad reduction with damped Bloch precession");
                out.values.insert("f_exact".into(), cf.f_exact);
                out.values.insert("f_unitary".into(), cf.f_unitary);
                out.values.insert("delta".into(), cf.delta);
                out.values.insert("delta_bound".into(), cf.delta_bound);
                Ok(out)
            },
        },
        ScenarioSpec {
            name: "ad-repetition-bitflip",
            summary: "±-basis repetition pair under i.i.d. bit flips",
            params: vec![
                p("n", 6.0, "number of qubits (≤ 8)"),
                p("p", 0.01, "bit-flip probability"),
            ],
            paper_ref: "repetition pair under bit flips: ΔF = 4 − 4(1−p)^{2n}, first order in p despite distance n",
            run: |params| {
                let name = "ad-repetition-bitflip";
                let n = check_site_count(name, get(params, "n"), 8)?;
                let pp = get(params, "p");
                let (f_bob, f_alice) = repetition_f_bob(n, channels::bit_flip(pp).map_err(|e| numerical(name, e))?)
                    .map_err(|e| numerical(name, e))?;
                let mut out = output(name, params, "repetition pair under bit flips: ΔF = 4 − 4(1−p)^{2n}, first order in p despite distance n");
                out.values.insert("f_alice_t".into(), f_alice);
                out.values.insert("f_bob".into(), f_bob);
                out.values.insert("delta_f".into(), f_alice - f_bob);
                out.values.insert(
                    "delta_f_closed_form".into(),
                    4.0 - 4.0 * (1.0 - pp).powi(2 * n as i32),
                );
                Ok(out)
            },
        },
        ScenarioSpec {
            name: "repetition-z-dephasing",
            summary: "±-basis repetition pair under i.i.d. Z dephasing",
            params: vec![
                p("n", 6.0, "number of qubits (≤ 8)"),
                p("p", 0.005, "dephasing weight"),
            ],
            paper_ref: "repetition pair under Z dephasing: loss suppressed to order p^{n/2}",
            run: |params| {
                let name = "repetition-z-dephasing";
                let n = check_site_count(name, get(params, "n"), 8)?;
                let pp = get(params, "p");
                let (f_bob, f_alice) = repetition_f_bob(
                    n,
                    channels::partial_dephasing_z(pp).map_err(|e| numerical(name, e))?,
                )
                .map_err(|e| numerical(name, e))?;
                let mut out = output(name, params, "repetition pair under Z dephasing: loss suppressed to order p^{n/2}");
                out.values.insert("f_alice_t".into(), f_alice);
                out.values.insert("f_bob".into(), f_bob);
                out.values.insert("delta_f".into(), f_alice - f_bob);
                Ok(out)
            },
        },
        ScenarioSpec {
            name: "ghz-ad",
            summary: "GHZ probe under i.i.d. amplitude damping: pinched bound vs exact",
            params: vec![
                p("n", 8.0, "number of qubits (symmetric path; exact block value for all n)"),
                p("p", 0.05, "damping probability"),
                p("k", 8.0, "pinch weight cutoff"),
                p("omega", 2.0, "on-site splitting"),
            ],
            paper_ref: "pinched i.i.d. upper bound tracking the exact damped-GHZ sensitivity",
            run: |params| run_symmetric_ad("ghz-ad", "ghz", params),
        },
        ScenarioSpec {
            name: "plus-product-ad",
            summary: "Product |+⟩^⊗n probe under i.i.d. amplitude damping",
            params: vec![
                p("n", 8.0, "number of qubits"),
                p("p", 0.05, "damping probability"),
                p("k", 8.0, "pinch weight cutoff"),
                p("omega", 2.0, "on-site splitting"),
            ],
            paper_ref: "pinched i.i.d. upper bound for the spin-coherent probe",
            run: |params| run_symmetric_ad("plus-product-ad", "plus_product", params),
        },
        ScenarioSpec {
            name: "uniform-dicke-ad",
            summary: "Uniform Dicke superposition under i.i.d. amplitude damping",
            params: vec![
                p("n", 8.0, "number of qubits"),
                p("p", 0.05, "damping probability"),
                p("k", 8.0, "pinch weight cutoff"),
                p("omega", 2.0, "on-site splitting"),
            ],
            paper_ref: "pinched i.i.d. upper bound for the uniform Dicke superposition",
            run: |params| run_symmetric_ad("uniform-dicke-ad", "uniform_dicke", params),
        },
        ScenarioSpec {
            name: "half-gauss-ad",
            summary: "Half-Gaussian Dicke profile under i.i.d. amplitude damping",
            params: vec![
                p("n", 12.0, "number of qubits"),
                p("p", 0.05, "damping probability"),
                p("k", 4.0, "pinch weight cutoff"),
                p("omega", 2.0, "on-site splitting"),
                p("w", 0.4, "profile width"),
            ],
            paper_ref: "half-Gaussian Dicke profile balancing energy spread against decay leakage",
            run: |params| {
                let name = "half-gauss-ad";
                let n = check_site_count(name, get(params, "n"), 50)?;
                let (pp, k, omega, w) = (
                    get(params, "p"),
                    get(params, "k") as usize,
                    get(params, "omega"),
                    get(params, "w"),
                );
                let probe = manybody::probe_library("half_gauss", n, &[w])
                    .map_err(|e| numerical(name, e))?;
                let ch = channels::amplitude_damping(pp).map_err(|e| numerical(name, e))?;
                let bound = manybody::iid_pinched_symmetric(&probe, omega, &ch, k)
                    .map_err(|e| numerical(name, e))?;
                let mut out = output(name, params, "half-Gaussian Dicke profile balancing energy spread against decay leakage");
                if let Probe::Symmetric(s) = &probe {
                    out.values
                        .insert("f_alice_t".into(), 4.0 * s.energy_variance(omega));
                    out.values.insert(
                        "amp_ratio_ground".into(),
                        s.amplitudes()[n].re / s.amplitudes()[0].re,
                    );
                }
                out.values.insert("bound_upper".into(), bound.value);

                out.bounds.push(bound);
                Ok(out)
            },
        },
        ScenarioSpec {
            name: "dicke-pair-erasure",
            summary: "Even Dicke-pair superposition losing k sites",
            params: vec![
                p("n", 20.0, "number of qubits (symmetric path)"),
                p("q1", 4.0, "first excitation number"),
                p("q2", 16.0, "second excitation number"),
                p("k", 3.0, "sites erased with certainty"),
                p("omega", 2.0, "on-site splitting"),
            ],
            paper_ref: "Dicke-pair probes under erasure: sensitivity peaks away from the spectrum edges",
            run: |params| {
                let name = "dicke-pair-erasure";
                let n = check_site_count(name, get(params, "n"), 128)?;
                let (q1, q2, k, omega) = (
                    get(params, "q1") as usize,
                    get(params, "q2") as usize,
                    get(params, "k") as usize,
                    get(params, "omega"),
                );
                let probe = manybody::probe_library("dicke_pair", n, &[q1 as f64, q2 as f64])
                    .map_err(|e| numerical(name, e))?;
                let Probe::Symmetric(state) = probe else {
                    unreachable!("dicke_pair is symmetric")
                };
                let delta_f = manybody::erasure_loss_symmetric(&state, omega, k)
                    .map_err(|e| numerical(name, e))?;
                let f_alice = 4.0 * state.energy_variance(omega);
                let mut out = output(name, params, "Dicke-pair probes under erasure: sensitivity peaks away from the spectrum edges");
                out.values.insert("f_alice_t".into(), f_alice);
                out.values.insert("delta_f".into(), delta_f);
                out.values.insert("f_bob".into(), f_alice - delta_f);
                Ok(out)
            },
        },
        ScenarioSpec {
            name: "ising-code",
            summary: "Chain code state (f/af superposition family) under amplitude damping",
            params: vec![
                p("n", 8.0, "chain length"),
                p("p", 0.005, "damping probability"),
                p("k", 4.0, "pinch weight cutoff"),
                p("j", 2.0, "Ising coupling"),
            ],
            paper_ref: "interacting-chain code probe: loss suppressed to second order in p",
            run: |params| run_ising_probe("ising-code", "code_f_af", params),
        },
        ScenarioSpec {
            name: "ising-f-af",
            summary: "Bare ferro/antiferro superposition under amplitude damping",
            params: vec![
                p("n", 8.0, "chain length"),
                p("p", 0.005, "damping probability"),
                p("k", 4.0, "pinch weight cutoff"),
                p("j", 2.0, "Ising coupling"),
            ],
            paper_ref: "bare two-configuration probe: loss already first order in p",
            run: |params| run_ising_probe("ising-f-af", "f_af", params),
        },
        ScenarioSpec {
            name: "signal-hamiltonian",
            summary: "Effective generator for a signal term in the Hamiltonian",
            params: vec![
                p("omega", 1.0, "drift splitting"),
                p("f0", 0.3, "signal strength at the expansion point"),
                p("big_t", 0.4, "evolution time"),
                p("order", 12.0, "series truncation order"),
            ],
            paper_ref: "commutator series for the effective signal generator",
            run: |params| {
                let name = "signal-hamiltonian";
                let (omega, f0, big_t, order) = (
                    get(params, "omega"),
                    get(params, "f0"),
                    get(params, "big_t"),
                    get(params, "order") as usize,
                );
                let g = HermitianOperator::new(ComplexMatrix::from_real_rows(&[
                    &[0.0, 1.0],
                    &[1.0, 0.0],
                ]))
                .expect("X");
                let (k, residual) =
                    clock::signal_generator(&qubit_h(omega), &g, f0, big_t, order)
                        .map_err(|e| numerical(name, e))?;
                let mut out = output(name, params, "commutator series for the effective signal generator");
                out.values
                    .insert("k_norm".into(), crate::linalg::op_norm(k.matrix()));
                out.values.insert("series_tail".into(), residual);
                Ok(out)
            },
        },
    ]
}

/// Wire form of a metrology experiment: dense state vector and Hamiltonian
/// as `[re, im]` entries, the channel referenced by name and parameters.
#[derive(Debug, Clone, Serialize, serde::Deserialize)]
pub struct ClockExperiment {
    pub psi: Vec<[f64; 2]>,
    /// Row-major Hamiltonian entries.
    pub h: Vec<Vec<[f64; 2]>>,
    pub channel: ChannelRef,
    pub t0: f64,
    pub label: String,
}

#[derive(Debug, Clone, Serialize, serde::Deserialize)]
pub struct ChannelRef {
    pub name: String,
    pub params: Vec<f64>,
}

impl ClockExperiment {
    pub fn new(
        psi: &[C64],
        h: &HermitianOperator,
        channel_name: &str,
        channel_params: &[f64],
        t0: f64,
        label: &str,
    ) -> Self {
        let dim = h.dim();
        Self {
            psi: psi.iter().map(|z| [z.re, z.im]).collect(),
            h: (0..dim)
                .map(|i| {
                    (0..dim)
                        .map(|j| {
                            let z = h.matrix().get(i, j);
                            [z.re, z.im]
                        })
                        .collect()
                })
                .collect(),
            channel: ChannelRef {
                name: channel_name.to_string(),
                params: channel_params.to_vec(),
            },
            t0,
            label: label.to_string(),
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("serializable")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        serde_json::from_value(v.clone()).map_err(|e| ScenarioError::Numerical {
            scenario: "clock-experiment".into(),
            message: format!("experiment JSON: {e}"),
        })
    }

    /// Resolves the channel reference and assembles the scenario value.
    pub fn build(&self) -> Result<MetrologyScenario> {
        let psi: Vec<C64> = self.psi.iter().map(|[re, im]| C64::new(*re, *im)).collect();
        let dim = self.h.len();
        let h = HermitianOperator::new(ComplexMatrix::from_fn(dim, dim, |i, j| {
            let [re, im] = self.h[i][j];
            C64::new(re, im)
        }))
        .map_err(|e| numerical("clock-experiment", e))?;
        let channel = channels::by_name(&self.channel.name, &self.channel.params)
            .map_err(|e| numerical("clock-experiment", e))?;
        MetrologyScenario::new(psi, h, channel, self.t0, self.label.clone())
            .map_err(|e| numerical("clock-experiment", e))
    }
}

pub fn code422_state() -> Vec<C64> {
    let mut psi = vec![re(0.0); 16];
    for idx in [0b0000usize, 0b1111, 0b0110, 0b1001] {
        psi[idx] = re(0.5);
    }
    psi
}

/// H = ω Σ_edges (Z_iZ_j + s_x X_iX_j + s_y Y_iY_j) on the 4-qubit square.
pub fn code422_hamiltonian(omega: f64, sx: f64, sy: f64) -> HermitianOperator {
    let edges = [(0usize, 1usize), (0, 2), (1, 3), (2, 3)];
    let dim = 16;
    let mut m = ComplexMatrix::zeros(dim, dim);
    let paulis = |letter: char| -> ComplexMatrix {
        match letter {
            'X' => ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]),
            'Y' => {
                let mut y = ComplexMatrix::zeros(2, 2);
                y.set(0, 1, C64::new(0.0, -1.0));
                y.set(1, 0, C64::new(0.0, 1.0));
                y
            }
            _ => ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, -1.0]]),
        }
    };
    let two_site = |letter: char, a: usize, b: usize| -> ComplexMatrix {
        let mut acc = ComplexMatrix::identity(1);
        for q in 0..4 {
            let factor = if q == a || q == b {
                paulis(letter)
            } else {
                ComplexMatrix::identity(2)
            };
            acc = acc.kron(&factor);
        }
        acc
    };
    for &(a, b) in &edges {
        m = m.add(&two_site('Z', a, b).scale(re(omega)));
        if sx != 0.0 {
            m = m.add(&two_site('X', a, b).scale(re(omega * sx)));
        }
        if sy != 0.0 {
            m = m.add(&two_site('Y', a, b).scale(re(omega * sy)));
        }
    }
    HermitianOperator::new(m).expect("sum of Hermitian terms")
}

/// Dense F_Bob and F_Alice for the ±-repetition pair through an i.i.d.
/// single-qubit channel.
fn repetition_f_bob(
    n: usize,
    single: channels::KrausChannel,
) -> std::result::Result<(f64, f64), String> {
    let dim = 1usize << n;
    let s = (1.0 / dim as f64).sqrt();
    let plus: Vec<C64> = vec![re(s); dim];
    let minus: Vec<C64> = (0..dim)
        .map(|i| re(s * if (i as u32).count_ones() % 2 == 0 { 1.0 } else { -1.0 }))
        .collect();
    // H = Z^⊗n maps |+^n⟩ to |−^n⟩: σ² = 1, F_Alice = 4.
    let tensor = single.tensor_power(n).map_err(|e| e.to_string())?;
    let proj = ComplexMatrix::outer(&plus, &plus);
    let d = ComplexMatrix::outer(&minus, &plus)
        .sub(&ComplexMatrix::outer(&plus, &minus))
        .scale(C64::new(0.0, -1.0));
    let f_bob = crate::fisher::qfi_of_output(
        &tensor.channel.apply(&proj),
        &tensor.channel.apply(&d),
    )
    .map_err(|e| e.to_string())?;
    Ok((f_bob, 4.0))
}

/// Shared runner for the amplitude-damped symmetric probes.  The CSV columns
/// follow the bound-sweep convention: p, f_bob, delta_f, bound_upper,
/// bound_lower, k (the exact value and the pre-processing lower bound appear
/// when the dense path is available — always for the damped GHZ probe, and
/// for n ≤ 8 otherwise).
fn run_symmetric_ad(
    name: &'static str,
    probe_name: &str,
    params: &BTreeMap<String, f64>,
) -> Result<ScenarioOutput> {
    let n = check_site_count(name, get(params, "n"), 50)?;
    let (pp, k, omega) = (
        get(params, "p"),
        get(params, "k") as usize,
        get(params, "omega"),
    );
    let probe = manybody::probe_library(probe_name, n, &[]).map_err(|e| numerical(name, e))?;
    let ch = channels::amplitude_damping(pp).map_err(|e| numerical(name, e))?;
    let bound =
        manybody::iid_pinched_symmetric(&probe, omega, &ch, k).map_err(|e| numerical(name, e))?;
    let mut out = output(name, params, "pinched i.i.d. upper bound for symmetric probes");
    let mut f_alice = f64::NAN;
    if let Probe::Symmetric(s) = &probe {
        f_alice = 4.0 * s.energy_variance(omega);
        out.values.insert("f_alice_t".into(), f_alice);
    }
    out.values.insert("bound_upper".into(), bound.value);

    let exact = if probe_name == "ghz" {
        Some(manybody::ghz_amplitude_damping_exact(n, pp, omega).map_err(|e| numerical(name, e))?)
    } else if n <= 8 {
        if let Probe::Symmetric(s) = &probe {
            let psi = s.densify().map_err(|e| numerical(name, e))?;
            Some(
                bounds::exact_f_bob_iid(&psi, &onsite_z(n, omega), &ch, n)
                    .map_err(|e| numerical(name, e))?,
            )
        } else {
            None
        }
    } else {
        None
    };
    if let Some(exact) = exact {
        out.values.insert("f_bob".into(), exact);
        out.values.insert("delta_f".into(), f_alice - exact);
    }
    if n <= 8 {
        if let Probe::Symmetric(s) = &probe {
            let psi = s.densify().map_err(|e| numerical(name, e))?;
            let lower = bounds::preprocessing_lower_iid_exact(&psi, &onsite_z(n, omega), &ch, n)
                .map_err(|e| numerical(name, e))?;
            out.values.insert("bound_lower".into(), lower.value);
            out.bounds.push(lower);
        }
    }
    out.bounds.push(bound);
    Ok(out)
}

fn run_ising_probe(
    name: &'static str,
    probe_name: &str,
    params: &BTreeMap<String, f64>,
) -> Result<ScenarioOutput> {
    let n = check_site_count(name, get(params, "n"), 50)?;
    let (pp, k, j) = (
        get(params, "p"),
        get(params, "k") as usize,
        get(params, "j"),
    );
    let probe = manybody::probe_library(probe_name, n, &[j]).map_err(|e| numerical(name, e))?;
    let ch = channels::amplitude_damping(pp).map_err(|e| numerical(name, e))?;
    let bound =
        manybody::iid_pinched_symmetric(&probe, 0.0, &ch, k).map_err(|e| numerical(name, e))?;
    let mut out = output(name, params, "interacting-chain probes under amplitude damping");
    if let Probe::Sparse { state, hamiltonian } = &probe {
        // σ² from the diagonal Hamiltonian.
        let energies: Vec<f64> = state
            .terms()
            .iter()
            .map(|&(bits, _)| hamiltonian.energy(n, bits))
            .collect();
        let mean: f64 = state
            .terms()
            .iter()
            .zip(&energies)
            .map(|((_, a), e)| a.norm_sqr() * e)
            .sum();
        let sigma2: f64 = state
            .terms()
            .iter()
            .zip(&energies)
            .map(|((_, a), e)| a.norm_sqr() * (e - mean).powi(2))
            .sum();
        out.values.insert("f_alice_t".into(), 4.0 * sigma2);
        if n <= 8 {
            let psi = state.densify().map_err(|e| numerical(name, e))?;
            let dense_h = hamiltonian.densify(n).map_err(|e| numerical(name, e))?;
            let tensor = ch.tensor_power(n).map_err(|e| numerical(name, e))?;
            let exact = bounds::exact_f_bob(&psi, &dense_h, &tensor.channel)
                .map_err(|e| numerical(name, e))?;
            out.values.insert("f_bob_exact".into(), exact);
            out.values.insert("delta_f_exact".into(), 4.0 * sigma2 - exact);
        }
    }
    out.values.insert("bound_upper".into(), bound.value);

    out.bounds.push(bound);
    let _ = DiagonalHamiltonian::OnSite { omega: 0.0 };
    Ok(out)
}
