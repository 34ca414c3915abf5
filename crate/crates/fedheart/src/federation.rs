//! Four-client cross-silo federated simulation: broadcast, seeded local
//! SGD steps, then one of four server aggregation rules — FedAvg weighted
//! averaging, FedAdam, FedYogi, or SCAFFOLD with control variates.
//!
//! Sign convention: a [`RoundDelta`] stores `θ_after − θ_before` (client
//! progress). The adaptive server rules treat the negated average delta as
//! a pseudo-gradient, so with β₁ = β₂ = 0 and τ → 0 the server moves the
//! global parameters in the direction the clients moved.

use std::collections::BTreeMap;

use crate::dataset::{partition_by_center, split_train_test, standardize, Center, TabularDataset};
use crate::error::{Error, Result};
use crate::models::sgd;
use crate::models::{evaluate, objective_for, Family, Hyperparams};
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Strategy {
    FedAvg,
    FedAdam,
    FedYogi,
    Scaffold,
}

impl Strategy {
    pub const ALL: [Strategy; 4] = [
        Strategy::FedAvg,
        Strategy::FedAdam,
        Strategy::FedYogi,
        Strategy::Scaffold,
    ];

    pub fn parse(s: &str) -> Result<Strategy> {
        match s.to_ascii_lowercase().as_str() {
            "fedavg" => Ok(Strategy::FedAvg),
            "fedadam" => Ok(Strategy::FedAdam),
            "fedyogi" => Ok(Strategy::FedYogi),
            "scaffold" => Ok(Strategy::Scaffold),
            other => Err(Error::usage(format!("unknown strategy '{other}'"))),
        }
    }
}

impl std::fmt::Display for Strategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            Strategy::FedAvg => "FedAvg",
            Strategy::FedAdam => "FedAdam",
            Strategy::FedYogi => "FedYogi",
            Strategy::Scaffold => "SCAFFOLD",
        };
        f.write_str(name)
    }
}

/// How SCAFFOLD refreshes a client control variate after its local steps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScaffoldOption {
    /// Option (i): one extra full-batch gradient pass at the server
    /// parameters, `c_i⁺ = g_i(x)`.
    GradientAtX,
    /// Option (ii): reuse the already-computed steps,
    /// `c_i⁺ = c_i − c + (x − y_i)/(K·η_l)`.
    StepDifference,
}

/// One client: its local (already standardized) splits and optimizer state.
#[derive(Debug, Clone)]
pub struct ClientState {
    pub id: Center,
    pub train: TabularDataset,
    pub test: TabularDataset,
    /// Local training-set size; the FedAvg / accuracy weight.
    pub n_k: usize,
    /// Local parameters after the most recent round.
    pub theta: Vec<f64>,
    /// SCAFFOLD control variate c_i.
    pub c_i: Vec<f64>,
    /// Local step size η_l.
    pub eta_l: f64,
}

/// Server-side optimizer state shared by FedAdam/FedYogi/SCAFFOLD.
#[derive(Debug, Clone)]
pub struct ServerOptState {
    /// Global parameters x.
    pub x: Vec<f64>,
    pub m: Vec<f64>,
    pub v: Vec<f64>,
    pub beta1: f64,
    pub beta2: f64,
    /// Server learning rate η_g.
    pub eta_g: f64,
    /// Adaptivity / stability constant τ.
    pub tau: f64,
    /// SCAFFOLD global control variate c.
    pub c: Vec<f64>,
}

impl ServerOptState {
    /// Fresh state around initial parameters `x` with the stated defaults
    /// (β₁ = 0.9, β₂ = 0.99, τ = 1e-3).
    pub fn new(x: Vec<f64>, eta_g: f64) -> ServerOptState {
        let dim = x.len();
        ServerOptState {
            x,
            m: vec![0.0; dim],
            v: vec![0.0; dim],
            beta1: 0.9,
            beta2: 0.99,
            eta_g,
            tau: 1e-3,
            c: vec![0.0; dim],
        }
    }
}

/// A client's parameter movement over one round, `θ_after − θ_before`.
#[derive(Debug, Clone)]
pub struct RoundDelta {
    pub delta: Vec<f64>,
    pub n_k: usize,
}

/// Per-round debugging record.
#[derive(Debug, Clone)]
pub struct RoundTrace {
    pub round: usize,
    /// Σ|x_i|, a cheap fingerprint of the global parameters.
    pub checksum: f64,
    pub client_acc: Vec<f64>,
}

/// Outcome of one federated run (one seed).
#[derive(Debug, Clone)]
pub struct FedRunResult {
    pub client_acc: Vec<(Center, f64)>,
    /// Σ (n_k/n) · Acc_k.
    pub acc_avg: f64,
    pub trace: Vec<RoundTrace>,
}

/// Mean and population standard deviation over the seed list.
#[derive(Debug, Clone)]
pub struct FedSummary {
    pub per_seed: Vec<FedRunResult>,
    pub mean: f64,
    pub std: f64,
}

/// Everything a federated run needs besides data and seeds.
#[derive(Debug, Clone)]
pub struct FedConfig {
    pub family: Family,
    pub hp: Hyperparams,
    pub strategy: Strategy,
    pub rounds: usize,
    pub local_steps: usize,
    pub scaffold_option: ScaffoldOption,
    /// Server learning rate; `None` picks the strategy default
    /// (0.01 for FedAdam/FedYogi, 1.0 for SCAFFOLD averaging).
    pub eta_g: Option<f64>,
}

impl FedConfig {
    pub fn new(family: Family, strategy: Strategy) -> FedConfig {
        FedConfig {
            family,
            hp: Hyperparams::tuned(family),
            strategy,
            rounds: 30,
            local_steps: 50,
            scaffold_option: ScaffoldOption::StepDifference,
            eta_g: None,
        }
    }

    fn resolved_eta_g(&self) -> f64 {
        self.eta_g.unwrap_or(match self.strategy {
            Strategy::Scaffold => 1.0,
            _ => 0.01,
        })
    }
}

/// Run `s` seeded mini-batch steps from the broadcast parameters `x` and
/// return the parameter delta. `correction` (SCAFFOLD's `c − c_i`) is added
/// to every step's gradient.
pub fn local_steps(
    cs: &ClientState,
    hp: &Hyperparams,
    x: &[f64],
    s: usize,
    correction: Option<&[f64]>,
    seed: u64,
) -> Result<RoundDelta> {
    let obj = objective_for(hp.family, &cs.train, hp)?;
    let theta = sgd::run_steps(
        obj.as_ref(),
        x.to_vec(),
        cs.eta_l,
        hp.batch_size,
        s,
        correction,
        seed,
    );
    let delta = theta.iter().zip(x).map(|(a, b)| a - b).collect();
    Ok(RoundDelta {
        delta,
        n_k: cs.n_k,
    })
}

/// Weighted average Σ (n_k/n) · θ_k.
pub fn aggregate_fedavg(params: &[(Vec<f64>, usize)]) -> Result<Vec<f64>> {
    if params.is_empty() {
        return Err(Error::usage("nothing to aggregate"));
    }
    let n: usize = params.iter().map(|(_, nk)| nk).sum();
    if n == 0 {
        return Err(Error::usage("total client weight is zero"));
    }
    let dim = params[0].0.len();
    let mut out = vec![0.0; dim];
    for (theta, nk) in params {
        if theta.len() != dim {
            return Err(Error::usage("inconsistent parameter shapes"));
        }
        let w = *nk as f64 / n as f64;
        for (o, t) in out.iter_mut().zip(theta) {
            *o += w * t;
        }
    }
    Ok(out)
}

/// Unweighted average client delta Δ_t = (1/|S|) Σ Δ_i.
fn mean_delta(deltas: &[RoundDelta]) -> Result<Vec<f64>> {
    if deltas.is_empty() {
        return Err(Error::usage("no client deltas"));
    }
    let dim = deltas[0].delta.len();
    let mut avg = vec![0.0; dim];
    for d in deltas {
        if d.delta.len() != dim {
            return Err(Error::usage("inconsistent delta shapes"));
        }
        for (a, v) in avg.iter_mut().zip(&d.delta) {
            *a += v;
        }
    }
    let s = deltas.len() as f64;
    avg.iter_mut().for_each(|v| *v /= s);
    Ok(avg)
}

/// One FedAdam server step:
/// m ← β₁m + (1−β₁)g, v ← β₂v + (1−β₂)g², x ← x − η·m/(√v + τ),
/// where g is the pseudo-gradient −Δ_t.
pub fn server_adam_step(st: &ServerOptState, deltas: &[RoundDelta]) -> Result<ServerOptState> {
    let g: Vec<f64> = mean_delta(deltas)?.iter().map(|d| -d).collect();
    let mut next = st.clone();
    for i in 0..g.len() {
        next.m[i] = st.beta1 * st.m[i] + (1.0 - st.beta1) * g[i];
        next.v[i] = st.beta2 * st.v[i] + (1.0 - st.beta2) * g[i] * g[i];
        next.x[i] = st.x[i] - st.eta_g * next.m[i] / (next.v[i].sqrt() + st.tau);
    }
    Ok(next)
}

/// Sign with sign(0) = 0, unlike `f64::signum`.
fn sign(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// One FedYogi server step: as FedAdam except
/// v ← v − (1−β₂)·g²·sign(v − g²).
pub fn server_yogi_step(st: &ServerOptState, deltas: &[RoundDelta]) -> Result<ServerOptState> {
    let g: Vec<f64> = mean_delta(deltas)?.iter().map(|d| -d).collect();
    let mut next = st.clone();
    for i in 0..g.len() {
        let g2 = g[i] * g[i];
        next.m[i] = st.beta1 * st.m[i] + (1.0 - st.beta1) * g[i];
        next.v[i] = st.v[i] - (1.0 - st.beta2) * g2 * sign(st.v[i] - g2);
        next.x[i] = st.x[i] - st.eta_g * next.m[i] / (next.v[i].sqrt() + st.tau);
    }
    Ok(next)
}

/// One SCAFFOLD round over all clients (full participation):
/// correction `c − c_i` during the K local steps, then
/// `x ← x + (η_g/|S|) Σ (y_i − x)` and `c ← c + (1/N) Σ (c_i⁺ − c_i)`.
pub fn scaffold_round(
    clients: &mut [ClientState],
    st: &ServerOptState,
    hp: &Hyperparams,
    option: ScaffoldOption,
    k_steps: usize,
    seed: u64,
) -> Result<ServerOptState> {
    if clients.is_empty() {
        return Err(Error::usage("no clients"));
    }
    if k_steps == 0 && option == ScaffoldOption::StepDifference {
        return Err(Error::usage(
            "SCAFFOLD option (ii) divides by K·η_l; K must be positive",
        ));
    }
    let dim = st.x.len();
    let s_count = clients.len() as f64;
    let mut x_shift = vec![0.0; dim];
    let mut c_shift = vec![0.0; dim];
    for (idx, cs) in clients.iter_mut().enumerate() {
        let correction: Vec<f64> = st.c.iter().zip(&cs.c_i).map(|(c, ci)| c - ci).collect();
        let rd = local_steps(
            cs,
            hp,
            &st.x,
            k_steps,
            Some(&correction),
            rng::mix(seed, idx as u64),
        )?;
        let y_i: Vec<f64> = st.x.iter().zip(&rd.delta).map(|(x, d)| x + d).collect();
        let c_plus: Vec<f64> = match option {
            ScaffoldOption::GradientAtX => {
                let obj = objective_for(hp.family, &cs.train, hp)?;
                let all: Vec<usize> = (0..obj.n_rows()).collect();
                obj.grad(&st.x, &all)
            }
            ScaffoldOption::StepDifference => {
                let scale = 1.0 / (k_steps as f64 * cs.eta_l);
                (0..dim)
                    .map(|i| cs.c_i[i] - st.c[i] + scale * (st.x[i] - y_i[i]))
                    .collect()
            }
        };
        for i in 0..dim {
            x_shift[i] += y_i[i] - st.x[i];
            c_shift[i] += c_plus[i] - cs.c_i[i];
        }
        cs.theta = y_i;
        cs.c_i = c_plus;
    }
    let mut next = st.clone();
    for i in 0..dim {
        next.x[i] += st.eta_g * x_shift[i] / s_count;
        next.c[i] += c_shift[i] / s_count;
    }
    Ok(next)
}

/// Build the four clients from the pooled (preprocessed, unstandardized)
/// dataset: per-center seeded 66/34 split and local standardisation.
pub fn make_clients(
    ds: &TabularDataset,
    hp: &Hyperparams,
    seed: u64,
) -> Result<Vec<ClientState>> {
    let parts: BTreeMap<Center, TabularDataset> = partition_by_center(ds);
    let mut clients = Vec::with_capacity(4);
    for center in Center::ALL {
        let local = &parts[&center];
        if local.n_rows() == 0 {
            return Err(Error::usage(format!("center {center} has no rows")));
        }
        let (train, test) = split_train_test(local, seed, 0.66)?;
        let (train, test) = if hp.family.standardized() {
            let (a, b, _) = standardize(&train, &test)?;
            (a, b)
        } else {
            (train, test)
        };
        let n_k = train.n_rows();
        clients.push(ClientState {
            id: center,
            train,
            test,
            n_k,
            theta: Vec::new(),
            c_i: Vec::new(),
            eta_l: hp.learning_rate,
        });
    }
    Ok(clients)
}

/// One federated run for one seed: R rounds of broadcast → local steps →
/// aggregate, then local-test evaluation per client.
pub fn run_federated_once(
    ds: &TabularDataset,
    cfg: &FedConfig,
    seed: u64,
) -> Result<FedRunResult> {
    if !cfg.family.differentiable() {
        return Err(Error::usage(format!(
            "family {} cannot be federated; choose LR, NN1 or SVM",
            cfg.family
        )));
    }
    let mut clients = make_clients(ds, &cfg.hp, seed)?;
    let obj0 = objective_for(cfg.family, &clients[0].train, &cfg.hp)?;
    let dim = obj0.dim();
    let x0 = obj0.init(seed);
    let mut st = ServerOptState::new(x0, cfg.resolved_eta_g());
    for cs in &mut clients {
        cs.c_i = vec![0.0; dim];
        cs.theta = st.x.clone();
    }

    let mut trace = Vec::with_capacity(cfg.rounds);
    for round in 0..cfg.rounds {
        let round_seed = rng::mix(seed, 0x7D0 + round as u64);
        st = match cfg.strategy {
            Strategy::Scaffold => scaffold_round(
                &mut clients,
                &st,
                &cfg.hp,
                cfg.scaffold_option,
                cfg.local_steps,
                round_seed,
            )?,
            _ => {
                let mut deltas = Vec::with_capacity(clients.len());
                for (idx, cs) in clients.iter_mut().enumerate() {
                    let rd = local_steps(
                        cs,
                        &cfg.hp,
                        &st.x,
                        cfg.local_steps,
                        None,
                        rng::mix(round_seed, idx as u64),
                    )?;
                    cs.theta = st.x.iter().zip(&rd.delta).map(|(x, d)| x + d).collect();
                    deltas.push(rd);
                }
                match cfg.strategy {
                    Strategy::FedAvg => {
                        let params: Vec<(Vec<f64>, usize)> = clients
                            .iter()
                            .map(|c| (c.theta.clone(), c.n_k))
                            .collect();
                        let mut next = st.clone();
                        next.x = aggregate_fedavg(&params)?;
                        next
                    }
                    Strategy::FedAdam => server_adam_step(&st, &deltas)?,
                    Strategy::FedYogi => server_yogi_step(&st, &deltas)?,
                    Strategy::Scaffold => unreachable!(),
                }
            }
        };
        let client_acc = eval_clients(&clients, &cfg.hp, &st.x)?;
        trace.push(RoundTrace {
            round,
            checksum: st.x.iter().map(|v| v.abs()).sum(),
            client_acc,
        });
    }

    let accs = eval_clients(&clients, &cfg.hp, &st.x)?;
    let n: usize = clients.iter().map(|c| c.n_k).sum();
    let acc_avg = clients
        .iter()
        .zip(&accs)
        .map(|(c, a)| c.n_k as f64 / n as f64 * a)
        .sum();
    let client_acc = clients
        .iter()
        .map(|c| c.id)
        .zip(accs.iter().copied())
        .collect();
    Ok(FedRunResult {
        client_acc,
        acc_avg,
        trace,
    })
}

fn eval_clients(clients: &[ClientState], hp: &Hyperparams, x: &[f64]) -> Result<Vec<f64>> {
    let mut accs = Vec::with_capacity(clients.len());
    for cs in clients {
        let obj = objective_for(hp.family, &cs.train, hp)?;
        let model = obj.model(x);
        accs.push(evaluate(&model, &cs.test)?);
    }
    Ok(accs)
}

/// Federated run over a seed list; reports mean and population std of the
/// weighted-average accuracy.
pub fn run_federated(ds: &TabularDataset, cfg: &FedConfig, seeds: &[u64]) -> Result<FedSummary> {
    if seeds.is_empty() {
        return Err(Error::usage("seed list must not be empty"));
    }
    let mut per_seed = Vec::with_capacity(seeds.len());
    for &seed in seeds {
        per_seed.push(run_federated_once(ds, cfg, seed)?);
    }
    let accs: Vec<f64> = per_seed.iter().map(|r| r.acc_avg).collect();
    let (mean, std) = mean_std(&accs);
    Ok(FedSummary {
        per_seed,
        mean,
        std,
    })
}

/// Mean and population standard deviation.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Train/evaluate on one center's data alone (no federation), per seed.
pub fn run_local_baseline(
    center_ds: &TabularDataset,
    hp: &Hyperparams,
    seeds: &[u64],
) -> Result<(f64, f64)> {
    if seeds.is_empty() {
        return Err(Error::usage("seed list must not be empty"));
    }
    let mut accs = Vec::with_capacity(seeds.len());
    for &seed in seeds {
        accs.push(crate::models::centralized_accuracy(hp, center_ds, seed)?);
    }
    Ok(mean_std(&accs))
}
