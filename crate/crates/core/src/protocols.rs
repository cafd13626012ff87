//! The six protocol circuits and their seeded execution.
//!
//! Every protocol is laid out on the same slot grid as protocol (f). The
//! system qubit is `Q2`; positions 1–6 along its timeline alternate between
//! θ- and z-measurements:
//!
//! | position | basis | realisation                                  |
//! |----------|-------|----------------------------------------------|
//! | 1 (O1)   | θ     | initialisation `X` then `R` into `|1⟩_θ`     |
//! | 2 (O2)   | z     | H-conjugated CNOT copy onto `Q1`             |
//! | 3        | θ     | `R†`, copy onto `Q0`, `R`                    |
//! | 4        | z     | copy onto `Q4`                               |
//! | 5        | θ     | `R†`, copy onto `Q3`, `R`                    |
//! | 6 (O3)   | z     | terminal measurement of `Q2`                 |
//!
//! Protocols (b)–(e) keep exactly one of positions 2–5, (f) keeps all four
//! and (a) none. Unused cells on measured qubits are pinned with Id so the
//! compiler cannot move anything.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::compiler::{
    compile, insert_countermeasures, validate, Circuit, DeviceConstraints, Gate, GateKind, HhSite,
    PinWindow,
};
use crate::noise::{apply_noise, NoiseModel};
use crate::qsim::{sample_distribution, Counts};
use crate::{Error, Result, DEFAULT_REPETITIONS, DEFAULT_SHOTS, DEVICE_THETA};

/// The system qubit; the only legal CNOT target.
pub const SYSTEM_QUBIT: usize = 2;

const GAP: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ProtocolId {
    A,
    B,
    C,
    D,
    E,
    F,
}

impl ProtocolId {
    pub const ALL: [ProtocolId; 6] = [
        ProtocolId::A,
        ProtocolId::B,
        ProtocolId::C,
        ProtocolId::D,
        ProtocolId::E,
        ProtocolId::F,
    ];

    /// Intermediate positions (2–5) present in this protocol.
    pub fn positions(self) -> &'static [Position] {
        use Position::*;
        match self {
            ProtocolId::A => &[],
            ProtocolId::B => &[Second],
            ProtocolId::C => &[Third],
            ProtocolId::D => &[Fourth],
            ProtocolId::E => &[Fifth],
            ProtocolId::F => &[Second, Third, Fourth, Fifth],
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for ProtocolId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = ["a", "b", "c", "d", "e", "f"][self.index()];
        f.write_str(c)
    }
}

impl FromStr for ProtocolId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "a" => Ok(ProtocolId::A),
            "b" => Ok(ProtocolId::B),
            "c" => Ok(ProtocolId::C),
            "d" => Ok(ProtocolId::D),
            "e" => Ok(ProtocolId::E),
            "f" => Ok(ProtocolId::F),
            _ => Err(Error::InvalidPlan(format!("unknown protocol `{s}`"))),
        }
    }
}

/// Intermediate measurement positions on the system timeline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Position {
    Second,
    Third,
    Fourth,
    Fifth,
}

impl Position {
    pub const ALL: [Position; 4] = [
        Position::Second,
        Position::Third,
        Position::Fourth,
        Position::Fifth,
    ];

    pub fn basis(self) -> Basis {
        match self {
            Position::Second | Position::Fourth => Basis::Z,
            Position::Third | Position::Fifth => Basis::Theta,
        }
    }

    pub fn role(self) -> Role {
        match self {
            Position::Second => Role::O2,
            Position::Third => Role::M3,
            Position::Fourth => Role::M4,
            Position::Fifth => Role::M5,
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Basis {
    Z,
    Theta,
}

/// Symbols bound to measurement results. `O1` is the initialisation and
/// always reads `+1`; `M3`–`M5` are the intermediate measurements at
/// positions 3–5.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Role {
    O1,
    O2,
    M3,
    M4,
    M5,
    O3,
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GatesetMode {
    /// Only the ten device gates; θ must be `−3π/4`.
    Device,
    /// Exact `Rx` rotations for any θ.
    Ideal,
}

/// Ancilla qubit used at each intermediate position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AncillaMap {
    pub second: usize,
    pub third: usize,
    pub fourth: usize,
    pub fifth: usize,
}

impl Default for AncillaMap {
    fn default() -> Self {
        Self {
            second: 1,
            third: 0,
            fourth: 4,
            fifth: 3,
        }
    }
}

impl AncillaMap {
    pub fn get(&self, p: Position) -> usize {
        match p {
            Position::Second => self.second,
            Position::Third => self.third,
            Position::Fourth => self.fourth,
            Position::Fifth => self.fifth,
        }
    }
}

/// Where an intermediate measurement sits in a built circuit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeasurementSite {
    pub role: Role,
    pub position: Position,
    pub basis: Basis,
    pub ancilla: usize,
    /// Slot of the copying CNOT.
    pub copy_slot: usize,
    /// Last slot of the measurement block on the system qubit.
    pub end_slot: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolCircuit {
    pub id: ProtocolId,
    pub theta: f64,
    pub mode: GatesetMode,
    pub circuit: Circuit,
    /// Measured qubit for each role; `O1` is absent (it is an initialisation).
    pub roles: BTreeMap<Role, usize>,
    pub sites: Vec<MeasurementSite>,
    /// Gates realising O1 on the system qubit, in time order.
    pub o1: Vec<GateKind>,
}

impl ProtocolCircuit {
    pub fn site(&self, role: Role) -> Option<&MeasurementSite> {
        self.sites.iter().find(|s| s.role == role)
    }

    pub fn ancilla_measurements(&self) -> usize {
        self.sites.len()
    }
}

/// One gate sequence on the system qubit plus the ancilla copy, relative to
/// the block start.
struct Block {
    system: Vec<GateKind>,
    /// Offset of the CNOT within `system`; `None` for the initialisation.
    copy_at: Option<usize>,
}

impl Block {
    fn len(&self) -> usize {
        self.system.len()
    }
}

fn rotation(mode: GatesetMode, theta: f64) -> Vec<GateKind> {
    use GateKind::*;
    match mode {
        // R = H T H S† H as a matrix product, applied right to left.
        GatesetMode::Device => vec![H, Sdg, H, T, H],
        GatesetMode::Ideal => vec![Rx(-theta)],
    }
}

fn rotation_dagger(mode: GatesetMode, theta: f64) -> Vec<GateKind> {
    use GateKind::*;
    match mode {
        GatesetMode::Device => vec![H, Tdg, H, S, H],
        GatesetMode::Ideal => vec![Rx(theta)],
    }
}

/// `H · CX(ancilla → system) · H` on both qubits is a copy of the system's z
/// value onto the ancilla. Neighbouring H pairs on the system qubit are
/// cancelled here rather than left for the compiler.
fn measurement_block(basis: Basis, mode: GatesetMode, theta: f64) -> Block {
    use GateKind::*;
    let mut system = Vec::new();
    if basis == Basis::Theta {
        system.extend(rotation_dagger(mode, theta));
    }
    system.push(H);
    cancel_trailing_hh(&mut system);
    let copy_at = system.len();
    system.push(Cnot);
    let mut tail = vec![H];
    if basis == Basis::Theta {
        tail.extend(rotation(mode, theta));
    }
    cancel_leading_hh(&mut tail);
    system.extend(tail);
    Block {
        system,
        copy_at: Some(copy_at),
    }
}

fn cancel_trailing_hh(seq: &mut Vec<GateKind>) {
    let n = seq.len();
    if n >= 2 && seq[n - 1] == GateKind::H && seq[n - 2] == GateKind::H {
        seq.truncate(n - 2);
    }
}

fn cancel_leading_hh(seq: &mut Vec<GateKind>) {
    if seq.len() >= 2 && seq[0] == GateKind::H && seq[1] == GateKind::H {
        seq.drain(..2);
    }
}

fn check_mode(theta: f64, mode: GatesetMode) -> Result<()> {
    if !theta.is_finite() {
        return Err(Error::InvalidPlan(format!("theta {theta} is not finite")));
    }
    if mode == GatesetMode::Device && (theta - DEVICE_THETA).abs() > 1e-12 {
        return Err(Error::UnsupportedTheta(theta));
    }
    Ok(())
}

struct Layout {
    bare: Circuit,
    protect: Vec<HhSite>,
    pin: Vec<PinWindow>,
    sites: Vec<MeasurementSite>,
    init: Vec<GateKind>,
}

fn layout(id: ProtocolId, theta: f64, mode: GatesetMode, ancillas: &AncillaMap) -> Result<Layout> {
    check_mode(theta, mode)?;
    let mut init = vec![GateKind::X];
    init.extend(rotation(mode, theta));
    let blocks: Vec<Block> = Position::ALL
        .iter()
        .map(|p| measurement_block(p.basis(), mode, theta))
        .collect();

    // Window starts follow protocol (f): init, then each block, GAP apart.
    let mut starts = Vec::with_capacity(4);
    let mut cursor = init.len();
    for b in &blocks {
        cursor += GAP;
        starts.push(cursor);
        cursor += b.len();
    }
    let n_slots = cursor;

    let sys = SYSTEM_QUBIT;
    let mut bare = Circuit::new(5)?;
    for (slot, &k) in init.iter().enumerate() {
        bare.add(Gate::single(k, sys, slot))?;
    }
    let mut sites = Vec::new();
    let mut protect = Vec::new();
    let mut pin = Vec::new();
    // last system gate of the previous active window, if adjacent
    let mut prev_end = Some((init.len() - 1, *init.last().expect("non-empty")));
    for p in Position::ALL {
        let active = id.positions().contains(&p);
        let block = &blocks[p.index()];
        let start = starts[p.index()];
        if !active {
            prev_end = None;
            continue;
        }
        let anc = ancillas.get(p);
        let copy_at = block.copy_at.expect("measurement blocks copy");
        for (off, &k) in block.system.iter().enumerate() {
            let slot = start + off;
            if k == GateKind::Cnot {
                bare.add(Gate::cnot(anc, sys, slot))?;
            } else {
                bare.add(Gate::single(k, sys, slot))?;
            }
        }
        let copy_slot = start + copy_at;
        bare.add(Gate::single(GateKind::H, anc, copy_slot - 1))?;
        bare.add(Gate::single(GateKind::H, anc, copy_slot + 1))?;
        if copy_slot + 2 < n_slots {
            pin.push(PinWindow {
                qubit: anc,
                start: copy_slot + 2,
                end: n_slots,
            });
        }
        if let Some((end_slot, GateKind::H)) = prev_end {
            if block.system[0] == GateKind::H {
                protect.push(HhSite {
                    qubit: sys,
                    first: end_slot,
                    second: start,
                });
            }
        }
        let end_slot = start + block.len() - 1;
        prev_end = Some((end_slot, *block.system.last().expect("non-empty")));
        sites.push(MeasurementSite {
            role: p.role(),
            position: p,
            basis: p.basis(),
            ancilla: anc,
            copy_slot,
            end_slot,
        });
    }
    bare.pad_to(n_slots);

    // Pin every remaining free run on the system qubit, skipping the
    // interiors of protected HH pairs.
    let reserved = |s: usize| protect.iter().any(|h| s > h.first && s < h.second);
    let mut run_start = None;
    for s in 0..=n_slots {
        let free = s < n_slots && bare.is_free(sys, s) && !reserved(s);
        match (free, run_start) {
            (true, None) => run_start = Some(s),
            (false, Some(a)) => {
                pin.push(PinWindow {
                    qubit: sys,
                    start: a,
                    end: s,
                });
                run_start = None;
            }
            _ => {}
        }
    }

    bare.measure(sys)?;
    for site in &sites {
        bare.measure(site.ancilla)?;
    }
    Ok(Layout {
        bare,
        protect,
        pin,
        sites,
        init,
    })
}

/// Builds protocol `id` with the default ancilla assignment.
pub fn build_protocol(id: ProtocolId, theta: f64, mode: GatesetMode) -> Result<ProtocolCircuit> {
    build_protocol_with(id, theta, mode, &AncillaMap::default())
}

pub fn build_protocol_with(
    id: ProtocolId,
    theta: f64,
    mode: GatesetMode,
    ancillas: &AncillaMap,
) -> Result<ProtocolCircuit> {
    let Layout {
        bare,
        protect,
        pin,
        sites,
        init,
    } = layout(id, theta, mode, ancillas)?;
    let circuit = insert_countermeasures(&bare, &protect, &pin)?;
    if mode == GatesetMode::Device {
        let violations = validate(&circuit, &DeviceConstraints::default());
        if let Some(v) = violations.first() {
            return Err(Error::DeviceViolation(v.to_string()));
        }
    }
    if compile(&circuit) != circuit {
        return Err(Error::DeviceViolation(format!(
            "protocol {id} is not a compile fixpoint"
        )));
    }
    let mut roles = BTreeMap::new();
    roles.insert(Role::O3, SYSTEM_QUBIT);
    for s in &sites {
        roles.insert(s.role, s.ancilla);
    }
    Ok(ProtocolCircuit {
        id,
        theta,
        mode,
        circuit,
        roles,
        sites,
        o1: init,
    })
}

/// The intended circuit before countermeasures: spacer and padding cells
/// are left empty, so [`compile`] is free to rewrite it.
pub fn build_unprotected(id: ProtocolId, theta: f64, mode: GatesetMode) -> Result<Circuit> {
    Ok(layout(id, theta, mode, &AncillaMap::default())?.bare)
}

/// ±1 values of every role for one outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ShotValues {
    values: [Option<i8>; 6],
}

impl ShotValues {
    pub fn get(&self, role: Role) -> Option<i8> {
        self.values[role as usize]
    }
}

/// Decodes counts into role values: bit `1` reads `+1`, bit `0` reads `−1`;
/// `O1` is always `+1`.
pub fn outcomes(counts: &Counts, roles: &BTreeMap<Role, usize>) -> Result<Vec<(ShotValues, u64)>> {
    for (role, &q) in roles {
        if q >= counts.n_qubits() || !counts.is_measured(q) {
            return Err(Error::MissingRole(role.to_string()));
        }
    }
    Ok(counts
        .iter()
        .map(|(outcome, n)| {
            let mut values = [None; 6];
            values[Role::O1 as usize] = Some(1);
            for (&role, &q) in roles {
                values[role as usize] = Some(crate::qsim::bit_value(outcome, q));
            }
            (ShotValues { values }, n)
        })
        .collect())
}

/// Full configuration of a multi-repetition run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentPlan {
    pub theta: f64,
    pub shots: usize,
    pub repetitions: usize,
    pub base_seed: u64,
    pub noise: NoiseModel,
    pub mode: GatesetMode,
}

impl Default for ExperimentPlan {
    fn default() -> Self {
        Self {
            theta: DEVICE_THETA,
            shots: DEFAULT_SHOTS,
            repetitions: DEFAULT_REPETITIONS,
            base_seed: 0,
            noise: NoiseModel::default(),
            mode: GatesetMode::Device,
        }
    }
}

impl ExperimentPlan {
    pub fn validate(&self) -> Result<()> {
        if self.shots == 0 {
            return Err(Error::InvalidPlan("shots must be at least 1".into()));
        }
        if self.repetitions < 2 {
            return Err(Error::InvalidPlan(
                "at least 2 repetitions are needed for a standard error".into(),
            ));
        }
        check_mode(self.theta, self.mode)?;
        self.noise.validate()
    }

    /// Seed for one protocol/repetition job: the base seed xor a splitmix64
    /// hash of `(protocol, repetition)`.
    pub fn job_seed(&self, id: ProtocolId, repetition: usize) -> u64 {
        self.base_seed ^ splitmix64(((id.index() as u64) << 32) | repetition as u64)
    }
}

fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Counts of one repetition of one protocol.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShotTable {
    pub protocol: ProtocolId,
    pub repetition: usize,
    pub seed: u64,
    pub roles: BTreeMap<Role, usize>,
    pub counts: Counts,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlanResult {
    pub plan: ExperimentPlan,
    pub tables: BTreeMap<ProtocolId, Vec<ShotTable>>,
}

impl PlanResult {
    pub fn tables(&self, id: ProtocolId) -> &[ShotTable] {
        self.tables.get(&id).map(Vec::as_slice).unwrap_or(&[])
    }
}

/// Builds, compiles and simulates all six protocols, then samples every
/// repetition with its own derived seed. Jobs run in parallel; the result
/// does not depend on scheduling.
pub fn run_plan(plan: &ExperimentPlan) -> Result<PlanResult> {
    plan.validate()?;
    let prepared: Vec<(ProtocolCircuit, Vec<f64>)> = ProtocolId::ALL
        .par_iter()
        .map(|&id| {
            let pc = build_protocol(id, plan.theta, plan.mode)?;
            let compiled = ProtocolCircuit {
                circuit: compile(&pc.circuit),
                ..pc
            };
            let model = plan.noise.restricted_to(&compiled);
            let program = apply_noise(&compiled.circuit, &compiled.sites, &model)?;
            let distribution = program.final_distribution()?;
            Ok((compiled, distribution))
        })
        .collect::<Result<_>>()?;

    let jobs: Vec<(usize, usize)> = (0..prepared.len())
        .flat_map(|p| (0..plan.repetitions).map(move |r| (p, r)))
        .collect();
    let sampled: Vec<ShotTable> = jobs
        .par_iter()
        .map(|&(p, rep)| {
            let (pc, dist) = &prepared[p];
            let seed = plan.job_seed(pc.id, rep);
            let measured = pc.circuit.measured_qubits();
            let counts =
                sample_distribution(dist, pc.circuit.n_qubits(), &measured, plan.shots, seed)?;
            Ok(ShotTable {
                protocol: pc.id,
                repetition: rep,
                seed,
                roles: pc.roles.clone(),
                counts,
            })
        })
        .collect::<Result<_>>()?;

    let mut tables: BTreeMap<ProtocolId, Vec<ShotTable>> = BTreeMap::new();
    for t in sampled {
        tables.entry(t.protocol).or_default().push(t);
    }
    Ok(PlanResult {
        plan: plan.clone(),
        tables,
    })
}
