//! Emulation of the two vendor-compiler behaviours that can silently change
//! a protocol circuit, and the countermeasures that neutralise them.

use super::{Circuit, Gate, GateKind};
use crate::{Error, Result};

/// Removes every pair of H gates on one qubit whose only separation is empty
/// cells, repeating until no such pair remains.
pub fn pass_collapse_hh(circuit: &Circuit) -> Circuit {
    let mut out = circuit.clone();
    'search: loop {
        for q in 0..out.n_qubits() {
            let on_q = out.gates_on(q);
            for pair in on_q.windows(2) {
                if pair[0].kind == GateKind::H && pair[1].kind == GateKind::H {
                    out.remove_at(q, pair[0].slot);
                    out.remove_at(q, pair[1].slot);
                    continue 'search;
                }
            }
        }
        return out;
    }
}

/// Moves the last single-qubit gate of each measured qubit to the final
/// slot when only empty cells separate it from the measurement. Id gates
/// occupy cells, so a qubit padded with Id up to its measurement is left
/// alone.
pub fn pass_hoist(circuit: &Circuit) -> Circuit {
    let mut out = circuit.clone();
    let Some(last_slot) = out.n_slots().checked_sub(1) else {
        return out;
    };
    for q in out.measured_qubits() {
        let Some(last) = out.gates_on(q).last().copied() else {
            continue;
        };
        if last.kind.is_two_qubit() || last.slot == last_slot {
            continue;
        }
        out.remove_at(q, last.slot);
        out.add(Gate {
            slot: last_slot,
            ..last
        })
        .expect("final cell is free: the moved gate was the last on its qubit");
    }
    out
}

/// Alternates [`pass_collapse_hh`] and [`pass_hoist`] until neither changes
/// the circuit. Each round either removes two gates or moves a gate to a
/// strictly later slot, so the loop terminates.
pub fn compile(circuit: &Circuit) -> Circuit {
    let mut current = circuit.clone();
    loop {
        let next = pass_hoist(&pass_collapse_hh(&current));
        if next == current {
            return current;
        }
        current = next;
    }
}

/// An `H … H` pair on one qubit that must survive compilation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HhSite {
    pub qubit: usize,
    pub first: usize,
    pub second: usize,
}

/// Cells `start..end` on a qubit that must stay occupied so that no gate
/// drifts towards the measurement.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PinWindow {
    pub qubit: usize,
    pub start: usize,
    pub end: usize,
}

/// Puts `T, T†` between each protected H pair and fills every pinned window
/// with Id gates.
///
/// The result is unitarily equal to the input since `T·T† = I`. Fails if a
/// protected pair has fewer than two free interior cells, if a site does not
/// hold two H gates, or if a pinned window has no free cell.
pub fn insert_countermeasures(
    circuit: &Circuit,
    protect: &[HhSite],
    pin: &[PinWindow],
) -> Result<Circuit> {
    let mut out = circuit.clone();
    for site in protect {
        let is_h = |slot| out.cell(site.qubit, slot).map(|g| g.kind) == Some(GateKind::H);
        if site.first >= site.second || !is_h(site.first) || !is_h(site.second) {
            return Err(Error::InvalidSite {
                qubit: site.qubit,
                first: site.first,
                second: site.second,
            });
        }
        let free: Vec<usize> = (site.first + 1..site.second)
            .filter(|&s| out.is_free(site.qubit, s))
            .take(2)
            .collect();
        let [t_slot, tdg_slot] = free[..] else {
            return Err(Error::NoRoom {
                qubit: site.qubit,
                start: site.first + 1,
                end: site.second,
            });
        };
        out.add(Gate::single(GateKind::T, site.qubit, t_slot))?;
        out.add(Gate::single(GateKind::Tdg, site.qubit, tdg_slot))?;
    }
    for w in pin {
        let free: Vec<usize> = (w.start..w.end)
            .filter(|&s| out.is_free(w.qubit, s))
            .collect();
        if free.is_empty() {
            return Err(Error::NoRoom {
                qubit: w.qubit,
                start: w.start,
                end: w.end,
            });
        }
        for s in free {
            out.add(Gate::single(GateKind::Id, w.qubit, s))?;
        }
        out.pad_to(w.end);
    }
    Ok(out)
}
