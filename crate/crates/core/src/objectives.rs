//! Flowtime and standby-energy evaluation of a job order.
//!
//! Completion times follow the permutation-flowshop recurrence
//! `C(i, j) = max(C(i-1, j), C(i, j-1)) + t(i, j)`. Standby time is the wait
//! a machine spends before each operation: zero on the first machine, the
//! arrival time of the first job elsewhere, and `max(C(i, j-1) - C(i-1, j), 0)`
//! for the rest. Energy charges each machine's fixed power for its standby
//! minutes, converted to hours by `kappa`.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::instance::{Instance, Permutation};

/// Minutes to hours.
pub const DEFAULT_KAPPA: f64 = 1.0 / 60.0;

/// The objective pair, both minimised.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Objectives {
    /// Sum of last-machine completion times, minutes.
    pub flowtime: u64,
    /// Standby energy, watt-hours.
    pub energy: f64,
}

impl Objectives {
    pub fn new(flowtime: u64, energy: f64) -> Self {
        Objectives { flowtime, energy }
    }

    /// Exact equality on both components (energy compared bitwise).
    pub fn same_point(&self, other: &Objectives) -> bool {
        self.flowtime == other.flowtime && self.energy.to_bits() == other.energy.to_bits()
    }

    pub(crate) fn as_array(&self) -> [f64; 2] {
        [self.flowtime as f64, self.energy]
    }
}

/// Completion and standby matrices indexed by (sequence position, machine).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScheduleTableau {
    n_positions: usize,
    n_machines: usize,
    completion: Vec<u64>,
    standby: Vec<u64>,
}

impl ScheduleTableau {
    pub fn n_positions(&self) -> usize {
        self.n_positions
    }

    pub fn n_machines(&self) -> usize {
        self.n_machines
    }

    pub fn completion(&self, position: usize, machine: usize) -> u64 {
        self.completion[position * self.n_machines + machine]
    }

    pub fn standby(&self, position: usize, machine: usize) -> u64 {
        self.standby[position * self.n_machines + machine]
    }

    /// Completion matrix as nested rows.
    pub fn completion_rows(&self) -> Vec<Vec<u64>> {
        self.completion
            .chunks(self.n_machines)
            .map(<[u64]>::to_vec)
            .collect()
    }

    pub fn standby_rows(&self) -> Vec<Vec<u64>> {
        self.standby
            .chunks(self.n_machines)
            .map(<[u64]>::to_vec)
            .collect()
    }

    pub fn makespan(&self) -> u64 {
        self.completion.last().copied().unwrap_or(0)
    }
}

/// Fills the completion part of the tableau. Standby is left zeroed.
pub fn completion_times(instance: &Instance, perm: &Permutation) -> Result<ScheduleTableau> {
    instance.check_permutation(perm)?;
    Ok(completion_unchecked(instance, perm.as_slice()))
}

fn completion_unchecked(instance: &Instance, order: &[usize]) -> ScheduleTableau {
    let n = order.len();
    let m = instance.n_machines();
    let mut c = vec![0u64; n * m];
    for (i, &job) in order.iter().enumerate() {
        for j in 0..m {
            let above = if i > 0 { c[(i - 1) * m + j] } else { 0 };
            let left = if j > 0 { c[i * m + j - 1] } else { 0 };
            c[i * m + j] = above.max(left) + u64::from(instance.time(job, j));
        }
    }
    ScheduleTableau {
        n_positions: n,
        n_machines: m,
        completion: c,
        standby: vec![0; n * m],
    }
}

/// Sum of last-machine completion times.
pub fn total_flowtime(tableau: &ScheduleTableau) -> u64 {
    (0..tableau.n_positions)
        .map(|i| tableau.completion(i, tableau.n_machines - 1))
        .sum()
}

/// Fills the standby part from the completion part.
pub fn standby_times(tableau: &mut ScheduleTableau) {
    let m = tableau.n_machines;
    for i in 0..tableau.n_positions {
        for j in 1..m {
            let arrival = tableau.completion[i * m + j - 1];
            tableau.standby[i * m + j] = if i == 0 {
                arrival
            } else {
                arrival.saturating_sub(tableau.completion[(i - 1) * m + j])
            };
        }
        tableau.standby[i * m] = 0;
    }
}

/// `kappa * sum_j P_j * sum_i T(i, j)`.
pub fn total_energy(instance: &Instance, tableau: &ScheduleTableau, kappa: f64) -> f64 {
    let m = tableau.n_machines;
    let weighted: f64 = instance
        .fixed_power()
        .iter()
        .enumerate()
        .map(|(j, &power)| {
            let minutes: u64 = (0..tableau.n_positions)
                .map(|i| tableau.standby[i * m + j])
                .sum();
            power * minutes as f64
        })
        .sum();
    kappa * weighted
}

/// Full tableau (completion and standby).
pub fn schedule_tableau(instance: &Instance, perm: &Permutation) -> Result<ScheduleTableau> {
    let mut tableau = completion_times(instance, perm)?;
    standby_times(&mut tableau);
    Ok(tableau)
}

/// Objectives with the default minutes-to-hours conversion.
pub fn evaluate(instance: &Instance, perm: &Permutation) -> Result<Objectives> {
    Evaluator::new(instance).evaluate(perm)
}

/// Binds an instance to an energy conversion factor.
#[derive(Debug, Clone, Copy)]
pub struct Evaluator<'a> {
    instance: &'a Instance,
    kappa: f64,
}

impl<'a> Evaluator<'a> {
    pub fn new(instance: &'a Instance) -> Self {
        Evaluator {
            instance,
            kappa: DEFAULT_KAPPA,
        }
    }

    pub fn with_kappa(instance: &'a Instance, kappa: f64) -> Self {
        Evaluator { instance, kappa }
    }

    pub fn instance(&self) -> &'a Instance {
        self.instance
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn evaluate(&self, perm: &Permutation) -> Result<Objectives> {
        self.instance.check_permutation(perm)?;
        Ok(self.evaluate_order(perm.as_slice()))
    }

    /// Evaluation for orders produced inside the solver.
    pub(crate) fn evaluate_order(&self, order: &[usize]) -> Objectives {
        let mut tableau = completion_unchecked(self.instance, order);
        standby_times(&mut tableau);
        Objectives {
            flowtime: total_flowtime(&tableau),
            energy: total_energy(self.instance, &tableau, self.kappa),
        }
    }
}

/// Event-driven simulation of the shop, used to cross-check [`evaluate`].
///
/// Machines pull jobs in sequence order; an operation starts once the
/// machine has finished its previous operation and the job has left the
/// upstream machine. Completion events are processed in time order from a
/// priority queue. Standby is the machine's wait before each start,
/// measured from time zero for its first operation.
pub fn simulate_oracle(instance: &Instance, perm: &Permutation, kappa: f64) -> Result<Objectives> {
    instance.check_permutation(perm)?;
    let order = perm.as_slice();
    let n = order.len();
    let m = instance.n_machines();

    // Per machine: index of the next position to process, busy flag, and
    // the time it became free.
    let mut next_pos = vec![0usize; m];
    let mut busy = vec![false; m];
    let mut free_at = vec![0u64; m];
    // Time each position left each machine (None while pending).
    let mut done: Vec<Vec<Option<u64>>> = vec![vec![None; m]; n];
    let mut standby_power_minutes = 0.0f64;
    let mut events: BinaryHeap<Reverse<(u64, usize, usize)>> = BinaryHeap::new();
    let mut flowtime = 0u64;

    let mut now = 0u64;
    loop {
        // Start every operation that has become ready at `now`.
        for machine in 0..m {
            if busy[machine] || next_pos[machine] >= n {
                continue;
            }
            let pos = next_pos[machine];
            let ready = if machine == 0 {
                Some(0)
            } else {
                done[pos][machine - 1]
            };
            if let Some(arrival) = ready {
                let start = now.max(arrival);
                debug_assert_eq!(start, now);
                let wait = start - free_at[machine];
                standby_power_minutes += instance.fixed_power()[machine] * wait as f64;
                busy[machine] = true;
                let finish = start + u64::from(instance.time(order[pos], machine));
                events.push(Reverse((finish, machine, pos)));
            }
        }
        let Some(Reverse((time, machine, pos))) = events.pop() else {
            break;
        };
        now = time;
        busy[machine] = false;
        free_at[machine] = time;
        next_pos[machine] += 1;
        done[pos][machine] = Some(time);
        if machine == m - 1 {
            flowtime += time;
        }
        // Drain simultaneous completions before starting new work.
        while let Some(&Reverse((t, mc, p))) = events.peek() {
            if t != now {
                break;
            }
            events.pop();
            busy[mc] = false;
            free_at[mc] = t;
            next_pos[mc] += 1;
            done[p][mc] = Some(t);
            if mc == m - 1 {
                flowtime += t;
            }
        }
    }

    Ok(Objectives {
        flowtime,
        energy: kappa * standby_power_minutes,
    })
}
