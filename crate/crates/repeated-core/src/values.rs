//! Discounted continuation values: `V = (1 - δ) u + δ P V` per hospital.

use market_core::{MarketSpec, Scalar};

use crate::{ProcessAutomaton, ProcessError};

/// Dense elimination is used up to this many states, and always for exact
/// scalars; larger inexact systems use Gauss–Seidel.
pub const DENSE_LIMIT: usize = 600;

/// Per-state, per-hospital values.
#[derive(Clone, Debug, PartialEq)]
pub struct Values<S> {
    values: Vec<Vec<S>>,
}

impl<S: Scalar> Values<S> {
    pub fn get(&self, state: usize, hospital: market_core::HospitalId) -> &S {
        &self.values[state][hospital.0]
    }

    pub fn state(&self, state: usize) -> &[S] {
        &self.values[state]
    }

    pub fn num_states(&self) -> usize {
        self.values.len()
    }

    /// Expected value under the automaton's initial lottery.
    pub fn initial(&self, a: &ProcessAutomaton<S>, hospital: market_core::HospitalId) -> S {
        a.initial.expectation(|s| self.values[*s][hospital.0].clone())
    }
}

/// `payoff[r][f]`: stage utility of hospital `f` in realization `r`.
pub fn realization_payoffs<S: Scalar>(cohorts: &[MarketSpec<S>], a: &ProcessAutomaton<S>) -> Vec<Vec<S>> {
    a.realizations
        .iter()
        .map(|r| {
            let spec = &cohorts[r.cohort];
            spec.hospitals().map(|f| spec.utility_of(f, r.matching.members(f))).collect()
        })
        .collect()
}

/// Expected stage payoff of each state's output lottery.
pub fn state_payoffs<S: Scalar>(a: &ProcessAutomaton<S>, payoffs: &[Vec<S>], num_hospitals: usize) -> Vec<Vec<S>> {
    a.states
        .iter()
        .map(|st| (0..num_hospitals).map(|f| st.output.expectation(|r| payoffs[*r][f].clone())).collect())
        .collect()
}

/// Values of following the process on path from every state.
pub fn continuation_values<S: Scalar>(
    cohorts: &[MarketSpec<S>],
    a: &ProcessAutomaton<S>,
) -> Result<Values<S>, ProcessError> {
    a.validate(cohorts)?;
    let h = cohorts[0].num_hospitals();
    let rewards = state_payoffs(a, &realization_payoffs(cohorts, a), h);
    let rows: Vec<Vec<(usize, S)>> = a.states.iter().map(|st| st.onpath.entries().to_vec()).collect();
    Ok(Values { values: solve_discounted(&rows, &rewards, &a.discount) })
}

/// Solves `V = (1 - δ) R + δ P V` where `rows[s]` lists `(next, probability)`
/// and `rewards[s]` holds one column per hospital.
pub fn solve_discounted<S: Scalar>(rows: &[Vec<(usize, S)>], rewards: &[Vec<S>], delta: &S) -> Vec<Vec<S>> {
    if S::is_exact() || rows.len() <= DENSE_LIMIT {
        dense(rows, rewards, delta)
    } else {
        gauss_seidel(rows, rewards, delta)
    }
}

fn dense<S: Scalar>(rows: &[Vec<(usize, S)>], rewards: &[Vec<S>], delta: &S) -> Vec<Vec<S>> {
    let n = rows.len();
    let cols = rewards.first().map_or(0, Vec::len);
    let scale = S::one() - delta.clone();
    let mut a: Vec<Vec<S>> = vec![vec![S::zero(); n]; n];
    let mut b: Vec<Vec<S>> = rewards.iter().map(|r| r.iter().map(|x| x.clone() * scale.clone()).collect()).collect();
    for (i, row) in rows.iter().enumerate() {
        a[i][i] = S::one();
        for (j, p) in row {
            a[i][*j] = a[i][*j].clone() - delta.clone() * p.clone();
        }
    }
    for k in 0..n {
        let pivot = (k..n)
            .filter(|&i| !a[i][k].is_zero())
            .max_by(|&i, &j| a[i][k].abs().partial_cmp(&a[j][k].abs()).expect("comparable"))
            .expect("I - δP is nonsingular for δ < 1");
        a.swap(k, pivot);
        b.swap(k, pivot);
        let inv = S::one() / a[k][k].clone();
        for i in k + 1..n {
            if a[i][k].is_zero() {
                continue;
            }
            let factor = a[i][k].clone() * inv.clone();
            let (top, bottom) = a.split_at_mut(i);
            let (pivot_row, target) = (&top[k], &mut bottom[0]);
            for j in k..n {
                if !pivot_row[j].is_zero() {
                    target[j] = target[j].clone() - factor.clone() * pivot_row[j].clone();
                }
            }
            let (btop, bbottom) = b.split_at_mut(i);
            for c in 0..cols {
                bbottom[0][c] = bbottom[0][c].clone() - factor.clone() * btop[k][c].clone();
            }
        }
    }
    let mut x: Vec<Vec<S>> = vec![vec![S::zero(); cols]; n];
    for k in (0..n).rev() {
        for c in 0..cols {
            let mut acc = b[k][c].clone();
            for j in k + 1..n {
                if !a[k][j].is_zero() {
                    acc = acc - a[k][j].clone() * x[j][c].clone();
                }
            }
            x[k][c] = acc / a[k][k].clone();
        }
    }
    x
}

fn gauss_seidel<S: Scalar>(rows: &[Vec<(usize, S)>], rewards: &[Vec<S>], delta: &S) -> Vec<Vec<S>> {
    let cols = rewards.first().map_or(0, Vec::len);
    let scale = S::one() - delta.clone();
    let mut x: Vec<Vec<S>> = rewards.to_vec();
    // The update is a δ-contraction, so a sweep change below this bound
    // leaves the fixed point within 1e-10.
    let stop = if delta.is_zero() {
        S::one()
    } else {
        S::from_f64_lossy(1e-10) * scale.clone() / delta.clone()
    };
    loop {
        let mut change = S::zero();
        for (i, row) in rows.iter().enumerate() {
            let self_loop: S = row.iter().filter(|(j, _)| *j == i).fold(S::zero(), |acc, (_, p)| acc + p.clone());
            let denom = S::one() - delta.clone() * self_loop;
            for c in 0..cols {
                let mut acc = scale.clone() * rewards[i][c].clone();
                for (j, p) in row {
                    if *j != i {
                        acc = acc + delta.clone() * p.clone() * x[*j][c].clone();
                    }
                }
                let next = acc / denom.clone();
                let diff = (next.clone() - x[i][c].clone()).abs();
                if diff > change {
                    change = diff;
                }
                x[i][c] = next;
            }
        }
        if change < stop {
            return x;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_state_chain_matches_closed_form() {
        // 0 -> 1 -> 1, rewards 6 then 5, δ = 0.8: V1 = 5, V0 = 0.2*6 + 0.8*5 = 5.2.
        let rows: Vec<Vec<(usize, f64)>> = vec![vec![(1, 1.0)], vec![(1, 1.0)]];
        let rewards: Vec<Vec<f64>> = vec![vec![6.0], vec![5.0]];
        for v in [dense(&rows, &rewards, &0.8), gauss_seidel(&rows, &rewards, &0.8)] {
            assert!((v[0][0] - 5.2).abs() < 1e-10);
            assert!((v[1][0] - 5.0).abs() < 1e-10);
        }
    }

    #[test]
    fn solvers_agree_on_random_chain() {
        let n = 40;
        let rows: Vec<Vec<(usize, f64)>> =
            (0..n).map(|i| vec![((i * 7 + 3) % n, 0.5), ((i * 11 + 1) % n, 0.3), (i, 0.2)]).collect();
        let rewards: Vec<Vec<f64>> = (0..n).map(|i| vec![(i % 5) as f64, (i * i % 7) as f64]).collect();
        let a = dense(&rows, &rewards, &0.95);
        let b = gauss_seidel(&rows, &rewards, &0.95);
        for i in 0..n {
            for c in 0..2 {
                assert!((a[i][c] - b[i][c]).abs() < 1e-9);
            }
        }
    }
}
