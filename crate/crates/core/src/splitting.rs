//! Lie and Strang composition of advection and diffusion step operators.

use crate::error::Result;
use crate::scalar::{lit, Real};
use std::sync::Mutex;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OperatorKind {
    Advection,
    Diffusion,
}

/// Advances a state over `[t, t + duration]`. A zero duration must leave the state unchanged.
pub trait StepOperator<S, T: Real> {
    fn kind(&self) -> OperatorKind;
    fn name(&self) -> &str;
    fn apply(&self, state: &S, t: T, duration: T) -> Result<S>;
}

/// Operator backed by a closure.
pub struct FnOperator<F> {
    kind: OperatorKind,
    name: String,
    f: F,
}

impl<F> FnOperator<F> {
    pub fn new(kind: OperatorKind, name: impl Into<String>, f: F) -> Self {
        Self {
            kind,
            name: name.into(),
            f,
        }
    }
}

impl<S, T: Real, F: Fn(&S, T, T) -> Result<S>> StepOperator<S, T> for FnOperator<F> {
    fn kind(&self) -> OperatorKind {
        self.kind
    }
    fn name(&self) -> &str {
        &self.name
    }
    fn apply(&self, state: &S, t: T, duration: T) -> Result<S> {
        (self.f)(state, t, duration)
    }
}

/// One invocation seen by a [`Recorder`].
#[derive(Debug, Clone, PartialEq)]
pub struct Invocation<T> {
    pub name: String,
    pub kind: OperatorKind,
    pub t: T,
    pub duration: T,
}

/// Wraps an operator and records every call.
pub struct Recorder<'a, O, T> {
    inner: O,
    log: &'a Mutex<Vec<Invocation<T>>>,
}

impl<'a, O, T> Recorder<'a, O, T> {
    pub fn new(inner: O, log: &'a Mutex<Vec<Invocation<T>>>) -> Self {
        Self { inner, log }
    }
}

impl<S, T: Real, O: StepOperator<S, T>> StepOperator<S, T> for Recorder<'_, O, T> {
    fn kind(&self) -> OperatorKind {
        self.inner.kind()
    }
    fn name(&self) -> &str {
        self.inner.name()
    }
    fn apply(&self, state: &S, t: T, duration: T) -> Result<S> {
        self.log.lock().expect("recorder lock poisoned").push(Invocation {
            name: self.inner.name().to_string(),
            kind: self.inner.kind(),
            t,
            duration,
        });
        self.inner.apply(state, t, duration)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Splitting {
    /// Advection for `dt`, then diffusion for `dt`.
    Lie,
    /// Advection `dt/2`, diffusion `dt`, advection `dt/2`.
    #[default]
    Strang,
    /// Diffusion `dt/2`, advection `dt`, diffusion `dt/2`.
    StrangDad,
}

/// Sub-step of a schedule: operator kind, start offset and length as fractions of `dt`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScheduleEntry {
    pub kind: OperatorKind,
    pub offset: f64,
    pub fraction: f64,
}

impl Splitting {
    pub fn schedule(self) -> Vec<ScheduleEntry> {
        use OperatorKind::*;
        let e = |kind, offset, fraction| ScheduleEntry { kind, offset, fraction };
        match self {
            Splitting::Lie => vec![e(Advection, 0.0, 1.0), e(Diffusion, 0.0, 1.0)],
            Splitting::Strang => vec![e(Advection, 0.0, 0.5), e(Diffusion, 0.0, 1.0), e(Advection, 0.5, 0.5)],
            Splitting::StrangDad => vec![e(Diffusion, 0.0, 0.5), e(Advection, 0.0, 1.0), e(Diffusion, 0.5, 0.5)],
        }
    }

    pub fn order(self) -> usize {
        match self {
            Splitting::Lie => 1,
            _ => 2,
        }
    }
}

/// One split step of length `dt` starting at `t`. `dt = 0` returns the state unchanged.
pub fn split_step<S: Clone, T: Real>(
    adv: &dyn StepOperator<S, T>,
    diff: &dyn StepOperator<S, T>,
    state: &S,
    t: T,
    dt: T,
    splitting: Splitting,
) -> Result<S> {
    if dt == T::zero() {
        return Ok(state.clone());
    }
    let mut cur = state.clone();
    for entry in splitting.schedule() {
        let op = match entry.kind {
            OperatorKind::Advection => adv,
            OperatorKind::Diffusion => diff,
        };
        let duration = if entry.fraction == 1.0 { dt } else { dt * lit::<T>(entry.fraction) };
        cur = op.apply(&cur, t + dt * lit::<T>(entry.offset), duration)?;
    }
    Ok(cur)
}

pub fn lie_step<S: Clone, T: Real>(adv: &dyn StepOperator<S, T>, diff: &dyn StepOperator<S, T>, state: &S, t: T, dt: T) -> Result<S> {
    split_step(adv, diff, state, t, dt, Splitting::Lie)
}

pub fn strang_step<S: Clone, T: Real>(adv: &dyn StepOperator<S, T>, diff: &dyn StepOperator<S, T>, state: &S, t: T, dt: T) -> Result<S> {
    split_step(adv, diff, state, t, dt, Splitting::Strang)
}

/// `steps` consecutive split steps from `t0`.
pub fn integrate<S: Clone, T: Real>(
    adv: &dyn StepOperator<S, T>,
    diff: &dyn StepOperator<S, T>,
    state: &S,
    t0: T,
    dt: T,
    steps: usize,
    splitting: Splitting,
) -> Result<S> {
    let mut cur = state.clone();
    for n in 0..steps {
        let t = t0 + dt * lit::<T>(n as f64);
        cur = split_step(adv, diff, &cur, t, dt, splitting)?;
    }
    Ok(cur)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn named(kind: OperatorKind, name: &str) -> FnOperator<impl Fn(&f64, f64, f64) -> Result<f64>> {
        FnOperator::new(kind, name, |s: &f64, _t: f64, d: f64| Ok(*s + d))
    }

    #[test]
    fn schedules_are_balanced_and_palindromic() {
        for s in [Splitting::Lie, Splitting::Strang, Splitting::StrangDad] {
            for kind in [OperatorKind::Advection, OperatorKind::Diffusion] {
                let total: f64 = s.schedule().iter().filter(|e| e.kind == kind).map(|e| e.fraction).sum();
                assert_eq!(total, 1.0);
            }
        }
        let st = Splitting::Strang.schedule();
        let kinds: Vec<_> = st.iter().map(|e| (e.kind, e.fraction)).collect();
        let mut rev = kinds.clone();
        rev.reverse();
        assert_eq!(kinds, rev);
    }

    #[test]
    fn invocation_order_is_recorded() {
        let log = Mutex::new(Vec::new());
        let a = Recorder::new(named(OperatorKind::Advection, "A"), &log);
        let d = Recorder::new(named(OperatorKind::Diffusion, "D"), &log);
        strang_step(&a, &d, &0.0, 1.0, 0.2).unwrap();
        let calls: Vec<(String, f64, f64)> = log.lock().unwrap().iter().map(|c| (c.name.clone(), c.t, c.duration)).collect();
        assert_eq!(
            calls,
            vec![("A".into(), 1.0, 0.1), ("D".into(), 1.0, 0.2), ("A".into(), 1.1, 0.1)]
        );
        log.lock().unwrap().clear();
        lie_step(&a, &d, &0.0, 0.0, 0.2).unwrap();
        let names: Vec<String> = log.lock().unwrap().iter().map(|c| c.name.clone()).collect();
        assert_eq!(names, ["A", "D"]);
    }

    #[test]
    fn zero_step_is_identity() {
        let a = named(OperatorKind::Advection, "A");
        let d = named(OperatorKind::Diffusion, "D");
        assert_eq!(strang_step(&a, &d, &3.5, 0.0, 0.0).unwrap(), 3.5);
        assert_eq!(lie_step(&a, &d, &3.5, 0.0, 0.0).unwrap(), 3.5);
    }

    // Non-commuting linear pair on R^2: A = [[0,1],[0,0]], D = [[-1,0],[0,-2]].
    // Lie error is first order, Strang second order.
    #[test]
    fn orders_on_noncommuting_linear_flows() {
        type V = [f64; 2];
        let adv = FnOperator::new(OperatorKind::Advection, "A", |v: &V, _t: f64, h: f64| Ok([v[0] + h * v[1], v[1]]));
        let diff = FnOperator::new(OperatorKind::Diffusion, "D", |v: &V, _t: f64, h: f64| {
            Ok([v[0] * (-h).exp(), v[1] * (-2.0 * h).exp()])
        });
        // exact flow of [[-1,1],[0,-2]]
        let exact = |v: V, t: f64| [v[0] * (-t).exp() + v[1] * ((-t).exp() - (-2.0 * t).exp()), v[1] * (-2.0 * t).exp()];
        let v0 = [1.0, 1.0];
        let err = |s: Splitting, n: usize| {
            let dt = 1.0 / n as f64;
            let v = integrate(&adv, &diff, &v0, 0.0, dt, n, s).unwrap();
            let e = exact(v0, 1.0);
            (v[0] - e[0]).abs().max((v[1] - e[1]).abs())
        };
        for (s, lo, hi) in [(Splitting::Lie, 0.8, 1.3), (Splitting::Strang, 1.7, 2.3), (Splitting::StrangDad, 1.7, 2.3)] {
            let p = (err(s, 20) / err(s, 40)).log2();
            assert!(p > lo && p < hi, "{s:?} order {p}");
        }
    }
}
