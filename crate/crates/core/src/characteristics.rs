//! Semi-Lagrangian advection: trace each node back along its characteristic and
//! interpolate the old field at the departure point.

use crate::error::{invalid, Result};
use crate::grid::{Coord, Field, Mesh};
use crate::law::DiffusionLaw;
use crate::scalar::{lit, Real};
use rayon::prelude::*;

/// Velocity `v(p, t, u)`.
pub trait VelocityField<T: Real, P: Coord<T>>: Sync {
    fn velocity(&self, p: P, t: T, u: T) -> P;
}

impl<T: Real, P: Coord<T>, F: Fn(P, T, T) -> P + Sync> VelocityField<T, P> for F {
    fn velocity(&self, p: P, t: T, u: T) -> P {
        self(p, t, u)
    }
}

/// Departure points of every node for a step of length `duration`.
#[derive(Debug, Clone, PartialEq)]
pub struct FootMap<P> {
    pub feet: Vec<P>,
}

/// How departure points are computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Tracer {
    /// `x0 = x - V duration`.
    #[default]
    Euler,
    /// Adomian series of the backward trajectory, order 1 to 3.
    Sadm(usize),
}

const PARALLEL_THRESHOLD: usize = 4096;

fn per_node<R: Send, F: Fn(usize) -> R + Sync>(n: usize, f: F) -> Vec<R> {
    if n >= PARALLEL_THRESHOLD {
        (0..n).into_par_iter().map(&f).collect()
    } else {
        (0..n).map(f).collect()
    }
}

fn norm<T: Real, P: Coord<T>>(p: P) -> T {
    (0..P::DIM).fold(T::zero(), |acc, d| acc + p.component(d) * p.component(d)).sqrt()
}

/// Directional derivative `(dir . grad) V` at `p` by central differences.
fn directional<T: Real, P: Coord<T>>(v: &dyn Fn(P) -> P, p: P, dir: P) -> P {
    let len = norm(dir);
    if len == T::zero() {
        return P::from_fn(|_| T::zero());
    }
    let scale = norm(p).max(T::one());
    let h = T::epsilon().cbrt() * scale;
    let unit = dir.scale(len.recip());
    let fwd = v(p.add(unit.scale(h)));
    let bwd = v(p.sub(unit.scale(h)));
    fwd.sub(bwd).scale(len / (h + h))
}

/// Second directional derivative `V''[dir, dir]` at `p`.
fn second_directional<T: Real, P: Coord<T>>(v: &dyn Fn(P) -> P, p: P, dir: P) -> P {
    let len = norm(dir);
    if len == T::zero() {
        return P::from_fn(|_| T::zero());
    }
    let scale = norm(p).max(T::one());
    let h = T::epsilon().sqrt().sqrt() * scale;
    let unit = dir.scale(len.recip());
    let two = lit::<T>(2.0);
    let fwd = v(p.add(unit.scale(h)));
    let mid = v(p);
    let bwd = v(p.sub(unit.scale(h)));
    fwd.sub(mid.scale(two)).add(bwd).scale(len * len / (h * h))
}

/// Foot of one node from the Adomian series of `dy/ds = -V(y)`, `y(0) = p`.
///
/// `y1 = -V s`, `y2 = (J V) s^2/2`, `y3 = -(J J V + V''[V, V]) s^3/6`.
fn sadm_foot<T: Real, P: Coord<T>>(v: &dyn Fn(P) -> P, p: P, s: T, order: usize) -> P {
    let v0 = v(p);
    let mut foot = p.sub(v0.scale(s));
    if order >= 2 {
        let jv = directional(v, p, v0);
        foot = foot.add(jv.scale(s * s * lit::<T>(0.5)));
        if order >= 3 {
            let jjv = directional(v, p, jv);
            let hvv = second_directional(v, p, v0);
            foot = foot.sub(jjv.add(hvv).scale(s * s * s / lit::<T>(6.0)));
        }
    }
    foot
}

/// Departure points from a per-node velocity evaluator `eval(k, p)`.
pub fn trace_feet_with<T: Real, G: Mesh<T>>(
    grid: &G,
    eval: &(dyn Fn(usize, G::Point) -> G::Point + Sync),
    duration: T,
    tracer: Tracer,
) -> Result<FootMap<G::Point>> {
    if let Tracer::Sadm(k) = tracer {
        if !(1..=3).contains(&k) {
            return invalid("tracer order", format!("must be 1..=3, got {k}"));
        }
    }
    let feet = per_node(grid.node_count(), |k| {
        let p = grid.point(k);
        match tracer {
            Tracer::Euler => p.sub(eval(k, p).scale(duration)),
            Tracer::Sadm(order) => sadm_foot(&|q| eval(k, q), p, duration, order),
        }
    });
    Ok(FootMap { feet })
}

/// Euler departure points, velocity frozen at `(x, t, u^n)`.
pub fn trace_feet_euler<T: Real, G: Mesh<T>, V: VelocityField<T, G::Point>>(
    field: &Field<T, G>,
    velocity: &V,
    t: T,
    duration: T,
) -> FootMap<G::Point> {
    let u = field.values();
    let grid = field.grid();
    let feet = per_node(grid.node_count(), |k| {
        let p = grid.point(k);
        p.sub(velocity.velocity(p, t, u[k]).scale(duration))
    });
    FootMap { feet }
}

/// Order-`order` Adomian departure points, velocity frozen at `(t, u^n)`.
pub fn trace_feet_sadm<T: Real, G: Mesh<T>, V: VelocityField<T, G::Point>>(
    field: &Field<T, G>,
    velocity: &V,
    t: T,
    duration: T,
    order: usize,
) -> Result<FootMap<G::Point>> {
    let u = field.values();
    trace_feet_with(
        field.grid(),
        &|k, p| velocity.velocity(p, t, u[k]),
        duration,
        Tracer::Sadm(order),
    )
}

/// Interpolates `field` at the departure points and re-imposes its Dirichlet data.
///
/// Feet outside the domain are clamped to the boundary.
pub fn remap<T: Real, G: Mesh<T>>(
    field: &Field<T, G>,
    feet: &FootMap<G::Point>,
    method: crate::grid::Interpolation,
) -> Result<Field<T, G>> {
    let grid = field.grid();
    if feet.feet.len() != grid.node_count() {
        return invalid("foot map", "length differs from node count");
    }
    let mut src = field.values().to_vec();
    grid.apply_boundary(&mut src, field.boundary());
    let values = per_node(grid.node_count(), |k| {
        grid.interpolate(&src, grid.clamp(feet.feet[k]), method)
    });
    let mut out = field.with_values(values)?;
    out.apply_dirichlet();
    Ok(out)
}

/// Trace, remap, re-impose boundaries.
pub fn advect_step<T: Real, G: Mesh<T>, V: VelocityField<T, G::Point>>(
    field: &Field<T, G>,
    velocity: &V,
    t: T,
    duration: T,
    tracer: Tracer,
    method: crate::grid::Interpolation,
) -> Result<Field<T, G>> {
    let u = field.values();
    let feet = trace_feet_with(field.grid(), &|k, p| velocity.velocity(p, t, u[k]), duration, tracer)?;
    remap(field, &feet, method)
}

/// Per-node correction `-D'(u) grad u` added to the carrier velocity when the
/// nonlinear part of `div(D(u) grad u)` is moved into the advection operator.
pub fn induced_velocity_offsets<T: Real, G: Mesh<T>, L: DiffusionLaw<T> + ?Sized>(
    field: &Field<T, G>,
    law: &L,
) -> Vec<G::Point> {
    let grid = field.grid();
    let u = field.values();
    per_node(grid.node_count(), |k| grid.gradient(u, k).scale(-law.d1(u[k])))
}

/// Advection step with velocity `v - D'(u) grad u`, the correction frozen per node.
#[allow(clippy::too_many_arguments)]
pub fn advect_step_induced<T: Real, G: Mesh<T>, V: VelocityField<T, G::Point>, L: DiffusionLaw<T> + ?Sized>(
    field: &Field<T, G>,
    velocity: &V,
    law: &L,
    t: T,
    duration: T,
    tracer: Tracer,
    method: crate::grid::Interpolation,
) -> Result<Field<T, G>> {
    let u = field.values();
    let offsets = induced_velocity_offsets(field, law);
    let feet = trace_feet_with(
        field.grid(),
        &|k, p| velocity.velocity(p, t, u[k]).add(offsets[k]),
        duration,
        tracer,
    )?;
    remap(field, &feet, method)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{Grid1D, Grid2D, Interpolation};

    #[test]
    fn zero_velocity_is_identity() {
        let g = Grid1D::<f64>::new(1.0, 21, 0.0).unwrap();
        let f = Field::sample(g, |x: f64| (4.0 * x).sin()).unwrap();
        let out = advect_step(&f, &|_x: f64, _t: f64, _u: f64| 0.0, 0.0, 0.1, Tracer::Euler, Interpolation::Cubic).unwrap();
        assert_eq!(out, f);
    }

    #[test]
    fn constant_velocity_shift_is_exact_for_linear_profiles() {
        let g = Grid1D::<f64>::new(1.0, 21, 0.0).unwrap();
        let f = Field::sample(g, |x: f64| 2.0 * x + 1.0).unwrap();
        let out = advect_step(&f, &|_x: f64, _t: f64, _u: f64| 0.5, 0.0, 0.1, Tracer::Euler, Interpolation::Linear).unwrap();
        for (k, v) in out.values().iter().enumerate().skip(2).take(17) {
            let x = g.x(k);
            assert!((v - (2.0 * (x - 0.05) + 1.0)).abs() < 1e-13);
        }
    }

    #[test]
    fn sadm_feet_on_linear_velocity() {
        let g = Grid1D::<f64>::new(1.0, 11, 0.0).unwrap();
        let f = Field::constant(g, 0.0).unwrap();
        let h = 0.1;
        for k in 1..=3 {
            let feet = trace_feet_sadm(&f, &|x: f64, _t: f64, _u: f64| x, 0.0, h, k).unwrap();
            let series: f64 = (0..=k).map(|j| (-h).powi(j as i32) / (1..=j).product::<usize>().max(1) as f64).sum();
            for (i, &x0) in feet.feet.iter().enumerate() {
                assert!((x0 - g.x(i) * series).abs() < 1e-9, "order {k}");
            }
        }
        let feet = trace_feet_sadm(&f, &|x: f64, _t: f64, _u: f64| x, 0.0, h, 3).unwrap();
        assert!((feet.feet[10] - (-h).exp()).abs() < 5e-6);
    }

    #[test]
    fn out_of_domain_feet_take_boundary_value() {
        let g = Grid1D::<f64>::new(1.0, 11, 0.0).unwrap();
        let f = Field::constant(g, 0.0).unwrap();
        let mut f = f;
        f.set_boundary(crate::grid::Dirichlet1D { left: 3.0, right: 0.0 }).unwrap();
        f.apply_dirichlet();
        let out = advect_step(&f, &|_x: f64, _t: f64, _u: f64| 100.0, 0.0, 1.0, Tracer::Euler, Interpolation::Cubic).unwrap();
        assert!(out.values().iter().take(10).all(|&v| v == 3.0));
    }

    #[test]
    fn rotation_in_2d_keeps_hull() {
        let g = Grid2D::<f64>::rectangle(1.0, 31, 1.0, 31).unwrap();
        let f = Field::sample(g, |p: [f64; 2]| (-((p[0] - 0.3).powi(2) + (p[1] - 0.5).powi(2)) / 0.01).exp()).unwrap();
        let v = |p: [f64; 2], _t: f64, _u: f64| [-(p[1] - 0.5), p[0] - 0.5];
        let mut cur = f.clone();
        for _ in 0..10 {
            cur = advect_step(&cur, &v, 0.0, 0.05, Tracer::Sadm(3), Interpolation::Cubic).unwrap();
        }
        let (lo0, hi0) = f.min_max();
        let (lo, hi) = cur.min_max();
        assert!(lo >= lo0 - 1e-12 && hi <= hi0 + 1e-12);
    }

    #[test]
    fn rejects_bad_order() {
        let g = Grid1D::<f64>::new(1.0, 11, 0.0).unwrap();
        let f = Field::constant(g, 0.0).unwrap();
        assert!(trace_feet_sadm(&f, &|x: f64, _t: f64, _u: f64| x, 0.0, 0.1, 4).is_err());
    }
}
