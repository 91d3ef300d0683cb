//! Uniform grids, Dirichlet boundary data and nodal fields.
//!
//! Nodes are `x_i = x0 + i*dx` with `dx = L/(N-1)`. Two-dimensional fields are stored
//! row-major with `j` (the y index) outer: `k = j*nx + i`.

use crate::error::{invalid, Error, Result};
use crate::scalar::{count, lit, Real};
use std::fmt::Debug;
use std::io::{self, Write};

/// Point type of a mesh: a scalar in 1D, `[T; 2]` in 2D.
pub trait Coord<T: Real>: Copy + Debug + PartialEq + Send + Sync {
    const DIM: usize;
    fn component(&self, d: usize) -> T;
    fn from_fn(f: impl FnMut(usize) -> T) -> Self;

    fn add(self, other: Self) -> Self {
        Self::from_fn(|d| self.component(d) + other.component(d))
    }
    fn sub(self, other: Self) -> Self {
        Self::from_fn(|d| self.component(d) - other.component(d))
    }
    fn scale(self, a: T) -> Self {
        Self::from_fn(|d| self.component(d) * a)
    }
}

impl<T: Real> Coord<T> for T {
    const DIM: usize = 1;
    fn component(&self, _d: usize) -> T {
        *self
    }
    fn from_fn(mut f: impl FnMut(usize) -> T) -> Self {
        f(0)
    }
}

impl<T: Real> Coord<T> for [T; 2] {
    const DIM: usize = 2;
    fn component(&self, d: usize) -> T {
        self[d]
    }
    fn from_fn(mut f: impl FnMut(usize) -> T) -> Self {
        [f(0), f(1)]
    }
}

/// Interpolation used when remapping a field at off-grid points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Interpolation {
    Linear,
    /// Cubic Lagrange clamped to the hull of the enclosing cell.
    #[default]
    Cubic,
    /// Cubic Lagrange without the limiter.
    CubicUnlimited,
}

/// Operations the solvers need from a uniform mesh.
pub trait Mesh<T: Real>: Clone + Debug + PartialEq + Send + Sync {
    type Point: Coord<T>;
    type Boundary: Clone + Debug + PartialEq + Send + Sync;

    fn node_count(&self) -> usize;
    fn point(&self, k: usize) -> Self::Point;
    fn is_boundary(&self, k: usize) -> bool;
    fn spacing(&self) -> Self::Point;
    fn lower(&self) -> Self::Point;
    fn upper(&self) -> Self::Point;
    /// `sum_d 1/h_d^2`.
    fn inverse_square_sum(&self) -> T;
    /// `sum_d (u_{-d} + u_{+d})/h_d^2` at an interior node.
    fn neighbor_sum(&self, values: &[T], k: usize) -> T;
    /// Central differences inside, one-sided on the boundary.
    fn gradient(&self, values: &[T], k: usize) -> Self::Point;
    fn interpolate(&self, values: &[T], p: Self::Point, method: Interpolation) -> T;
    fn apply_boundary(&self, values: &mut [T], boundary: &Self::Boundary);
    fn boundary_from_values(&self, values: &[T]) -> Self::Boundary;
    fn check_boundary(&self, boundary: &Self::Boundary) -> Result<()>;
    fn csv_header(&self) -> &'static str;
    fn write_point<W: Write>(&self, k: usize, w: &mut W) -> io::Result<()>;

    fn clamp(&self, p: Self::Point) -> Self::Point {
        let (lo, hi) = (self.lower(), self.upper());
        Self::Point::from_fn(|d| p.component(d).max(lo.component(d)).min(hi.component(d)))
    }

    fn interior_nodes(&self) -> Vec<usize> {
        (0..self.node_count()).filter(|&k| !self.is_boundary(k)).collect()
    }
}

/// Uniform 1D grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D<T> {
    origin: T,
    length: T,
    n: usize,
    dx: T,
}

impl<T: Real> Grid1D<T> {
    pub fn new(length: T, n: usize, origin: T) -> Result<Self> {
        if n < 3 {
            return invalid("grid", format!("need at least 3 nodes, got {n}"));
        }
        if !(length > T::zero()) || !length.is_finite() || !origin.is_finite() {
            return invalid("grid", format!("length must be positive and finite, got {length}"));
        }
        let dx = length / count::<T>(n - 1);
        Ok(Self {
            origin,
            length,
            n,
            dx,
        })
    }

    /// Grid over `[a, b]`.
    pub fn span(a: T, b: T, n: usize) -> Result<Self> {
        Self::new(b - a, n, a)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dx(&self) -> T {
        self.dx
    }

    pub fn origin(&self) -> T {
        self.origin
    }

    pub fn length(&self) -> T {
        self.length
    }

    pub fn end(&self) -> T {
        self.x(self.n - 1)
    }

    #[inline]
    pub fn x(&self, i: usize) -> T {
        self.dx.mul_add(count(i), self.origin)
    }

    pub fn coords(&self) -> Vec<T> {
        (0..self.n).map(|i| self.x(i)).collect()
    }

    /// Fractional index of `x`, clamped to `[0, n-1]`.
    fn locate(&self, x: T) -> T {
        let s = (x - self.origin) / self.dx;
        let r = s.round();
        // node coordinates are rebuilt with a rounding error; snap them back
        let s = if (s - r).abs() <= lit::<T>(64.0) * T::epsilon() * r.abs().max(T::one()) { r } else { s };
        s.max(T::zero()).min(count(self.n - 1))
    }
}

/// Cell index and interpolation weights along one axis.
struct Stencil<T> {
    base: usize,
    weights: [T; 4],
    len: usize,
    cell: usize,
}

fn stencil<T: Real>(s: T, n: usize, method: Interpolation) -> Stencil<T> {
    let last = n - 1;
    let cell = s.floor().to_usize().unwrap_or(0).min(last - 1);
    let f = s - count(cell);
    if method == Interpolation::Linear || n < 4 {
        return Stencil {
            base: cell,
            weights: [T::one() - f, f, T::zero(), T::zero()],
            len: 2,
            cell,
        };
    }
    let base = cell.saturating_sub(1).min(n - 4);
    let t = s - count(base);
    let one = T::one();
    let two = one + one;
    let three = two + one;
    let six = three + three;
    let weights = [
        -(t - one) * (t - two) * (t - three) / six,
        t * (t - two) * (t - three) / two,
        -t * (t - one) * (t - three) / two,
        t * (t - one) * (t - two) / six,
    ];
    Stencil {
        base,
        weights,
        len: 4,
        cell,
    }
}

/// Dirichlet data of a 1D field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dirichlet1D<T> {
    pub left: T,
    pub right: T,
}

impl<T: Real> Mesh<T> for Grid1D<T> {
    type Point = T;
    type Boundary = Dirichlet1D<T>;

    fn node_count(&self) -> usize {
        self.n
    }

    fn point(&self, k: usize) -> T {
        self.x(k)
    }

    fn is_boundary(&self, k: usize) -> bool {
        k == 0 || k + 1 == self.n
    }

    fn spacing(&self) -> T {
        self.dx
    }

    fn lower(&self) -> T {
        self.origin
    }

    fn upper(&self) -> T {
        self.end()
    }

    fn inverse_square_sum(&self) -> T {
        (self.dx * self.dx).recip()
    }

    #[inline]
    fn neighbor_sum(&self, values: &[T], k: usize) -> T {
        (values[k - 1] + values[k + 1]) / (self.dx * self.dx)
    }

    fn gradient(&self, values: &[T], k: usize) -> T {
        let n = self.n;
        if k == 0 {
            (values[1] - values[0]) / self.dx
        } else if k + 1 == n {
            (values[n - 1] - values[n - 2]) / self.dx
        } else {
            (values[k + 1] - values[k - 1]) / (self.dx + self.dx)
        }
    }

    fn interpolate(&self, values: &[T], x: T, method: Interpolation) -> T {
        let st = stencil(self.locate(x), self.n, method);
        let mut acc = T::zero();
        for m in 0..st.len {
            acc = acc + st.weights[m] * values[st.base + m];
        }
        if method == Interpolation::Cubic {
            let (a, b) = (values[st.cell], values[st.cell + 1]);
            acc = acc.max(a.min(b)).min(a.max(b));
        }
        acc
    }

    fn apply_boundary(&self, values: &mut [T], b: &Dirichlet1D<T>) {
        values[0] = b.left;
        values[self.n - 1] = b.right;
    }

    fn boundary_from_values(&self, values: &[T]) -> Dirichlet1D<T> {
        Dirichlet1D {
            left: values[0],
            right: values[self.n - 1],
        }
    }

    fn check_boundary(&self, b: &Dirichlet1D<T>) -> Result<()> {
        if b.left.is_finite() && b.right.is_finite() {
            Ok(())
        } else {
            invalid("boundary", "non-finite Dirichlet value")
        }
    }

    fn csv_header(&self) -> &'static str {
        "x,u"
    }

    fn write_point<W: Write>(&self, k: usize, w: &mut W) -> io::Result<()> {
        write!(w, "{:.16e}", self.x(k))
    }
}

/// Uniform 2D tensor grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid2D<T> {
    x: Grid1D<T>,
    y: Grid1D<T>,
}

impl<T: Real> Grid2D<T> {
    pub fn new(x: Grid1D<T>, y: Grid1D<T>) -> Self {
        Self { x, y }
    }

    /// `[0, lx] x [0, ly]` with `nx * ny` nodes.
    pub fn rectangle(lx: T, nx: usize, ly: T, ny: usize) -> Result<Self> {
        Ok(Self::new(
            Grid1D::new(lx, nx, T::zero())?,
            Grid1D::new(ly, ny, T::zero())?,
        ))
    }

    pub fn x_axis(&self) -> &Grid1D<T> {
        &self.x
    }

    pub fn y_axis(&self) -> &Grid1D<T> {
        &self.y
    }

    pub fn nx(&self) -> usize {
        self.x.len()
    }

    pub fn ny(&self) -> usize {
        self.y.len()
    }

    pub fn dx(&self) -> T {
        self.x.dx()
    }

    pub fn dy(&self) -> T {
        self.y.dx()
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.x.len() + i
    }

    #[inline]
    pub fn ij(&self, k: usize) -> (usize, usize) {
        (k % self.x.len(), k / self.x.len())
    }
}

/// Dirichlet data of a 2D field, one value per face node.
///
/// `west`/`east` are indexed by `j` (length `ny`), `south`/`north` by `i` (length `nx`).
/// Corners take the south/north values.
#[derive(Debug, Clone, PartialEq)]
pub struct Dirichlet2D<T> {
    pub west: Vec<T>,
    pub east: Vec<T>,
    pub south: Vec<T>,
    pub north: Vec<T>,
}

impl<T: Real> Dirichlet2D<T> {
    pub fn uniform(grid: &Grid2D<T>, value: T) -> Self {
        Self {
            west: vec![value; grid.ny()],
            east: vec![value; grid.ny()],
            south: vec![value; grid.nx()],
            north: vec![value; grid.nx()],
        }
    }
}

impl<T: Real> Mesh<T> for Grid2D<T> {
    type Point = [T; 2];
    type Boundary = Dirichlet2D<T>;

    fn node_count(&self) -> usize {
        self.nx() * self.ny()
    }

    fn point(&self, k: usize) -> [T; 2] {
        let (i, j) = self.ij(k);
        [self.x.x(i), self.y.x(j)]
    }

    fn is_boundary(&self, k: usize) -> bool {
        let (i, j) = self.ij(k);
        i == 0 || j == 0 || i + 1 == self.nx() || j + 1 == self.ny()
    }

    fn spacing(&self) -> [T; 2] {
        [self.dx(), self.dy()]
    }

    fn lower(&self) -> [T; 2] {
        [self.x.origin(), self.y.origin()]
    }

    fn upper(&self) -> [T; 2] {
        [self.x.end(), self.y.end()]
    }

    fn inverse_square_sum(&self) -> T {
        (self.dx() * self.dx()).recip() + (self.dy() * self.dy()).recip()
    }

    #[inline]
    fn neighbor_sum(&self, values: &[T], k: usize) -> T {
        let nx = self.nx();
        (values[k - 1] + values[k + 1]) / (self.dx() * self.dx())
            + (values[k - nx] + values[k + nx]) / (self.dy() * self.dy())
    }

    fn gradient(&self, values: &[T], k: usize) -> [T; 2] {
        let (i, j) = self.ij(k);
        let nx = self.nx();
        let gx = if i == 0 {
            (values[k + 1] - values[k]) / self.dx()
        } else if i + 1 == nx {
            (values[k] - values[k - 1]) / self.dx()
        } else {
            (values[k + 1] - values[k - 1]) / (self.dx() + self.dx())
        };
        let gy = if j == 0 {
            (values[k + nx] - values[k]) / self.dy()
        } else if j + 1 == self.ny() {
            (values[k] - values[k - nx]) / self.dy()
        } else {
            (values[k + nx] - values[k - nx]) / (self.dy() + self.dy())
        };
        [gx, gy]
    }

    fn interpolate(&self, values: &[T], p: [T; 2], method: Interpolation) -> T {
        let sx = stencil(self.x.locate(p[0]), self.nx(), method);
        let sy = stencil(self.y.locate(p[1]), self.ny(), method);
        let nx = self.nx();
        let mut acc = T::zero();
        for b in 0..sy.len {
            let row = (sy.base + b) * nx;
            let mut r = T::zero();
            for a in 0..sx.len {
                r = r + sx.weights[a] * values[row + sx.base + a];
            }
            acc = acc + sy.weights[b] * r;
        }
        if method == Interpolation::Cubic {
            let k = sy.cell * nx + sx.cell;
            let corners = [values[k], values[k + 1], values[k + nx], values[k + nx + 1]];
            let lo = corners.iter().copied().fold(T::infinity(), T::min);
            let hi = corners.iter().copied().fold(T::neg_infinity(), T::max);
            acc = acc.max(lo).min(hi);
        }
        acc
    }

    fn apply_boundary(&self, values: &mut [T], b: &Dirichlet2D<T>) {
        let (nx, ny) = (self.nx(), self.ny());
        for j in 0..ny {
            values[j * nx] = b.west[j];
            values[j * nx + nx - 1] = b.east[j];
        }
        for i in 0..nx {
            values[i] = b.south[i];
            values[(ny - 1) * nx + i] = b.north[i];
        }
    }

    fn boundary_from_values(&self, values: &[T]) -> Dirichlet2D<T> {
        let (nx, ny) = (self.nx(), self.ny());
        Dirichlet2D {
            west: (0..ny).map(|j| values[j * nx]).collect(),
            east: (0..ny).map(|j| values[j * nx + nx - 1]).collect(),
            south: values[..nx].to_vec(),
            north: values[(ny - 1) * nx..].to_vec(),
        }
    }

    fn check_boundary(&self, b: &Dirichlet2D<T>) -> Result<()> {
        let (nx, ny) = (self.nx(), self.ny());
        if b.west.len() != ny || b.east.len() != ny || b.south.len() != nx || b.north.len() != nx {
            return invalid("boundary", "face lengths do not match the grid");
        }
        let all = b.west.iter().chain(&b.east).chain(&b.south).chain(&b.north);
        if all.into_iter().any(|v| !v.is_finite()) {
            return invalid("boundary", "non-finite Dirichlet value");
        }
        Ok(())
    }

    fn csv_header(&self) -> &'static str {
        "x,y,u"
    }

    fn write_point<W: Write>(&self, k: usize, w: &mut W) -> io::Result<()> {
        let [x, y] = self.point(k);
        write!(w, "{x:.16e},{y:.16e}")
    }
}

/// Uniform time axis with `dt = T/(N_t - 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeAxis<T> {
    horizon: T,
    n: usize,
    dt: T,
}

impl<T: Real> TimeAxis<T> {
    pub fn new(horizon: T, n: usize) -> Result<Self> {
        if n < 2 {
            return invalid("time axis", format!("need at least 2 levels, got {n}"));
        }
        if !(horizon > T::zero()) || !horizon.is_finite() {
            return invalid("time axis", format!("horizon must be positive, got {horizon}"));
        }
        Ok(Self {
            horizon,
            n,
            dt: horizon / count::<T>(n - 1),
        })
    }

    /// Axis with `steps` steps of size `dt`.
    pub fn from_step(dt: T, steps: usize) -> Result<Self> {
        if !(dt > T::zero()) || !dt.is_finite() {
            return invalid("time axis", format!("step must be positive, got {dt}"));
        }
        Ok(Self {
            horizon: dt * count::<T>(steps),
            n: steps + 1,
            dt,
        })
    }

    pub fn dt(&self) -> T {
        self.dt
    }

    pub fn steps(&self) -> usize {
        self.n - 1
    }

    pub fn levels(&self) -> usize {
        self.n
    }

    pub fn horizon(&self) -> T {
        self.horizon
    }

    pub fn time(&self, n: usize) -> T {
        self.dt * count::<T>(n)
    }
}

/// Nodal values on a mesh together with their Dirichlet data.
#[derive(Debug, Clone, PartialEq)]
pub struct Field<T: Real, G: Mesh<T>> {
    grid: G,
    values: Vec<T>,
    boundary: G::Boundary,
}

pub type Field1D<T> = Field<T, Grid1D<T>>;
pub type Field2D<T> = Field<T, Grid2D<T>>;

impl<T: Real, G: Mesh<T>> Field<T, G> {
    pub fn new(grid: G, values: Vec<T>, boundary: G::Boundary) -> Result<Self> {
        if values.len() != grid.node_count() {
            return Err(Error::GridMismatch(format!(
                "{} values for {} nodes",
                values.len(),
                grid.node_count()
            )));
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return invalid("field", format!("non-finite value at node {k}"));
        }
        grid.check_boundary(&boundary)?;
        Ok(Self {
            grid,
            values,
            boundary,
        })
    }

    /// Field whose Dirichlet data are its current face values.
    pub fn from_values(grid: G, values: Vec<T>) -> Result<Self> {
        if values.len() != grid.node_count() {
            return Err(Error::GridMismatch(format!(
                "{} values for {} nodes",
                values.len(),
                grid.node_count()
            )));
        }
        let boundary = grid.boundary_from_values(&values);
        Self::new(grid, values, boundary)
    }

    /// Samples `f` at every node; Dirichlet data are the sampled face values.
    pub fn sample(grid: G, f: impl Fn(G::Point) -> T) -> Result<Self> {
        let values = (0..grid.node_count()).map(|k| f(grid.point(k))).collect();
        Self::from_values(grid, values)
    }

    pub fn constant(grid: G, c: T) -> Result<Self> {
        let values = vec![c; grid.node_count()];
        Self::from_values(grid, values)
    }

    pub fn grid(&self) -> &G {
        &self.grid
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [T] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn boundary(&self) -> &G::Boundary {
        &self.boundary
    }

    pub fn set_boundary(&mut self, boundary: G::Boundary) -> Result<()> {
        self.grid.check_boundary(&boundary)?;
        self.boundary = boundary;
        Ok(())
    }

    /// Overwrites face nodes with the Dirichlet data. Idempotent.
    pub fn apply_dirichlet(&mut self) {
        self.grid.apply_boundary(&mut self.values, &self.boundary);
    }

    pub fn with_dirichlet(mut self) -> Self {
        self.apply_dirichlet();
        self
    }

    /// Same grid and boundary data, new values.
    pub fn with_values(&self, values: Vec<T>) -> Result<Self> {
        Self::new(self.grid.clone(), values, self.boundary.clone())
    }

    pub(crate) fn replace_values(&self, values: Vec<T>) -> Self {
        Self {
            grid: self.grid.clone(),
            values,
            boundary: self.boundary.clone(),
        }
    }

    pub fn min_max(&self) -> (T, T) {
        self.values.iter().fold((T::infinity(), T::neg_infinity()), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        })
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<T> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch("fields live on different grids".into()));
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .fold(T::zero(), |m, (a, b)| m.max((*a - *b).abs())))
    }

    /// Writes `x,u` (or `x,y,u`) rows with 17 significant digits.
    pub fn write_csv<W: Write>(&self, w: &mut W) -> io::Result<()> {
        writeln!(w, "{}", self.grid.csv_header())?;
        for (k, v) in self.values.iter().enumerate() {
            self.grid.write_point(k, w)?;
            writeln!(w, ",{v:.16e}")?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("csv output is ascii")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spacing_and_coordinates() {
        let g = Grid1D::<f64>::new(1.0, 11, 0.0).unwrap();
        assert!((g.dx() - 0.1).abs() < 1e-15);
        assert_eq!(g.x(0), 0.0);
        assert!((g.x(10) - 1.0).abs() < 1e-15);
        let g = Grid1D::<f64>::span(-1.0, 1.0, 201).unwrap();
        assert!((g.dx() - 0.01).abs() < 1e-15);
    }

    #[test]
    fn rejects_small_grids() {
        assert!(Grid1D::<f64>::new(1.0, 2, 0.0).is_err());
        assert!(Grid1D::<f64>::new(0.0, 5, 0.0).is_err());
        assert!(Grid1D::<f64>::new(f64::NAN, 5, 0.0).is_err());
    }

    #[test]
    fn time_axis_step() {
        let t = TimeAxis::<f64>::new(1.0, 101).unwrap();
        assert!((t.dt() - 0.01).abs() < 1e-15);
        assert_eq!(t.steps(), 100);
    }

    #[test]
    fn row_major_indexing() {
        let g = Grid2D::<f64>::rectangle(1.0, 4, 2.0, 3).unwrap();
        assert_eq!(g.index(1, 2), 9);
        assert_eq!(g.ij(9), (1, 2));
        assert_eq!(g.point(9), [1.0 / 3.0, 2.0]);
    }

    #[test]
    fn sampled_field_boundary_is_idempotent() {
        let g = Grid1D::<f64>::span(-1.0, 1.0, 21).unwrap();
        let mut f = Field::sample(g, |x: f64| -(std::f64::consts::PI * x).sin()).unwrap();
        let before = f.clone();
        f.apply_dirichlet();
        assert_eq!(f, before);
        f.apply_dirichlet();
        assert_eq!(f, before);
    }

    #[test]
    fn dirichlet_2d_faces() {
        let g = Grid2D::<f64>::rectangle(1.0, 5, 1.0, 4).unwrap();
        let mut f = Field::constant(g, 1.0).unwrap();
        let mut b = Dirichlet2D::uniform(&g, 0.0);
        b.north = vec![2.0; 5];
        f.set_boundary(b).unwrap();
        f.apply_dirichlet();
        let once = f.clone();
        f.apply_dirichlet();
        assert_eq!(f, once);
        assert_eq!(f.values()[g.index(2, 3)], 2.0);
        assert_eq!(f.values()[g.index(0, 1)], 0.0);
        assert_eq!(f.values()[g.index(2, 1)], 1.0);
    }

    #[test]
    fn non_finite_sample_rejected() {
        let g = Grid1D::<f64>::new(1.0, 5, 0.0).unwrap();
        assert!(Field::sample(g, |x: f64| 1.0 / (x - 0.5)).is_err());
    }

    #[test]
    fn csv_layout() {
        let g = Grid1D::<f64>::new(1.0, 3, 0.0).unwrap();
        let f = Field::sample(g, |x: f64| x).unwrap();
        let s = f.to_csv_string();
        let lines: Vec<_> = s.lines().collect();
        assert_eq!(lines[0], "x,u");
        assert_eq!(lines[2], "5.0000000000000000e-1,5.0000000000000000e-1");
        let g2 = Grid2D::<f64>::rectangle(1.0, 3, 1.0, 3).unwrap();
        let f2 = Field::constant(g2, 0.0).unwrap();
        assert!(f2.to_csv_string().starts_with("x,y,u\n"));
    }

    #[test]
    fn interpolation_reproduces_polynomials() {
        let g = Grid1D::<f64>::new(1.0, 11, 0.0).unwrap();
        let cubic = |x: f64| 1.0 + x - 2.0 * x * x + 0.5 * x * x * x;
        let vals: Vec<f64> = g.coords().into_iter().map(cubic).collect();
        for &x in &[0.03, 0.37, 0.51, 0.96] {
            let v = g.interpolate(&vals, x, Interpolation::CubicUnlimited);
            assert!((v - cubic(x)).abs() < 1e-13);
        }
        let lin: Vec<f64> = g.coords().into_iter().map(|x| 2.0 * x - 1.0).collect();
        for &x in &[-0.5, 0.0, 0.45, 1.2] {
            let v = g.interpolate(&lin, x, Interpolation::Linear);
            let xc = x.clamp(0.0, 1.0);
            assert!((v - (2.0 * xc - 1.0)).abs() < 1e-14);
        }
    }

    #[test]
    fn limited_cubic_stays_in_cell_hull() {
        let g = Grid1D::<f64>::new(1.0, 11, 0.0).unwrap();
        let step: Vec<f64> = g.coords().into_iter().map(|x| if x < 0.5 { 0.0 } else { 1.0 }).collect();
        for m in 0..100 {
            let x = m as f64 / 99.0;
            let v = g.interpolate(&step, x, Interpolation::Cubic);
            assert!((0.0..=1.0).contains(&v));
        }
        let raw = g.interpolate(&step, 0.36, Interpolation::CubicUnlimited);
        assert!(raw < 0.0);
    }

    #[test]
    fn bicubic_reproduces_tensor_cubics() {
        let g = Grid2D::<f64>::rectangle(1.0, 9, 2.0, 7).unwrap();
        let f = |p: [f64; 2]| (1.0 + p[0] * p[0] * p[0]) * (2.0 - p[1] + p[1] * p[1]);
        let vals: Vec<f64> = (0..g.node_count()).map(|k| f(g.point(k))).collect();
        let p = [0.41, 1.13];
        let v = g.interpolate(&vals, p, Interpolation::CubicUnlimited);
        assert!((v - f(p)).abs() < 1e-12);
    }

    #[test]
    fn gradient_central_and_one_sided() {
        let g = Grid1D::<f64>::new(1.0, 11, 0.0).unwrap();
        let vals: Vec<f64> = g.coords().into_iter().map(|x| x * x).collect();
        assert!((g.gradient(&vals, 5) - 1.0).abs() < 1e-13);
        assert!((g.gradient(&vals, 0) - 0.1).abs() < 1e-13);
    }

    #[test]
    fn works_in_single_precision() {
        let g = Grid1D::<f32>::new(1.0, 5, 0.0).unwrap();
        assert!((g.x(4) - 1.0).abs() < 1e-6);
        let f = Field::sample(g, |x: f32| x * 2.0).unwrap();
        assert_eq!(f.values().len(), 5);
    }
}
