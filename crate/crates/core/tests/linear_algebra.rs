//! Tridiagonal and Poisson solvers against dense LU.

mod common;

use common::*;
use dirode_core::navier_stokes::{psi_gauss_seidel, BackStepConfig, ChannelGeometry, NodeKind};
use dirode_core::spatial::{tdma_solve, TridiagonalSystem};
use dirode_core::Mesh;
use nalgebra::{DMatrix, DVector};

#[test]
fn tdma_matches_dense_lu() {
    let mut r = rng(101);
    for case in 0..200 {
        let n = 3 + case % 62;
        let sub: Vec<f64> = (0..n - 1).map(|_| uniform(&mut r, -1.0, 1.0)).collect();
        let sup: Vec<f64> = (0..n - 1).map(|_| uniform(&mut r, -1.0, 1.0)).collect();
        let diag: Vec<f64> = (0..n)
            .map(|i| {
                let off = if i > 0 { sub[i - 1].abs() } else { 0.0 } + if i + 1 < n { sup[i].abs() } else { 0.0 };
                let sign = if r.gen_bool(0.5) { 1.0 } else { -1.0 };
                sign * (off + uniform(&mut r, 0.1, 2.0))
            })
            .collect();
        let rhs: Vec<f64> = (0..n).map(|_| uniform(&mut r, -5.0, 5.0)).collect();
        let sys = TridiagonalSystem::new(sub.clone(), diag.clone(), sup.clone(), rhs.clone()).unwrap();
        let x = tdma_solve(&sys).unwrap();
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = diag[i];
            if i > 0 {
                m[(i, i - 1)] = sub[i - 1];
            }
            if i + 1 < n {
                m[(i, i + 1)] = sup[i];
            }
        }
        let dense = m.lu().solve(&DVector::from_vec(rhs)).unwrap();
        let norm = dense.amax();
        for i in 0..n {
            assert!((x[i] - dense[i]).abs() <= 1e-10 * norm.max(1.0), "case {case} row {i}");
        }
    }
}

use rand::Rng;

/// Dense solve of `lap(psi) = -omega` over fluid nodes with outlet copies.
fn dense_poisson(geom: &ChannelGeometry<f64>, fixed: &[f64], omega: &[f64]) -> Vec<f64> {
    let g = &geom.grid;
    let (nx, n) = (g.nx(), g.node_count());
    let unknown: Vec<usize> = (0..n)
        .filter(|&k| matches!(geom.kind(k), NodeKind::Fluid | NodeKind::Outlet))
        .collect();
    let mut slot = vec![usize::MAX; n];
    for (m, &k) in unknown.iter().enumerate() {
        slot[k] = m;
    }
    let (ax, ay) = (1.0 / (g.dx() * g.dx()), 1.0 / (g.dy() * g.dy()));
    let size = unknown.len();
    let mut a = DMatrix::zeros(size, size);
    let mut b = DVector::zeros(size);
    for (m, &k) in unknown.iter().enumerate() {
        if geom.kind(k) == NodeKind::Outlet {
            a[(m, m)] = 1.0;
            a[(m, slot[k - 1])] = -1.0;
            continue;
        }
        a[(m, m)] = -2.0 * (ax + ay);
        b[m] = -omega[k];
        for (nb, w) in [(k + 1, ax), (k - 1, ax), (k + nx, ay), (k - nx, ay)] {
            if slot[nb] != usize::MAX {
                a[(m, slot[nb])] += w;
            } else {
                b[m] -= w * fixed[nb];
            }
        }
    }
    let sol = a.lu().solve(&b).unwrap();
    let mut psi = fixed.to_vec();
    for (m, &k) in unknown.iter().enumerate() {
        psi[k] = sol[m];
    }
    psi
}

#[test]
fn gauss_seidel_streamfunction_converges_to_dense_solution() {
    let cfg = BackStepConfig { h1: 0.25, aspect: 2.0, ..Default::default() };
    let geom = ChannelGeometry::new(cfg, 17, 9).unwrap();
    let mut r = rng(7);
    let omega: Vec<f64> = (0..geom.grid.node_count()).map(|_| uniform(&mut r, -3.0, 3.0)).collect();
    let fixed = geom.initial_psi();
    let want = dense_poisson(&geom, &fixed, &omega);
    let mut psi = fixed.clone();
    psi_gauss_seidel(&geom, &mut psi, &omega, 5000);
    let err = psi.iter().zip(&want).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    assert!(err < 1e-6, "max difference {err:e}");
}
