//! Finite-difference energy minimization on the unit square for −div(b ∇P(∇u) + ε
//! |∇u|^{q−2}∇u) = f with zero boundary values, truncation sequences, and the
//! structural-assumption audit.

use crate::anisotropic::{vector_conjugate, AnisotropicYoungFunction};
use crate::error::{Error, Result};
use crate::numeric::KahanSum;
use crate::quad::gl20;
use crate::rearrangement::{rearrange, RearrangedFunction};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::Serialize;
use std::sync::Arc;

/// Nodal field on the (N×N)-node grid of [0,1]², row-major with x fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct GridField {
    n: usize,
    values: Vec<f64>,
}

impl GridField {
    pub fn zeros(n: usize) -> Self {
        Self { n, values: vec![0.0; n * n] }
    }

    /// Samples g at every node; boundary nodes are kept as sampled.
    pub fn from_fn(n: usize, g: impl Fn(f64, f64) -> f64) -> Self {
        let h = 1.0 / (n - 1) as f64;
        let mut values = Vec::with_capacity(n * n);
        for j in 0..n {
            for i in 0..n {
                values.push(g(i as f64 * h, j as f64 * h));
            }
        }
        Self { n, values }
    }

    pub fn from_values(n: usize, values: Vec<f64>) -> Result<Self> {
        if n < 3 || values.len() != n * n {
            return Err(Error::invalid("a grid field needs N ≥ 3 and N² values"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("grid values must be finite"));
        }
        Ok(Self { n, values })
    }

    pub fn nodes(&self) -> usize {
        self.n
    }
    pub fn h(&self) -> f64 {
        1.0 / (self.n - 1) as f64
    }
    pub fn values(&self) -> &[f64] {
        &self.values
    }
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.n + i]
    }

    /// Trapezoidal node measures; they sum to 1.
    pub fn node_weights(&self) -> Vec<f64> {
        let n = self.n;
        let h2 = self.h() * self.h();
        let w1 = |i: usize| if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
        let mut w = Vec::with_capacity(n * n);
        for j in 0..n {
            for i in 0..n {
                w.push(w1(i) * w1(j) * h2);
            }
        }
        w
    }

    pub fn l1_norm(&self) -> f64 {
        self.values.iter().zip(self.node_weights()).map(|(v, w)| v.abs() * w).sum()
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn truncated(&self, k: f64) -> Self {
        Self { n: self.n, values: self.values.iter().map(|v| v.clamp(-k, k)).collect() }
    }

    /// Forward-difference gradients of the (N−1)² cells, flattened as (ξ₁, ξ₂) pairs.
    pub fn cell_gradients(&self) -> Vec<f64> {
        let n = self.n;
        let h = self.h();
        let mut g = Vec::with_capacity(2 * (n - 1) * (n - 1));
        for j in 0..n - 1 {
            for i in 0..n - 1 {
                let u = self.at(i, j);
                g.push((self.at(i + 1, j) - u) / h);
                g.push((self.at(i, j + 1) - u) / h);
            }
        }
        g
    }

    pub fn cell_measure(&self) -> f64 {
        self.h() * self.h()
    }

    pub fn rearranged(&self) -> Result<RearrangedFunction> {
        rearrange(&self.values, &self.node_weights())
    }

    /// |{|u| > t}| with trapezoidal node measures.
    pub fn distribution(&self, t: f64) -> f64 {
        self.values.iter().zip(self.node_weights()).filter(|(v, _)| v.abs() > t).map(|(_, w)| w).sum()
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks(self.n)
    }
}

/// Operator b(x)[∇P(ξ) + ε|ξ|^{q−2}ξ] with the coercivity function Φ used by the audit
/// and the a-priori bounds.
#[derive(Debug, Clone)]
pub struct OperatorSpec {
    pub potential: AnisotropicYoungFunction,
    /// Φ with a(x, ξ)·ξ ≥ Φ(ξ)
    pub coercivity: AnisotropicYoungFunction,
    /// one value per cell, ≥ 1; None means b ≡ 1
    pub coefficient: Option<Vec<f64>>,
    pub eps: f64,
    pub q: f64,
}

impl OperatorSpec {
    pub fn new(potential: AnisotropicYoungFunction, coercivity: AnisotropicYoungFunction) -> Self {
        Self { potential, coercivity, coefficient: None, eps: 0.0, q: 4.0 }
    }

    pub fn regularized(mut self, eps: f64, q: f64) -> Self {
        self.eps = eps;
        self.q = q;
        self
    }

    pub fn validate(&self, nodes: usize) -> Result<()> {
        if self.potential.n() != 2 || self.coercivity.n() != 2 {
            return Err(Error::invalid("the grid solver is two-dimensional"));
        }
        if !(0.0..1.0).contains(&self.eps) {
            return Err(Error::invalid(format!("ε must lie in [0, 1), got {}", self.eps)));
        }
        if !(self.q > 2.0) {
            return Err(Error::invalid(format!("q must exceed n = 2, got {}", self.q)));
        }
        if let Some(b) = &self.coefficient {
            if b.len() != (nodes - 1) * (nodes - 1) {
                return Err(Error::invalid("one coefficient per cell is required"));
            }
            if b.iter().any(|x| !(*x >= 1.0) || !x.is_finite()) {
                return Err(Error::invalid("coefficients must be finite and ≥ 1"));
            }
        }
        Ok(())
    }

    fn b(&self, cell: usize) -> f64 {
        self.coefficient.as_ref().map_or(1.0, |b| b[cell])
    }

    fn b_max(&self) -> f64 {
        self.coefficient.as_ref().map_or(1.0, |b| b.iter().fold(1.0, |m, x| m.max(*x)))
    }

    /// a(ξ) without the coefficient.
    pub fn flux(&self, xi: &[f64], delta: f64, out: &mut [f64]) {
        self.potential.gradient(xi, delta, out);
        if self.eps > 0.0 {
            let r = xi[0].hypot(xi[1]).max(delta);
            let g = self.eps * r.powf(self.q - 2.0);
            out[0] += g * xi[0];
            out[1] += g * xi[1];
        }
    }

    fn density(&self, xi: &[f64]) -> f64 {
        let mut v = self.potential.eval(xi);
        if self.eps > 0.0 {
            v += self.eps * xi[0].hypot(xi[1]).powf(self.q) / self.q;
        }
        v
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    /// sup-norm tolerance on the energy gradient; None means 1e−9·‖f‖₁
    pub tol: Option<f64>,
    pub max_iter: usize,
    /// floor inside |∇u| powers of the flux
    pub delta: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self { tol: None, max_iter: 50_000, delta: 1e-12 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveReport {
    pub iterations: usize,
    pub residual: f64,
    pub tol: f64,
    /// J after every accepted step, starting from the initial guess
    pub energies: Vec<f64>,
}

impl SolveReport {
    pub fn energy_monotone(&self) -> bool {
        self.energies.windows(2).all(|w| w[1] <= w[0])
    }
}

/// Fast solver of the Dirichlet graph Laplacian on the interior nodes by DST-I.
struct Poisson {
    m: usize,
    fft: Arc<dyn Fft<f64>>,
    inv_eig: Vec<f64>,
}

impl Poisson {
    fn new(nodes: usize) -> Self {
        let m = nodes - 2;
        let fft = FftPlanner::new().plan_fft_forward(2 * (m + 1));
        let lam: Vec<f64> = (1..=m)
            .map(|k| 2.0 - 2.0 * (std::f64::consts::PI * k as f64 / (m + 1) as f64).cos())
            .collect();
        let scale = (2.0 / (m + 1) as f64).powi(2);
        let mut inv_eig = Vec::with_capacity(m * m);
        for l in &lam {
            for k in &lam {
                inv_eig.push(scale / (k + l));
            }
        }
        Self { m, fft, inv_eig }
    }

    /// In-place DST-I of every row of an m×m block.
    fn dst_rows(&self, a: &mut [f64]) {
        let m = self.m;
        let len = 2 * (m + 1);
        let mut buf = vec![Complex64::new(0.0, 0.0); m * len];
        for (row, chunk) in a.chunks(m).zip(buf.chunks_mut(len)) {
            for (k, x) in row.iter().enumerate() {
                chunk[k + 1] = Complex64::new(*x, 0.0);
                chunk[len - 1 - k] = Complex64::new(-*x, 0.0);
            }
        }
        self.fft.process(&mut buf);
        for (row, chunk) in a.chunks_mut(m).zip(buf.chunks(len)) {
            for (k, x) in row.iter_mut().enumerate() {
                *x = -0.5 * chunk[k + 1].im;
            }
        }
    }

    fn transpose(&self, a: &mut [f64]) {
        let m = self.m;
        for j in 0..m {
            for i in j + 1..m {
                a.swap(j * m + i, i * m + j);
            }
        }
    }

    /// x = L⁻¹ g on the interior block.
    fn solve(&self, g: &mut [f64]) {
        self.dst_rows(g);
        self.transpose(g);
        self.dst_rows(g);
        for (x, s) in g.iter_mut().zip(&self.inv_eig) {
            *x *= s;
        }
        self.dst_rows(g);
        self.transpose(g);
        self.dst_rows(g);
    }
}

struct Problem<'a> {
    spec: &'a OperatorSpec,
    f: &'a GridField,
    n: usize,
    h: f64,
    delta: f64,
}

impl Problem<'_> {
    fn energy(&self, u: &[f64]) -> f64 {
        let (n, h) = (self.n, self.h);
        let mut acc = KahanSum::default();
        let h2 = h * h;
        for j in 0..n - 1 {
            for i in 0..n - 1 {
                let c = j * n + i;
                let xi = [(u[c + 1] - u[c]) / h, (u[c + n] - u[c]) / h];
                acc.add(self.spec.b(j * (n - 1) + i) * self.spec.density(&xi) * h2);
            }
        }
        for j in 1..n - 1 {
            for i in 1..n - 1 {
                let c = j * n + i;
                acc.add(-self.f.values[c] * u[c] * h2);
            }
        }
        acc.value()
    }

    /// ∂J/∂u at the interior nodes, as an (N−2)² block.
    fn gradient(&self, u: &[f64], out: &mut [f64]) {
        let (n, h) = (self.n, self.h);
        let mut full = vec![0.0; n * n];
        let mut a = [0.0; 2];
        for j in 0..n - 1 {
            for i in 0..n - 1 {
                let c = j * n + i;
                let xi = [(u[c + 1] - u[c]) / h, (u[c + n] - u[c]) / h];
                self.spec.flux(&xi, self.delta, &mut a);
                let b = self.spec.b(j * (n - 1) + i) * h;
                full[c + 1] += b * a[0];
                full[c + n] += b * a[1];
                full[c] -= b * (a[0] + a[1]);
            }
        }
        let h2 = h * h;
        let m = n - 2;
        for j in 0..m {
            for i in 0..m {
                let c = (j + 1) * n + i + 1;
                out[j * m + i] = full[c] - self.f.values[c] * h2;
            }
        }
    }

    fn scatter(&self, block: &[f64], u: &mut [f64]) {
        let (n, m) = (self.n, self.n - 2);
        for j in 0..m {
            u[(j + 1) * n + 1..(j + 1) * n + 1 + m].copy_from_slice(&block[j * m..(j + 1) * m]);
        }
    }

    /// s·Ls for an interior block s.
    fn laplace_form(&self, s: &[f64]) -> f64 {
        let m = self.n - 2;
        let at = |i: isize, j: isize| {
            if i < 0 || j < 0 || i >= m as isize || j >= m as isize {
                0.0
            } else {
                s[j as usize * m + i as usize]
            }
        };
        let mut acc = 0.0;
        for j in -1..m as isize {
            for i in -1..m as isize {
                let c = at(i, j);
                acc += (at(i + 1, j) - c).powi(2) + (at(i, j + 1) - c).powi(2);
            }
        }
        acc
    }
}

/// Minimizer of the discrete energy Σ b[P(∇u) + εA(|∇u|)]h² − Σ f u h².
pub fn solve(spec: &OperatorSpec, f: &GridField, opts: &SolveOptions) -> Result<(GridField, SolveReport)> {
    solve_from(spec, f, opts, None)
}

/// As `solve`, starting from `initial` when given.
pub fn solve_from(
    spec: &OperatorSpec,
    f: &GridField,
    opts: &SolveOptions,
    initial: Option<&GridField>,
) -> Result<(GridField, SolveReport)> {
    let n = f.nodes();
    if n < 3 {
        return Err(Error::invalid("the grid needs at least 3 nodes per side"));
    }
    spec.validate(n)?;
    if !spec.potential.validate(256, 7).convex {
        return Err(Error::NotConvex(format!("{} failed the midpoint-convexity probe", spec.potential.id())));
    }
    let tol = opts.tol.unwrap_or(1e-9 * f.l1_norm());
    let prob = Problem { spec, f, n, h: f.h(), delta: opts.delta };
    let pre = Poisson::new(n);
    let m = n - 2;
    let mut u = vec![0.0; n * n];
    if let Some(init) = initial {
        if init.nodes() != n {
            return Err(Error::invalid("initial guess has the wrong grid size"));
        }
        for j in 1..n - 1 {
            for i in 1..n - 1 {
                u[j * n + i] = init.at(i, j);
            }
        }
    }
    let mut g = vec![0.0; m * m];
    prob.gradient(&u, &mut g);
    let mut e = prob.energy(&u);
    let mut energies = vec![e];
    let sup = |v: &[f64]| v.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    let mut residual = sup(&g);
    let mut alpha = 1.0;
    let mut trial = u.clone();
    let mut g_new = vec![0.0; m * m];
    for it in 0..opts.max_iter {
        if residual <= tol {
            return Ok((GridField { n, values: u }, SolveReport { iterations: it, residual, tol, energies }));
        }
        let mut d = g.clone();
        pre.solve(&mut d);
        let slope: f64 = g.iter().zip(&d).map(|(a, b)| a * b).sum();
        if !(slope > 0.0) {
            break;
        }
        let mut step = alpha;
        let mut accepted = false;
        for _ in 0..80 {
            trial.copy_from_slice(&u);
            let mut block: Vec<f64> = (0..m * m)
                .map(|k| u[(k / m + 1) * n + k % m + 1] - step * d[k])
                .collect();
            prob.scatter(&block, &mut trial);
            let e_new = prob.energy(&trial);
            if e_new <= e - 1e-4 * step * slope || (e_new <= e && step < 1e-8 * alpha) {
                prob.gradient(&trial, &mut g_new);
                // s = −step·d, y = g_new − g
                block.iter_mut().zip(&d).for_each(|(s, dk)| *s = -step * dk);
                let sy: f64 = block.iter().zip(g_new.iter().zip(&g)).map(|(s, (a, b))| s * (a - b)).sum();
                let sls = prob.laplace_form(&block);
                alpha = if sy > 0.0 && sls > 0.0 { (sls / sy).clamp(1e-6, 1e6) } else { 1.0 };
                std::mem::swap(&mut u, &mut trial);
                std::mem::swap(&mut g, &mut g_new);
                e = e_new;
                energies.push(e);
                residual = sup(&g);
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            return Err(Error::NoConvergence { iterations: it, residual });
        }
    }
    if residual <= tol {
        let iterations = energies.len() - 1;
        return Ok((GridField { n, values: u }, SolveReport { iterations, residual, tol, energies }));
    }
    Err(Error::NoConvergence { iterations: opts.max_iter, residual })
}

/// Σ over cells with all corners in {|u| < t} of Φ(∇u)·h².
pub fn truncated_energy(u: &GridField, phi: &AnisotropicYoungFunction, t: f64) -> f64 {
    let n = u.nodes();
    let g = u.cell_gradients();
    let h2 = u.cell_measure();
    let mut acc = KahanSum::default();
    for j in 0..n - 1 {
        for i in 0..n - 1 {
            let inside = [(i, j), (i + 1, j), (i, j + 1), (i + 1, j + 1)].iter().all(|(a, b)| u.at(*a, *b).abs() < t);
            if inside {
                let c = 2 * (j * (n - 1) + i);
                acc.add(phi.eval(&g[c..c + 2]) * h2);
            }
        }
    }
    acc.value()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TruncationCheck {
    pub t: Vec<f64>,
    pub energy: Vec<f64>,
    /// 2t‖f‖₁
    pub bound: Vec<f64>,
    pub pass: bool,
}

/// Truncated energies on `count` levels evenly spaced in (0, sup|u|].
pub fn truncation_energy_check(u: &GridField, phi: &AnisotropicYoungFunction, f_l1: f64, count: usize) -> TruncationCheck {
    let top = u.sup_norm().max(f64::MIN_POSITIVE);
    let t: Vec<f64> = (1..=count).map(|k| top * k as f64 / count as f64).collect();
    let energy: Vec<f64> = t.iter().map(|x| truncated_energy(u, phi, *x)).collect();
    let bound: Vec<f64> = t.iter().map(|x| 2.0 * x * f_l1).collect();
    let pass = energy.iter().zip(&bound).all(|(e, b)| e <= b);
    TruncationCheck { t, energy, bound, pass }
}

/// Datum of an approximation sequence.
#[derive(Debug, Clone)]
pub enum SequenceData {
    /// f_k = T_k(f)
    Field(GridField),
    /// f_k = mass·(tent of half-width max(2h, 1/(2k)) at x0), normalized on the grid
    PointMass { nodes: usize, x0: [f64; 2], mass: f64 },
}

/// Product tent of half-width w at x0 with trapezoidal total mass `mass`.
pub fn tent_mass(nodes: usize, x0: [f64; 2], mass: f64, w: f64) -> GridField {
    let mut f = GridField::from_fn(nodes, |x, y| {
        (1.0 - (x - x0[0]).abs() / w).max(0.0) * (1.0 - (y - x0[1]).abs() / w).max(0.0)
    });
    let total = f.l1_norm();
    f.values.iter_mut().for_each(|v| *v *= mass / total);
    f
}

impl SequenceData {
    pub fn term(&self, k: f64) -> GridField {
        match self {
            SequenceData::Field(f) => f.truncated(k),
            SequenceData::PointMass { nodes, x0, mass } => {
                let h = 1.0 / (*nodes - 1) as f64;
                tent_mass(*nodes, *x0, *mass, (0.5 / k).max(2.0 * h))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SequenceStep {
    pub k: f64,
    pub next_k: f64,
    pub sup_difference: f64,
    /// |{|u_k − u_next| > τ}|
    pub deviation_measure: f64,
    /// |{|∇u_k − ∇u_next| > τ}| over cells
    pub gradient_deviation_measure: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SequenceReport {
    pub ladder: Vec<f64>,
    pub tau: f64,
    pub data_l1: Vec<f64>,
    pub iterations: Vec<usize>,
    pub steps: Vec<SequenceStep>,
    /// deviation measures nonincreasing along the ladder
    pub monotone: bool,
}

/// k = 1, 2, 4, …, 2^{top}.
pub fn dyadic_ladder(top: u32) -> Vec<f64> {
    (0..=top).map(|e| (1u64 << e) as f64).collect()
}

fn compare(a: &GridField, b: &GridField, k: f64, next_k: f64, tau: f64) -> SequenceStep {
    let weights = a.node_weights();
    let mut sup = 0.0f64;
    let mut dev = 0.0;
    for ((x, y), wt) in a.values.iter().zip(&b.values).zip(&weights) {
        let d = (x - y).abs();
        sup = sup.max(d);
        if d > tau {
            dev += wt;
        }
    }
    let (ga, gb) = (a.cell_gradients(), b.cell_gradients());
    let gdev = ga
        .chunks(2)
        .zip(gb.chunks(2))
        .filter(|(p, q)| (p[0] - q[0]).hypot(p[1] - q[1]) > tau)
        .count() as f64
        * a.cell_measure();
    SequenceStep { k, next_k, sup_difference: sup, deviation_measure: dev, gradient_deviation_measure: gdev }
}

/// Solves the problems with data f_k and f_{k+1} for every k on the ladder, each
/// warm-started from the previous solve, and compares u_k with u_{k+1}. Returns the u_k.
pub fn approximable_sequence(
    spec: &OperatorSpec,
    data: &SequenceData,
    ladder: &[f64],
    tau: f64,
    opts: &SolveOptions,
) -> Result<(Vec<GridField>, SequenceReport)> {
    let mut fields: Vec<GridField> = Vec::with_capacity(ladder.len());
    let mut data_l1 = Vec::with_capacity(ladder.len());
    let mut iterations = Vec::with_capacity(ladder.len());
    let mut steps = Vec::with_capacity(ladder.len());
    let mut warm: Option<GridField> = None;
    for (index, k) in ladder.iter().enumerate() {
        let mut pair = Vec::with_capacity(2);
        for kk in [*k, k + 1.0] {
            let fk = data.term(kk);
            let (u, rep) = solve_from(spec, &fk, opts, warm.as_ref())
                .map_err(|e| Error::AtIndex { index, source: Box::new(e) })?;
            if kk == *k {
                data_l1.push(fk.l1_norm());
                iterations.push(rep.iterations);
            }
            warm = Some(u.clone());
            pair.push(u);
        }
        steps.push(compare(&pair[0], &pair[1], *k, k + 1.0, tau));
        fields.push(pair.swap_remove(0));
    }
    let monotone = steps.windows(2).all(|w| w[1].deviation_measure <= w[0].deviation_measure);
    Ok((fields, SequenceReport { ladder: ladder.to_vec(), tau, data_l1, iterations, steps, monotone }))
}

/// ∫∫_{[0,a]×[0,b]} (x² + y²)^{−3/4} for a, b ≥ 0, by polar coordinates split at the
/// diagonal of the rectangle.
fn corner_integral(a: f64, b: f64) -> f64 {
    if a <= 0.0 || b <= 0.0 {
        return 0.0;
    }
    let (nodes, weights) = gl20();
    let th0 = (b / a).atan();
    let rule = |lo: f64, hi: f64, g: &dyn Fn(f64) -> f64| {
        let (half, mid) = (0.5 * (hi - lo), 0.5 * (hi + lo));
        nodes.iter().zip(weights).map(|(z, w)| w * g(mid + half * z)).sum::<f64>() * half
    };
    // ∫₀^{ρ(θ)} r^{−1/2} dr = 2ρ^{1/2}
    2.0 * rule(0.0, th0, &|t| (a / t.cos()).sqrt())
        + 2.0 * rule(th0, std::f64::consts::FRAC_PI_2, &|t| (b / t.sin()).sqrt())
}

fn signed_corner(x: f64, y: f64) -> f64 {
    x.signum() * y.signum() * corner_integral(x.abs(), y.abs())
}

/// |x − x0|^{−3/2} as exact averages over the dual cells of the nodes.
pub fn singular_source(nodes: usize, x0: [f64; 2]) -> GridField {
    let h = 1.0 / (nodes - 1) as f64;
    GridField::from_fn(nodes, |x, y| {
        let (x1, x2) = ((x - 0.5 * h).max(0.0) - x0[0], (x + 0.5 * h).min(1.0) - x0[0]);
        let (y1, y2) = ((y - 0.5 * h).max(0.0) - x0[1], (y + 0.5 * h).min(1.0) - x0[1]);
        let int = signed_corner(x2, y2) - signed_corner(x1, y2) - signed_corner(x2, y1) + signed_corner(x1, y1);
        int / ((x2 - x1) * (y2 - y1))
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LogProfileFit {
    pub slope: f64,
    pub intercept: f64,
    pub points: usize,
}

/// Least-squares fit of u against ln r along the diagonal through x0, for r in [r_lo, r_hi].
pub fn diagonal_log_fit(u: &GridField, x0: [f64; 2], r_lo: f64, r_hi: f64) -> Result<LogProfileFit> {
    let n = u.nodes();
    let h = u.h();
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for i in 0..n {
        let x = i as f64 * h;
        let r = std::f64::consts::SQRT_2 * (x - x0[0]).abs();
        if r >= r_lo && r <= r_hi && (x - x0[0]) == (x - x0[1]) {
            xs.push(r.ln());
            ys.push(u.at(i, i));
        }
    }
    if xs.len() < 3 {
        return Err(Error::invalid("fewer than three diagonal nodes in the fit window"));
    }
    let (c, _) = crate::fit::least_squares(&[xs.clone()], &ys)?;
    let (slope, intercept) = (c[0], c[1]);
    Ok(LogProfileFit { slope, intercept, points: xs.len() })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditReport {
    pub samples: usize,
    /// pairs with (a(ξ) − a(η))·(ξ − η) ≤ 0, ξ ≠ η
    pub monotonicity_violations: usize,
    /// samples with a(ξ)·ξ < Φ(ξ)
    pub coercivity_violations: usize,
    /// largest c with Φ̃(c·a(ξ)) ≤ Φ(ξ) on every sample
    pub c_phi: f64,
    /// max over samples of Φ̃(c_Φ a(ξ)) − Φ(ξ), clipped at 0
    pub h_max: f64,
    pub pass: bool,
}

/// Samples ξ, η and checks strict monotonicity, coercivity and the conjugate growth
/// bound of the flux b_max·a.
pub fn assumption_audit(spec: &OperatorSpec, samples: usize, seed: u64) -> Result<AuditReport> {
    if spec.potential.n() != 2 {
        return Err(Error::invalid("the audit materializes the conjugate in two dimensions"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let b = spec.b_max();
    let draw = |rng: &mut ChaCha8Rng| {
        let r = 10f64.powf(rng.gen_range(-1.0..1.0));
        let th = rng.gen_range(0.0..std::f64::consts::TAU);
        [r * th.cos(), r * th.sin()]
    };
    let phi = &spec.coercivity;
    let mut mono = 0;
    let mut coer = 0;
    let mut c_phi = f64::INFINITY;
    let mut pts = Vec::with_capacity(samples);
    for _ in 0..samples {
        let xi = draw(&mut rng);
        let eta = draw(&mut rng);
        let (mut ax, mut ae) = ([0.0; 2], [0.0; 2]);
        spec.flux(&xi, 0.0, &mut ax);
        spec.flux(&eta, 0.0, &mut ae);
        let dot = |p: &[f64], q: &[f64]| p[0] * q[0] + p[1] * q[1];
        let diff = [xi[0] - eta[0], xi[1] - eta[1]];
        if xi != eta && dot(&[(ax[0] - ae[0]) * b, (ax[1] - ae[1]) * b], &diff) <= 0.0 {
            mono += 1;
        }
        let phix = phi.eval(&xi);
        if b * dot(&ax, &xi) < phix * (1.0 - 1e-12) {
            coer += 1;
        }
        pts.push((xi, [b * ax[0], b * ax[1]], phix));
    }
    let conj = |eta: [f64; 2], radius: f64| vector_conjugate(phi, &eta, radius, 41);
    for (xi, a, phix) in &pts {
        let radius = 4.0 * (xi[0].hypot(xi[1]) + 1.0);
        let ok = |c: f64| conj([c * a[0], c * a[1]], radius).map(|v| v <= phix * (1.0 + 1e-9));
        let (mut lo, mut hi) = (0.0, 1.0);
        while ok(hi)? {
            lo = hi;
            hi *= 2.0;
            if hi > 1e6 {
                break;
            }
        }
        for _ in 0..40 {
            let mid = 0.5 * (lo + hi);
            if ok(mid)? {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        c_phi = c_phi.min(lo);
    }
    let mut h_max = 0.0f64;
    for (xi, a, phix) in &pts {
        let radius = 4.0 * (xi[0].hypot(xi[1]) + 1.0);
        h_max = h_max.max(conj([c_phi * a[0], c_phi * a[1]], radius)? - phix);
    }
    Ok(AuditReport {
        samples,
        monotonicity_violations: mono,
        coercivity_violations: coer,
        c_phi,
        h_max: h_max.max(0.0),
        pass: mono == 0 && coer == 0 && c_phi > 0.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::young::ScalarYoungFunction;

    fn laplace() -> OperatorSpec {
        let p = AnisotropicYoungFunction::radial(2, ScalarYoungFunction::power(2.0).unwrap()).unwrap();
        let phi = AnisotropicYoungFunction::radial(2, ScalarYoungFunction::power_scaled(2.0, 1.0).unwrap()).unwrap();
        OperatorSpec::new(p, phi)
    }

    /// u(½, ½) for −Δu = 1 on the unit square by its sine series.
    fn center_series() -> f64 {
        let pi = std::f64::consts::PI;
        let mut s = 0.0;
        for k in (1..400).step_by(2) {
            for l in (1..400).step_by(2) {
                let (k, l) = (k as f64, l as f64);
                let sign = if ((k + l) / 2.0 - 1.0) as i64 % 2 == 0 { 1.0 } else { -1.0 };
                s += sign * 16.0 / (pi.powi(4) * k * l * (k * k + l * l));
            }
        }
        s
    }

    #[test]
    fn dst_poisson_inverts_laplacian() {
        let pre = Poisson::new(9);
        let m = 7;
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x: Vec<f64> = (0..m * m).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let at = |i: isize, j: isize| if i < 0 || j < 0 || i >= m as isize || j >= m as isize { 0.0 } else { x[j as usize * m + i as usize] };
        let mut lx: Vec<f64> = (0..m * m)
            .map(|k| {
                let (i, j) = ((k % m) as isize, (k / m) as isize);
                4.0 * at(i, j) - at(i + 1, j) - at(i - 1, j) - at(i, j + 1) - at(i, j - 1)
            })
            .collect();
        pre.solve(&mut lx);
        for (a, b) in lx.iter().zip(&x) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn poisson_center_value() {
        let f = GridField::from_fn(129, |_, _| 1.0);
        let (u, rep) = solve(&laplace(), &f, &SolveOptions::default()).unwrap();
        let c = u.at(64, 64);
        let oracle = center_series();
        assert!((oracle - 0.07367).abs() < 1e-5, "{oracle}");
        assert!((c - oracle).abs() < 2e-4, "{c}");
        assert!(rep.energy_monotone());
    }

    #[test]
    fn zero_source() {
        let f = GridField::zeros(17);
        let (u, _) = solve(&laplace(), &f, &SolveOptions::default()).unwrap();
        assert!(u.values().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn split_two_four() {
        let p = AnisotropicYoungFunction::split(vec![
            ScalarYoungFunction::power(2.0).unwrap(),
            ScalarYoungFunction::power(4.0).unwrap(),
        ])
        .unwrap();
        let phi = AnisotropicYoungFunction::split(vec![
            ScalarYoungFunction::power_scaled(2.0, 1.0).unwrap(),
            ScalarYoungFunction::power_scaled(4.0, 1.0).unwrap(),
        ])
        .unwrap();
        let spec = OperatorSpec::new(p, phi.clone());
        let f = GridField::from_fn(33, |_, _| 1.0);
        let (u, rep) = solve(&spec, &f, &SolveOptions::default()).unwrap();
        assert!(rep.residual <= 1e-9 && rep.energy_monotone());
        assert!(u.values().iter().all(|v| *v >= -1e-12));
        assert!(truncation_energy_check(&u, &phi, f.l1_norm(), 20).pass);
    }

    #[test]
    fn singular_source_averages() {
        let f = singular_source(9, [0.5, 0.5]);
        let h = 0.125;
        // total mass over the square by polar integration
        let total = 4.0 * corner_integral(0.5, 0.5);
        assert!((f.l1_norm() - total).abs() < 1e-10 * total);
        // away from the singularity the average is close to the point value
        let far = f.at(1, 1);
        let exact = ((0.5 - h) * std::f64::consts::SQRT_2).powf(-1.5);
        assert!((far / exact - 1.0).abs() < 0.02, "{far} {exact}");
        assert!(f.at(4, 4) > f.at(5, 4));
    }

    #[test]
    fn audit_quadratic() {
        let p = AnisotropicYoungFunction::radial(2, ScalarYoungFunction::power_scaled(2.0, 1.0).unwrap()).unwrap();
        let phi = AnisotropicYoungFunction::radial(2, ScalarYoungFunction::power(2.0).unwrap()).unwrap();
        let rep = assumption_audit(&OperatorSpec::new(p, phi), 24, 1).unwrap();
        assert!(rep.pass);
        assert!((rep.c_phi - 0.5).abs() < 1e-3, "{rep:?}");
    }
}
