//! Dense primal-dual path-following solver for block-diagonal SDPs in
//! standard form over real symmetric matrices:
//!
//! ```text
//! min  sum_b <C_b, X_b>    s.t.  sum_b <A_kb, X_b> = b_k,   X_b >= 0
//! ```
//!
//! Nesterov-Todd scaling, Mehrotra predictor-corrector, dense Cholesky
//! on the Schur complement, and a deterministic identity-proportional
//! start. All spectral work goes through a cyclic Jacobi eigensolver:
//! the blocks here never exceed dimension 128, where Jacobi's
//! determinism is worth more than its constant factor.
//!
//! The solver reports its final residuals and never silently returns a
//! wrong answer: if the iteration cap is hit, the partial iterate comes
//! back with [`SolveStatus::MaxIterations`].

use serde::Serialize;

/// Dense symmetric matrix, full row-major storage.
#[derive(Clone, Debug)]
pub struct SymMat {
    pub n: usize,
    pub a: Vec<f64>,
}

impl SymMat {
    pub fn zeros(n: usize) -> Self {
        SymMat {
            n,
            a: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize, scale: f64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.a[i * n + i] = scale;
        }
        m
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.a[r * self.n + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.a[r * self.n + c] = v;
    }

    pub fn add_scaled(&mut self, other: &SymMat, s: f64) {
        for (x, y) in self.a.iter_mut().zip(&other.a) {
            *x += s * y;
        }
    }

    pub fn scale_in_place(&mut self, s: f64) {
        for x in &mut self.a {
            *x *= s;
        }
    }

    /// Full inner product `sum_ij A_ij B_ij`.
    pub fn dot(&self, other: &SymMat) -> f64 {
        self.a.iter().zip(&other.a).map(|(x, y)| x * y).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.a.iter().fold(0.0f64, |m, x| m.max(x.abs()))
    }

    pub fn frobenius(&self) -> f64 {
        self.dot(self).sqrt()
    }

    /// General dense product (result not symmetrized).
    pub fn mul(&self, other: &SymMat) -> SymMat {
        let n = self.n;
        let mut out = SymMat::zeros(n);
        for r in 0..n {
            for k in 0..n {
                let v = self.a[r * n + k];
                if v == 0.0 {
                    continue;
                }
                let row = &other.a[k * n..(k + 1) * n];
                let dst = &mut out.a[r * n..(r + 1) * n];
                for (d, o) in dst.iter_mut().zip(row) {
                    *d += v * o;
                }
            }
        }
        out
    }

    pub fn symmetrize(&mut self) {
        let n = self.n;
        for r in 0..n {
            for c in (r + 1)..n {
                let v = 0.5 * (self.a[r * n + c] + self.a[c * n + r]);
                self.a[r * n + c] = v;
                self.a[c * n + r] = v;
            }
        }
    }

    /// `self * diag(d) * self^T` — used with eigenvector matrices.
    fn eigen_recombine(&self, d: &[f64]) -> SymMat {
        let n = self.n;
        let mut out = SymMat::zeros(n);
        for k in 0..n {
            if d[k] == 0.0 {
                continue;
            }
            for r in 0..n {
                let vr = self.a[r * n + k] * d[k];
                if vr == 0.0 {
                    continue;
                }
                for c in 0..n {
                    out.a[r * n + c] += vr * self.a[c * n + k];
                }
            }
        }
        out.symmetrize();
        out
    }
}

const JACOBI_MAX_SWEEPS: usize = 64;

/// Cyclic Jacobi for real symmetric matrices: returns eigenvalues and
/// the orthogonal eigenvector matrix (columns).
pub fn sym_eig(m: &SymMat) -> (Vec<f64>, SymMat) {
    let n = m.n;
    let mut a = m.clone();
    a.symmetrize();
    let mut v = SymMat::identity(n, 1.0);
    let scale = a.frobenius().max(f64::MIN_POSITIVE);
    let target = scale * 1e-15;
    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut off = 0.0f64;
        for r in 0..n {
            for c in (r + 1)..n {
                off += a.get(r, c) * a.get(r, c);
            }
        }
        if off.sqrt() <= target {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a.get(p, q);
                if apq.abs() <= target / ((n * n) as f64) {
                    continue;
                }
                let app = a.get(p, p);
                let aqq = a.get(q, q);
                let tau = (aqq - app) / (2.0 * apq);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for r in 0..n {
                    let arp = a.get(r, p);
                    let arq = a.get(r, q);
                    a.set(r, p, c * arp - s * arq);
                    a.set(r, q, s * arp + c * arq);
                }
                for col in 0..n {
                    let apc = a.get(p, col);
                    let aqc = a.get(q, col);
                    a.set(p, col, c * apc - s * aqc);
                    a.set(q, col, s * apc + c * aqc);
                }
                a.set(p, q, 0.0);
                a.set(q, p, 0.0);
                for r in 0..n {
                    let vrp = v.get(r, p);
                    let vrq = v.get(r, q);
                    v.set(r, p, c * vrp - s * vrq);
                    v.set(r, q, s * vrp + c * vrq);
                }
            }
        }
    }
    let evals: Vec<f64> = (0..n).map(|i| a.get(i, i)).collect();
    (evals, v)
}

pub fn min_eig(m: &SymMat) -> f64 {
    sym_eig(m).0.into_iter().fold(f64::INFINITY, f64::min)
}

/// Dense Cholesky, lower triangular; `None` if a pivot fails.
fn cholesky(m: &SymMat) -> Option<SymMat> {
    let n = m.n;
    let mut l = SymMat::zeros(n);
    for r in 0..n {
        for c in 0..=r {
            let mut sum = m.get(r, c);
            for k in 0..c {
                sum -= l.get(r, k) * l.get(c, k);
            }
            if r == c {
                if sum <= 0.0 {
                    return None;
                }
                l.set(r, c, sum.sqrt());
            } else {
                l.set(r, c, sum / l.get(c, c));
            }
        }
    }
    Some(l)
}

/// Solves `L L^T x = rhs` in place.
fn chol_solve(l: &SymMat, rhs: &mut [f64]) {
    let n = l.n;
    for r in 0..n {
        let mut v = rhs[r];
        for k in 0..r {
            v -= l.get(r, k) * rhs[k];
        }
        rhs[r] = v / l.get(r, r);
    }
    for r in (0..n).rev() {
        let mut v = rhs[r];
        for k in (r + 1)..n {
            v -= l.get(k, r) * rhs[k];
        }
        rhs[r] = v / l.get(r, r);
    }
}

/// Forward substitution `L Y = M` followed by `Z L^T = Y`, i.e.
/// `L^{-1} M L^{-T}` for symmetric `M`.
fn sandwich_inv(l: &SymMat, m: &SymMat) -> SymMat {
    let n = l.n;
    // Y = L^{-1} M  (solve column by column over rows)
    let mut y = m.clone();
    for col in 0..n {
        for r in 0..n {
            let mut v = y.get(r, col);
            for k in 0..r {
                v -= l.get(r, k) * y.get(k, col);
            }
            y.set(r, col, v / l.get(r, r));
        }
    }
    // Z = Y L^{-T}: Z L^T = Y, solve for each row.
    let mut z = y.clone();
    for r in 0..n {
        for col in 0..n {
            let mut v = z.get(r, col);
            for k in 0..col {
                v -= z.get(r, k) * l.get(col, k);
            }
            z.set(r, col, v / l.get(col, col));
        }
    }
    z.symmetrize();
    z
}

/// Sparse symmetric coefficient: entries with `row <= col`, each entry
/// standing for the symmetric pair.
#[derive(Clone, Debug, Default)]
pub struct SparseSym {
    pub entries: Vec<(usize, usize, f64)>,
}

impl SparseSym {
    pub fn push(&mut self, r: usize, c: usize, v: f64) {
        if v == 0.0 {
            return;
        }
        let (r, c) = if r <= c { (r, c) } else { (c, r) };
        self.entries.push((r, c, v));
    }

    /// `<A, M>` with the symmetric-pair convention.
    fn dot_dense(&self, m: &SymMat) -> f64 {
        self.entries
            .iter()
            .map(|&(r, c, v)| {
                if r == c {
                    v * m.get(r, c)
                } else {
                    2.0 * v * m.get(r, c)
                }
            })
            .sum()
    }

    fn add_into(&self, m: &mut SymMat, scale: f64) {
        for &(r, c, v) in &self.entries {
            m.a[r * m.n + c] += scale * v;
            if r != c {
                m.a[c * m.n + r] += scale * v;
            }
        }
    }

    /// `W A W` for symmetric `W`: sum of symmetric column outer products.
    fn sandwich(&self, w: &SymMat) -> SymMat {
        let n = w.n;
        let mut out = SymMat::zeros(n);
        for &(i, j, v) in &self.entries {
            // contribution v * (e_i e_j^T + [i != j] e_j e_i^T)
            for r in 0..n {
                let wri = w.get(r, i) * v;
                let wrj = w.get(r, j) * v;
                for c in 0..n {
                    if i == j {
                        out.a[r * n + c] += wri * w.get(j, c);
                    } else {
                        out.a[r * n + c] += wri * w.get(j, c) + wrj * w.get(i, c);
                    }
                }
            }
        }
        out
    }

    fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0f64, |m, &(_, _, v)| m.max(v.abs()))
    }
}

/// One scalar equality constraint: `sum_b <terms[b], X_b> = b_k`.
#[derive(Clone, Debug, Default)]
pub struct ConstraintRow {
    pub terms: Vec<(usize, SparseSym)>,
}

/// Standard-form real SDP data.
#[derive(Clone, Debug)]
pub struct RealSdp {
    pub block_dims: Vec<usize>,
    pub c: Vec<SymMat>,
    pub rows: Vec<ConstraintRow>,
    pub b: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SolveStatus {
    Optimal,
    /// Declared for completeness of the status contract. The iteration
    /// has no homogeneous embedding, so primal infeasibility surfaces
    /// as `MaxIterations` with large residuals; every problem family
    /// built by this crate is strictly feasible by construction.
    Infeasible,
    MaxIterations,
}

#[derive(Clone, Copy, Debug)]
pub struct IpmOptions {
    pub gap_tol: f64,
    pub feas_tol: f64,
    pub max_iters: usize,
}

impl Default for IpmOptions {
    fn default() -> Self {
        IpmOptions {
            gap_tol: 1e-7,
            feas_tol: 1e-8,
            max_iters: 200,
        }
    }
}

#[derive(Clone, Debug)]
pub struct RealSolution {
    pub status: SolveStatus,
    pub x: Vec<SymMat>,
    pub y: Vec<f64>,
    pub s: Vec<SymMat>,
    pub primal_obj: f64,
    pub dual_obj: f64,
    /// Complementarity `<X, S>`.
    pub gap: f64,
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub iterations: usize,
}

struct BlockScaling {
    w: SymMat,
    g: SymMat,
    g_inv: SymMat,
    v_evals: Vec<f64>,
    v_q: SymMat,
}

fn nt_scaling(x: &SymMat, s: &SymMat) -> BlockScaling {
    let floor = |l: f64, top: f64| l.max(top * 1e-16).max(f64::MIN_POSITIVE);
    let (ex, qx) = sym_eig(x);
    let top_x = ex.iter().fold(0.0f64, |m, &l| m.max(l.abs()));
    let x_half = qx.eigen_recombine(&ex.iter().map(|&l| floor(l, top_x).sqrt()).collect::<Vec<_>>());
    let bmat = {
        let mut t = x_half.mul(s).mul(&x_half);
        t.symmetrize();
        t
    };
    let (eb, qb) = sym_eig(&bmat);
    let top_b = eb.iter().fold(0.0f64, |m, &l| m.max(l.abs()));
    let b_inv_half =
        qb.eigen_recombine(&eb.iter().map(|&l| 1.0 / floor(l, top_b).sqrt()).collect::<Vec<_>>());
    // W = X^{1/2} (X^{1/2} S X^{1/2})^{-1/2} X^{1/2}
    let mut w = x_half.mul(&b_inv_half).mul(&x_half);
    w.symmetrize();
    let (ew, qw) = sym_eig(&w);
    let top_w = ew.iter().fold(0.0f64, |m, &l| m.max(l.abs()));
    let g = qw.eigen_recombine(&ew.iter().map(|&l| floor(l, top_w).sqrt()).collect::<Vec<_>>());
    let g_inv =
        qw.eigen_recombine(&ew.iter().map(|&l| 1.0 / floor(l, top_w).sqrt()).collect::<Vec<_>>());
    let mut v = g.mul(s).mul(&g);
    v.symmetrize();
    let (ev, qv) = sym_eig(&v);
    BlockScaling {
        w,
        g,
        g_inv,
        v_evals: ev,
        v_q: qv,
    }
}

/// Solves `V D + D V = R` for symmetric `R` in V's eigenbasis.
fn lyap_solve(sc: &BlockScaling, r: &SymMat) -> SymMat {
    let n = r.n;
    let q = &sc.v_q;
    // R' = Q^T R Q
    let mut rq = SymMat::zeros(n);
    for i in 0..n {
        for j in 0..n {
            let mut acc = 0.0;
            for a in 0..n {
                let qa = q.get(a, i);
                if qa == 0.0 {
                    continue;
                }
                for b in 0..n {
                    acc += qa * r.get(a, b) * q.get(b, j);
                }
            }
            rq.set(i, j, acc);
        }
    }
    for i in 0..n {
        for j in 0..n {
            let denom = sc.v_evals[i] + sc.v_evals[j];
            rq.set(i, j, rq.get(i, j) / denom.max(1e-300));
        }
    }
    // D = Q R' Q^T
    let mut d = SymMat::zeros(n);
    for a in 0..n {
        for b in 0..n {
            let mut acc = 0.0;
            for i in 0..n {
                let qa = q.get(a, i);
                if qa == 0.0 {
                    continue;
                }
                for j in 0..n {
                    acc += qa * rq.get(i, j) * q.get(b, j);
                }
            }
            d.set(a, b, acc);
        }
    }
    d.symmetrize();
    d
}

/// Largest step `alpha` keeping `X + alpha D` PSD (up to `cap`).
fn max_step(x: &SymMat, d: &SymMat, cap: f64) -> f64 {
    let l = match cholesky(x) {
        Some(l) => l,
        None => return 0.0,
    };
    let t = sandwich_inv(&l, d);
    let lam = min_eig(&t);
    if lam >= -1e-14 {
        cap
    } else {
        (-1.0 / lam).min(cap)
    }
}

struct Newton<'p> {
    prob: &'p RealSdp,
    /// constraints listed per block: (row index, coefficient)
    per_block: Vec<Vec<(usize, &'p SparseSym)>>,
    schur_chol: SymMat,
}

impl<'p> Newton<'p> {
    fn new(prob: &'p RealSdp, scal: &[BlockScaling]) -> Option<Self> {
        let m = prob.rows.len();
        let nb = prob.block_dims.len();
        let mut per_block: Vec<Vec<(usize, &SparseSym)>> = vec![Vec::new(); nb];
        for (k, row) in prob.rows.iter().enumerate() {
            for (b, coeff) in &row.terms {
                per_block[*b].push((k, coeff));
            }
        }
        let mut schur = SymMat::zeros(m);
        for (b, rows) in per_block.iter().enumerate() {
            let w = &scal[b].w;
            for &(l, a_l) in rows {
                let v = a_l.sandwich(w);
                for &(k, a_k) in rows {
                    if k > l {
                        continue;
                    }
                    let val = a_k.dot_dense(&v);
                    schur.a[k * m + l] += val;
                    if k != l {
                        schur.a[l * m + k] += val;
                    }
                }
            }
        }
        // Tiny ridge for safety; the rows are independent by construction.
        let maxdiag = (0..m).fold(0.0f64, |acc, i| acc.max(schur.get(i, i)));
        let mut ridge = maxdiag * 1e-14;
        let chol = loop {
            match cholesky(&schur) {
                Some(l) => break l,
                None => {
                    if ridge == 0.0 {
                        ridge = 1e-14;
                    }
                    for i in 0..m {
                        schur.a[i * m + i] += ridge;
                    }
                    ridge *= 1000.0;
                    if ridge > maxdiag.max(1.0) {
                        return None;
                    }
                }
            }
        };
        Some(Newton {
            prob,
            per_block,
            schur_chol: chol,
        })
    }

    /// Solves the scaled Newton system for given residuals and
    /// complementarity target `rc` (per block).
    fn solve(
        &self,
        scal: &[BlockScaling],
        rp: &[f64],
        rd: &[SymMat],
        rc: &[SymMat],
    ) -> (Vec<SymMat>, Vec<f64>, Vec<SymMat>) {
        let nb = self.prob.block_dims.len();
        // rhs_k = rp_k - <A_k, Rc - W Rd W>
        let mut rhs = rp.to_vec();
        for b in 0..nb {
            let w = &scal[b].w;
            let mut inner = rc[b].clone();
            let wrw = {
                let mut t = w.mul(&rd[b]).mul(w);
                t.symmetrize();
                t
            };
            inner.add_scaled(&wrw, -1.0);
            for &(k, a_k) in &self.per_block[b] {
                rhs[k] -= a_k.dot_dense(&inner);
            }
        }
        let mut dy = rhs;
        chol_solve(&self.schur_chol, &mut dy);
        // dS = Rd - A*(dy); dX = Rc - W dS W
        let mut ds = Vec::with_capacity(nb);
        let mut dx = Vec::with_capacity(nb);
        for b in 0..nb {
            let dim = self.prob.block_dims[b];
            let mut s_dir = rd[b].clone();
            let mut astar = SymMat::zeros(dim);
            for &(k, a_k) in &self.per_block[b] {
                a_k.add_into(&mut astar, dy[k]);
            }
            s_dir.add_scaled(&astar, -1.0);
            let w = &scal[b].w;
            let mut x_dir = rc[b].clone();
            let mut wdw = w.mul(&s_dir).mul(w);
            wdw.symmetrize();
            x_dir.add_scaled(&wdw, -1.0);
            x_dir.symmetrize();
            ds.push(s_dir);
            dx.push(x_dir);
        }
        (dx, dy, ds)
    }
}

/// Runs the interior-point iteration on a standard-form problem.
pub fn solve_real_sdp(prob: &RealSdp, opts: &IpmOptions) -> RealSolution {
    let nb = prob.block_dims.len();
    let m = prob.rows.len();
    let total_dim: usize = prob.block_dims.iter().sum();

    let b_scale = prob.b.iter().fold(0.0f64, |a, &v| a.max(v.abs()));
    let c_scale = prob.c.iter().fold(0.0f64, |a, c| a.max(c.max_abs()));
    let a_scale = prob
        .rows
        .iter()
        .flat_map(|r| r.terms.iter())
        .fold(0.0f64, |a, (_, s)| a.max(s.max_abs()));
    let tau = (1.0 + b_scale) / (1.0 + a_scale).sqrt();
    let eta = 1.0 + c_scale;

    let mut x: Vec<SymMat> = prob
        .block_dims
        .iter()
        .map(|&d| SymMat::identity(d, tau.max(1e-3)))
        .collect();
    let mut s: Vec<SymMat> = prob
        .block_dims
        .iter()
        .map(|&d| SymMat::identity(d, eta.max(1e-3)))
        .collect();
    let mut y = vec![0.0; m];

    let mut status = SolveStatus::MaxIterations;
    let mut iterations = opts.max_iters;

    let residuals = |x: &[SymMat], y: &[f64], s: &[SymMat]| -> (Vec<f64>, Vec<SymMat>, f64, f64) {
        let mut rp = vec![0.0; m];
        for (k, row) in prob.rows.iter().enumerate() {
            let mut v = prob.b[k];
            for (b, coeff) in &row.terms {
                v -= coeff.dot_dense(&x[*b]);
            }
            rp[k] = v;
        }
        let mut rd = Vec::with_capacity(nb);
        for b in 0..nb {
            let mut r = prob.c[b].clone();
            r.add_scaled(&s[b], -1.0);
            rd.push(r);
        }
        for (k, row) in prob.rows.iter().enumerate() {
            for (bidx, coeff) in &row.terms {
                coeff.add_into(&mut rd[*bidx], -y[k]);
            }
        }
        let rp_norm = rp.iter().fold(0.0f64, |a, &v| a.max(v.abs())) / (1.0 + b_scale);
        let rd_norm = rd.iter().fold(0.0f64, |a, r| a.max(r.max_abs())) / (1.0 + c_scale);
        (rp, rd, rp_norm, rd_norm)
    };

    for iter in 0..opts.max_iters {
        let (rp, rd, rp_norm, rd_norm) = residuals(&x, &y, &s);
        let mu: f64 = x.iter().zip(&s).map(|(xb, sb)| xb.dot(sb)).sum::<f64>() / total_dim as f64;
        let pobj: f64 = prob.c.iter().zip(&x).map(|(c, xb)| c.dot(xb)).sum();
        let dobj: f64 = prob.b.iter().zip(&y).map(|(b, yv)| b * yv).sum();
        let gap_rel = (mu * total_dim as f64).abs() / (1.0 + pobj.abs() + dobj.abs());

        if gap_rel <= opts.gap_tol && rp_norm <= opts.feas_tol && rd_norm <= opts.feas_tol {
            status = SolveStatus::Optimal;
            iterations = iter;
            break;
        }

        let scal: Vec<BlockScaling> = x.iter().zip(&s).map(|(xb, sb)| nt_scaling(xb, sb)).collect();
        let newton = match Newton::new(prob, &scal) {
            Some(n) => n,
            None => {
                iterations = iter;
                break;
            }
        };

        // Predictor: drive complementarity to zero.
        let rc_aff: Vec<SymMat> = x
            .iter()
            .map(|xb| {
                let mut t = xb.clone();
                t.scale_in_place(-1.0);
                t
            })
            .collect();
        let (dxa, _dya, dsa) = newton.solve(&scal, &rp, &rd, &rc_aff);
        let mut ap = 1.0f64;
        let mut ad = 1.0f64;
        for b in 0..nb {
            ap = ap.min(max_step(&x[b], &dxa[b], 1.0));
            ad = ad.min(max_step(&s[b], &dsa[b], 1.0));
        }
        let mu_aff: f64 = {
            let mut acc = 0.0;
            for b in 0..nb {
                let mut xa = x[b].clone();
                xa.add_scaled(&dxa[b], ap);
                let mut sa = s[b].clone();
                sa.add_scaled(&dsa[b], ad);
                acc += xa.dot(&sa);
            }
            acc / total_dim as f64
        };
        let sigma = (mu_aff / mu).clamp(1e-10, 1.0).powi(3);

        // Corrector with the second-order term in the scaled space.
        let rc: Vec<SymMat> = (0..nb)
            .map(|b| {
                let sc = &scal[b];
                let dim = prob.block_dims[b];
                let dxh = {
                    let mut t = sc.g_inv.mul(&dxa[b]).mul(&sc.g_inv);
                    t.symmetrize();
                    t
                };
                let dsh = {
                    let mut t = sc.g.mul(&dsa[b]).mul(&sc.g);
                    t.symmetrize();
                    t
                };
                let mut theta = dxh.mul(&dsh);
                let theta_t = dsh.mul(&dxh);
                theta.add_scaled(&theta_t, 1.0);
                // R = 2 sigma mu I - 2 V^2 - Theta
                let mut r = SymMat::identity(dim, 2.0 * sigma * mu);
                let v2 = sc.v_q.eigen_recombine(
                    &sc.v_evals.iter().map(|&l| l * l).collect::<Vec<_>>(),
                );
                r.add_scaled(&v2, -2.0);
                r.add_scaled(&theta, -1.0);
                let d = lyap_solve(sc, &r);
                let mut out = sc.g.mul(&d).mul(&sc.g);
                out.symmetrize();
                out
            })
            .collect();

        let (dx, dy, ds) = newton.solve(&scal, &rp, &rd, &rc);
        let gamma = 0.98;
        let mut ap = f64::INFINITY;
        let mut ad = f64::INFINITY;
        for b in 0..nb {
            ap = ap.min(max_step(&x[b], &dx[b], 1.0 / gamma));
            ad = ad.min(max_step(&s[b], &ds[b], 1.0 / gamma));
        }
        let ap = (gamma * ap).min(1.0);
        let ad = (gamma * ad).min(1.0);
        if ap <= 1e-12 && ad <= 1e-12 {
            iterations = iter;
            break;
        }
        for b in 0..nb {
            x[b].add_scaled(&dx[b], ap);
            x[b].symmetrize();
            s[b].add_scaled(&ds[b], ad);
            s[b].symmetrize();
        }
        for (yk, dyk) in y.iter_mut().zip(&dy) {
            *yk += ad * dyk;
        }
        iterations = iter + 1;
    }

    let (_, _, rp_norm, rd_norm) = residuals(&x, &y, &s);
    let gap: f64 = x.iter().zip(&s).map(|(xb, sb)| xb.dot(sb)).sum();
    let primal_obj: f64 = prob.c.iter().zip(&x).map(|(c, xb)| c.dot(xb)).sum();
    let dual_obj: f64 = prob.b.iter().zip(&y).map(|(b, yv)| b * yv).sum();
    RealSolution {
        status,
        x,
        y,
        s,
        primal_obj,
        dual_obj,
        gap,
        primal_residual: rp_norm,
        dual_residual: rd_norm,
        iterations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single_entry(block: usize, r: usize, c: usize, v: f64) -> (usize, SparseSym) {
        let mut s = SparseSym::default();
        s.push(r, c, v);
        (block, s)
    }

    #[test]
    fn scalar_problem() {
        // min x s.t. x = 1, x >= 0
        let prob = RealSdp {
            block_dims: vec![1],
            c: vec![SymMat::identity(1, 1.0)],
            rows: vec![ConstraintRow {
                terms: vec![single_entry(0, 0, 0, 1.0)],
            }],
            b: vec![1.0],
        };
        let sol = solve_real_sdp(&prob, &IpmOptions::default());
        assert_eq!(sol.status, SolveStatus::Optimal);
        assert!((sol.primal_obj - 1.0).abs() <= 1e-6);
        assert!((sol.dual_obj - 1.0).abs() <= 1e-6);
    }

    #[test]
    fn trace_minimization_with_offdiagonal_pin() {
        // min Tr(X) s.t. X_01 + X_10 = 2, X >= 0 -> optimum 2 at [[1,1],[1,1]].
        let mut pin = SparseSym::default();
        pin.push(0, 1, 1.0);
        let prob = RealSdp {
            block_dims: vec![2],
            c: vec![SymMat::identity(2, 1.0)],
            rows: vec![ConstraintRow {
                terms: vec![(0, pin)],
            }],
            b: vec![2.0],
        };
        let sol = solve_real_sdp(&prob, &IpmOptions::default());
        assert_eq!(sol.status, SolveStatus::Optimal);
        assert!((sol.primal_obj - 2.0).abs() <= 1e-6, "{}", sol.primal_obj);
        assert!((sol.x[0].get(0, 1) - 1.0).abs() <= 1e-5);
    }

    #[test]
    fn projector_capture_with_slack_block() {
        // max <P, E> s.t. E + F = I, E, F >= 0 with P = e0 e0^T (dim 3).
        // In min form: c_E = -P. Optimum -1.
        let dim = 3;
        let mut c_e = SymMat::zeros(dim);
        c_e.set(0, 0, -1.0);
        let mut rows = Vec::new();
        let mut b = Vec::new();
        for r in 0..dim {
            for c in r..dim {
                let mut row = ConstraintRow::default();
                let mut a_e = SparseSym::default();
                a_e.push(r, c, 1.0);
                let mut a_f = SparseSym::default();
                a_f.push(r, c, 1.0);
                row.terms.push((0, a_e));
                row.terms.push((1, a_f));
                rows.push(row);
                b.push(if r == c { 1.0 } else { 0.0 });
            }
        }
        let prob = RealSdp {
            block_dims: vec![dim, dim],
            c: vec![c_e, SymMat::zeros(dim)],
            rows,
            b,
        };
        let sol = solve_real_sdp(&prob, &IpmOptions::default());
        assert_eq!(sol.status, SolveStatus::Optimal);
        assert!((sol.primal_obj + 1.0).abs() <= 1e-6, "{}", sol.primal_obj);
        assert!((sol.dual_obj + 1.0).abs() <= 1e-6, "{}", sol.dual_obj);
        // Weak duality at the reported point (min form: dual <= primal).
        assert!(sol.dual_obj <= sol.primal_obj + 1e-9);
        // The dual certificate reproduces the bound: S_E = C_E - A*(y) >= 0.
        assert!(min_eig(&sol.s[0]) >= -1e-9);
        assert!(min_eig(&sol.s[1]) >= -1e-9);
    }

    #[test]
    fn reports_partial_iterate_on_iteration_cap() {
        let prob = RealSdp {
            block_dims: vec![2],
            c: vec![SymMat::identity(2, 1.0)],
            rows: vec![ConstraintRow {
                terms: vec![single_entry(0, 0, 0, 1.0)],
            }],
            b: vec![1.0],
        };
        let sol = solve_real_sdp(
            &prob,
            &IpmOptions {
                max_iters: 1,
                ..Default::default()
            },
        );
        assert_eq!(sol.status, SolveStatus::MaxIterations);
        assert!(sol.x[0].n == 2);
    }
}
