use nalgebra::DMatrix;
use nalgebra_sparse::{CooMatrix, CsrMatrix};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Sparse complex operator used inside master-equation right-hand sides.
#[derive(Debug, Clone)]
pub struct SparseOp {
    m: CsrMatrix<C64>,
}

impl SparseOp {
    /// Drops exact zeros of a dense matrix.
    pub fn from_dense(d: &DMatrix<C64>) -> Self {
        let mut coo = CooMatrix::new(d.nrows(), d.ncols());
        for j in 0..d.ncols() {
            for i in 0..d.nrows() {
                let v = d[(i, j)];
                if v != C64::new(0.0, 0.0) {
                    coo.push(i, j, v);
                }
            }
        }
        SparseOp {
            m: CsrMatrix::from(&coo),
        }
    }

    pub fn nrows(&self) -> usize {
        self.m.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.m.ncols()
    }

    pub fn nnz(&self) -> usize {
        self.m.nnz()
    }

    pub fn adjoint(&self) -> Self {
        let mut t = self.m.transpose();
        for v in t.values_mut() {
            *v = v.conj();
        }
        SparseOp { m: t }
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        let mut d = DMatrix::zeros(self.nrows(), self.ncols());
        for (i, j, v) in self.m.triplet_iter() {
            d[(i, j)] += *v;
        }
        d
    }

    /// `out += c · A X`.
    pub fn gemm_left(&self, c: C64, x: &DMatrix<C64>, out: &mut DMatrix<C64>) {
        debug_assert_eq!(self.ncols(), x.nrows());
        let (offsets, cols, vals) = self.m.csr_data();
        let (n, m) = (x.nrows(), self.nrows());
        let xs = x.as_slice();
        let os = out.as_mut_slice();
        for j in 0..x.ncols() {
            let xc = &xs[j * n..(j + 1) * n];
            let oc = &mut os[j * m..(j + 1) * m];
            for i in 0..m {
                let mut s = C64::new(0.0, 0.0);
                for p in offsets[i]..offsets[i + 1] {
                    s += vals[p] * xc[cols[p]];
                }
                oc[i] += c * s;
            }
        }
    }

    /// `out += c · X A`.
    pub fn gemm_right(&self, c: C64, x: &DMatrix<C64>, out: &mut DMatrix<C64>) {
        debug_assert_eq!(x.ncols(), self.nrows());
        let (offsets, cols, vals) = self.m.csr_data();
        let n = x.nrows();
        let xs = x.as_slice();
        let os = out.as_mut_slice();
        for i in 0..self.nrows() {
            let xc = &xs[i * n..(i + 1) * n];
            for p in offsets[i]..offsets[i + 1] {
                let cv = c * vals[p];
                let j = cols[p];
                for (o, &xv) in os[j * n..(j + 1) * n].iter_mut().zip(xc) {
                    *o += cv * xv;
                }
            }
        }
    }
}

/// Lindblad generator `ρ̇ = −i(Gρ − ρG†) + Σ JρJ†` with
/// `G = H − (i/2) Σ J†J`.
#[derive(Debug, Clone)]
pub struct Generator {
    dim: usize,
    g: SparseOp,
    g_adj: SparseOp,
    jumps: Vec<(SparseOp, SparseOp)>,
}

impl Generator {
    /// `jumps` carry their rates, i.e. `√γ o`.
    pub fn new(h: &DMatrix<C64>, jumps: &[DMatrix<C64>]) -> Result<Self> {
        let dim = h.nrows();
        if h.ncols() != dim {
            return Err(Error::Layout("Hamiltonian must be square".into()));
        }
        let herm = crate::fock::operator::hermiticity_residual(h);
        if herm > crate::fock::operator::scaled_tol(h) {
            return Err(Error::InvalidParameter(format!(
                "Hamiltonian is not Hermitian (residual {herm:.3e})"
            )));
        }
        let mut g = h.clone();
        let mut sparse_jumps = Vec::with_capacity(jumps.len());
        for j in jumps {
            if j.nrows() != dim || j.ncols() != dim {
                return Err(Error::Layout(format!(
                    "jump operator is {}x{}, expected {dim}x{dim}",
                    j.nrows(),
                    j.ncols()
                )));
            }
            let jd = j.adjoint();
            g -= (&jd * j) * C64::new(0.0, 0.5);
            sparse_jumps.push((SparseOp::from_dense(j), SparseOp::from_dense(&jd)));
        }
        let g = SparseOp::from_dense(&g);
        Ok(Generator {
            dim,
            g_adj: g.adjoint(),
            g,
            jumps: sparse_jumps,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Heisenberg-picture generator: `Ė = i(G†E − EG) + Σ J†EJ`.
    pub fn adjoint(&self) -> Generator {
        let neg = C64::new(-1.0, 0.0);
        let scale = |s: &SparseOp| {
            let mut t = s.clone();
            for v in t.m.values_mut() {
                *v *= neg;
            }
            t
        };
        Generator {
            dim: self.dim,
            g: scale(&self.g_adj),
            g_adj: scale(&self.g),
            jumps: self.jumps.iter().map(|(j, jd)| (jd.clone(), j.clone())).collect(),
        }
    }
}

/// Right-hand side acting on a matrix.
pub trait MatrixRhs {
    fn eval(&self, x: &DMatrix<C64>, out: &mut DMatrix<C64>);
}

/// Master-equation action on an operator block `X` mapping the right space
/// to the left space. With `left == right` this is the usual Liouvillian.
#[derive(Debug, Clone, Copy)]
pub struct Liouvillian<'a> {
    pub left: &'a Generator,
    pub right: &'a Generator,
}

impl<'a> Liouvillian<'a> {
    pub fn new(g: &'a Generator) -> Self {
        Liouvillian { left: g, right: g }
    }
}

impl MatrixRhs for Liouvillian<'_> {
    fn eval(&self, x: &DMatrix<C64>, out: &mut DMatrix<C64>) {
        let i = C64::new(0.0, 1.0);
        out.fill(C64::new(0.0, 0.0));
        self.left.g.gemm_left(-i, x, out);
        self.right.g_adj.gemm_right(i, x, out);
        let one = C64::new(1.0, 0.0);
        let mut tmp = DMatrix::zeros(x.nrows(), x.ncols());
        for ((jl, _), (_, jrd)) in self.left.jumps.iter().zip(&self.right.jumps) {
            tmp.fill(C64::new(0.0, 0.0));
            jl.gemm_left(one, x, &mut tmp);
            jrd.gemm_right(one, &tmp, out);
        }
    }
}
